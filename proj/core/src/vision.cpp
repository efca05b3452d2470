#include "dpscan/vision.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "dpscan/element_map.hpp"
#include "dpscan/errors.hpp"

namespace dpscan {

void VisionConfig::validate() const {
    if (merge_gap_x && *merge_gap_x < 0) throw ConfigError("merge_gap_x must be >= 0");
    if (merge_gap_y && *merge_gap_y < 0) throw ConfigError("merge_gap_y must be >= 0");
    if (!(fusion_overlap_iou > 0.0 && fusion_overlap_iou <= 1.0)) {
        throw ConfigError("fusion_overlap_iou must be in (0, 1]");
    }
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
        throw ConfigError("min_confidence must be in [0, 1]");
    }
    if (color_quantization_step < 1 || color_quantization_step > 256) {
        throw ConfigError("color_quantization_step must be in [1, 256]");
    }
}

// ---------------------------------------------------------------------------
// OCR block merging

namespace {

std::size_t line_count(const OcrBlock& b) {
    return static_cast<std::size_t>(std::count(b.text.begin(), b.text.end(), '\n')) + 1;
}

double line_height(const OcrBlock& b) {
    return static_cast<double>(b.box.height()) / static_cast<double>(line_count(b));
}

bool on_same_line(const BoundingBox& a, const BoundingBox& b) {
    return 2 * vertical_overlap(a, b) >= std::min(a.height(), b.height());
}

void to_reading_order(std::vector<OcrBlock>& blocks) {
    std::vector<BoundingBox> boxes;
    boxes.reserve(blocks.size());
    for (const auto& b : blocks) boxes.push_back(b.box);
    std::vector<OcrBlock> out;
    out.reserve(blocks.size());
    for (std::size_t i : reading_order(boxes)) out.push_back(std::move(blocks[i]));
    blocks = std::move(out);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

// Joins single-line blocks that share a visual line and sit within the gap.
bool merge_horizontal(std::vector<OcrBlock>& blocks, const VisionConfig& cfg) {
    std::vector<std::size_t> single;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (line_count(blocks[i]) == 1) single.push_back(i);
    }
    std::vector<std::size_t> parent(blocks.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t a = 0; a < single.size(); ++a) {
        for (std::size_t b = a + 1; b < single.size(); ++b) {
            if (on_same_line(blocks[single[a]].box, blocks[single[b]].box)) {
                parent[find_root(parent, single[a])] = find_root(parent, single[b]);
            }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> lines;
    for (std::size_t i : single) lines[find_root(parent, i)].push_back(i);

    bool changed = false;
    std::vector<bool> consumed(blocks.size(), false);
    std::vector<OcrBlock> merged_out;
    for (auto& [root, members] : lines) {
        if (members.size() < 2) continue;
        std::vector<double> heights;
        for (std::size_t i : members) heights.push_back(blocks[i].box.height());
        const double gap = cfg.merge_gap_x.value_or(0.6 * median(heights));
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(blocks[a].box.x1, blocks[a].box.y1, blocks[a].text) <
                   std::tie(blocks[b].box.x1, blocks[b].box.y1, blocks[b].text);
        });
        std::size_t cur = members.front();
        for (std::size_t k = 1; k < members.size(); ++k) {
            const std::size_t nxt = members[k];
            auto& c = blocks[cur];
            const auto& n = blocks[nxt];
            if (n.box.x1 - c.box.x2 <= gap && on_same_line(c.box, n.box)) {
                c.text += ' ';
                c.text += n.text;
                c.box = union_box(c.box, n.box);
                consumed[nxt] = true;
                changed = true;
            } else {
                cur = nxt;
            }
        }
    }
    if (changed) {
        std::vector<OcrBlock> kept;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (!consumed[i]) kept.push_back(std::move(blocks[i]));
        }
        blocks = std::move(kept);
    }
    return changed;
}

// Joins a block with the nearest horizontally overlapping block directly below it.
bool merge_vertical(std::vector<OcrBlock>& blocks, const VisionConfig& cfg) {
    bool changed = false;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (;;) {
            const auto& a = blocks[i];
            std::size_t best = blocks.size();
            int best_gap = 0;
            for (std::size_t j = 0; j < blocks.size(); ++j) {
                if (j == i) continue;
                const auto& b = blocks[j];
                if (!(b.box.center_y() > a.box.center_y())) continue;
                if (!(a.box.x1 < b.box.x2 && b.box.x1 < a.box.x2)) continue;
                const int vgap = b.box.y1 - a.box.y2;
                const double limit =
                    cfg.merge_gap_y.value_or(0.4 * std::max(line_height(a), line_height(b)));
                if (vgap > limit) continue;
                if (best == blocks.size() || vgap < best_gap ||
                    (vgap == best_gap && std::tie(b.box.x1, b.text) <
                                             std::tie(blocks[best].box.x1, blocks[best].text))) {
                    best = j;
                    best_gap = vgap;
                }
            }
            if (best == blocks.size()) break;
            blocks[i].text += '\n';
            blocks[i].text += blocks[best].text;
            blocks[i].box = union_box(blocks[i].box, blocks[best].box);
            blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(best));
            if (best < i) --i;
            changed = true;
        }
    }
    return changed;
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<OcrBlock> merge_ocr_blocks(std::vector<OcrBlock> blocks, const VisionConfig& cfg) {
    cfg.validate();
    std::erase_if(blocks, [](const OcrBlock& b) { return blank(b.text) || !b.box.valid(); });
    // Canonical start so the result does not depend on the backend's emission order.
    std::sort(blocks.begin(), blocks.end(), [](const OcrBlock& a, const OcrBlock& b) {
        return std::tie(a.box, a.text) < std::tie(b.box, b.text);
    });
    for (;;) {
        const bool h = merge_horizontal(blocks, cfg);
        const bool v = merge_vertical(blocks, cfg);
        if (!h && !v) break;
    }
    to_reading_order(blocks);
    return blocks;
}

// ---------------------------------------------------------------------------
// Text features

TextBlock text_features(const Raster& image, const OcrBlock& block, const VisionConfig& cfg) {
    if (block.box.area() == 0) {
        throw InvalidArgument("zero-area OCR box " + to_string(block.box) +
                              " (malformed OCR output)");
    }
    const BoundingBox clip{std::max(block.box.x1, 0), std::max(block.box.y1, 0),
                           std::min(block.box.x2, image.width()),
                           std::min(block.box.y2, image.height())};
    if (clip.x1 >= clip.x2 || clip.y1 >= clip.y2) {
        throw InvalidArgument("OCR box " + to_string(block.box) + " lies outside the image");
    }

    struct Bin {
        std::size_t count = 0;
        std::unordered_map<std::uint32_t, std::size_t> exact;
    };
    const int step = cfg.color_quantization_step;
    std::unordered_map<std::uint32_t, Bin> bins;
    for (int y = clip.y1; y < clip.y2; ++y) {
        for (int x = clip.x1; x < clip.x2; ++x) {
            const Rgb c = image.at(x, y);
            const std::uint32_t key = (static_cast<std::uint32_t>(c.r / step) << 16) |
                                      (static_cast<std::uint32_t>(c.g / step) << 8) |
                                      static_cast<std::uint32_t>(c.b / step);
            auto& bin = bins[key];
            ++bin.count;
            ++bin.exact[c.packed()];
        }
    }

    std::vector<std::pair<std::uint32_t, const Bin*>> ranked;
    ranked.reserve(bins.size());
    for (const auto& [key, bin] : bins) ranked.emplace_back(key, &bin);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second->count != b.second->count) return a.second->count > b.second->count;
        return a.first < b.first;
    });
    // Representative colour of a bin: its most frequent exact colour.
    auto modal = [](const Bin& bin) {
        std::uint32_t best = 0;
        std::size_t best_count = 0;
        for (const auto& [packed, n] : bin.exact) {
            if (n > best_count || (n == best_count && packed < best)) {
                best = packed;
                best_count = n;
            }
        }
        return Rgb{static_cast<std::uint8_t>(best >> 16), static_cast<std::uint8_t>(best >> 8),
                   static_cast<std::uint8_t>(best)};
    };

    TextBlock out;
    out.text = block.text;
    out.box = block.box;
    out.font_size = block.box.height();
    out.bg_color = modal(*ranked[0].second);
    if (ranked.size() > 1) {
        out.font_color = modal(*ranked[1].second);
    } else {
        out.font_color = out.bg_color.complement();
        out.color_fallback = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Detection fusion

std::vector<Detection> fuse_detections(const std::vector<std::vector<Detection>>& per_backend,
                                       const VisionConfig& cfg) {
    cfg.validate();
    struct Entry {
        const Detection* det;
        std::size_t backend;
    };
    std::vector<Entry> entries;
    for (std::size_t b = 0; b < per_backend.size(); ++b) {
        for (const auto& d : per_backend[b]) {
            if (!d.valid()) {
                throw InvalidArgument("invalid detection " + to_string(d.box) + " from '" +
                                      d.source + "'");
            }
            if (d.confidence < cfg.min_confidence) continue;
            entries.push_back({&d, b});
        }
    }
    // Sweep over x: only boxes whose x-extents overlap can reach a positive IoU.
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.det->box.x1 < b.det->box.x1; });
    std::vector<bool> lost(entries.size(), false);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& a = entries[i];
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            const auto& b = entries[j];
            if (b.det->box.x1 >= a.det->box.x2) break;
            if (a.backend == b.backend) continue;
            if (iou(a.det->box, b.det->box) < cfg.fusion_overlap_iou) continue;
            const bool a_wins = a.det->confidence > b.det->confidence ||
                                (a.det->confidence == b.det->confidence && a.backend < b.backend);
            lost[a_wins ? j : i] = true;
        }
    }
    std::vector<Detection> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!lost[i]) out.push_back(*entries[i].det);
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        return std::tie(a.box.y1, a.box.x1, a.box.y2, a.box.x2, a.kind, a.confidence, a.source) <
               std::tie(b.box.y1, b.box.x1, b.box.y2, b.box.x2, b.kind, b.confidence, b.source);
    });
    return out;
}

// ---------------------------------------------------------------------------

VisionResult run_vision(const Raster& image, OcrBackend& ocr,
                        const std::vector<DetectorBackend*>& detectors,
                        const VisionConfig& cfg) {
    cfg.validate();
    VisionResult result;

    std::vector<OcrBlock> raw;
    try {
        raw = ocr.recognize(image);
    } catch (const BackendError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError(ocr.id(), e.what());
    }
    for (const auto& block : merge_ocr_blocks(std::move(raw), cfg)) {
        try {
            result.texts.push_back(text_features(image, block, cfg));
        } catch (const InvalidArgument& e) {
            throw BackendError(ocr.id(), e.what());
        }
    }

    std::vector<std::vector<Detection>> per_backend;
    per_backend.reserve(detectors.size());
    for (auto* det : detectors) {
        try {
            auto found = det->detect(image);
            for (auto& d : found) {
                if (d.source.empty()) d.source = det->id();
            }
            per_backend.push_back(std::move(found));
        } catch (const BackendError&) {
            throw;
        } catch (const std::exception& e) {
            throw BackendError(det->id(), e.what());
        }
    }
    result.detections = fuse_detections(per_backend, cfg);
    return result;
}

}  // namespace dpscan
