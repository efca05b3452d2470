#include "dpscan/element_map.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace dpscan {

const ElementRow* ElementMap::find(int line_id) const noexcept {
    auto it = std::lower_bound(rows.begin(), rows.end(), line_id,
                               [](const ElementRow& r, int id) { return r.line_id < id; });
    if (it != rows.end() && it->line_id == line_id) return &*it;
    // Fall back to a scan for maps that are not (yet) numbered in order.
    for (const auto& r : rows) {
        if (r.line_id == line_id) return &r;
    }
    return nullptr;
}

bool same_reading_band(const BoundingBox& a, const BoundingBox& b) noexcept {
    const int dy = a.y1 > b.y1 ? a.y1 - b.y1 : b.y1 - a.y1;
    const int h = std::min(a.height(), b.height());
    return 2 * dy < h;
}

namespace {

// Groups indices (already in top-y order) into bands and orders each band by x.
template <typename Less>
std::vector<std::size_t> band_order(const std::vector<BoundingBox>& boxes, Less less) {
    std::vector<std::size_t> idx(boxes.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& ba = boxes[a];
        const auto& bb = boxes[b];
        if (std::tie(ba.y1, ba.x1, ba.y2, ba.x2) != std::tie(bb.y1, bb.x1, bb.y2, bb.x2)) {
            return std::tie(ba.y1, ba.x1, ba.y2, ba.x2) < std::tie(bb.y1, bb.x1, bb.y2, bb.x2);
        }
        return less(a, b);
    });

    std::vector<std::size_t> out;
    out.reserve(idx.size());
    std::vector<bool> used(idx.size(), false);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (used[i]) continue;
        const auto& anchor = boxes[idx[i]];
        std::vector<std::size_t> band{idx[i]};
        used[i] = true;
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            const auto& cand = boxes[idx[j]];
            // Sorted by top y: nothing further down can join once past the anchor height.
            if (2 * (cand.y1 - anchor.y1) >= anchor.height()) break;
            if (!used[j] && same_reading_band(anchor, cand)) {
                band.push_back(idx[j]);
                used[j] = true;
            }
        }
        std::stable_sort(band.begin(), band.end(), [&](std::size_t a, std::size_t b) {
            const auto& ba = boxes[a];
            const auto& bb = boxes[b];
            return std::tie(ba.x1, ba.y1, ba.x2, ba.y2) < std::tie(bb.x1, bb.y1, bb.x2, bb.y2);
        });
        out.insert(out.end(), band.begin(), band.end());
    }
    return out;
}

}  // namespace

std::vector<std::size_t> reading_order(const std::vector<BoundingBox>& boxes) {
    return band_order(boxes, [](std::size_t a, std::size_t b) { return a < b; });
}

void sort_and_number(std::vector<ElementRow>& rows) {
    std::vector<BoundingBox> boxes;
    boxes.reserve(rows.size());
    for (const auto& r : rows) boxes.push_back(r.box);
    // Rows sharing a box are ordered by content so the result is input-order independent.
    auto order = band_order(boxes, [&](std::size_t a, std::size_t b) {
        const auto& ra = rows[a];
        const auto& rb = rows[b];
        return std::tie(ra.kind, ra.text, ra.font_size, ra.bg_color, ra.font_color, a) <
               std::tie(rb.kind, rb.text, rb.font_size, rb.bg_color, rb.font_color, b);
    });
    std::vector<ElementRow> sorted;
    sorted.reserve(rows.size());
    for (std::size_t i : order) sorted.push_back(std::move(rows[i]));
    for (std::size_t i = 0; i < sorted.size(); ++i) sorted[i].line_id = static_cast<int>(i + 1);
    rows = std::move(sorted);
}

std::string validate(const ElementMap& map) {
    int prev = 0;
    for (const auto& r : map.rows) {
        const std::string where = "row Line " + std::to_string(r.line_id);
        if (r.line_id <= prev) return where + ": line ids must be positive and strictly increasing";
        prev = r.line_id;
        if (!r.box.valid()) return where + ": invalid bounding box " + to_string(r.box);
        if (r.font_size < 0) return where + ": negative font size";
        if (r.kind == UIElementKind::text && r.font_size != r.box.height()) {
            return where + ": text row font size must equal box height";
        }
    }
    return {};
}

}  // namespace dpscan
