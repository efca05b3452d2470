#pragma once

// Brute-force reference implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dpscan/evaluation.hpp"
#include "dpscan/raster.hpp"
#include "dpscan/vision.hpp"

namespace oracle {

using dpscan::BoundingBox;
using dpscan::Detection;

/// IoU by counting covered unit cells.
inline double iou_cells(const BoundingBox& a, const BoundingBox& b) {
    std::int64_t inter = 0;
    std::int64_t uni = 0;
    const int x_lo = std::min(a.x1, b.x1), x_hi = std::max(a.x2, b.x2);
    const int y_lo = std::min(a.y1, b.y1), y_hi = std::max(a.y2, b.y2);
    for (int y = y_lo; y < y_hi; ++y) {
        for (int x = x_lo; x < x_hi; ++x) {
            const bool in_a = x >= a.x1 && x < a.x2 && y >= a.y1 && y < a.y2;
            const bool in_b = x >= b.x1 && x < b.x2 && y >= b.y1 && y < b.y2;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Every cross-backend pair is compared; a detection survives only if it loses no conflict.
inline std::vector<Detection> fuse(const std::vector<std::vector<Detection>>& per_backend,
                                   double iou_thr, double min_conf) {
    struct Item {
        Detection d;
        std::size_t backend;
    };
    std::vector<Item> items;
    for (std::size_t b = 0; b < per_backend.size(); ++b) {
        for (const auto& d : per_backend[b]) {
            if (d.confidence >= min_conf) items.push_back({d, b});
        }
    }
    std::vector<Detection> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        bool loses = false;
        for (std::size_t j = 0; j < items.size() && !loses; ++j) {
            if (i == j || items[i].backend == items[j].backend) continue;
            if (iou_cells(items[i].d.box, items[j].d.box) < iou_thr) continue;
            const auto& me = items[i];
            const auto& other = items[j];
            const bool other_wins = other.d.confidence > me.d.confidence ||
                                    (other.d.confidence == me.d.confidence && other.backend < me.backend);
            loses = other_wins;
        }
        if (!loses) out.push_back(items[i].d);
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        return std::tie(a.box.y1, a.box.x1, a.box.y2, a.box.x2, a.kind, a.confidence, a.source) <
               std::tie(b.box.y1, b.box.x1, b.box.y2, b.box.x2, b.kind, b.confidence, b.source);
    });
    return out;
}

/// Background and font colour by full pixel count over quantized bins.
struct Colors {
    dpscan::Rgb bg;
    dpscan::Rgb font;
    bool fallback = false;
};

inline Colors colors(const dpscan::Raster& img, const BoundingBox& box, int step) {
    std::map<std::tuple<int, int, int>, std::map<std::tuple<int, int, int>, int>> bins;
    for (int y = box.y1; y < box.y2; ++y) {
        for (int x = box.x1; x < box.x2; ++x) {
            const auto c = img.at(x, y);
            bins[{c.r / step, c.g / step, c.b / step}][{c.r, c.g, c.b}] += 1;
        }
    }
    struct Ranked {
        int count;
        std::tuple<int, int, int> key;
        dpscan::Rgb rep;
    };
    std::vector<Ranked> ranked;
    for (const auto& [key, exact] : bins) {
        int total = 0;
        std::tuple<int, int, int> best{};
        int best_n = -1;
        for (const auto& [c, n] : exact) {
            total += n;
            if (n > best_n) {  // map order makes the smallest colour win ties
                best = c;
                best_n = n;
            }
        }
        ranked.push_back({total, key,
                          {static_cast<std::uint8_t>(std::get<0>(best)),
                           static_cast<std::uint8_t>(std::get<1>(best)),
                           static_cast<std::uint8_t>(std::get<2>(best))}});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        return a.count != b.count ? a.count > b.count : a.key < b.key;
    });
    Colors out;
    out.bg = ranked[0].rep;
    if (ranked.size() > 1) {
        out.font = ranked[1].rep;
    } else {
        out.font = out.bg.complement();
        out.fallback = true;
    }
    return out;
}

/// Per-label (tp, fp, fn) from a full confusion matrix.
inline std::map<std::string, dpscan::Counts> confusion_counts(const std::vector<std::string>& pred,
                                                              const std::vector<std::string>& gold,
                                                              const std::vector<std::string>& labels) {
    std::map<std::pair<std::string, std::string>, std::size_t> matrix;
    for (std::size_t i = 0; i < pred.size(); ++i) ++matrix[{gold[i], pred[i]}];
    std::map<std::string, dpscan::Counts> out;
    for (const auto& l : labels) {
        dpscan::Counts c;
        c.tp = matrix[{l, l}];
        for (const auto& other : labels) {
            if (other == l) continue;
            c.fp += matrix[{other, l}];
            c.fn += matrix[{l, other}];
        }
        out[l] = c;
    }
    return out;
}

/// Maximum-cardinality matching of predictions to gold (same class, IoU > thr), by
/// exhaustive search. Suitable for a handful of boxes per class.
inline std::size_t max_matches(const std::vector<BoundingBox>& preds, const std::vector<BoundingBox>& gold,
                               double iou_thr) {
    std::vector<bool> used(gold.size(), false);
    std::function<std::size_t(std::size_t)> go = [&](std::size_t i) -> std::size_t {
        if (i == preds.size()) return 0;
        std::size_t best = go(i + 1);
        for (std::size_t j = 0; j < gold.size(); ++j) {
            if (used[j] || iou_cells(preds[i], gold[j]) <= iou_thr) continue;
            used[j] = true;
            best = std::max(best, 1 + go(i + 1));
            used[j] = false;
        }
        return best;
    };
    return go(0);
}

/// Train-record count closest to ratio x total over every site subset that leaves both
/// sides non-empty.
inline std::size_t best_train_count(const std::vector<std::size_t>& site_sizes, double ratio) {
    const std::size_t n = site_sizes.size();
    const std::size_t total = std::accumulate(site_sizes.begin(), site_sizes.end(), std::size_t{0});
    const double target = ratio * static_cast<double>(total);
    double best_diff = 1e300;
    std::size_t best = 0;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
        std::size_t train = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) train += site_sizes[i];
        }
        const double diff = std::abs(static_cast<double>(train) - target);
        if (diff < best_diff) {
            best_diff = diff;
            best = train;
        }
    }
    return best;
}

}  // namespace oracle
