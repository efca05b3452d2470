#include "dpscan/element_map_builder.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "dpscan/errors.hpp"

namespace dpscan {

void MatchConfig::validate() const {
    if (!(button_overlap_min > 0.0 && button_overlap_min <= 1.0)) {
        throw ConfigError("button_overlap_min must be in (0, 1]");
    }
    if (pair_max_distance && *pair_max_distance < 0.0) {
        throw ConfigError("pair_max_distance must be >= 0");
    }
    if (pair_vertical_band < 0.0) throw ConfigError("pair_vertical_band must be >= 0");
}

namespace {

struct Claim {
    int tier;          // 0 = button, 1 = pairable
    double primary;    // buttons: -contained fraction; pairables: 0 right / 1 left
    double distance;   // centre distance
    std::size_t det;   // index into canonical detections
    std::size_t text;  // index into canonical texts
};

bool text_less(const TextBlock& a, const TextBlock& b) {
    return std::tie(a.box, a.text, a.font_size, a.bg_color, a.font_color) <
           std::tie(b.box, b.text, b.font_size, b.bg_color, b.font_color);
}

bool det_less(const Detection& a, const Detection& b) {
    return std::tie(a.box, a.kind, a.confidence, a.source) <
           std::tie(b.box, b.kind, b.confidence, b.source);
}

}  // namespace

ElementMap build_element_map(const std::vector<TextBlock>& texts_in,
                             const std::vector<Detection>& dets_in, const MatchConfig& cfg,
                             std::string source) {
    cfg.validate();
    // Canonical order makes the greedy matching independent of input order.
    std::vector<TextBlock> texts = texts_in;
    std::vector<Detection> dets = dets_in;
    std::sort(texts.begin(), texts.end(), text_less);
    std::sort(dets.begin(), dets.end(), det_less);

    std::vector<Claim> claims;
    for (std::size_t d = 0; d < dets.size(); ++d) {
        const auto& det = dets[d];
        if (det.kind == UIElementKind::text) continue;
        for (std::size_t t = 0; t < texts.size(); ++t) {
            const auto& tb = texts[t].box;
            const double dist = center_distance(det.box, tb);
            if (det.kind == UIElementKind::button) {
                if (tb.area() == 0) continue;
                const double inside = static_cast<double>(intersection_area(det.box, tb)) /
                                      static_cast<double>(tb.area());
                if (inside >= cfg.button_overlap_min) claims.push_back({0, -inside, dist, d, t});
            } else {
                const double h = det.box.height();
                const double band = cfg.pair_vertical_band * h;
                const double max_gap = cfg.pair_max_distance.value_or(1.5 * h);
                if (std::abs(tb.center_y() - det.box.center_y()) > band) continue;
                if (horizontal_gap(det.box, tb) > max_gap) continue;
                const double side = tb.center_x() >= det.box.center_x() ? 0.0 : 1.0;
                claims.push_back({1, side, dist, d, t});
            }
        }
    }
    std::sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
        return std::tie(a.tier, a.primary, a.distance, a.det, a.text) <
               std::tie(b.tier, b.primary, b.distance, b.det, b.text);
    });

    std::vector<int> text_of_det(dets.size(), -1);
    std::vector<bool> text_used(texts.size(), false);
    for (const auto& c : claims) {
        if (text_of_det[c.det] >= 0 || text_used[c.text]) continue;
        text_of_det[c.det] = static_cast<int>(c.text);
        text_used[c.text] = true;
    }

    std::vector<ElementRow> rows;
    rows.reserve(dets.size() + texts.size());
    for (std::size_t d = 0; d < dets.size(); ++d) {
        ElementRow row;
        row.kind = dets[d].kind;
        if (text_of_det[d] >= 0) {
            const auto& tb = texts[static_cast<std::size_t>(text_of_det[d])];
            row.text = tb.text;
            row.box = union_box(dets[d].box, tb.box);
            row.font_size = tb.font_size;
            row.bg_color = tb.bg_color;
            row.font_color = tb.font_color;
        } else {
            row.box = dets[d].box;
            row.font_size = 0;
            row.bg_color = cfg.unmatched_bg;
            row.font_color = cfg.unmatched_font;
        }
        rows.push_back(std::move(row));
    }
    for (std::size_t t = 0; t < texts.size(); ++t) {
        if (text_used[t]) continue;
        const auto& tb = texts[t];
        rows.push_back({0, tb.text, UIElementKind::text, tb.box, tb.font_size, tb.bg_color,
                        tb.font_color});
    }
    sort_and_number(rows);
    return ElementMap{std::move(rows), std::move(source)};
}

}  // namespace dpscan
