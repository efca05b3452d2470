#pragma once

#include <optional>
#include <vector>

#include "dpscan/element_map.hpp"
#include "dpscan/vision.hpp"

namespace dpscan {

struct MatchConfig {
    /// Minimum fraction of a text block's area that must lie inside a button.
    double button_overlap_min = 0.7;
    /// Maximum horizontal gap between a pairable element and its label; unset means
    /// 1.5 x element height.
    std::optional<double> pair_max_distance;
    /// Allowed vertical centre offset, as a fraction of element height.
    double pair_vertical_band = 1.0;
    /// Colours for element rows that found no text block.
    Rgb unmatched_bg = kWhite;
    Rgb unmatched_font = kBlack;

    void validate() const;
};

/// Joins fused detections with text blocks into an ElementMap.
///
/// Buttons claim the text block with the largest fraction of its area inside the
/// button (at least button_overlap_min). Checkboxes, radios and toggles claim the
/// nearest label whose vertical centre is within the band and whose horizontal gap is
/// within pair_max_distance, preferring labels to the right. Claims are resolved
/// greedily: button claims first, then pairable claims by side preference and
/// ascending centre distance; each text block and each element is used at most once.
/// A matched pair becomes one row with the element kind, the text block's text, font
/// and colours, and the union of both boxes. Rows are numbered in reading order.
ElementMap build_element_map(const std::vector<TextBlock>& texts,
                             const std::vector<Detection>& detections,
                             const MatchConfig& cfg = {}, std::string source = {});

}  // namespace dpscan
