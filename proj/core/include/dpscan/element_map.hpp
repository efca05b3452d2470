#pragma once

#include <string>
#include <vector>

#include "dpscan/color.hpp"
#include "dpscan/geometry.hpp"
#include "dpscan/taxonomy.hpp"

namespace dpscan {

/// One row of an ElementMap.
struct ElementRow {
    int line_id = 0;
    std::string text;
    UIElementKind kind = UIElementKind::text;
    BoundingBox box;
    int font_size = 0;
    Rgb bg_color = kWhite;
    Rgb font_color = kBlack;

    friend bool operator==(const ElementRow&, const ElementRow&) = default;
};

/// Tabular page representation: rows in reading order, numbered 1..N.
struct ElementMap {
    std::vector<ElementRow> rows;
    std::string source;

    bool empty() const noexcept { return rows.empty(); }
    std::size_t size() const noexcept { return rows.size(); }
    /// Row with the given line id, or nullptr.
    const ElementRow* find(int line_id) const noexcept;

    friend bool operator==(const ElementMap&, const ElementMap&) = default;
};

/// Two boxes sit on the same visual line when their top edges differ by less than
/// half the smaller box height.
bool same_reading_band(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Returns the permutation of `boxes` in reading order: rows are grouped into bands
/// (see same_reading_band, anchored at the band's first box in top-y order) and each
/// band is ordered left to right. Ties fall back to the full box, then input index.
std::vector<std::size_t> reading_order(const std::vector<BoundingBox>& boxes);

/// Sorts rows into reading order and renumbers them 1..N.
void sort_and_number(std::vector<ElementRow>& rows);

/// Checks the map invariants (increasing ids, valid boxes, font size of text rows).
/// Returns an empty string when valid, otherwise the first violation.
std::string validate(const ElementMap& map);

}  // namespace dpscan
