#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dpscan/element_map.hpp"
#include "dpscan/taxonomy.hpp"

namespace dpscan {

/// Which pass produced a row's final label.
enum class Provenance { pass1, verified };

std::string_view name_of(Provenance p) noexcept;

struct RowLabel {
    Classification cls;
    Provenance provenance = Provenance::pass1;
    /// Set when the label was defaulted or coerced rather than taken verbatim.
    bool flagged = false;
    /// Human-readable reason for the flag; not serialized.
    std::string note;

    friend bool operator==(const RowLabel& a, const RowLabel& b) {
        return a.cls == b.cls && a.provenance == b.provenance && a.flagged == b.flagged;
    }
};

/// An ElementMap with one label per row (labels[i] belongs to map.rows[i]).
struct ClassifiedMap {
    ElementMap map;
    std::vector<RowLabel> labels;

    std::size_t deceptive_count() const noexcept;

    friend bool operator==(const ClassifiedMap&, const ClassifiedMap&) = default;
};

/// `.cmap.csv`: each `.emap.csv` record followed by
/// `{category},{subtype},{reasoning},{provenance},{flagged}` and, when `site` is
/// non-empty, a trailing `{site}` column.
std::string serialize_cmap(const ClassifiedMap& cmap, std::string_view site = {});

struct ParsedCmap {
    ClassifiedMap cmap;
    std::string site;  // empty when the file has no site column
};

/// Inverse of serialize_cmap. Throws ParseError.
ParsedCmap parse_cmap(std::string_view text, std::string source = {});

}  // namespace dpscan
