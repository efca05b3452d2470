#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dpscan/element_map.hpp"

namespace dpscan {

/// Number of columns in an `.emap.csv` record:
/// `Line {id},{text},{kind},{x1},{y1},{x2},{y2},{font_size},{bg_hex},{font_hex}`
inline constexpr std::size_t kEmapFieldCount = 10;

/// One record without the trailing newline. Text is quoted when it contains a comma,
/// quote or newline.
std::string serialize_row(const ElementRow& row);

/// All records, each terminated by LF. No header row.
std::string serialize_csv(const ElementMap& map);

/// Exact inverse of serialize_csv. Throws ParseError carrying the record's line number.
ElementMap parse_csv(std::string_view text, std::string source = {});

/// Decodes the first kEmapFieldCount fields of an already-split record.
ElementRow parse_row_fields(const std::vector<std::string>& fields, std::size_t line);

}  // namespace dpscan
