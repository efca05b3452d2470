#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dpscan::csv {

/// One comma-separated record; `line` is the 1-based physical line it starts on.
struct Record {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Splits text into records. Fields may be double-quoted with "" escapes, in which
/// case they may contain commas and newlines. Blank lines are skipped.
/// Throws ParseError with the line number on malformed quoting.
std::vector<Record> parse(std::string_view text);

/// Quotes the field iff it contains a comma, double quote, CR or LF.
std::string quote(std::string_view field);

/// Splits `s` on the first `n - 1` commas, leaving the remainder in the last field.
/// Quoted fields are honoured. Used for free-text trailing columns.
std::vector<std::string> split_limited(std::string_view s, std::size_t n);

}  // namespace dpscan::csv
