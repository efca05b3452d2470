#include "dpscan/emap_csv.hpp"

#include <charconv>

#include "dpscan/csv.hpp"
#include "dpscan/errors.hpp"

namespace dpscan {

// ---------------------------------------------------------------------------
// Generic CSV record reader

namespace csv {

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (text[i] == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') {
            i += 2;
            ++line;
            continue;
        }
        Record rec;
        rec.line = line;
        for (;;) {
            std::string field;
            if (i < n && text[i] == '"') {
                ++i;
                for (;;) {
                    if (i >= n) throw ParseError(rec.line, "unterminated quoted field");
                    const char c = text[i++];
                    if (c == '"') {
                        if (i < n && text[i] == '"') {
                            field += '"';
                            ++i;
                            continue;
                        }
                        break;
                    }
                    if (c == '\n') ++line;
                    field += c;
                }
                if (i < n && text[i] != ',' && text[i] != '\n' &&
                    !(text[i] == '\r' && i + 1 < n && text[i + 1] == '\n')) {
                    throw ParseError(line, "unexpected character after closing quote");
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n') {
                    if (text[i] == '"') throw ParseError(line, "quote inside unquoted field");
                    if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') break;
                    field += text[i++];
                }
            }
            rec.fields.push_back(std::move(field));
            if (i < n && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < n && text[i] == '\r') ++i;
            if (i < n && text[i] == '\n') {
                ++i;
                ++line;
            }
            break;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_limited(std::string_view s, std::size_t n) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (out.size() + 1 < n && i <= s.size()) {
        std::string field;
        if (i < s.size() && s[i] == '"') {
            ++i;
            while (i < s.size()) {
                if (s[i] == '"') {
                    if (i + 1 < s.size() && s[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field += s[i++];
            }
            while (i < s.size() && s[i] != ',') ++i;
        } else {
            while (i < s.size() && s[i] != ',') field += s[i++];
        }
        out.push_back(std::move(field));
        if (i >= s.size()) return out;
        ++i;  // comma
    }
    std::string_view rest = i <= s.size() ? s.substr(i) : std::string_view{};
    if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') {
        std::string unq;
        for (std::size_t k = 1; k + 1 < rest.size(); ++k) {
            unq += rest[k];
            if (rest[k] == '"' && k + 2 < rest.size() && rest[k + 1] == '"') ++k;
        }
        out.push_back(std::move(unq));
    } else {
        out.emplace_back(rest);
    }
    return out;
}

}  // namespace csv

// ---------------------------------------------------------------------------
// ElementMap rows

namespace {

int parse_int(const std::string& s, std::size_t line, const char* what) {
    int v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end || s.empty()) {
        throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

}  // namespace

std::string serialize_row(const ElementRow& row) {
    std::string out = "Line ";
    out += std::to_string(row.line_id);
    out += ',';
    out += csv::quote(row.text);
    out += ',';
    out += display_of(row.kind);
    for (int v : {row.box.x1, row.box.y1, row.box.x2, row.box.y2, row.font_size}) {
        out += ',';
        out += std::to_string(v);
    }
    out += ',';
    out += row.bg_color.hex();
    out += ',';
    out += row.font_color.hex();
    return out;
}

std::string serialize_csv(const ElementMap& map) {
    std::string out;
    for (const auto& row : map.rows) {
        out += serialize_row(row);
        out += '\n';
    }
    return out;
}

ElementRow parse_row_fields(const std::vector<std::string>& f, std::size_t line) {
    if (f.size() < kEmapFieldCount) {
        throw ParseError(line, "expected " + std::to_string(kEmapFieldCount) + " fields, got " +
                                   std::to_string(f.size()));
    }
    ElementRow row;
    if (f[0].rfind("Line ", 0) != 0) throw ParseError(line, "record must start with 'Line <id>'");
    row.line_id = parse_int(f[0].substr(5), line, "line id");
    if (row.line_id <= 0) throw ParseError(line, "line id must be positive");
    row.text = f[1];
    auto kind = parse_element_kind(f[2]);
    if (!kind) throw ParseError(line, "unknown element kind '" + f[2] + "'");
    row.kind = *kind;
    const int x1 = parse_int(f[3], line, "x1");
    const int y1 = parse_int(f[4], line, "y1");
    const int x2 = parse_int(f[5], line, "x2");
    const int y2 = parse_int(f[6], line, "y2");
    row.box = {x1, y1, x2, y2};
    if (!row.box.valid()) throw ParseError(line, "invalid bounding box " + to_string(row.box));
    row.font_size = parse_int(f[7], line, "font size");
    if (row.font_size < 0) throw ParseError(line, "negative font size");
    try {
        row.bg_color = Rgb::from_hex(f[8]);
        row.font_color = Rgb::from_hex(f[9]);
    } catch (const InvalidArgument& e) {
        throw ParseError(line, e.what());
    }
    return row;
}

ElementMap parse_csv(std::string_view text, std::string source) {
    ElementMap map;
    map.source = std::move(source);
    int prev = 0;
    for (const auto& rec : csv::parse(text)) {
        if (rec.fields.size() != kEmapFieldCount) {
            throw ParseError(rec.line, "expected " + std::to_string(kEmapFieldCount) +
                                           " fields, got " + std::to_string(rec.fields.size()));
        }
        auto row = parse_row_fields(rec.fields, rec.line);
        if (row.line_id <= prev) throw ParseError(rec.line, "line ids must be strictly increasing");
        prev = row.line_id;
        map.rows.push_back(std::move(row));
    }
    return map;
}

}  // namespace dpscan
