#include "dpscan/fixtures.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dpscan/csv.hpp"
#include "dpscan/errors.hpp"

namespace dpscan {

namespace {

double parse_number(const std::string& s, std::size_t line, const char* what) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end || s.empty()) {
        throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

std::string format_confidence(double c) {
    std::ostringstream os;
    os.precision(6);
    os << c;
    return os.str();
}

}  // namespace

std::vector<Detection> parse_detections(std::string_view text) {
    std::vector<Detection> out;
    for (const auto& rec : csv::parse(text)) {
        const auto& f = rec.fields;
        if (!f.empty() && !f[0].empty() && f[0][0] == '#') continue;
        if (f.size() != 7) {
            throw ParseError(rec.line, "detection record needs 7 fields, got " +
                                           std::to_string(f.size()));
        }
        Detection d;
        auto kind = parse_element_kind(f[0]);
        if (!kind || *kind == UIElementKind::text) {
            throw ParseError(rec.line, "'" + f[0] + "' is not a detector class");
        }
        d.kind = *kind;
        try {
            d.box = BoundingBox::from_fractional(
                parse_number(f[1], rec.line, "x1"), parse_number(f[2], rec.line, "y1"),
                parse_number(f[3], rec.line, "x2"), parse_number(f[4], rec.line, "y2"));
        } catch (const InvalidArgument& e) {
            throw ParseError(rec.line, e.what());
        }
        d.confidence = parse_number(f[5], rec.line, "confidence");
        if (d.confidence < 0.0 || d.confidence > 1.0) {
            throw ParseError(rec.line, "confidence must be in [0, 1]");
        }
        d.source = f[6];
        out.push_back(std::move(d));
    }
    return out;
}

std::string serialize_detections(const std::vector<Detection>& dets) {
    std::string out;
    for (const auto& d : dets) {
        out += std::string(id_of(d.kind)) + ',' + std::to_string(d.box.x1) + ',' +
               std::to_string(d.box.y1) + ',' + std::to_string(d.box.x2) + ',' +
               std::to_string(d.box.y2) + ',' + format_confidence(d.confidence) + ',' +
               csv::quote(d.source) + '\n';
    }
    return out;
}

std::vector<OcrBlock> parse_ocr_blocks(std::string_view text) {
    std::vector<OcrBlock> out;
    for (const auto& rec : csv::parse(text)) {
        const auto& f = rec.fields;
        if (!f.empty() && !f[0].empty() && f[0][0] == '#') continue;
        if (f.size() != 5) {
            throw ParseError(rec.line,
                             "OCR record needs 5 fields, got " + std::to_string(f.size()));
        }
        OcrBlock b;
        try {
            b.box = BoundingBox::from_fractional(
                parse_number(f[0], rec.line, "x1"), parse_number(f[1], rec.line, "y1"),
                parse_number(f[2], rec.line, "x2"), parse_number(f[3], rec.line, "y2"));
        } catch (const InvalidArgument& e) {
            throw ParseError(rec.line, e.what());
        }
        b.text = f[4];
        out.push_back(std::move(b));
    }
    return out;
}

std::string serialize_ocr_blocks(const std::vector<OcrBlock>& blocks) {
    std::string out;
    for (const auto& b : blocks) {
        out += std::to_string(b.box.x1) + ',' + std::to_string(b.box.y1) + ',' +
               std::to_string(b.box.x2) + ',' + std::to_string(b.box.y2) + ',' +
               csv::quote(b.text) + '\n';
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

ScriptedOcr ScriptedOcr::from_file(const std::filesystem::path& path) {
    return ScriptedOcr(parse_ocr_blocks(read_text_file(path)), "scripted-ocr:" +
                                                                   path.filename().string());
}

ScriptedDetector ScriptedDetector::from_file(const std::filesystem::path& path, std::string id) {
    if (id.empty()) id = "scripted-detector:" + path.filename().string();
    return ScriptedDetector(parse_detections(read_text_file(path)), std::move(id));
}

}  // namespace dpscan
