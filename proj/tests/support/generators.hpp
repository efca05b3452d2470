#pragma once

#include <random>
#include <string>
#include <vector>

#include "dpscan/element_map.hpp"

namespace gen {

/// Random text drawing from ASCII, CSV metacharacters, whitespace and multi-byte UTF-8.
inline std::string text(std::mt19937_64& rng) {
    static const std::vector<std::string> atoms = {
        "a", "Z", "7", " ", ",", "\"", "\n", "\r\n", "'", "%", "$", "Accept", "No, thanks",
        "é", "ü", "ß", "日本", "🎉", "✨", "€", "\t", "\"\"", ",,", "Line 3", "</s>",
    };
    std::uniform_int_distribution<int> len(0, 8);
    std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
    std::string out;
    for (int i = len(rng); i > 0; --i) out += atoms[pick(rng)];
    return out;
}

inline dpscan::ElementMap element_map(std::mt19937_64& rng, std::size_t max_rows = 12) {
    std::uniform_int_distribution<std::size_t> n(0, max_rows);
    std::uniform_int_distribution<int> coord(0, 1200);
    std::uniform_int_distribution<int> size(0, 80);
    std::uniform_int_distribution<int> kind(0, static_cast<int>(dpscan::kAllElementKinds.size()) - 1);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> step(1, 3);
    dpscan::ElementMap map;
    map.source = "generated";
    int id = 0;
    for (std::size_t i = n(rng); i > 0; --i) {
        dpscan::ElementRow r;
        id += step(rng);
        r.line_id = id;
        r.text = text(rng);
        r.kind = dpscan::kAllElementKinds[static_cast<std::size_t>(kind(rng))];
        r.box.x1 = coord(rng);
        r.box.y1 = coord(rng);
        r.box.x2 = r.box.x1 + size(rng);
        r.box.y2 = r.box.y1 + size(rng);
        r.font_size = r.kind == dpscan::UIElementKind::text ? r.box.height() : size(rng);
        auto rgb = [&] {
            return dpscan::Rgb{static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                               static_cast<std::uint8_t>(byte(rng))};
        };
        r.bg_color = rgb();
        r.font_color = rgb();
        map.rows.push_back(std::move(r));
    }
    return map;
}

}  // namespace gen
