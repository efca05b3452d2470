#include "dpscan/window.hpp"

#include <algorithm>

#include "dpscan/emap_csv.hpp"
#include "dpscan/errors.hpp"

namespace dpscan {

std::string_view prefix_text(TaskPrefix p) noexcept {
    switch (p) {
        case TaskPrefix::category: return "[category]";
        case TaskPrefix::subtype: return "[subtype]";
        case TaskPrefix::reason: return "[reason]";
        case TaskPrefix::classify: return "[classify]";
    }
    return {};
}

std::string window_body(const ElementMap& map, std::size_t index, int radius) {
    if (index < 1 || index > map.rows.size()) {
        throw InvalidArgument("window index " + std::to_string(index) + " outside 1.." +
                              std::to_string(map.rows.size()));
    }
    if (radius < 0) throw InvalidArgument("window radius must be >= 0");
    const std::size_t target = index - 1;
    const std::size_t r = static_cast<std::size_t>(radius);
    const std::size_t first = target >= r ? target - r : 0;
    const std::size_t last = std::min(map.rows.size() - 1, target + r);

    std::string out = serialize_row(map.rows[target]);
    out += kWindowSeparator;
    for (std::size_t i = first; i <= last; ++i) {
        if (i == target) continue;
        out += serialize_row(map.rows[i]);
        out += kWindowSeparator;
    }
    return out;
}

std::string with_prefix(TaskPrefix prefix, std::string_view body) {
    std::string out(prefix_text(prefix));
    out += ": ";
    out += body;
    return out;
}

std::string build_window_sample(const ElementMap& map, std::size_t index, TaskPrefix prefix,
                                int radius) {
    return with_prefix(prefix, window_body(map, index, radius));
}

}  // namespace dpscan
