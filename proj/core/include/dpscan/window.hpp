#pragma once

#include <string>
#include <string_view>

#include "dpscan/element_map.hpp"

namespace dpscan {

enum class TaskPrefix { category, subtype, reason, classify };

/// "[category]", "[subtype]", "[reason]" or "[classify]".
std::string_view prefix_text(TaskPrefix p) noexcept;

inline constexpr std::string_view kWindowSeparator = "</s>";
inline constexpr int kDefaultWindowRadius = 4;

/// The window without its task prefix: the target record, then up to `radius`
/// preceding records, then up to `radius` following records (both in document
/// order), each terminated by `</s>`. `index` is 1-based. Throws InvalidArgument
/// when the index is out of range or the radius negative.
std::string window_body(const ElementMap& map, std::size_t index, int radius = kDefaultWindowRadius);

/// `{prefix}: {window_body}`.
std::string build_window_sample(const ElementMap& map, std::size_t index, TaskPrefix prefix,
                                int radius = kDefaultWindowRadius);

/// Joins a prefix to a precomputed body.
std::string with_prefix(TaskPrefix prefix, std::string_view body);

}  // namespace dpscan
