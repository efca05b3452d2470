#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dpscan {

// UI element kinds. The first seven are detector classes; `text` marks a plain OCR block.
enum class UIElementKind {
    button,
    checkbox_checked,
    checkbox_unchecked,
    radio_checked,
    radio_unchecked,
    toggle_on,
    toggle_off,
    text,
};

inline constexpr std::array<UIElementKind, 8> kAllElementKinds = {
    UIElementKind::button,          UIElementKind::checkbox_checked,
    UIElementKind::checkbox_unchecked, UIElementKind::radio_checked,
    UIElementKind::radio_unchecked, UIElementKind::toggle_on,
    UIElementKind::toggle_off,      UIElementKind::text,
};

/// Hyphenated identifier, e.g. "checkbox-checked".
std::string_view id_of(UIElementKind kind) noexcept;
/// Word form used in ElementMap rows, e.g. "checked checkbox".
std::string_view display_of(UIElementKind kind) noexcept;
/// Accepts either the identifier or the display form, case-insensitive.
std::optional<UIElementKind> parse_element_kind(std::string_view s) noexcept;

inline bool is_detector_kind(UIElementKind k) noexcept { return k != UIElementKind::text; }
/// Checkboxes, radios and toggles: elements that pair with a nearby label.
inline bool is_pairable_kind(UIElementKind k) noexcept {
    return k != UIElementKind::text && k != UIElementKind::button;
}

enum class DeceptiveCategory {
    interface_interference,
    forced_action,
    obstruction,
    sneaking,
    non_deceptive,
};

inline constexpr std::array<DeceptiveCategory, 5> kAllCategories = {
    DeceptiveCategory::interface_interference, DeceptiveCategory::forced_action,
    DeceptiveCategory::obstruction, DeceptiveCategory::sneaking,
    DeceptiveCategory::non_deceptive,
};

enum class DeceptiveSubtype {
    confirmshaming,
    fake_scarcity_fake_urgency,
    nudge,
    forced_action,
    pre_selection,
    visual_interference,
    jargon,
    hidden_subscription,
    hidden_costs,
    disguised_ads,
    trick_wording,
    not_applicable,
};

inline constexpr std::array<DeceptiveSubtype, 12> kAllSubtypes = {
    DeceptiveSubtype::confirmshaming,      DeceptiveSubtype::fake_scarcity_fake_urgency,
    DeceptiveSubtype::nudge,               DeceptiveSubtype::forced_action,
    DeceptiveSubtype::pre_selection,       DeceptiveSubtype::visual_interference,
    DeceptiveSubtype::jargon,              DeceptiveSubtype::hidden_subscription,
    DeceptiveSubtype::hidden_costs,        DeceptiveSubtype::disguised_ads,
    DeceptiveSubtype::trick_wording,       DeceptiveSubtype::not_applicable,
};

std::string_view name_of(DeceptiveCategory c) noexcept;
std::string_view name_of(DeceptiveSubtype s) noexcept;

/// Case-insensitive; spaces, underscores and slashes are treated as hyphens,
/// so "Fake Scarcity / Fake Urgency" parses.
std::optional<DeceptiveCategory> parse_category(std::string_view s) noexcept;
std::optional<DeceptiveSubtype> parse_subtype(std::string_view s) noexcept;

/// Lower-cases and collapses runs of non-alphanumerics into single hyphens.
std::string normalize_label(std::string_view s);

/// True iff `subtype` sits under `category` in the filtered taxonomy.
bool taxonomy_validate(DeceptiveCategory category, DeceptiveSubtype subtype) noexcept;

/// The unique category owning a subtype.
DeceptiveCategory category_of(DeceptiveSubtype subtype) noexcept;

inline bool is_deceptive(DeceptiveCategory c) noexcept {
    return c != DeceptiveCategory::non_deceptive;
}

struct Classification {
    DeceptiveCategory category = DeceptiveCategory::non_deceptive;
    DeceptiveSubtype subtype = DeceptiveSubtype::not_applicable;
    std::string reasoning;

    static Classification non_deceptive(std::string reasoning = {}) {
        return {DeceptiveCategory::non_deceptive, DeceptiveSubtype::not_applicable,
                std::move(reasoning)};
    }
    bool valid() const noexcept { return taxonomy_validate(category, subtype); }
    bool deceptive() const noexcept { return is_deceptive(category); }

    friend bool operator==(const Classification&, const Classification&) = default;
};

// ---------------------------------------------------------------------------
// Single-token aliases used when training small sequence-to-sequence students.

enum class AliasTask { category, subtype };

struct AliasEntry {
    std::string_view label;
    std::string_view alias;
    bool category_task;  // forced-action is both a category and a subtype
    bool subtype_task;

    bool in(AliasTask t) const noexcept {
        return t == AliasTask::category ? category_task : subtype_task;
    }
};

/// The full alias table in its published order, including `hard-to-cancel`,
/// which is not part of the filtered taxonomy.
const std::array<AliasEntry, 17>& alias_table() noexcept;

std::string_view alias_of(DeceptiveCategory c) noexcept;
std::string_view alias_of(DeceptiveSubtype s) noexcept;
/// Alias for any label in the table, including `hard-to-cancel`. Throws InvalidArgument
/// for labels outside the table.
std::string_view alias_of(std::string_view label);

/// Task-scoped reverse lookup returning the label string. Throws UnknownAlias.
std::string_view label_from_alias(std::string_view word, AliasTask task);

/// Typed reverse lookups. Throws UnknownAlias; `subtype_from_alias("sticky")` throws
/// InvalidArgument because hard-to-cancel is outside the filtered taxonomy.
DeceptiveCategory category_from_alias(std::string_view word);
DeceptiveSubtype subtype_from_alias(std::string_view word);

}  // namespace dpscan
