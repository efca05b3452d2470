#include "dpscan/taxonomy.hpp"

#include <algorithm>
#include <cctype>

#include "dpscan/color.hpp"
#include "dpscan/errors.hpp"

namespace dpscan {

namespace {

struct KindNames {
    UIElementKind kind;
    std::string_view id;
    std::string_view display;
};

constexpr std::array<KindNames, 8> kKindNames = {{
    {UIElementKind::button, "button", "button"},
    {UIElementKind::checkbox_checked, "checkbox-checked", "checked checkbox"},
    {UIElementKind::checkbox_unchecked, "checkbox-unchecked", "unchecked checkbox"},
    {UIElementKind::radio_checked, "radio-checked", "checked radio"},
    {UIElementKind::radio_unchecked, "radio-unchecked", "unchecked radio"},
    {UIElementKind::toggle_on, "toggle-on", "toggle on"},
    {UIElementKind::toggle_off, "toggle-off", "toggle off"},
    {UIElementKind::text, "text", "text"},
}};

constexpr std::array<std::string_view, 5> kCategoryNames = {
    "interface-interference", "forced-action", "obstruction", "sneaking", "non-deceptive"};

constexpr std::array<std::string_view, 12> kSubtypeNames = {
    "confirmshaming", "fake-scarcity-fake-urgency", "nudge",        "forced-action",
    "pre-selection",  "visual-interference",        "jargon",       "hidden-subscription",
    "hidden-costs",   "disguised-ads",              "trick-wording", "not-applicable"};

// Owning category of each subtype, indexed like kSubtypeNames.
constexpr std::array<DeceptiveCategory, 12> kSubtypeOwner = {
    DeceptiveCategory::interface_interference, DeceptiveCategory::interface_interference,
    DeceptiveCategory::interface_interference, DeceptiveCategory::forced_action,
    DeceptiveCategory::obstruction,            DeceptiveCategory::obstruction,
    DeceptiveCategory::obstruction,            DeceptiveCategory::sneaking,
    DeceptiveCategory::sneaking,               DeceptiveCategory::sneaking,
    DeceptiveCategory::sneaking,               DeceptiveCategory::non_deceptive,
};

constexpr bool C = true;
constexpr bool S = true;

constexpr std::array<AliasEntry, 17> kAliasTable = {{
    {"interface-interference", "distraction", C, false},
    {"forced-action", "obligation", C, S},
    {"obstruction", "barrier", C, false},
    {"sneaking", "sneak", C, false},
    {"non-deceptive", "irrelevant", C, false},
    {"confirmshaming", "shame", false, S},
    {"fake-scarcity-fake-urgency", "manufactured", false, S},
    {"nudge", "push", false, S},
    {"hard-to-cancel", "sticky", false, S},
    {"pre-selection", "set", false, S},
    {"visual-interference", "obscure", false, S},
    {"jargon", "mystery", false, S},
    {"hidden-subscription", "conceal", false, S},
    {"hidden-costs", "price", false, S},
    {"disguised-ads", "ads", false, S},
    {"trick-wording", "uncertain", false, S},
    {"not-applicable", "irrelevant", false, S},
}};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view id_of(UIElementKind kind) noexcept {
    return kKindNames[static_cast<std::size_t>(kind)].id;
}

std::string_view display_of(UIElementKind kind) noexcept {
    return kKindNames[static_cast<std::size_t>(kind)].display;
}

std::optional<UIElementKind> parse_element_kind(std::string_view s) noexcept {
    std::string key;
    for (char c : s) {
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (const auto& k : kKindNames) {
        if (key == k.id || key == k.display) return k.kind;
    }
    // Hyphenated "check-box" spelling.
    if (key == "checked check-box") return UIElementKind::checkbox_checked;
    if (key == "unchecked check-box") return UIElementKind::checkbox_unchecked;
    return std::nullopt;
}

std::string_view name_of(DeceptiveCategory c) noexcept {
    return kCategoryNames[static_cast<std::size_t>(c)];
}

std::string_view name_of(DeceptiveSubtype s) noexcept {
    return kSubtypeNames[static_cast<std::size_t>(s)];
}

std::string normalize_label(std::string_view s) {
    std::string out;
    bool pending_sep = false;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            if (pending_sep && !out.empty()) out += '-';
            pending_sep = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

std::optional<DeceptiveCategory> parse_category(std::string_view s) noexcept {
    const std::string key = normalize_label(s);
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (key == kCategoryNames[i]) return static_cast<DeceptiveCategory>(i);
    }
    if (key == "non-deceptive" || key == "nondeceptive" || key == "not-deceptive") {
        return DeceptiveCategory::non_deceptive;
    }
    return std::nullopt;
}

std::optional<DeceptiveSubtype> parse_subtype(std::string_view s) noexcept {
    const std::string key = normalize_label(s);
    for (std::size_t i = 0; i < kSubtypeNames.size(); ++i) {
        if (key == kSubtypeNames[i]) return static_cast<DeceptiveSubtype>(i);
    }
    if (key == "trickwording") return DeceptiveSubtype::trick_wording;
    if (key == "preselection") return DeceptiveSubtype::pre_selection;
    if (key == "n-a" || key == "na" || key == "none") return DeceptiveSubtype::not_applicable;
    return std::nullopt;
}

bool taxonomy_validate(DeceptiveCategory category, DeceptiveSubtype subtype) noexcept {
    return category_of(subtype) == category;
}

DeceptiveCategory category_of(DeceptiveSubtype subtype) noexcept {
    return kSubtypeOwner[static_cast<std::size_t>(subtype)];
}

const std::array<AliasEntry, 17>& alias_table() noexcept { return kAliasTable; }

std::string_view alias_of(DeceptiveCategory c) noexcept {
    const auto name = name_of(c);
    for (const auto& e : kAliasTable) {
        if (e.category_task && e.label == name) return e.alias;
    }
    return {};
}

std::string_view alias_of(DeceptiveSubtype s) noexcept {
    const auto name = name_of(s);
    for (const auto& e : kAliasTable) {
        if (e.subtype_task && e.label == name) return e.alias;
    }
    return {};
}

std::string_view alias_of(std::string_view label) {
    const std::string key = normalize_label(label);
    for (const auto& e : kAliasTable) {
        if (e.label == key) return e.alias;
    }
    throw InvalidArgument("label '" + std::string(label) + "' has no alias");
}

std::string_view label_from_alias(std::string_view word, AliasTask task) {
    const std::string key = lower(word);
    for (const auto& e : kAliasTable) {
        if (e.in(task) && e.alias == key) return e.label;
    }
    throw UnknownAlias(std::string(word));
}

DeceptiveCategory category_from_alias(std::string_view word) {
    // Every category-task label is a category name.
    return *parse_category(label_from_alias(word, AliasTask::category));
}

DeceptiveSubtype subtype_from_alias(std::string_view word) {
    const auto label = label_from_alias(word, AliasTask::subtype);
    if (auto s = parse_subtype(label)) return *s;
    throw InvalidArgument("alias '" + std::string(word) + "' maps to '" + std::string(label) +
                          "', which is outside the filtered taxonomy");
}

// Rgb lives here to keep the small value types in one translation unit.
Rgb Rgb::from_hex(std::string_view hex) {
    if (hex.size() != 7 || hex[0] != '#') {
        throw InvalidArgument("colour must be #RRGGBB, got '" + std::string(hex) + "'");
    }
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InvalidArgument("colour must be #RRGGBB, got '" + std::string(hex) + "'");
    };
    auto byte = [&](std::size_t i) {
        return static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1]));
    };
    return {byte(1), byte(3), byte(5)};
}

std::string Rgb::hex() const {
    static constexpr char kDigits[] = "0123456789ABCDEF";
    std::string out = "#";
    for (std::uint8_t v : {r, g, b}) {
        out += kDigits[v >> 4];
        out += kDigits[v & 0xF];
    }
    return out;
}

}  // namespace dpscan
