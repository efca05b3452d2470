#include <doctest.h>

#include <set>

#include "dpscan/color.hpp"
#include "dpscan/errors.hpp"
#include "dpscan/taxonomy.hpp"

using namespace dpscan;

TEST_SUITE("taxonomy") {

TEST_CASE("taxonomy_validate examples") {
    CHECK(taxonomy_validate(DeceptiveCategory::sneaking, DeceptiveSubtype::trick_wording));
    CHECK_FALSE(taxonomy_validate(DeceptiveCategory::forced_action, DeceptiveSubtype::nudge));
    CHECK(taxonomy_validate(DeceptiveCategory::non_deceptive, DeceptiveSubtype::not_applicable));
}

TEST_CASE("exactly twelve valid pairs, one category per subtype") {
    int valid = 0;
    for (auto s : kAllSubtypes) {
        int owners = 0;
        for (auto c : kAllCategories) {
            if (taxonomy_validate(c, s)) {
                ++owners;
                CHECK(category_of(s) == c);
            }
        }
        CHECK(owners == 1);
        valid += owners;
    }
    CHECK(valid == 12);
    CHECK(kAllCategories.size() == 5);
    CHECK(kAllSubtypes.size() == 12);
    CHECK(kAllElementKinds.size() == 8);
}

TEST_CASE("category membership") {
    using C = DeceptiveCategory;
    using S = DeceptiveSubtype;
    const std::pair<S, C> table[] = {
        {S::confirmshaming, C::interface_interference}, {S::fake_scarcity_fake_urgency, C::interface_interference},
        {S::nudge, C::interface_interference},          {S::forced_action, C::forced_action},
        {S::pre_selection, C::obstruction},             {S::visual_interference, C::obstruction},
        {S::jargon, C::obstruction},                    {S::hidden_subscription, C::sneaking},
        {S::hidden_costs, C::sneaking},                 {S::disguised_ads, C::sneaking},
        {S::trick_wording, C::sneaking},                {S::not_applicable, C::non_deceptive},
    };
    for (const auto& [s, c] : table) CHECK(category_of(s) == c);
}

TEST_CASE("names parse back, case- and spacing-insensitively") {
    for (auto c : kAllCategories) CHECK(parse_category(name_of(c)) == c);
    for (auto s : kAllSubtypes) CHECK(parse_subtype(name_of(s)) == s);
    CHECK(parse_subtype("Trick Wording") == DeceptiveSubtype::trick_wording);
    CHECK(parse_category("INTERFACE_INTERFERENCE") == DeceptiveCategory::interface_interference);
    CHECK_FALSE(parse_category("banana").has_value());
}

TEST_CASE("element kinds") {
    for (auto k : kAllElementKinds) {
        CHECK(parse_element_kind(id_of(k)) == k);
        CHECK(parse_element_kind(display_of(k)) == k);
    }
    CHECK(parse_element_kind("checked check-box") == UIElementKind::checkbox_checked);
    CHECK_FALSE(is_detector_kind(UIElementKind::text));
    CHECK(is_pairable_kind(UIElementKind::toggle_off));
    CHECK_FALSE(is_pairable_kind(UIElementKind::button));
}

TEST_CASE("alias table forward map") {
    const std::pair<const char*, const char*> expected[] = {
        {"interface-interference", "distraction"}, {"forced-action", "obligation"},
        {"obstruction", "barrier"},                {"sneaking", "sneak"},
        {"non-deceptive", "irrelevant"},           {"confirmshaming", "shame"},
        {"fake-scarcity-fake-urgency", "manufactured"}, {"nudge", "push"},
        {"hard-to-cancel", "sticky"},              {"pre-selection", "set"},
        {"visual-interference", "obscure"},        {"jargon", "mystery"},
        {"hidden-subscription", "conceal"},        {"hidden-costs", "price"},
        {"disguised-ads", "ads"},                  {"trick-wording", "uncertain"},
        {"not-applicable", "irrelevant"},
    };
    REQUIRE(alias_table().size() == std::size(expected));
    for (std::size_t i = 0; i < alias_table().size(); ++i) {
        CHECK(alias_table()[i].label == expected[i].first);
        CHECK(alias_table()[i].alias == expected[i].second);
        CHECK(alias_of(expected[i].first) == expected[i].second);
    }
    CHECK(alias_of(DeceptiveCategory::obstruction) == "barrier");
    CHECK(alias_of(DeceptiveSubtype::hidden_costs) == "price");
}

TEST_CASE("alias inverse is task scoped") {
    CHECK(label_from_alias("irrelevant", AliasTask::subtype) == "not-applicable");
    CHECK(label_from_alias("irrelevant", AliasTask::category) == "non-deceptive");
    CHECK(label_from_alias("obligation", AliasTask::category) == "forced-action");
    CHECK(label_from_alias("obligation", AliasTask::subtype) == "forced-action");
    CHECK(category_from_alias("barrier") == DeceptiveCategory::obstruction);
    CHECK(subtype_from_alias("set") == DeceptiveSubtype::pre_selection);
    CHECK_THROWS_AS(label_from_alias("banana", AliasTask::category), UnknownAlias);
    CHECK_THROWS_AS(label_from_alias("barrier", AliasTask::subtype), UnknownAlias);
    CHECK_THROWS_AS(subtype_from_alias("sticky"), InvalidArgument);
}

TEST_CASE("alias round trip over every label") {
    for (auto c : kAllCategories) CHECK(category_from_alias(alias_of(c)) == c);
    for (auto s : kAllSubtypes) CHECK(subtype_from_alias(alias_of(s)) == s);
}

TEST_CASE("colours") {
    CHECK(Rgb::from_hex("#1a73e8") == Rgb{0x1A, 0x73, 0xE8});
    CHECK(Rgb{0x1A, 0x73, 0xE8}.hex() == "#1A73E8");
    CHECK(kWhite.complement() == kBlack);
    CHECK_THROWS_AS(Rgb::from_hex("#12345"), InvalidArgument);
    CHECK_THROWS_AS(Rgb::from_hex("123456"), InvalidArgument);
    CHECK_THROWS_AS(Rgb::from_hex("#GG0000"), InvalidArgument);
}

TEST_CASE("classification helpers") {
    const auto nd = Classification::non_deceptive("ok");
    CHECK(nd.valid());
    CHECK_FALSE(nd.deceptive());
    Classification bad{DeceptiveCategory::forced_action, DeceptiveSubtype::nudge, ""};
    CHECK_FALSE(bad.valid());
}

}
