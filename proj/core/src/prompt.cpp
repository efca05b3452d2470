#include "dpscan/prompt.hpp"

#include <nlohmann/json.hpp>

#include "dpscan/csv.hpp"
#include "dpscan/emap_csv.hpp"
#include "dpscan/errors.hpp"
#include "dpscan/fixtures.hpp"

namespace dpscan {

namespace {

struct TaxonomyLine {
    DeceptiveSubtype subtype;
    std::string_view description;
};

// One line per subtype; wording is ours and is meant to be edited alongside the template.
constexpr TaxonomyLine kDescriptions[] = {
    {DeceptiveSubtype::confirmshaming,
     "the decline option is phrased to make the user feel guilty or foolish"},
    {DeceptiveSubtype::fake_scarcity_fake_urgency,
     "invented stock limits, countdowns or demand claims that push a quick decision"},
    {DeceptiveSubtype::nudge,
     "one choice is made visually or verbally more attractive than its alternatives"},
    {DeceptiveSubtype::forced_action,
     "the user must perform an unrelated action (accept, register, share) to continue"},
    {DeceptiveSubtype::pre_selection,
     "an option against the user's interest is already checked or switched on"},
    {DeceptiveSubtype::visual_interference,
     "important information is hidden by tiny fonts, low contrast or distracting layout"},
    {DeceptiveSubtype::jargon,
     "needlessly technical or legal language hides what the user is agreeing to"},
    {DeceptiveSubtype::hidden_subscription,
     "the user is enrolled in a recurring service or mailing without being told clearly"},
    {DeceptiveSubtype::hidden_costs,
     "fees, charges or prices are not disclosed up front"},
    {DeceptiveSubtype::disguised_ads,
     "advertising made to look like page content or navigation"},
    {DeceptiveSubtype::trick_wording,
     "wording such as double negatives that leads the user to the opposite choice"},
    {DeceptiveSubtype::not_applicable,
     "an ordinary element with no deceptive intent (category non-deceptive)"},
};

constexpr std::string_view kDefaultSystem = R"(You audit web pages for deceptive design patterns.

You receive an ElementMap: one CSV record per visible UI element, in reading order, with the columns
line id, text, element kind, x1, y1, x2, y2 (pixels), font size, background colour, font colour.

Plan:
1. Read the whole map first and work out what the page is (cookie banner, checkout, sign-up form, ...).
2. For every record, consider its text, its kind (a checked checkbox or a button matters), its size,
   its colours relative to neighbouring elements and its position.
3. Think step by step about whether the element steers the user against their own interest, then
   pick exactly one category and one subtype from the taxonomy below. Most elements are
   non-deceptive; only flag an element when the evidence is on the page.

Taxonomy (category / subtype: description):
{{TAXONOMY}}
Examples:
{{EXAMPLES}}
Output exactly one line per record and nothing else, with three columns after the line id:
line_id,category,subtype,reasoning
Use the lower-case hyphenated labels shown above. Keep reasoning to one sentence.)";

constexpr std::string_view kDefaultUser = R"(ElementMap:
{{ELEMENT_MAP}})";

constexpr std::string_view kDefaultVerifierSystem = R"(You double-check deceptive design labels produced by another model.

You receive the full ElementMap of a page and the subset of its records that were labelled deceptive,
as line_id,category,subtype,reasoning. Re-evaluate each listed record in the context of the whole
page. Keep the label when it is justified, correct the category or subtype when it is wrong, and
relabel the record as non-deceptive,not-applicable when it is a false positive.

Taxonomy (category / subtype: description):
{{TAXONOMY}}
Output exactly one line per listed record and nothing else:
line_id,category,subtype,reasoning)";

constexpr std::string_view kDefaultVerifierUser = R"(ElementMap:
{{ELEMENT_MAP}}
Records to re-evaluate:
{{FLAGGED_ROWS}})";

constexpr std::string_view kDefaultFormat =
    "Answer only with CSV lines of the form line_id,category,subtype,reasoning - one per "
    "record, no headers, no commentary.";

// Single pass over the template, so substituted text is never re-scanned.
std::string substitute(std::string_view tmpl,
                       std::initializer_list<std::pair<std::string_view, std::string_view>> vars) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        bool hit = false;
        for (const auto& [key, value] : vars) {
            if (tmpl.compare(i, key.size(), key) == 0) {
                out += value;
                i += key.size();
                hit = true;
                break;
            }
        }
        if (!hit) out += tmpl[i++];
    }
    return out;
}

std::string render_examples(const std::vector<FewShotExample>& examples) {
    std::string out;
    for (const auto& ex : examples) {
        out += "Input: " + ex.row + "\n";
        out += "Output: " + ex.row.substr(5, ex.row.find(',') - 5) + "," +
               std::string(name_of(ex.label.category)) + "," +
               std::string(name_of(ex.label.subtype)) + "," + csv::quote(ex.label.reasoning) +
               "\n";
    }
    return out;
}

std::string render_system(const std::string& text, const PromptTemplate& tmpl) {
    const std::string taxonomy = render_taxonomy();
    const std::string examples = render_examples(tmpl.examples);
    return substitute(text, {{kTaxonomyPlaceholder, taxonomy}, {kExamplesPlaceholder, examples}});
}

void require(const std::string& text, std::string_view placeholder, const char* field) {
    if (text.find(placeholder) == std::string::npos) {
        throw ConfigError(std::string("prompt template field '") + field + "' lacks " +
                          std::string(placeholder));
    }
}

}  // namespace

std::string render_taxonomy() {
    std::string out;
    for (const auto& d : kDescriptions) {
        out += "- ";
        out += name_of(category_of(d.subtype));
        out += " / ";
        out += name_of(d.subtype);
        out += ": ";
        out += d.description;
        out += '\n';
    }
    return out;
}

void PromptTemplate::validate() const {
    require(user_template, kMapPlaceholder, "user_template");
    require(verifier_user_template, kMapPlaceholder, "verifier_user_template");
    require(verifier_user_template, kFlaggedPlaceholder, "verifier_user_template");
    for (const auto& ex : examples) {
        if (!ex.label.valid()) {
            throw ConfigError("few-shot example label " + std::string(name_of(ex.label.category)) +
                              "/" + std::string(name_of(ex.label.subtype)) +
                              " is not a valid taxonomy pair");
        }
        if (ex.row.rfind("Line ", 0) != 0) {
            throw ConfigError("few-shot example row must be an ElementMap record");
        }
    }
}

PromptTemplate PromptTemplate::defaults() {
    PromptTemplate t;
    t.system_prompt = kDefaultSystem;
    t.user_template = kDefaultUser;
    t.verifier_system_prompt = kDefaultVerifierSystem;
    t.verifier_user_template = kDefaultVerifierUser;
    t.format_instruction = kDefaultFormat;
    t.examples = {
        {"Line 4,Only 2 left in stock - order in the next 09:59!,text,40,210,520,232,22,#FFFFFF,#D32F2F",
         {DeceptiveCategory::interface_interference, DeceptiveSubtype::fake_scarcity_fake_urgency,
          "A countdown and a low-stock claim pressure the user to buy immediately."}},
        {"Line 9,Send me offers from partners,checked checkbox,40,400,300,418,18,#FFFFFF,#333333",
         {DeceptiveCategory::obstruction, DeceptiveSubtype::pre_selection,
          "Marketing consent is ticked before the user has made a choice."}},
        {"Line 10,No thanks, I don't like saving money,button,40,430,330,470,16,#FFFFFF,#9E9E9E",
         {DeceptiveCategory::interface_interference, DeceptiveSubtype::confirmshaming,
          "The decline button shames the user for refusing the offer."}},
        {"Line 2,Contact us,button,900,20,1010,52,16,#1A73E8,#FFFFFF",
         {DeceptiveCategory::non_deceptive, DeceptiveSubtype::not_applicable,
          "A plain navigation button with neutral wording."}},
    };
    return t;
}

PromptTemplate PromptTemplate::from_json_file(const std::filesystem::path& path) {
    PromptTemplate t = defaults();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("prompt template " + path.string() + ": " + e.what());
    }
    auto take = [&](const char* key, std::string& field) {
        if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    take("system_prompt", t.system_prompt);
    take("user_template", t.user_template);
    take("verifier_system_prompt", t.verifier_system_prompt);
    take("verifier_user_template", t.verifier_user_template);
    take("format_instruction", t.format_instruction);
    if (j.contains("examples")) {
        t.examples.clear();
        for (const auto& e : j.at("examples")) {
            auto cat = parse_category(e.at("category").get<std::string>());
            auto sub = parse_subtype(e.at("subtype").get<std::string>());
            if (!cat || !sub) throw ConfigError("few-shot example with unknown label");
            t.examples.push_back({e.at("row").get<std::string>(),
                                  {*cat, *sub, e.value("reasoning", std::string{})}});
        }
    }
    t.validate();
    return t;
}

Prompt build_classify_prompt(const ElementMap& map, const PromptTemplate& tmpl) {
    tmpl.validate();
    if (map.empty()) throw InvalidArgument("cannot build a prompt for an empty ElementMap");
    return {render_system(tmpl.system_prompt, tmpl),
            substitute(tmpl.user_template, {{kMapPlaceholder, serialize_csv(map)}})};
}

Prompt build_verify_prompt(const ElementMap& map, const std::vector<RowLabel>& pass1,
                           const std::vector<std::size_t>& flagged_rows,
                           const PromptTemplate& tmpl) {
    tmpl.validate();
    if (map.empty()) throw InvalidArgument("cannot build a prompt for an empty ElementMap");
    std::string flagged;
    for (std::size_t i : flagged_rows) {
        const auto& row = map.rows.at(i);
        const auto& lab = pass1.at(i).cls;
        flagged += std::to_string(row.line_id) + "," + std::string(name_of(lab.category)) + "," +
                   std::string(name_of(lab.subtype)) + "," + csv::quote(lab.reasoning) + "\n";
    }
    const std::string table = serialize_csv(map);
    std::string user = substitute(tmpl.verifier_user_template,
                                  {{kMapPlaceholder, table}, {kFlaggedPlaceholder, flagged}});
    return {render_system(tmpl.verifier_system_prompt, tmpl), std::move(user)};
}

}  // namespace dpscan
