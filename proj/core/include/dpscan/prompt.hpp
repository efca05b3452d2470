#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dpscan/classified_map.hpp"
#include "dpscan/element_map.hpp"

namespace dpscan {

inline constexpr std::string_view kMapPlaceholder = "{{ELEMENT_MAP}}";
inline constexpr std::string_view kFlaggedPlaceholder = "{{FLAGGED_ROWS}}";
inline constexpr std::string_view kTaxonomyPlaceholder = "{{TAXONOMY}}";
inline constexpr std::string_view kExamplesPlaceholder = "{{EXAMPLES}}";

struct FewShotExample {
    std::string row;  // an `.emap.csv` record
    Classification label;
};

/// Prompt text for the classification and verification passes. Treated as
/// configuration: the default is a reasonable starting point, and a JSON file with
/// the same keys can replace it.
struct PromptTemplate {
    std::string system_prompt;         // may use {{TAXONOMY}} and {{EXAMPLES}}
    std::string user_template;         // must contain {{ELEMENT_MAP}}
    std::string verifier_system_prompt;
    std::string verifier_user_template;  // must contain {{ELEMENT_MAP}} and {{FLAGGED_ROWS}}
    std::string format_instruction;    // appended on re-prompts after unparseable output
    std::vector<FewShotExample> examples;

    /// Throws ConfigError on a missing placeholder or an invalid exemplar label.
    void validate() const;

    static PromptTemplate defaults();
    /// Keys: system_prompt, user_template, verifier_system_prompt,
    /// verifier_user_template, format_instruction, examples[{row,category,subtype,reasoning}].
    /// Missing keys keep their default value.
    static PromptTemplate from_json_file(const std::filesystem::path& path);
};

struct Prompt {
    std::string system;
    std::string user;
};

/// Taxonomy table rendered as plain text (category, subtype, description).
std::string render_taxonomy();

/// First-pass prompt. Throws InvalidArgument for an empty map, ConfigError for a bad template.
Prompt build_classify_prompt(const ElementMap& map, const PromptTemplate& tmpl);

/// Verification prompt: the full map plus the rows to re-check with their first-pass labels,
/// one per line as `{line_id},{category},{subtype},{reasoning}`.
Prompt build_verify_prompt(const ElementMap& map, const std::vector<RowLabel>& pass1,
                           const std::vector<std::size_t>& flagged_rows,
                           const PromptTemplate& tmpl);

}  // namespace dpscan
