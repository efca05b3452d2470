#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dpscan/classified_map.hpp"
#include "dpscan/taxonomy.hpp"

namespace dpscan {

/// One training record: a windowed input plus the teacher's category, subtype and
/// reasoning, tagged with the site it came from.
struct DistillRecord {
    std::string window;  // window_body() of the target row, without task prefix
    DeceptiveCategory category = DeceptiveCategory::non_deceptive;
    DeceptiveSubtype subtype = DeceptiveSubtype::not_applicable;
    std::string reasoning;
    std::string site;

    bool deceptive() const noexcept { return is_deceptive(category); }
    friend bool operator==(const DistillRecord&, const DistillRecord&) = default;
};

struct DistillConfig {
    double non_deceptive_target_fraction = 0.55;
    std::uint64_t seed = 0;
    int window = 4;
    double split_ratio = 0.9;
    /// Loss weight exported for the external trainer; not validated against any run.
    double alpha = 0.5;
    bool alias_mode = false;
    bool legacy_mode = false;

    void validate() const;
};

/// Seeded generator shared by the sampling steps. mt19937_64 output is fixed by the
/// standard; bounded draws use our own rejection sampling so results are portable.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// round(f / (1 - f) * deceptive).
std::size_t undersample_target(std::size_t deceptive, double fraction);

struct UndersampleResult {
    std::vector<DistillRecord> records;  // input order preserved
    std::size_t target = 0;              // non-deceptive records wanted
    bool saturated = false;              // fewer non-deceptive records than the target
    std::string warning;
};

/// Keeps every deceptive record and a uniform seeded sample of non-deceptive records
/// (without replacement) of size undersample_target(). Throws InvalidArgument when
/// there are no deceptive records.
UndersampleResult undersample_non_deceptive(const std::vector<DistillRecord>& records,
                                            const DistillConfig& cfg);

struct SiteSplit {
    std::vector<DistillRecord> train;
    std::vector<DistillRecord> validation;
    std::vector<std::string> train_sites;  // sorted
    std::vector<std::string> validation_sites;
};

/// Partitions whole sites so the train record count is as close as possible to
/// split_ratio x total (exact subset-sum search; ties decided by the seeded site
/// order). Throws InvalidArgument with fewer than two sites.
SiteSplit split_by_site(const std::vector<DistillRecord>& records, const DistillConfig& cfg);

struct TaskSample {
    std::string input;
    std::string target;
    friend bool operator==(const TaskSample&, const TaskSample&) = default;
};

/// Default: [category] -> category, [subtype] -> subtype, [reason] -> reasoning.
/// Legacy: [classify] -> "category,subtype", [reason] -> reasoning.
/// alias_mode replaces label targets with their single-token aliases.
std::vector<TaskSample> emit_task_samples(const DistillRecord& record, const DistillConfig& cfg);

/// One record per ElementMap row.
std::vector<DistillRecord> records_from_cmap(const ClassifiedMap& cmap, const std::string& site,
                                             int window);

/// Backslash-escapes `\`, TAB, LF and CR so a field fits on one TSV line.
std::string escape_tsv(std::string_view field);
std::string unescape_tsv(std::string_view field);

/// Site-level filter (language, adult content, ...). Return false to drop the site.
using SiteFilter = std::function<bool(const std::string& site, const ClassifiedMap& cmap)>;

struct SiteInput {
    std::string site;
    ClassifiedMap cmap;
};

struct PreparedDataset {
    std::vector<TaskSample> train;
    std::vector<TaskSample> validation;
    SiteSplit split;
    UndersampleResult sampled;
    std::size_t sites_in = 0;
    std::size_t sites_filtered = 0;
    std::size_t records_in = 0;
    std::size_t deceptive_in = 0;
};

/// Filters -> records -> undersample -> split -> emit.
PreparedDataset prepare_dataset(const std::vector<SiteInput>& inputs, const DistillConfig& cfg,
                                const std::vector<SiteFilter>& filters = {});

/// Manifest as `key=value` lines in a fixed key order.
std::string render_manifest(const PreparedDataset& ds, const DistillConfig& cfg);

/// Writes train.tsv, val.tsv and manifest into `dir` (created if needed).
void write_dataset(const PreparedDataset& ds, const DistillConfig& cfg,
                   const std::filesystem::path& dir);

/// Reads `.cmap.csv` files: a single file, or every `*.cmap.csv` in a directory
/// (sorted by name). The site is the file's site column or, if absent, the file
/// name without `.cmap.csv`.
std::vector<SiteInput> load_site_inputs(const std::filesystem::path& path);

}  // namespace dpscan
