#include "dpscan/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "dpscan/errors.hpp"
#include "dpscan/fixtures.hpp"
#include "dpscan/window.hpp"

namespace dpscan {

void DistillConfig::validate() const {
    if (!(non_deceptive_target_fraction > 0.0 && non_deceptive_target_fraction < 1.0)) {
        throw ConfigError("non-deceptive target fraction must be in (0, 1)");
    }
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split ratio must be in (0, 1)");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
    if (window < 0) throw ConfigError("window radius must be >= 0");
}

std::uint64_t SplitRng::below(std::uint64_t n) {
    // Reject the low end so every residue class has the same number of preimages.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x >= threshold) return x % n;
    }
}

std::size_t undersample_target(std::size_t deceptive, double fraction) {
    return static_cast<std::size_t>(
        std::llround(fraction / (1.0 - fraction) * static_cast<double>(deceptive)));
}

UndersampleResult undersample_non_deceptive(const std::vector<DistillRecord>& records,
                                            const DistillConfig& cfg) {
    cfg.validate();
    std::vector<std::size_t> benign;
    std::size_t deceptive = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].deceptive()) {
            ++deceptive;
        } else {
            benign.push_back(i);
        }
    }
    if (deceptive == 0) {
        throw InvalidArgument("undersampling needs at least one deceptive record");
    }
    UndersampleResult out;
    out.target = undersample_target(deceptive, cfg.non_deceptive_target_fraction);

    std::vector<bool> keep(records.size(), true);
    if (benign.size() <= out.target) {
        out.saturated = true;
        out.warning = "only " + std::to_string(benign.size()) +
                      " non-deceptive records available, fewer than the target of " +
                      std::to_string(out.target) + "; keeping all";
    } else {
        // Partial Fisher-Yates: the first `target` slots form the sample.
        SplitRng rng(cfg.seed);
        for (std::size_t i = 0; i < out.target; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(benign.size() - i));
            std::swap(benign[i], benign[j]);
        }
        for (std::size_t i = out.target; i < benign.size(); ++i) keep[benign[i]] = false;
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i]) out.records.push_back(records[i]);
    }
    return out;
}

SiteSplit split_by_site(const std::vector<DistillRecord>& records, const DistillConfig& cfg) {
    cfg.validate();
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) {
        if (r.site.empty()) throw InvalidArgument("record without a site");
        ++counts[r.site];
    }
    if (counts.size() < 2) throw InvalidArgument("site split needs at least two sites");

    std::vector<std::pair<std::string, std::size_t>> sites(counts.begin(), counts.end());
    SplitRng rng(cfg.seed);
    rng.shuffle(sites);

    const std::size_t total = records.size();
    const double target = (1.0 - cfg.split_ratio) * static_cast<double>(total);
    // Sums beyond 2 x target are never closer than any reachable sum in [1, 2 x target].
    const std::size_t cap =
        std::min(total - 1, static_cast<std::size_t>(std::floor(2.0 * target)));

    // reached_by[s] = index of the site that first made validation sum s reachable.
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> reached_by(cap + 1, kNone);
    std::vector<bool> reachable(cap + 1, false);
    reachable[0] = true;
    for (std::size_t k = 0; k < sites.size(); ++k) {
        const std::size_t w = sites[k].second;
        if (w > cap) continue;
        for (std::size_t s = cap; s >= w; --s) {
            if (!reachable[s] && reachable[s - w]) {
                reachable[s] = true;
                reached_by[s] = k;
            }
            if (s == w) break;
        }
    }

    std::set<std::size_t> validation;
    std::size_t best = 0;
    double best_diff = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s <= cap; ++s) {
        if (!reachable[s]) continue;
        const double diff = std::abs(static_cast<double>(s) - target);
        if (diff < best_diff) {
            best = s;
            best_diff = diff;
        }
    }
    if (best == 0) {
        // Every site is bigger than 2 x target: the smallest single site is closest.
        std::size_t pick = 0;
        for (std::size_t k = 1; k < sites.size(); ++k) {
            if (sites[k].second < sites[pick].second) pick = k;
        }
        validation.insert(pick);
    } else {
        for (std::size_t s = best; s > 0;) {
            const std::size_t k = reached_by[s];
            validation.insert(k);
            s -= sites[k].second;
        }
    }

    SiteSplit out;
    std::set<std::string> val_names;
    for (std::size_t k = 0; k < sites.size(); ++k) {
        if (validation.count(k)) {
            val_names.insert(sites[k].first);
        } else {
            out.train_sites.push_back(sites[k].first);
        }
    }
    out.validation_sites.assign(val_names.begin(), val_names.end());
    std::sort(out.train_sites.begin(), out.train_sites.end());
    for (const auto& r : records) {
        (val_names.count(r.site) ? out.validation : out.train).push_back(r);
    }
    return out;
}

std::vector<TaskSample> emit_task_samples(const DistillRecord& record, const DistillConfig& cfg) {
    const std::string category =
        std::string(cfg.alias_mode ? alias_of(record.category) : name_of(record.category));
    const std::string subtype =
        std::string(cfg.alias_mode ? alias_of(record.subtype) : name_of(record.subtype));
    std::vector<TaskSample> out;
    if (cfg.legacy_mode) {
        out.push_back({with_prefix(TaskPrefix::classify, record.window), category + "," + subtype});
    } else {
        out.push_back({with_prefix(TaskPrefix::category, record.window), category});
        out.push_back({with_prefix(TaskPrefix::subtype, record.window), subtype});
    }
    out.push_back({with_prefix(TaskPrefix::reason, record.window), record.reasoning});
    return out;
}

std::vector<DistillRecord> records_from_cmap(const ClassifiedMap& cmap, const std::string& site,
                                             int window) {
    std::vector<DistillRecord> out;
    out.reserve(cmap.map.rows.size());
    for (std::size_t i = 0; i < cmap.map.rows.size(); ++i) {
        const auto& lab = cmap.labels.at(i).cls;
        out.push_back({window_body(cmap.map, i + 1, window), lab.category, lab.subtype,
                       lab.reasoning, site});
    }
    return out;
}

std::string escape_tsv(std::string_view field) {
    std::string out;
    out.reserve(field.size());
    for (char c : field) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_tsv(std::string_view field) {
    std::string out;
    out.reserve(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field[i] != '\\' || i + 1 == field.size()) {
            out += field[i];
            continue;
        }
        switch (field[++i]) {
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case '\\': out += '\\'; break;
            default:
                out += '\\';
                out += field[i];
        }
    }
    return out;
}

PreparedDataset prepare_dataset(const std::vector<SiteInput>& inputs, const DistillConfig& cfg,
                                const std::vector<SiteFilter>& filters) {
    cfg.validate();
    PreparedDataset ds;
    ds.sites_in = inputs.size();
    std::vector<DistillRecord> records;
    for (const auto& in : inputs) {
        const bool keep = std::all_of(filters.begin(), filters.end(),
                                      [&](const SiteFilter& f) { return f(in.site, in.cmap); });
        if (!keep) {
            ++ds.sites_filtered;
            continue;
        }
        auto recs = records_from_cmap(in.cmap, in.site, cfg.window);
        records.insert(records.end(), std::make_move_iterator(recs.begin()),
                       std::make_move_iterator(recs.end()));
    }
    ds.records_in = records.size();
    ds.deceptive_in = static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const DistillRecord& r) { return r.deceptive(); }));
    ds.sampled = undersample_non_deceptive(records, cfg);
    ds.split = split_by_site(ds.sampled.records, cfg);
    for (const auto& r : ds.split.train) {
        for (auto& s : emit_task_samples(r, cfg)) ds.train.push_back(std::move(s));
    }
    for (const auto& r : ds.split.validation) {
        for (auto& s : emit_task_samples(r, cfg)) ds.validation.push_back(std::move(s));
    }
    return ds;
}

std::string render_manifest(const PreparedDataset& ds, const DistillConfig& cfg) {
    std::ostringstream os;
    os << "format=dpscan-distill-1\n";
    os << "mode=" << (cfg.legacy_mode ? "legacy" : "default") << '\n';
    os << "alias=" << (cfg.alias_mode ? "on" : "off") << '\n';
    os << "seed=" << cfg.seed << '\n';
    os << "window=" << cfg.window << '\n';
    os << "non_deceptive_target_fraction=" << cfg.non_deceptive_target_fraction << '\n';
    os << "split_ratio=" << cfg.split_ratio << '\n';
    os << "alpha=" << cfg.alpha << '\n';
    os << "alpha_validated=false\n";
    os << "sites_in=" << ds.sites_in << '\n';
    os << "sites_filtered=" << ds.sites_filtered << '\n';
    os << "records_in=" << ds.records_in << '\n';
    os << "deceptive_records=" << ds.deceptive_in << '\n';
    os << "non_deceptive_records_in=" << ds.records_in - ds.deceptive_in << '\n';
    os << "non_deceptive_target=" << ds.sampled.target << '\n';
    os << "non_deceptive_kept=" << ds.sampled.records.size() - ds.deceptive_in << '\n';
    os << "undersample_saturated=" << (ds.sampled.saturated ? "true" : "false") << '\n';
    os << "train_sites=" << ds.split.train_sites.size() << '\n';
    os << "val_sites=" << ds.split.validation_sites.size() << '\n';
    os << "train_records=" << ds.split.train.size() << '\n';
    os << "val_records=" << ds.split.validation.size() << '\n';
    os << "train_samples=" << ds.train.size() << '\n';
    os << "val_samples=" << ds.validation.size() << '\n';
    return os.str();
}

void write_dataset(const PreparedDataset& ds, const DistillConfig& cfg,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto dump = [](const std::vector<TaskSample>& samples) {
        std::string out;
        for (const auto& s : samples) {
            out += escape_tsv(s.input);
            out += '\t';
            out += escape_tsv(s.target);
            out += '\n';
        }
        return out;
    };
    write_text_file(dir / "train.tsv", dump(ds.train));
    write_text_file(dir / "val.tsv", dump(ds.validation));
    write_text_file(dir / "manifest", render_manifest(ds, cfg));
}

std::vector<SiteInput> load_site_inputs(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    constexpr std::string_view kSuffix = ".cmap.csv";
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path)) {
            const std::string name = e.path().filename().string();
            if (e.is_regular_file() && name.size() > kSuffix.size() &&
                name.compare(name.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0) {
                files.push_back(e.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    std::vector<SiteInput> out;
    for (const auto& f : files) {
        auto parsed = parse_cmap(read_text_file(f), f.string());
        std::string site = parsed.site;
        if (site.empty()) {
            site = f.filename().string();
            if (site.size() > kSuffix.size() &&
                site.compare(site.size() - kSuffix.size(), kSuffix.size(), kSuffix) == 0) {
                site.resize(site.size() - kSuffix.size());
            }
        }
        out.push_back({std::move(site), std::move(parsed.cmap)});
    }
    return out;
}

}  // namespace dpscan
