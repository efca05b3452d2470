#include "dpscan/crawler.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <nlohmann/json.hpp>
#include <regex>
#include <thread>

#include "dpscan/errors.hpp"

namespace dpscan {

namespace {

using Clock = std::chrono::steady_clock;

std::string combination_name(const std::set<DeceptiveCategory>& cats) {
    if (cats.empty()) return "(none)";
    std::string out;
    for (auto c : kAllCategories) {
        if (!cats.count(c)) continue;
        if (!out.empty()) out += '+';
        out += name_of(c);
    }
    return out;
}

SiteResult analyze_site(const std::string& url, const CrawlConfig& cfg,
                        const CrawlBackends& backends, const PipelineConfig& pipeline) {
    SiteResult r;
    const auto start = Clock::now();
    auto check_deadline = [&](const char* stage) {
        if (Clock::now() - start > cfg.site_timeout) {
            throw Error(std::string("timed out after ") + stage);
        }
    };
    try {
        r.site = domain_of(url);
        if ((cfg.language_filter_enabled && !cfg.language_filter(r.site)) ||
            (cfg.nsfw_filter_enabled && !cfg.nsfw_filter(r.site))) {
            r.status = SiteStatus::filtered;
            return r;
        }
        if (backends.browser == nullptr) throw ConfigError("no browser driver configured");
        auto counter = make_interactable_counter(*backends.browser, backends.pipeline.detectors,
                                                 pipeline.vision);
        auto choice = select_candidate_page(r.site, backends.search, counter, cfg.max_results);
        r.page = choice.url;
        r.warnings = std::move(choice.warnings);
        check_deadline("page selection");
        Raster shot;
        try {
            shot = backends.browser->screenshot(r.page);
        } catch (const BackendError&) {
            throw;
        } catch (const std::exception& e) {
            throw BackendError(backends.browser->id(), e.what());
        }
        check_deadline("screenshot");
        r.cmap = analyze_screenshot(shot, backends.pipeline, pipeline, r.page);
        check_deadline("analysis");
        r.categories = categories_present(r.cmap);
        r.status = SiteStatus::ok;
    } catch (const std::exception& e) {
        r.status = SiteStatus::failed;
        r.error = e.what();
        r.cmap = {};
        r.categories.clear();
    }
    return r;
}

}  // namespace

InteractableCounter make_interactable_counter(BrowserDriver& browser,
                                              std::vector<DetectorBackend*> detectors,
                                              VisionConfig cfg) {
    return [&browser, detectors = std::move(detectors), cfg](const std::string& url) {
        return count_interactables(browser.screenshot(url), detectors, cfg);
    };
}

std::string domain_of(const std::string& url_or_domain) {
    static const std::regex re(R"(^\s*(?:[a-zA-Z][a-zA-Z0-9+.-]*://)?([^/?#:\s]+)(?::\d+)?)");
    std::smatch m;
    if (!std::regex_search(url_or_domain, m, re)) {
        throw InvalidArgument("cannot extract a domain from '" + url_or_domain + "'");
    }
    std::string d = m[1].str();
    std::transform(d.begin(), d.end(), d.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return d;
}

std::string landing_page(const std::string& domain) { return "https://" + domain + "/"; }

PageChoice select_candidate_page(const std::string& domain, SearchBackend* search,
                                 const InteractableCounter& count, std::size_t max_results) {
    PageChoice out;
    std::vector<std::string> results;
    if (search == nullptr) {
        out.url = landing_page(domain);
        return out;
    }
    try {
        results = search->search("site:" + domain, max_results);
    } catch (const std::exception& e) {
        out.warnings.push_back("search backend '" + search->id() + "' failed: " + e.what() +
                               "; using landing page");
        out.url = landing_page(domain);
        return out;
    }
    if (results.size() > max_results) results.resize(max_results);
    for (const auto& page : results) {
        std::size_t n = 0;
        try {
            n = count(page);
        } catch (const std::exception& e) {
            out.warnings.push_back("could not render '" + page + "': " + e.what());
            continue;
        }
        if (!out.interactables || n > *out.interactables) {
            out.url = page;
            out.interactables = n;
        }
    }
    if (!out.interactables) {
        if (results.empty()) out.warnings.push_back("no search results; using landing page");
        out.url = landing_page(domain);
    }
    return out;
}

void CrawlConfig::validate() const {
    if (workers < 1) throw ConfigError("worker cap must be >= 1");
    if (site_timeout.count() <= 0) throw ConfigError("site timeout must be positive");
    if (!language_filter || !nsfw_filter) throw ConfigError("site filters must be callable");
}

std::string_view name_of(SiteStatus s) noexcept {
    switch (s) {
        case SiteStatus::ok: return "ok";
        case SiteStatus::filtered: return "filtered";
        case SiteStatus::failed: return "failed";
    }
    return "failed";
}

int CrawlOutcome::exit_status() const noexcept { return aggregate.succeeded > 0 ? 0 : 1; }

std::set<DeceptiveCategory> categories_present(const ClassifiedMap& cmap) {
    std::set<DeceptiveCategory> out;
    for (const auto& l : cmap.labels) {
        if (l.cls.deceptive()) out.insert(l.cls.category);
    }
    return out;
}

CrawlAggregate aggregate_results(const std::vector<SiteResult>& results) {
    CrawlAggregate agg;
    for (const auto& r : results) {
        switch (r.status) {
            case SiteStatus::filtered: ++agg.filtered; continue;
            case SiteStatus::failed: ++agg.failed; continue;
            case SiteStatus::ok: break;
        }
        ++agg.succeeded;
        for (auto c : r.categories) ++agg.category_totals[c];
        ++agg.combinations[r.categories];
    }
    return agg;
}

CrawlOutcome analyze_url_list(const std::vector<std::string>& urls, const CrawlConfig& cfg,
                              const CrawlBackends& backends, const PipelineConfig& pipeline) {
    if (urls.empty()) throw InvalidArgument("URL list is empty");
    cfg.validate();
    pipeline.validate();
    CrawlOutcome out;
    out.results.resize(urls.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < urls.size(); i = next++) {
            out.results[i] = analyze_site(urls[i], cfg, backends, pipeline);
        }
    };
    const std::size_t n = std::min(cfg.workers, urls.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
        worker();
    }
    out.aggregate = aggregate_results(out.results);
    return out;
}

std::string render_combinations(const CrawlAggregate& agg) {
    std::vector<std::pair<std::string, std::size_t>> rows;
    for (const auto& [set, n] : agg.combinations) rows.emplace_back(combination_name(set), n);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::string out;
    for (const auto& [name, n] : rows) out += std::to_string(n) + "\t" + name + "\n";
    return out;
}

std::string render_crawl_json(const CrawlOutcome& outcome) {
    nlohmann::ordered_json j;
    auto sites = nlohmann::ordered_json::array();
    for (const auto& r : outcome.results) {
        nlohmann::ordered_json s;
        s["site"] = r.site;
        s["page"] = r.page;
        s["status"] = name_of(r.status);
        auto cats = nlohmann::ordered_json::array();
        for (auto c : r.categories) cats.push_back(name_of(c));
        s["categories"] = std::move(cats);
        s["rows"] = r.cmap.map.rows.size();
        s["deceptive_rows"] = r.cmap.deceptive_count();
        if (!r.error.empty()) s["error"] = r.error;
        if (!r.warnings.empty()) s["warnings"] = r.warnings;
        sites.push_back(std::move(s));
    }
    j["sites"] = std::move(sites);
    const auto& agg = outcome.aggregate;
    nlohmann::ordered_json a;
    a["succeeded"] = agg.succeeded;
    a["failed"] = agg.failed;
    a["filtered"] = agg.filtered;
    nlohmann::ordered_json totals;
    for (auto c : kAllCategories) {
        if (!is_deceptive(c)) continue;
        auto it = agg.category_totals.find(c);
        totals[std::string(name_of(c))] = it == agg.category_totals.end() ? 0 : it->second;
    }
    a["category_totals"] = std::move(totals);
    nlohmann::ordered_json combos;
    for (const auto& [set, n] : agg.combinations) combos[combination_name(set)] = n;
    a["combinations"] = std::move(combos);
    j["aggregate"] = std::move(a);
    return j.dump(2) + "\n";
}

}  // namespace dpscan
