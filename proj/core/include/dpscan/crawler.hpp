#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpscan/pipeline.hpp"

namespace dpscan {

/// Returns up to `limit` result URLs for a query, best first.
class SearchBackend {
public:
    virtual ~SearchBackend() = default;
    virtual std::vector<std::string> search(const std::string& query, std::size_t limit) = 0;
    virtual std::string id() const = 0;
};

/// Renders a URL and returns a viewport screenshot.
class BrowserDriver {
public:
    virtual ~BrowserDriver() = default;
    virtual Raster screenshot(const std::string& url) = 0;
    virtual std::string id() const = 0;
};

/// Interactable-element count of a rendered page.
using InteractableCounter = std::function<std::size_t(const std::string& url)>;

/// Screenshots the page and counts fused detections with kind != text.
InteractableCounter make_interactable_counter(BrowserDriver& browser,
                                              std::vector<DetectorBackend*> detectors,
                                              VisionConfig cfg);

struct PageChoice {
    std::string url;
    std::optional<std::size_t> interactables;  // unset for the landing-page fallback
    std::vector<std::string> warnings;
};

/// Normalizes "example.com", "https://example.com/path" etc. to "example.com".
std::string domain_of(const std::string& url_or_domain);
std::string landing_page(const std::string& domain);

/// Queries `site:<domain>` (top 10), counts interactable elements on each result and
/// returns the maximum, earliest-ranked on ties. Falls back to the landing page when
/// there is no search backend, no result, or the search fails.
PageChoice select_candidate_page(const std::string& domain, SearchBackend* search,
                                 const InteractableCounter& count, std::size_t max_results = 10);

/// Site-level filter; return false to skip the site.
using UrlFilter = std::function<bool(const std::string& domain)>;

struct CrawlConfig {
    std::size_t workers = 8;
    /// Checked between pipeline stages; a site over budget is recorded as timed out.
    std::chrono::milliseconds site_timeout{std::chrono::minutes(2)};
    bool language_filter_enabled = false;
    bool nsfw_filter_enabled = false;
    UrlFilter language_filter = [](const std::string&) { return true; };
    UrlFilter nsfw_filter = [](const std::string&) { return true; };
    std::string search_backend = "none";
    std::size_t max_results = 10;

    void validate() const;
};

enum class SiteStatus { ok, filtered, failed };

std::string_view name_of(SiteStatus s) noexcept;

struct SiteResult {
    std::string site;
    std::string page;
    SiteStatus status = SiteStatus::failed;
    ClassifiedMap cmap;
    std::set<DeceptiveCategory> categories;  // deceptive categories present
    std::string error;
    std::vector<std::string> warnings;
};

struct CrawlAggregate {
    std::map<DeceptiveCategory, std::size_t> category_totals;  // sites containing each category
    std::map<std::set<DeceptiveCategory>, std::size_t> combinations;  // including the empty set
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    std::size_t filtered = 0;
};

struct CrawlOutcome {
    std::vector<SiteResult> results;  // input order
    CrawlAggregate aggregate;

    /// 0 when at least one site was analyzed, 1 otherwise.
    int exit_status() const noexcept;
};

/// Distinct deceptive categories among the map's labels.
std::set<DeceptiveCategory> categories_present(const ClassifiedMap& cmap);

/// Recount over successful results.
CrawlAggregate aggregate_results(const std::vector<SiteResult>& results);

struct CrawlBackends {
    Backends pipeline;
    BrowserDriver* browser = nullptr;
    SearchBackend* search = nullptr;
};

/// Runs every site through page selection, screenshot and analysis on a bounded
/// worker pool. Per-site failures are recorded and never abort the batch.
/// Throws InvalidArgument for an empty URL list.
CrawlOutcome analyze_url_list(const std::vector<std::string>& urls, const CrawlConfig& cfg,
                              const CrawlBackends& backends, const PipelineConfig& pipeline);

/// Summary document: per-site status and the aggregate, keys in fixed order.
std::string render_crawl_json(const CrawlOutcome& outcome);

/// One line per combination: `count<TAB>cat+cat` (`(none)` for the empty set),
/// ordered by count descending then by name.
std::string render_combinations(const CrawlAggregate& agg);

}  // namespace dpscan
