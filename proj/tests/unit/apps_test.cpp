#include <doctest.h>

#include <nlohmann/json.hpp>
#include <stdexcept>

#include "dpscan/audit.hpp"
#include "dpscan/crawler.hpp"
#include "dpscan/emap_csv.hpp"
#include "dpscan/errors.hpp"
#include "dpscan/pipeline.hpp"
#include "keyed.hpp"
#include "scenes.hpp"

using namespace dpscan;

namespace {

ClassifiedMap with_labels(const std::vector<Classification>& labels) {
    ClassifiedMap c;
    int id = 0;
    for (const auto& l : labels) {
        ++id;
        c.map.rows.push_back({id, "Row <" + std::to_string(id) + ">", UIElementKind::button,
                              {0, 40 * id, 100, 40 * id + 30}, 20, kWhite, kBlack});
        c.labels.push_back({l, Provenance::pass1, false, {}});
    }
    return c;
}

Classification label(DeceptiveSubtype s, std::string why = "why") { return {category_of(s), s, std::move(why)}; }

struct ListSearch final : SearchBackend {
    std::vector<std::string> results;
    bool fail = false;
    std::vector<std::string> search(const std::string&, std::size_t limit) override {
        if (fail) throw std::runtime_error("rate limited");
        auto out = results;
        if (out.size() > limit) out.resize(limit);
        return out;
    }
    std::string id() const override { return "list-search"; }
};

struct FailingOcr final : OcrBackend {
    std::vector<OcrBlock> recognize(const Raster&) override { throw std::runtime_error("503 from OCR"); }
    std::string id() const override { return "cloud-ocr"; }
};

PipelineConfig keyed_pipeline() { return PipelineConfig{}; }

}  // namespace

TEST_SUITE("apps") {

TEST_CASE("audit score formula") {
    CHECK(audit_score(0) == 100);
    CHECK(audit_score(1) == 89);
    CHECK(audit_score(2) == 80);
    CHECK(audit_score(5) == 50);
    CHECK(audit_score(10) == 0);
    CHECK(audit_score(12) == 0);
    for (std::size_t n = 1; n <= 20; ++n) CHECK(audit_score(n) <= audit_score(n - 1));
}

TEST_CASE("audit report") {
    auto r = generate_audit_report(with_labels({Classification::non_deceptive()}), "page");
    CHECK(r.score == 100);
    CHECK(r.findings.empty());

    r = generate_audit_report(with_labels({label(DeceptiveSubtype::nudge), Classification::non_deceptive()}), "page");
    CHECK(r.score == 89);
    CHECK(r.n == 1);

    r = generate_audit_report(with_labels({label(DeceptiveSubtype::hidden_costs), label(DeceptiveSubtype::nudge),
                                           label(DeceptiveSubtype::disguised_ads), label(DeceptiveSubtype::confirmshaming),
                                           Classification::non_deceptive()}),
                              "https://shop.example/");
    CHECK(r.n == 4);
    CHECK(r.score == 60);
    REQUIRE(r.findings.size() == 4);
    CHECK(r.findings[0].cls.category == DeceptiveCategory::interface_interference);
    CHECK(r.findings[0].row.line_id == 2);
    CHECK(r.findings[1].row.line_id == 4);
    CHECK(r.findings[2].cls.category == DeceptiveCategory::sneaking);
    CHECK(r.findings[2].row.line_id == 1);

    const auto j = nlohmann::json::parse(render_audit_json(r));
    CHECK(j["score"] == 60);
    CHECK(j["findings"].size() == 4);
    CHECK(j["findings"][0]["bbox"] == nlohmann::json::array({0, 80, 100, 110}));
    CHECK(j["findings"][0]["subtype"] == "nudge");

    const auto html = render_audit_html(r);
    CHECK(html.find("Row &lt;2&gt;") != std::string::npos);
    CHECK(html.find("Row <2>") == std::string::npos);
    CHECK(html.find("hidden-costs") != std::string::npos);
    CHECK(html_escape("a&\"'<>") == "a&amp;&quot;&#39;&lt;&gt;");
}

TEST_CASE("end-to-end scenes reproduce their goldens") {
    const auto names = scenes::names();
    CHECK(names.size() >= 10);
    for (const auto& name : names) {
        CAPTURE(name);
        scenes::Stubs s(name);
        const auto a = analyze_screenshot_full(s.image, s.backends(), {}, name);
        CHECK(serialize_csv(a.cmap.map) == s.golden("expected.emap.csv"));
        CHECK(serialize_cmap(a.cmap) == s.golden("expected.cmap.csv"));
        CHECK(validate(a.cmap.map).empty());
    }
}

TEST_CASE("cookie banner preferences row") {
    scenes::Stubs s("cookie_banner");
    const auto c = analyze_screenshot(s.image, s.backends(), {});
    const auto it = std::find_if(c.map.rows.begin(), c.map.rows.end(), [](const auto& r) { return r.text == "Preferences"; });
    REQUIRE(it != c.map.rows.end());
    const auto& l = c.labels[static_cast<std::size_t>(it - c.map.rows.begin())];
    CHECK(it->kind == UIElementKind::checkbox_checked);
    CHECK(l.cls.category == DeceptiveCategory::obstruction);
    CHECK(l.cls.subtype == DeceptiveSubtype::pre_selection);

    PipelineConfig local;
    local.mode = LanguageMode::local;
    CHECK(serialize_cmap(analyze_screenshot(s.image, s.backends(), local)) == s.golden("expected.local.cmap.csv"));
}

TEST_CASE("blank page") {
    scenes::Stubs s("blank_page");
    const auto c = analyze_screenshot(s.image, s.backends(), {});
    CHECK(c.map.empty());
    CHECK(s.primary->calls() == 0);
    const auto r = generate_audit_report(c, "blank");
    CHECK(r.score == 100);
    CHECK(r.findings.empty());
}

TEST_CASE("stage errors name the stage and backend") {
    scenes::Stubs s("cookie_banner");
    FailingOcr bad;
    auto b = s.backends();
    b.ocr = &bad;
    try {
        analyze_screenshot(s.image, b, {});
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "vision");
        CHECK(e.backend() == "cloud-ocr");
    }

    b = s.backends();
    ScriptedChatBackend down([](const ChatRequest&) -> std::string { throw std::runtime_error("down"); }, "llm");
    b.primary = &down;
    try {
        analyze_screenshot(s.image, b, {});
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "language");
        CHECK(e.backend() == "llm");
    }

    b = s.backends();
    b.local = nullptr;
    PipelineConfig local;
    local.mode = LanguageMode::local;
    CHECK_THROWS_AS(analyze_screenshot(s.image, b, local), Error);
}

TEST_CASE("candidate page selection") {
    std::map<std::string, std::size_t> counts = {{"a", 12}, {"b", 30}, {"c", 7}};
    const InteractableCounter count = [&](const std::string& url) { return counts.at(url); };
    ListSearch search;
    search.results = {"a", "b", "c"};
    auto p = select_candidate_page("x.example", &search, count);
    CHECK(p.url == "b");
    CHECK(*p.interactables == 30);

    counts = {{"a", 30}, {"b", 30}};
    search.results = {"a", "b"};
    CHECK(select_candidate_page("x.example", &search, count).url == "a");

    search.results = {};
    p = select_candidate_page("x.example", &search, count);
    CHECK(p.url == "https://x.example/");
    CHECK_FALSE(p.interactables);

    search.fail = true;
    p = select_candidate_page("x.example", &search, count);
    CHECK(p.url == "https://x.example/");
    CHECK(p.warnings.size() == 1);

    CHECK(select_candidate_page("x.example", nullptr, count).url == "https://x.example/");

    // Only the top results are considered.
    search.fail = false;
    search.results.clear();
    counts.clear();
    for (int i = 0; i < 12; ++i) {
        search.results.push_back("p" + std::to_string(i));
        counts["p" + std::to_string(i)] = static_cast<std::size_t>(i);
    }
    CHECK(select_candidate_page("x.example", &search, count).url == "p9");
}

TEST_CASE("domain normalization") {
    CHECK(domain_of("Example.COM") == "example.com");
    CHECK(domain_of("https://www.example.com/path?q=1") == "www.example.com");
    CHECK(domain_of("http://shop.example:8080") == "shop.example");
}

TEST_CASE("aggregation counts sets") {
    std::vector<SiteResult> results(3);
    for (auto& r : results) r.status = SiteStatus::ok;
    results[0].categories = {DeceptiveCategory::sneaking};
    results[1].categories = {DeceptiveCategory::sneaking, DeceptiveCategory::forced_action};
    const auto agg = aggregate_results(results);
    CHECK(agg.category_totals.at(DeceptiveCategory::sneaking) == 2);
    CHECK(agg.category_totals.at(DeceptiveCategory::forced_action) == 1);
    CHECK(agg.combinations.at({DeceptiveCategory::sneaking}) == 1);
    CHECK(agg.combinations.at({DeceptiveCategory::sneaking, DeceptiveCategory::forced_action}) == 1);
    CHECK(agg.combinations.at({}) == 1);
    const auto table = render_combinations(agg);
    CHECK(table.find("1\t(none)\n") != std::string::npos);
}

TEST_CASE("all sites failing") {
    keyed::Browser browser({1, 2, 3});
    keyed::Ocr ocr;
    ScriptedChatBackend chat(keyed::reply_for);
    CrawlBackends b;
    b.pipeline.ocr = &ocr;
    b.pipeline.primary = &chat;
    b.pipeline.verifier = &chat;
    b.browser = &browser;
    const auto out = analyze_url_list({keyed::domain(1), keyed::domain(2), keyed::domain(3)}, {}, b, keyed_pipeline());
    CHECK(out.aggregate.succeeded == 0);
    CHECK(out.aggregate.failed == 3);
    for (const auto& r : out.results) CHECK_FALSE(r.error.empty());
    CHECK(out.exit_status() != 0);
    CHECK_THROWS_AS(analyze_url_list({}, {}, b, keyed_pipeline()), InvalidArgument);
}

TEST_CASE("100-site batch matches an independent recount and isolates failures") {
    keyed::Ocr ocr;
    ScriptedChatBackend chat(keyed::reply_for);
    std::vector<std::string> urls;
    for (int k = 0; k < 100; ++k) urls.push_back(keyed::domain(k));

    const std::set<int> failing = {7, 33, 64};
    keyed::Browser browser(failing);
    CrawlBackends b;
    b.pipeline.ocr = &ocr;
    b.pipeline.primary = &chat;
    b.pipeline.verifier = &chat;
    b.browser = &browser;
    CrawlConfig cfg;
    cfg.workers = 6;
    const auto out = analyze_url_list(urls, cfg, b, keyed_pipeline());

    std::map<DeceptiveCategory, std::size_t> totals;
    std::map<std::set<DeceptiveCategory>, std::size_t> combos;
    for (int k = 0; k < 100; ++k) {
        const auto& r = out.results[static_cast<std::size_t>(k)];
        CHECK(r.site == keyed::domain(k));
        if (failing.count(k)) {
            CHECK(r.status == SiteStatus::failed);
            continue;
        }
        REQUIRE(r.status == SiteStatus::ok);
        const auto want = keyed::expected_categories(k);
        CHECK(r.categories == want);
        for (auto c : want) ++totals[c];
        ++combos[want];
    }
    CHECK(out.aggregate.category_totals == totals);
    CHECK(out.aggregate.combinations == combos);
    CHECK(out.aggregate.succeeded == 97);
    CHECK(out.aggregate.failed == 3);
    CHECK(out.exit_status() == 0);

    keyed::Browser healthy;
    b.browser = &healthy;
    const auto clean = analyze_url_list(urls, cfg, b, keyed_pipeline());
    for (std::size_t i = 0; i < urls.size(); ++i) {
        if (failing.count(static_cast<int>(i))) continue;
        CHECK(clean.results[i].cmap == out.results[i].cmap);
        CHECK(clean.results[i].categories == out.results[i].categories);
    }

    const auto j = nlohmann::json::parse(render_crawl_json(out));
    CHECK(j["aggregate"]["succeeded"] == 97);
    CHECK(j["sites"].size() == 100);
}

TEST_CASE("site filters") {
    keyed::Browser browser;
    keyed::Ocr ocr;
    ScriptedChatBackend chat(keyed::reply_for);
    CrawlBackends b;
    b.pipeline.ocr = &ocr;
    b.pipeline.primary = &chat;
    b.pipeline.verifier = &chat;
    b.browser = &browser;
    CrawlConfig cfg;
    cfg.language_filter_enabled = true;
    cfg.language_filter = [](const std::string& d) { return d != keyed::domain(2); };
    const auto out = analyze_url_list({keyed::domain(1), keyed::domain(2)}, cfg, b, keyed_pipeline());
    CHECK(out.results[1].status == SiteStatus::filtered);
    CHECK(out.aggregate.filtered == 1);
    CHECK(out.aggregate.succeeded == 1);
}

TEST_CASE("per-site timeout") {
    keyed::Browser browser;
    keyed::Ocr ocr;
    ScriptedChatBackend slow(
        [](const ChatRequest& r) {
            std::this_thread::sleep_for(std::chrono::milliseconds(30));
            return keyed::reply_for(r);
        },
        "slow");
    CrawlBackends b;
    b.pipeline.ocr = &ocr;
    b.pipeline.primary = &slow;
    b.pipeline.verifier = &slow;
    b.browser = &browser;
    CrawlConfig cfg;
    cfg.site_timeout = std::chrono::milliseconds(5);
    const auto out = analyze_url_list({keyed::domain(3)}, cfg, b, keyed_pipeline());
    CHECK(out.results[0].status == SiteStatus::failed);
    CHECK(out.results[0].error.find("timed out") != std::string::npos);
}

}
