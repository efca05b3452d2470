#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "dpscan/audit.hpp"
#include "dpscan/crawler.hpp"
#include "dpscan/distill.hpp"
#include "dpscan/emap_csv.hpp"
#include "dpscan/errors.hpp"
#include "dpscan/evaluation.hpp"
#include "dpscan/external_command.hpp"
#include "dpscan/fixtures.hpp"
#include "dpscan/pipeline.hpp"
#include "dpscan/service.hpp"

namespace fs = std::filesystem;
using namespace dpscan;

namespace {

struct BackendOptions {
    std::string ocr_fixture;
    std::string ocr_cmd;
    std::vector<std::string> detection_fixtures;
    std::vector<std::string> detector_cmds;
    std::string local_model;
    bool remote = false;
    std::string primary_replies;
    std::string verifier_replies;
    std::string prompt_template;
    int retries = 2;
    int radius = kDefaultWindowRadius;
    bool no_reasoning = false;
    int max_in_flight = 4;
};

void add_backend_options(CLI::App* cmd, BackendOptions& o) {
    auto* g = cmd->add_option_group("backends");
    g->add_option("--ocr-fixture", o.ocr_fixture, "OCR blocks file (x1,y1,x2,y2,text)");
    g->add_option("--ocr-cmd", o.ocr_cmd, "OCR command; {image} is replaced by a PNG path");
    g->add_option("--detections", o.detection_fixtures, "Detection file per detector backend");
    g->add_option("--detector-cmd", o.detector_cmds, "Detector command; {image} is replaced by a PNG path");
    auto* local = g->add_option("--local-model", o.local_model, "Window-model JSONL file (small-model path)");
    auto* remote = g->add_flag("--remote", o.remote, "Use MODEL_ENDPOINT / MODEL_API_KEY for both passes");
    auto* scripted = g->add_option("--primary-replies", o.primary_replies,
                                   "JSON array of scripted first-pass replies");
    g->add_option("--verifier-replies", o.verifier_replies, "JSON array of scripted verifier replies");
    local->excludes(remote);
    local->excludes(scripted);
    remote->excludes(scripted);
    g->add_option("--prompt-template", o.prompt_template, "Prompt template JSON");
    g->add_option("--retries", o.retries, "Re-prompts per pass")->check(CLI::NonNegativeNumber);
    g->add_option("--window", o.radius, "Window radius for --local-model")->check(CLI::NonNegativeNumber);
    g->add_flag("--no-reasoning", o.no_reasoning, "Skip the [reason] query for --local-model");
    g->add_option("--max-in-flight", o.max_in_flight, "Concurrent requests per remote backend")
        ->check(CLI::PositiveNumber);
}

std::vector<std::string> read_reply_list(const std::string& path) {
    const auto j = nlohmann::json::parse(read_text_file(path));
    if (!j.is_array()) throw ConfigError(path + ": expected a JSON array of strings");
    return j.get<std::vector<std::string>>();
}

/// Owns every backend built from the command line.
struct OwnedBackends {
    std::unique_ptr<OcrBackend> ocr;
    std::vector<std::unique_ptr<DetectorBackend>> detectors;
    std::shared_ptr<ChatBackend> primary;
    std::shared_ptr<ChatBackend> verifier;
    std::unique_ptr<WindowModel> local;
    PipelineConfig cfg;

    Backends view() const {
        Backends b;
        b.ocr = ocr.get();
        for (const auto& d : detectors) b.detectors.push_back(d.get());
        b.primary = primary.get();
        b.verifier = verifier.get();
        b.local = local.get();
        return b;
    }
};

OwnedBackends make_backends(const BackendOptions& o, bool need_language = true) {
    OwnedBackends out;
    if (!o.ocr_fixture.empty()) {
        out.ocr = std::make_unique<ScriptedOcr>(ScriptedOcr::from_file(o.ocr_fixture));
    } else if (!o.ocr_cmd.empty()) {
        out.ocr = std::make_unique<CommandOcr>(o.ocr_cmd);
    } else {
        throw ConfigError("an OCR backend is required (--ocr-fixture or --ocr-cmd)");
    }
    for (std::size_t i = 0; i < o.detection_fixtures.size(); ++i) {
        out.detectors.push_back(std::make_unique<ScriptedDetector>(
            ScriptedDetector::from_file(o.detection_fixtures[i], "detector-" + std::to_string(i + 1))));
    }
    for (std::size_t i = 0; i < o.detector_cmds.size(); ++i) {
        out.detectors.push_back(
            std::make_unique<CommandDetector>(o.detector_cmds[i], "command-detector-" + std::to_string(i + 1)));
    }
    if (!o.prompt_template.empty()) out.cfg.prompt = PromptTemplate::from_json_file(o.prompt_template);
    out.cfg.two_pass.retries = o.retries;
    out.cfg.local.radius = o.radius;
    out.cfg.local.want_reasoning = !o.no_reasoning;
    if (!o.local_model.empty()) {
        out.cfg.mode = LanguageMode::local;
        out.local = std::make_unique<FileWindowModel>(FileWindowModel::load(o.local_model));
    } else if (o.remote) {
        std::shared_ptr<ChatBackend> remote = RemoteChatBackend::from_env();
        out.primary = std::make_shared<InFlightLimiter>(remote, o.max_in_flight);
        out.verifier = out.primary;
    } else if (!o.primary_replies.empty()) {
        out.primary = std::make_shared<ScriptedChatBackend>(read_reply_list(o.primary_replies), "scripted-primary");
        out.verifier = std::make_shared<ScriptedChatBackend>(
            o.verifier_replies.empty() ? std::vector<std::string>{""} : read_reply_list(o.verifier_replies),
            "scripted-verifier");
    } else if (need_language) {
        throw ConfigError("a language backend is required (--remote, --local-model or --primary-replies)");
    }
    return out;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

std::vector<fs::path> list_files(const fs::path& p, std::string_view suffix) {
    std::vector<fs::path> out;
    if (!fs::is_directory(p)) return {p};
    for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() >= suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Pairs prediction and gold files by name when both paths are directories.
std::vector<std::pair<fs::path, fs::path>> pair_files(const fs::path& pred, const fs::path& gold,
                                                      std::string_view suffix) {
    std::vector<std::pair<fs::path, fs::path>> out;
    if (fs::is_directory(pred) != fs::is_directory(gold)) {
        throw InvalidArgument("prediction and gold must both be files or both be directories");
    }
    if (!fs::is_directory(pred)) return {{pred, gold}};
    for (const auto& g : list_files(gold, suffix)) {
        const auto p = pred / g.filename();
        if (!fs::exists(p)) throw InvalidArgument("no prediction for " + g.filename().string());
        out.emplace_back(p, g);
    }
    return out;
}

std::vector<Classification> labels_of(const ClassifiedMap& c) {
    std::vector<Classification> out;
    for (const auto& l : c.labels) out.push_back(l.cls);
    return out;
}

std::unique_ptr<BrowserDriver> make_browser(const std::string& cmd, const std::string& dir) {
    if (!cmd.empty()) return std::make_unique<CommandBrowser>(cmd);
    if (!dir.empty()) return std::make_unique<DirectoryBrowser>(dir);
    return nullptr;
}

AnalysisService* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deceptive pattern scanner for web UI screenshots"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dpscan 0.3.0");

    // analyze
    BackendOptions analyze_be;
    std::string analyze_image, analyze_out = "cmap", analyze_output;
    auto* analyze = app.add_subcommand("analyze", "Analyze one screenshot");
    analyze->add_option("image", analyze_image, "PNG screenshot")->required()->check(CLI::ExistingFile);
    analyze->add_option("--out", analyze_out, "Output kind")
        ->check(CLI::IsMember({"emap", "cmap", "report", "annotations"}));
    analyze->add_option("-o,--output", analyze_output, "Output file (default stdout)");
    add_backend_options(analyze, analyze_be);

    // audit
    BackendOptions audit_be;
    std::string audit_target, audit_out, audit_browser_cmd, audit_shots, audit_search_cmd;
    auto* audit = app.add_subcommand("audit", "Produce an audit report for a URL or screenshot");
    audit->add_option("target", audit_target, "URL, domain or PNG screenshot")->required();
    audit->add_option("--out", audit_out, "Report file; .html renders HTML, anything else JSON")->required();
    audit->add_option("--browser-cmd", audit_browser_cmd, "Screenshot command; {url} and {out} are substituted");
    audit->add_option("--screenshot-dir", audit_shots, "Directory of <domain>.png screenshots");
    audit->add_option("--search-cmd", audit_search_cmd, "Search command; {query} and {limit} are substituted");
    add_backend_options(audit, audit_be);

    // crawl
    BackendOptions crawl_be;
    std::string crawl_list, crawl_out, crawl_browser_cmd, crawl_shots, crawl_search_cmd;
    std::size_t crawl_workers = 8;
    int crawl_timeout_s = 120;
    auto* crawl = app.add_subcommand("crawl", "Analyze a list of sites");
    crawl->add_option("urls", crawl_list, "File with one URL or domain per line")->required()->check(CLI::ExistingFile);
    crawl->add_option("--out", crawl_out, "Output directory")->required();
    crawl->add_option("--workers", crawl_workers, "Worker cap")->check(CLI::PositiveNumber);
    crawl->add_option("--timeout", crawl_timeout_s, "Per-site budget in seconds")->check(CLI::PositiveNumber);
    crawl->add_option("--browser-cmd", crawl_browser_cmd, "Screenshot command; {url} and {out} are substituted");
    crawl->add_option("--screenshot-dir", crawl_shots, "Directory of <domain>.png screenshots");
    crawl->add_option("--search-cmd", crawl_search_cmd, "Search command; {query} and {limit} are substituted");
    add_backend_options(crawl, crawl_be);

    // distill prep
    auto* distill = app.add_subcommand("distill", "Distillation dataset tools");
    distill->require_subcommand(1);
    DistillConfig dcfg;
    std::string prep_in, prep_out;
    auto* prep = distill->add_subcommand("prep", "Build train/val TSV files from classified maps");
    prep->add_option("in", prep_in, ".cmap.csv file or directory")->required()->check(CLI::ExistingPath);
    prep->add_option("outdir", prep_out, "Output directory")->required();
    prep->add_flag("--legacy", dcfg.legacy_mode, "Emit [classify]/[reason] samples");
    prep->add_flag("--alias", dcfg.alias_mode, "Use single-token alias targets");
    prep->add_option("--seed", dcfg.seed, "Sampling seed");
    prep->add_option("--fraction", dcfg.non_deceptive_target_fraction, "Non-deceptive target fraction");
    prep->add_option("--window", dcfg.window, "Window radius");
    prep->add_option("--split", dcfg.split_ratio, "Train share of records");
    prep->add_option("--alpha", dcfg.alpha, "Loss weight recorded in the manifest");

    // eval
    auto* eval = app.add_subcommand("eval", "Score predictions against gold labels");
    eval->require_subcommand(1);
    std::string eval_pred, eval_gold, eval_format = "text";
    double eval_iou = 0.5, eval_conf = 0.3;
    auto* eval_det = eval->add_subcommand("det", "Detector evaluation over detection files");
    auto* eval_cls = eval->add_subcommand("cls", "Classification evaluation over .cmap.csv files");
    for (auto* sub : {eval_det, eval_cls}) {
        sub->add_option("pred", eval_pred, "Prediction file or directory")->required()->check(CLI::ExistingPath);
        sub->add_option("gold", eval_gold, "Gold file or directory")->required()->check(CLI::ExistingPath);
        sub->add_option("--format", eval_format, "Output format")->check(CLI::IsMember({"text", "kv"}));
    }
    eval_det->add_option("--iou", eval_iou, "IoU threshold");
    eval_det->add_option("--conf", eval_conf, "Confidence threshold");

    // serve
    BackendOptions serve_be;
    ServiceConfig scfg;
    auto* serve = app.add_subcommand("serve", "Run the local analysis service");
    serve->add_option("--host", scfg.host, "Bind address");
    serve->add_option("--port", scfg.port, "Port (0 picks a free one)");
    serve->add_option("--threads", scfg.threads, "Request threads")->check(CLI::PositiveNumber);
    add_backend_options(serve, serve_be);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            auto owned = make_backends(analyze_be, analyze_out != "emap");
            const auto image = read_png(analyze_image);
            if (analyze_out == "emap") {
                auto vision = run_vision(image, *owned.ocr, owned.view().detectors, owned.cfg.vision);
                auto map = build_element_map(vision.texts, vision.detections, owned.cfg.match, analyze_image);
                emit(serialize_csv(map), analyze_output);
                return 0;
            }
            const auto cmap = analyze_screenshot(image, owned.view(), owned.cfg, analyze_image);
            if (analyze_out == "cmap") {
                emit(serialize_cmap(cmap), analyze_output);
            } else if (analyze_out == "annotations") {
                emit(annotations_json(cmap) + "\n", analyze_output);
            } else {
                emit(render_audit_json(generate_audit_report(cmap, analyze_image)), analyze_output);
            }
            return 0;
        }

        if (audit->parsed()) {
            auto owned = make_backends(audit_be);
            Raster image;
            std::string target = audit_target;
            if (fs::is_regular_file(audit_target)) {
                image = read_png(audit_target);
            } else {
                auto browser = make_browser(audit_browser_cmd, audit_shots);
                if (!browser) throw ConfigError("auditing a URL needs --browser-cmd or --screenshot-dir");
                std::unique_ptr<SearchBackend> search;
                if (!audit_search_cmd.empty()) search = std::make_unique<CommandSearch>(audit_search_cmd);
                auto counter = make_interactable_counter(*browser, owned.view().detectors, owned.cfg.vision);
                auto choice = select_candidate_page(domain_of(audit_target), search.get(), counter);
                for (const auto& w : choice.warnings) std::cerr << "warning: " << w << '\n';
                target = choice.url;
                image = browser->screenshot(target);
            }
            const auto report = generate_audit_report(analyze_screenshot(image, owned.view(), owned.cfg, target), target);
            const bool html = fs::path(audit_out).extension() == ".html";
            write_text_file(audit_out, html ? render_audit_html(report) : render_audit_json(report));
            std::cout << "score " << report.score << " (" << report.n << " findings) -> " << audit_out << '\n';
            return 0;
        }

        if (crawl->parsed()) {
            auto owned = make_backends(crawl_be);
            std::vector<std::string> urls;
            std::istringstream is(read_text_file(crawl_list));
            for (std::string line; std::getline(is, line);) {
                while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
                if (!line.empty() && line[0] != '#') urls.push_back(line);
            }
            auto browser = make_browser(crawl_browser_cmd, crawl_shots);
            if (!browser) throw ConfigError("crawling needs --browser-cmd or --screenshot-dir");
            std::unique_ptr<SearchBackend> search;
            if (!crawl_search_cmd.empty()) search = std::make_unique<CommandSearch>(crawl_search_cmd);
            CrawlConfig ccfg;
            ccfg.workers = crawl_workers;
            ccfg.site_timeout = std::chrono::seconds(crawl_timeout_s);
            ccfg.search_backend = search ? search->id() : "none";
            CrawlBackends cb{owned.view(), browser.get(), search.get()};
            const auto outcome = analyze_url_list(urls, ccfg, cb, owned.cfg);
            fs::create_directories(crawl_out);
            for (const auto& r : outcome.results) {
                if (r.status == SiteStatus::ok) {
                    write_text_file(fs::path(crawl_out) / (sanitize_for_filename(r.site) + ".cmap.csv"),
                                    serialize_cmap(r.cmap, r.site));
                }
                if (r.status == SiteStatus::failed) std::cerr << r.site << ": " << r.error << '\n';
            }
            write_text_file(fs::path(crawl_out) / "summary.json", render_crawl_json(outcome));
            write_text_file(fs::path(crawl_out) / "combinations.tsv", render_combinations(outcome.aggregate));
            std::cout << outcome.aggregate.succeeded << " analyzed, " << outcome.aggregate.failed << " failed, "
                      << outcome.aggregate.filtered << " filtered\n";
            return outcome.exit_status();
        }

        if (prep->parsed()) {
            const auto inputs = load_site_inputs(prep_in);
            const auto ds = prepare_dataset(inputs, dcfg);
            if (ds.sampled.saturated) std::cerr << "warning: " << ds.sampled.warning << '\n';
            write_dataset(ds, dcfg, prep_out);
            std::cout << ds.train.size() << " train / " << ds.validation.size() << " validation samples -> "
                      << prep_out << '\n';
            return 0;
        }

        if (eval_det->parsed()) {
            std::vector<std::vector<Detection>> preds, gold;
            for (const auto& [p, g] : pair_files(eval_pred, eval_gold, ".txt")) {
                preds.push_back(parse_detections(read_text_file(p)));
                gold.push_back(parse_detections(read_text_file(g)));
            }
            const auto rep = match_detections(preds, gold, eval_iou, eval_conf);
            std::cout << (eval_format == "kv" ? render_kv(rep) : render_text(rep));
            return 0;
        }

        if (eval_cls->parsed()) {
            std::vector<Classification> preds, gold;
            for (const auto& [p, g] : pair_files(eval_pred, eval_gold, ".cmap.csv")) {
                auto pl = labels_of(parse_cmap(read_text_file(p), p.string()).cmap);
                auto gl = labels_of(parse_cmap(read_text_file(g), g.string()).cmap);
                if (pl.size() != gl.size()) {
                    throw InvalidArgument(p.string() + " and " + g.string() + " have different row counts");
                }
                preds.insert(preds.end(), pl.begin(), pl.end());
                gold.insert(gold.end(), gl.begin(), gl.end());
            }
            const auto reps = classification_report(preds, gold);
            for (const auto* r : {&reps.category, &reps.subtype, &reps.binary}) {
                std::cout << (eval_format == "kv" ? render_kv(*r) : render_text(*r));
                if (eval_format == "text") std::cout << '\n';
            }
            return 0;
        }

        if (serve->parsed()) {
            auto owned = make_backends(serve_be);
            AnalysisService service(owned.view(), owned.cfg, scfg);
            g_service = &service;
            std::signal(SIGINT, [](int) { if (g_service) g_service->stop(); });
            std::signal(SIGTERM, [](int) { if (g_service) g_service->stop(); });
            std::cerr << "listening on " << scfg.host << ":" << scfg.port << '\n';
            service.run();
            g_service = nullptr;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
