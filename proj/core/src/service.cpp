#include "dpscan/service.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <thread>

#include "dpscan/errors.hpp"
#include "dpscan/raster.hpp"

namespace dpscan {

namespace {

constexpr std::string_view kPngSignature = "\x89PNG\r\n\x1a\n";
constexpr std::string_view kDataPrefix = "data:";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::uint8_t> decode_base64_or_data_url(const std::string& text) {
    std::string payload = trim(text);
    if (payload.compare(0, kDataPrefix.size(), kDataPrefix) == 0) {
        const auto comma = payload.find(',');
        if (comma == std::string::npos) throw InvalidArgument("data URL without payload");
        const std::string header = payload.substr(0, comma);
        if (header.find(";base64") == std::string::npos) {
            throw InvalidArgument("data URL is not base64-encoded");
        }
        payload.erase(0, comma + 1);
    }
    if (payload.empty()) throw InvalidArgument("empty image payload");
    try {
        return base64_decode(payload);
    } catch (const Error& e) {
        throw InvalidArgument(std::string("image is not valid base64: ") + e.what());
    }
}

ServiceResponse json_error(int status, const std::string& message, const std::string& backend = {}) {
    nlohmann::ordered_json j;
    j["error"] = message;
    if (!backend.empty()) j["backend"] = backend;
    return {status, j.dump(), "application/json"};
}

}  // namespace

std::vector<std::uint8_t> decode_image_payload(const std::string& body,
                                               const std::string& content_type) {
    if (body.empty()) throw InvalidArgument("empty request body");
    if (body.compare(0, kPngSignature.size(), kPngSignature) == 0) {
        return {body.begin(), body.end()};
    }
    const std::string first = trim(std::string_view(body).substr(0, 64));
    if (content_type.find("json") != std::string::npos || (!first.empty() && first[0] == '{')) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("image") || !j["image"].is_string()) {
            throw InvalidArgument("JSON body must have a string field \"image\"");
        }
        return decode_base64_or_data_url(j["image"].get<std::string>());
    }
    return decode_base64_or_data_url(body);
}

std::string annotations_json(const ClassifiedMap& cmap) {
    auto list = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < cmap.map.rows.size(); ++i) {
        const auto& row = cmap.map.rows[i];
        const auto& cls = cmap.labels.at(i).cls;
        nlohmann::ordered_json a;
        a["line_id"] = row.line_id;
        a["bbox"] = {row.box.x1, row.box.y1, row.box.x2, row.box.y2};
        a["kind"] = display_of(row.kind);
        a["text"] = row.text;
        a["category"] = name_of(cls.category);
        a["subtype"] = name_of(cls.subtype);
        a["reasoning"] = cls.reasoning;
        list.push_back(std::move(a));
    }
    nlohmann::ordered_json j;
    j["annotations"] = std::move(list);
    return j.dump();
}

struct AnalysisService::Impl {
    Backends backends;
    PipelineConfig cfg;
    ServiceConfig service;
    httplib::Server server;
    std::thread thread;
    int bound_port = -1;
};

AnalysisService::AnalysisService(Backends backends, PipelineConfig cfg, ServiceConfig service)
    : impl_(std::make_unique<Impl>()) {
    cfg.validate();
    if (service.threads == 0) throw ConfigError("service needs at least one thread");
    impl_->backends = std::move(backends);
    impl_->cfg = std::move(cfg);
    impl_->service = std::move(service);

    auto& srv = impl_->server;
    const std::size_t threads = impl_->service.threads;
    srv.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    srv.set_payload_max_length(impl_->service.max_body_bytes);
    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    auto reply = [](httplib::Response& res, const ServiceResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    srv.Post("/analyze", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, handle_analyze(req.body, req.get_header_value("Content-Type")));
    });
    srv.Get("/health", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, handle_health());
    });
    srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

AnalysisService::~AnalysisService() { stop(); }

ServiceResponse AnalysisService::handle_analyze(const std::string& body,
                                                const std::string& content_type) const {
    Raster image;
    try {
        image = decode_png(decode_image_payload(body, content_type));
    } catch (const Error& e) {
        return json_error(400, e.what());
    }
    try {
        return {200, annotations_json(analyze_screenshot(image, impl_->backends, impl_->cfg)),
                "application/json"};
    } catch (const StageError& e) {
        if (!e.backend().empty()) return json_error(503, e.what(), e.backend());
        return json_error(500, e.what());
    } catch (const std::exception& e) {
        return json_error(500, e.what());
    }
}

ServiceResponse AnalysisService::handle_health() const {
    const auto& b = impl_->backends;
    nlohmann::ordered_json j;
    j["status"] = "ok";
    j["service"] = "dpscan";
    nlohmann::ordered_json backends;
    backends["ocr"] = b.ocr ? b.ocr->id() : "";
    auto dets = nlohmann::ordered_json::array();
    for (auto* d : b.detectors) dets.push_back(d->id());
    backends["detectors"] = std::move(dets);
    if (impl_->cfg.mode == LanguageMode::two_pass) {
        backends["mode"] = "two-pass";
        backends["primary"] = b.primary ? b.primary->id() : "";
        backends["verifier"] = b.verifier ? b.verifier->id() : "";
    } else {
        backends["mode"] = "local";
        backends["local"] = b.local ? b.local->id() : "";
    }
    j["backends"] = std::move(backends);
    return {200, j.dump(), "application/json"};
}

int AnalysisService::start() {
    auto& srv = impl_->server;
    const auto& s = impl_->service;
    if (s.port == 0) {
        impl_->bound_port = srv.bind_to_any_port(s.host);
    } else {
        impl_->bound_port = srv.bind_to_port(s.host, s.port) ? s.port : -1;
    }
    if (impl_->bound_port < 0) {
        throw ConfigError("cannot bind " + s.host + ":" + std::to_string(s.port));
    }
    impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
    srv.wait_until_ready();
    return impl_->bound_port;
}

void AnalysisService::run() {
    const auto& s = impl_->service;
    if (s.port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(s.host);
    } else {
        impl_->bound_port = impl_->server.bind_to_port(s.host, s.port) ? s.port : -1;
    }
    if (impl_->bound_port < 0) {
        throw ConfigError("cannot bind " + s.host + ":" + std::to_string(s.port));
    }
    impl_->server.listen_after_bind();
}

void AnalysisService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int AnalysisService::port() const noexcept { return impl_->bound_port; }

}  // namespace dpscan
