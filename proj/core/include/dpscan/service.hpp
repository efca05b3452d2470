#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dpscan/pipeline.hpp"

namespace dpscan {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8765;  // 0 picks a free port
    std::size_t threads = 8;
    std::size_t max_body_bytes = 32u << 20;
};

struct ServiceResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Accepts raw PNG bytes, base64 text, a `data:image/png;base64,` URL, or a JSON
/// object `{"image": <base64 or data URL>}`. Throws InvalidArgument with a reason.
std::vector<std::uint8_t> decode_image_payload(const std::string& body,
                                               const std::string& content_type);

/// `{"annotations":[{line_id,bbox,kind,text,category,subtype,reasoning},...]}` with
/// one entry per row, bbox as [x1,y1,x2,y2] in screenshot pixels.
std::string annotations_json(const ClassifiedMap& cmap);

/// Local analysis service: POST /analyze, GET /health. Requests are independent;
/// the only shared state is the backends themselves.
class AnalysisService {
public:
    AnalysisService(Backends backends, PipelineConfig cfg, ServiceConfig service = {});
    ~AnalysisService();
    AnalysisService(const AnalysisService&) = delete;
    AnalysisService& operator=(const AnalysisService&) = delete;

    ServiceResponse handle_analyze(const std::string& body, const std::string& content_type) const;
    ServiceResponse handle_health() const;

    /// Binds and serves on a background thread; returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();
    int port() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dpscan
