#include "dpscan/pipeline.hpp"

#include <algorithm>

#include "dpscan/errors.hpp"

namespace dpscan {

void PipelineConfig::validate() const {
    vision.validate();
    match.validate();
    prompt.validate();
    if (two_pass.retries < 0) throw ConfigError("retries must be >= 0");
    if (local.radius < 0) throw ConfigError("window radius must be >= 0");
}

Analysis analyze_screenshot_full(const Raster& image, const Backends& backends,
                                 const PipelineConfig& cfg, std::string source) {
    cfg.validate();
    if (backends.ocr == nullptr) throw ConfigError("no OCR backend configured");
    if (cfg.mode == LanguageMode::two_pass &&
        (backends.primary == nullptr || backends.verifier == nullptr)) {
        throw ConfigError("two-pass mode needs a primary and a verifier backend");
    }
    if (cfg.mode == LanguageMode::local && backends.local == nullptr) {
        throw ConfigError("local mode needs a window model");
    }

    Analysis out;
    try {
        out.vision = run_vision(image, *backends.ocr, backends.detectors, cfg.vision);
    } catch (const BackendError& e) {
        throw StageError("vision", e.what(), e.backend());
    } catch (const Error& e) {
        throw StageError("vision", e.what());
    }

    ElementMap map;
    try {
        map = build_element_map(out.vision.texts, out.vision.detections, cfg.match,
                                std::move(source));
    } catch (const Error& e) {
        throw StageError("elementmap", e.what());
    }

    if (map.rows.empty()) {
        out.cmap.map = std::move(map);
        return out;
    }
    try {
        out.cmap = cfg.mode == LanguageMode::two_pass
                       ? classify_two_pass(map, *backends.primary, *backends.verifier, cfg.prompt,
                                           cfg.two_pass)
                       : classify_local(map, *backends.local, cfg.local);
    } catch (const BackendError& e) {
        throw StageError("language", e.what(), e.backend());
    } catch (const Error& e) {
        throw StageError("language", e.what());
    }
    return out;
}

ClassifiedMap analyze_screenshot(const Raster& image, const Backends& backends,
                                 const PipelineConfig& cfg, std::string source) {
    return analyze_screenshot_full(image, backends, cfg, std::move(source)).cmap;
}

std::size_t count_interactables(const Raster& image, const std::vector<DetectorBackend*>& detectors,
                                const VisionConfig& cfg) {
    std::vector<std::vector<Detection>> per_backend;
    for (auto* d : detectors) {
        try {
            per_backend.push_back(d->detect(image));
        } catch (const std::exception& e) {
            throw BackendError(d->id(), e.what());
        }
    }
    const auto fused = fuse_detections(per_backend, cfg);
    return static_cast<std::size_t>(std::count_if(fused.begin(), fused.end(), [](const Detection& d) {
        return d.kind != UIElementKind::text;
    }));
}

}  // namespace dpscan
