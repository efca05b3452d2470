#pragma once

#include <string>
#include <vector>

#include "dpscan/chat.hpp"
#include "dpscan/classified_map.hpp"
#include "dpscan/classifier.hpp"
#include "dpscan/element_map_builder.hpp"
#include "dpscan/prompt.hpp"
#include "dpscan/raster.hpp"
#include "dpscan/vision.hpp"

namespace dpscan {

enum class LanguageMode { two_pass, local };

/// Non-owning handles to the pluggable backends. Which language backends are needed
/// depends on the LanguageMode.
struct Backends {
    OcrBackend* ocr = nullptr;
    std::vector<DetectorBackend*> detectors;
    ChatBackend* primary = nullptr;
    ChatBackend* verifier = nullptr;
    WindowModel* local = nullptr;
};

struct PipelineConfig {
    VisionConfig vision;
    MatchConfig match;
    PromptTemplate prompt = PromptTemplate::defaults();
    TwoPassOptions two_pass;
    LocalOptions local;
    LanguageMode mode = LanguageMode::two_pass;

    void validate() const;
};

struct Analysis {
    VisionResult vision;
    ClassifiedMap cmap;
};

/// Vision -> ElementMap -> language. Failures are rethrown as StageError naming the
/// stage ("vision", "elementmap" or "language") and, when known, the backend.
/// An empty ElementMap skips the language stage.
Analysis analyze_screenshot_full(const Raster& image, const Backends& backends,
                                 const PipelineConfig& cfg, std::string source = {});

ClassifiedMap analyze_screenshot(const Raster& image, const Backends& backends,
                                 const PipelineConfig& cfg, std::string source = {});

/// Fused detections whose kind is not text.
std::size_t count_interactables(const Raster& image, const std::vector<DetectorBackend*>& detectors,
                                const VisionConfig& cfg);

}  // namespace dpscan
