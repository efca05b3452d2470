#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpscan/color.hpp"
#include "dpscan/geometry.hpp"
#include "dpscan/raster.hpp"
#include "dpscan/taxonomy.hpp"

namespace dpscan {

/// A block of recognised text as returned by an OCR service.
struct OcrBlock {
    std::string text;
    BoundingBox box;

    friend bool operator==(const OcrBlock&, const OcrBlock&) = default;
};

/// OCR block enriched with font size and colours.
struct TextBlock {
    std::string text;
    BoundingBox box;
    int font_size = 0;
    Rgb bg_color = kWhite;
    Rgb font_color = kBlack;
    /// Set when the patch had a single colour and font_color is the bg complement.
    bool color_fallback = false;

    friend bool operator==(const TextBlock&, const TextBlock&) = default;
};

/// A localized UI element candidate prior to fusion.
struct Detection {
    UIElementKind kind = UIElementKind::button;
    BoundingBox box;
    double confidence = 0.0;
    std::string source;

    bool valid() const noexcept {
        return kind != UIElementKind::text && box.valid() && confidence >= 0.0 &&
               confidence <= 1.0;
    }
    friend bool operator==(const Detection&, const Detection&) = default;
};

struct VisionConfig {
    /// Horizontal merge gap in pixels; unset means 0.6 x median glyph height of the line.
    std::optional<double> merge_gap_x;
    /// Vertical merge gap in pixels; unset means 0.4 x line height.
    std::optional<double> merge_gap_y;
    double fusion_overlap_iou = 0.5;
    double min_confidence = 0.3;
    int color_quantization_step = 8;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

class OcrBackend {
public:
    virtual ~OcrBackend() = default;
    virtual std::vector<OcrBlock> recognize(const Raster& image) = 0;
    virtual std::string id() const = 0;
    virtual bool deterministic() const { return true; }
};

class DetectorBackend {
public:
    virtual ~DetectorBackend() = default;
    virtual std::vector<Detection> detect(const Raster& image) = 0;
    virtual std::string id() const = 0;
    virtual bool deterministic() const { return true; }
};

/// Concatenates OCR blocks by proximity: blocks on one visual line within merge_gap_x
/// are joined with a space, then vertically adjacent, horizontally overlapping blocks
/// within merge_gap_y are joined with a newline. Repeats until nothing merges, so the
/// result is a fixed point. Output is in reading order.
std::vector<OcrBlock> merge_ocr_blocks(std::vector<OcrBlock> blocks, const VisionConfig& cfg);

/// Font size and colours for one block. Throws InvalidArgument for a zero-area box.
TextBlock text_features(const Raster& image, const OcrBlock& block, const VisionConfig& cfg);

/// Union of all backends' detections; a detection is dropped when it is below
/// min_confidence or when it loses an overlap conflict (IoU >= fusion_overlap_iou)
/// against a detection from a different backend. Ties go to the earlier backend.
std::vector<Detection> fuse_detections(const std::vector<std::vector<Detection>>& per_backend,
                                       const VisionConfig& cfg);

struct VisionResult {
    std::vector<TextBlock> texts;
    std::vector<Detection> detections;
};

/// OCR -> merge -> features, paired with detect -> fuse. Backend exceptions are
/// rethrown as BackendError carrying the backend id.
VisionResult run_vision(const Raster& image, OcrBackend& ocr,
                        const std::vector<DetectorBackend*>& detectors,
                        const VisionConfig& cfg);

}  // namespace dpscan
