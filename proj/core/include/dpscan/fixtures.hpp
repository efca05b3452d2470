#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dpscan/vision.hpp"

namespace dpscan {

// Text formats for scripted backends.
//
// Detections, one per line:  kind,x1,y1,x2,y2,confidence,source
// OCR blocks, one per line:  x1,y1,x2,y2,text   (text CSV-quoted when needed)
//
// Coordinates may be fractional; they are rounded half-up on ingestion.

std::vector<Detection> parse_detections(std::string_view text);
std::string serialize_detections(const std::vector<Detection>& dets);

std::vector<OcrBlock> parse_ocr_blocks(std::string_view text);
std::string serialize_ocr_blocks(const std::vector<OcrBlock>& blocks);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Returns the same blocks for every image.
class ScriptedOcr final : public OcrBackend {
public:
    explicit ScriptedOcr(std::vector<OcrBlock> blocks, std::string id = "scripted-ocr")
        : blocks_(std::move(blocks)), id_(std::move(id)) {}
    static ScriptedOcr from_file(const std::filesystem::path& path);

    std::vector<OcrBlock> recognize(const Raster&) override { return blocks_; }
    std::string id() const override { return id_; }

private:
    std::vector<OcrBlock> blocks_;
    std::string id_;
};

/// Returns the same detections for every image.
class ScriptedDetector final : public DetectorBackend {
public:
    explicit ScriptedDetector(std::vector<Detection> dets, std::string id = "scripted-detector")
        : dets_(std::move(dets)), id_(std::move(id)) {}
    static ScriptedDetector from_file(const std::filesystem::path& path, std::string id = {});

    std::vector<Detection> detect(const Raster&) override { return dets_; }
    std::string id() const override { return id_; }

private:
    std::vector<Detection> dets_;
    std::string id_;
};

}  // namespace dpscan
