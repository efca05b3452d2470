#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dpscan/color.hpp"
#include "dpscan/geometry.hpp"

namespace dpscan {

/// 8-bit RGB image, row-major, 3 bytes per pixel.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, Rgb fill = kWhite);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }
    BoundingBox bounds() const noexcept { return {0, 0, width_, height_}; }

    Rgb at(int x, int y) const noexcept {
        const auto* p = &pixels_[3 * (static_cast<std::size_t>(y) * width_ + x)];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Rgb c) noexcept {
        auto* p = &pixels_[3 * (static_cast<std::size_t>(y) * width_ + x)];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }
    /// Fills the box (clipped to the image).
    void fill(const BoundingBox& box, Rgb c) noexcept;

    std::span<const std::uint8_t> data() const noexcept { return pixels_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Decodes an 8-bit RGB or RGBA PNG (alpha is discarded). Throws ParseError.
Raster decode_png(std::span<const std::uint8_t> bytes);
Raster read_png(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const Raster& image);
void write_png(const Raster& image, const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Ignores ASCII whitespace. Throws ParseError on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace dpscan
