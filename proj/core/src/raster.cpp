#include "dpscan/raster.hpp"

#include <png.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include "dpscan/errors.hpp"

namespace dpscan {

Raster::Raster(int width, int height, Rgb fill)
    : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("negative raster size");
    pixels_.resize(3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = fill.r;
        pixels_[i + 1] = fill.g;
        pixels_[i + 2] = fill.b;
    }
}

void Raster::fill(const BoundingBox& box, Rgb c) noexcept {
    const int x1 = std::clamp(box.x1, 0, width_);
    const int x2 = std::clamp(box.x2, 0, width_);
    const int y1 = std::clamp(box.y1, 0, height_);
    const int y2 = std::clamp(box.y2, 0, height_);
    for (int y = y1; y < y2; ++y) {
        for (int x = x1; x < x2; ++x) set(x, y, c);
    }
}

Raster decode_png(std::span<const std::uint8_t> bytes) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
        throw ParseError(0, std::string("not a PNG image: ") + img.message);
    }
    img.format = PNG_FORMAT_RGB;
    Raster out(static_cast<int>(img.width), static_cast<int>(img.height));
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw ParseError(0, "PNG decode failed: " + msg);
    }
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const auto* p = &buf[3 * (static_cast<std::size_t>(y) * out.width() + x)];
            out.set(x, y, {p[0], p[1], p[2]});
        }
    }
    return out;
}

Raster read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

std::vector<std::uint8_t> encode_png(const Raster& image) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.data().data(), 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + img.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.data().data(), 0,
                                   nullptr)) {
        throw Error(std::string("PNG encode failed: ") + img.message);
    }
    out.resize(size);
    return out;
}

void write_png(const Raster& image, const std::filesystem::path& path) {
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::string clean;
    clean.reserve(text.size());
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
    }
    if (clean.size() % 4 != 0) throw ParseError(0, "base64 length is not a multiple of 4");
    if (clean.empty()) return {};
    std::vector<std::uint8_t> out(3 * clean.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                  static_cast<int>(clean.size()));
    if (n < 0) throw ParseError(0, "invalid base64");
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
    std::size_t pad = 0;
    if (clean.back() == '=') ++pad;
    if (clean.size() >= 2 && clean[clean.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

}  // namespace dpscan
