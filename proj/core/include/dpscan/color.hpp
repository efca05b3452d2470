#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace dpscan {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    /// Parses `#RRGGBB` (case-insensitive). Throws InvalidArgument otherwise.
    static Rgb from_hex(std::string_view hex);
    /// Upper-case `#RRGGBB`.
    std::string hex() const;
    Rgb complement() const noexcept {
        return {static_cast<std::uint8_t>(255 - r), static_cast<std::uint8_t>(255 - g),
                static_cast<std::uint8_t>(255 - b)};
    }
    std::uint32_t packed() const noexcept {
        return (std::uint32_t{r} << 16) | (std::uint32_t{g} << 8) | std::uint32_t{b};
    }

    friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

}  // namespace dpscan
