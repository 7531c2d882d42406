#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pris/image.hpp"

namespace pris::bitpack {

/// 32-bit-per-sample container holding an 8-bit host in its top byte and
/// an 8-bit secret in its low byte.
struct WideContainer {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint32_t> words;

    bool operator==(const WideContainer&) const = default;
};

inline constexpr std::uint32_t kHostShift = 24;

/// c = 2^24 * host + secret
constexpr std::uint32_t pack_value(std::uint8_t host, std::uint8_t secret) noexcept {
    return (static_cast<std::uint32_t>(host) << kHostShift) + secret;
}

/// e = c - 2^24 * floor(c / 2^24)
constexpr std::uint8_t unpack_value(std::uint32_t container) noexcept {
    return static_cast<std::uint8_t>(container - ((container >> kHostShift) << kHostShift));
}

WideContainer pack(const Image8& host, const Image8& secret);
Image8 unpack(const WideContainer& container);

/// PSNR between the up-shifted host (2^24 * host) and the container with
/// MAX = 2^32 - 1. Infinite when the secret is all zero; never below
/// 10 log10((2^32 - 1)^2 / 255^2).
double bound_check(const Image8& host, const Image8& secret);

/// 10 log10((2^32 - 1)^2 / 255^2), the worst case of bound_check.
double worst_case_bound() noexcept;

/// Raw little-endian words behind a 16-byte header: magic "PRW1", then
/// width, height, channels as little-endian uint32.
void write_wide(const std::filesystem::path& path, const WideContainer& container);
WideContainer read_wide(const std::filesystem::path& path);

}  // namespace pris::bitpack
