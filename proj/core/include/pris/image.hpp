#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <torch/torch.h>

namespace pris {

/// Interleaved 8-bit image (row-major, HWC).
struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;

    Image8() = default;
    Image8(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, fill) {}

    [[nodiscard]] std::size_t size() const noexcept { return pixels.size(); }
    [[nodiscard]] std::span<const std::uint8_t> view() const noexcept { return pixels; }
    std::uint8_t& at(int y, int x, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    [[nodiscard]] std::uint8_t at(int y, int x, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool operator==(const Image8&) const = default;
};

/// Reads PNG (8 or 16 bit, gray/RGB/alpha) or binary PPM/PGM. Output is
/// RGB; alpha is dropped and gray is replicated. Throws DataError.
Image8 read_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG (gray or RGB by channel count).
void write_png(const std::filesystem::path& path, const Image8& image);

/// True for extensions read_image understands.
bool is_supported_image(const std::filesystem::path& path);

/// (1, C, H, W) float32 in [0,1].
torch::Tensor to_tensor(const Image8& image);

/// Quantizes a (1, C, H, W) or (C, H, W) tensor to 8 bits (round half away
/// from zero after clamping to [0,1]).
Image8 to_image8(const torch::Tensor& t);

Image8 center_crop(const Image8& image, int width, int height);
Image8 crop(const Image8& image, int x0, int y0, int width, int height);

/// Center-crop to the largest dims that are multiples of `multiple`.
/// Returns the input unchanged when it already fits.
Image8 crop_to_multiple(const Image8& image, int multiple);

}  // namespace pris
