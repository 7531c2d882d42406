#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include <nlohmann/json_fwd.hpp>
#include <torch/torch.h>

#include "pris/image.hpp"

namespace pris {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(max^2 / mse); +inf when mse is zero.
double psnr_from_mse(double mse, double max_value = 255.0) noexcept;

/// PSNR between two 8-bit buffers with MAX = 255.
double psnr(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
double psnr(const Image8& a, const Image8& b);

/// Per-sample PSNR of two (B, C, H, W) tensors in [0,1], both quantized to
/// 8 bits first. Returns a length-B double vector.
std::vector<double> batch_psnr_8bit(const torch::Tensor& a, const torch::Tensor& b);

/// JSON encoding for a dB value: a number, or the string "inf" / "-inf".
nlohmann::json psnr_to_json(double db);
double psnr_from_json(const nlohmann::json& j);

/// Mean that stays +inf if any term is +inf.
double mean_psnr(const std::vector<double>& values);

}  // namespace pris
