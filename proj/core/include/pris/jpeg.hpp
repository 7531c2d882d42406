#pragma once

#include <array>

#include <torch/torch.h>

#include "pris/gaf.hpp"

namespace pris::jpeg {

using QuantTable = std::array<int, 64>;  // row-major 8x8

/// ITU-T T.81 Annex K, Table K.1 (luminance) and K.2 (chrominance).
extern const QuantTable kLuminanceBase;
extern const QuantTable kChrominanceBase;

/// libjpeg quality scaling: 5000/qf below 50, 200 - 2 qf otherwise.
int quality_scale(int qf);

/// Entry-wise clamp(floor((q * scale + 50) / 100), 1, 255).
QuantTable scaled_table(const QuantTable& base, int qf);

/// Orthonormal 8-point DCT-II matrix, D[k][n].
torch::Tensor dct_matrix(torch::Dtype dtype = torch::kFloat32);

/// Full-range BT.601 conversion on the 0-255 scale (Cb/Cr offset by 128).
torch::Tensor rgb_to_ycbcr(const torch::Tensor& rgb255);
torch::Tensor ycbcr_to_rgb(const torch::Tensor& ycc255);

/// Per-plane 8x8 block DCT of a (B, C, H, W) tensor, H and W multiples of 8.
/// The result keeps the layout: each 8x8 tile holds its block's coefficients.
torch::Tensor block_dct(const torch::Tensor& planes);
torch::Tensor block_idct(const torch::Tensor& coeffs);

/// Quantization step for every coefficient position of a (B, C, H, W) image
/// (luminance table on channel 0, chrominance on 1 and 2).
torch::Tensor quant_steps(int qf, std::int64_t channels, std::int64_t height, std::int64_t width,
                          torch::Dtype dtype = torch::kFloat32);

/// Simulated baseline JPEG without chroma subsampling or entropy coding.
/// Input and output are [0,1] RGB (or single-channel luminance). Spatial
/// dims that are not multiples of 8 are edge-padded and cropped back.
/// `hard` selects exact rounding; otherwise rounding carries `grad_mode`.
torch::Tensor jpeg_sim(const torch::Tensor& x, int qf, GradMode grad_mode, bool hard);

}  // namespace pris::jpeg
