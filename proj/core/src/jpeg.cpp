#include "pris/jpeg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pris/error.hpp"

namespace pris::jpeg {

using torch::indexing::Slice;

// clang-format off
const QuantTable kLuminanceBase = {
    16, 11, 10, 16,  24,  40,  51,  61,
    12, 12, 14, 19,  26,  58,  60,  55,
    14, 13, 16, 24,  40,  57,  69,  56,
    14, 17, 22, 29,  51,  87,  80,  62,
    18, 22, 37, 56,  68, 109, 103,  77,
    24, 35, 55, 64,  81, 104, 113,  92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103,  99,
};

const QuantTable kChrominanceBase = {
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
};
// clang-format on

namespace {

void check_quality(int qf) {
    if (qf < 1 || qf > 100) {
        throw ParameterError("jpeg: quality factor must be in [1, 100], got " + std::to_string(qf));
    }
}

void check_blocks(const torch::Tensor& t, const char* what) {
    if (t.dim() != 4 || t.size(2) % 8 != 0 || t.size(3) % 8 != 0) {
        throw DimensionError(std::string(what) + ": expected (B, C, H, W) with H and W multiples of 8");
    }
}

// (B, C, H, W) -> (B, C, H/8, W/8, 8, 8)
torch::Tensor to_tiles(const torch::Tensor& t) {
    const auto b = t.size(0), c = t.size(1), h = t.size(2), w = t.size(3);
    return t.reshape({b, c, h / 8, 8, w / 8, 8}).permute({0, 1, 2, 4, 3, 5});
}

torch::Tensor from_tiles(const torch::Tensor& tiles) {
    const auto b = tiles.size(0), c = tiles.size(1), hb = tiles.size(2), wb = tiles.size(3);
    return tiles.permute({0, 1, 2, 4, 3, 5}).reshape({b, c, hb * 8, wb * 8});
}

}  // namespace

int quality_scale(int qf) {
    check_quality(qf);
    return qf < 50 ? 5000 / qf : 200 - 2 * qf;
}

QuantTable scaled_table(const QuantTable& base, int qf) {
    const int scale = quality_scale(qf);
    QuantTable out{};
    for (std::size_t i = 0; i < base.size(); ++i) {
        out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
    }
    return out;
}

torch::Tensor dct_matrix(torch::Dtype dtype) {
    auto d = torch::empty({8, 8}, torch::kFloat64);
    auto acc = d.accessor<double, 2>();
    for (int k = 0; k < 8; ++k) {
        const double alpha = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
        for (int n = 0; n < 8; ++n) {
            acc[k][n] = alpha * std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
        }
    }
    return d.to(dtype);
}

namespace {

// Rows give Y, Cb, Cr as combinations of R, G, B.
torch::Tensor ycbcr_matrix() {
    return torch::tensor({0.299, 0.587, 0.114,             //
                          -0.168736, -0.331264, 0.5,        //
                          0.5, -0.418688, -0.081312},
                         torch::kFloat64)
        .reshape({3, 3});
}

torch::Tensor chroma_offset(const torch::Tensor& like) {
    return torch::tensor({0.0, 128.0, 128.0}, like.options()).reshape({1, 3, 1, 1});
}

torch::Tensor mix_channels(const torch::Tensor& m, const torch::Tensor& x) {
    return torch::einsum("ij,bjhw->bihw", {m.to(x.scalar_type()), x});
}

}  // namespace

torch::Tensor rgb_to_ycbcr(const torch::Tensor& rgb255) {
    if (rgb255.dim() != 4 || rgb255.size(1) != 3) throw DimensionError("rgb_to_ycbcr: expected (B, 3, H, W)");
    return mix_channels(ycbcr_matrix(), rgb255) + chroma_offset(rgb255);
}

torch::Tensor ycbcr_to_rgb(const torch::Tensor& ycc255) {
    if (ycc255.dim() != 4 || ycc255.size(1) != 3) throw DimensionError("ycbcr_to_rgb: expected (B, 3, H, W)");
    static const torch::Tensor inverse = torch::linalg_inv(ycbcr_matrix());
    return mix_channels(inverse, ycc255 - chroma_offset(ycc255));
}

torch::Tensor block_dct(const torch::Tensor& planes) {
    check_blocks(planes, "block_dct");
    const auto d = dct_matrix(planes.scalar_type());
    return from_tiles(torch::matmul(torch::matmul(d, to_tiles(planes)), d.t()));
}

torch::Tensor block_idct(const torch::Tensor& coeffs) {
    check_blocks(coeffs, "block_idct");
    const auto d = dct_matrix(coeffs.scalar_type());
    return from_tiles(torch::matmul(torch::matmul(d.t(), to_tiles(coeffs)), d));
}

torch::Tensor quant_steps(int qf, std::int64_t channels, std::int64_t height, std::int64_t width,
                          torch::Dtype dtype) {
    if (height % 8 != 0 || width % 8 != 0) throw DimensionError("quant_steps: dims must be multiples of 8");
    const auto luma = scaled_table(kLuminanceBase, qf);
    const auto chroma = scaled_table(kChrominanceBase, qf);
    auto tables = torch::empty({channels, 8, 8}, torch::kFloat64);
    auto acc = tables.accessor<double, 3>();
    for (std::int64_t c = 0; c < channels; ++c) {
        const auto& t = c == 0 ? luma : chroma;
        for (int i = 0; i < 64; ++i) acc[c][i / 8][i % 8] = t[static_cast<std::size_t>(i)];
    }
    // (C, 8, 8) -> (1, C, H/8, W/8, 8, 8) -> image layout
    auto tiles = tables.reshape({1, channels, 1, 1, 8, 8}).expand({1, channels, height / 8, width / 8, 8, 8});
    return from_tiles(tiles.contiguous()).to(dtype);
}

torch::Tensor jpeg_sim(const torch::Tensor& x, int qf, GradMode grad_mode, bool hard) {
    check_quality(qf);
    if (x.dim() != 4 || (x.size(1) != 3 && x.size(1) != 1)) {
        throw DimensionError("jpeg: expected a (B, 3, H, W) RGB or (B, 1, H, W) luminance tensor");
    }
    const auto h = x.size(2), w = x.size(3);
    const auto pad_h = (8 - h % 8) % 8;
    const auto pad_w = (8 - w % 8) % 8;
    auto img = x;
    if (pad_h != 0 || pad_w != 0) {
        img = torch::nn::functional::pad(
            x, torch::nn::functional::PadFuncOptions({0, pad_w, 0, pad_h}).mode(torch::kReplicate));
    }

    const bool color = img.size(1) == 3;
    auto planes = color ? rgb_to_ycbcr(img * 255.0) : img * 255.0;
    planes = planes - 128.0;

    const auto steps = quant_steps(qf, planes.size(1), planes.size(2), planes.size(3), planes.scalar_type());
    const auto coeffs = block_dct(planes) / steps;
    const auto quantized = hard ? round_half_away(coeffs) : round_with_grad(coeffs, grad_mode);
    auto restored = block_idct(quantized * steps) + 128.0;

    auto out = (color ? ycbcr_to_rgb(restored) : restored) / 255.0;
    out = out.clamp(0.0, 1.0);
    if (pad_h != 0 || pad_w != 0) out = out.index({Slice(), Slice(), Slice(0, h), Slice(0, w)});
    return out;
}

}  // namespace pris::jpeg
