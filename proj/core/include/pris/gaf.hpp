#pragma once

#include <string_view>

#include <torch/torch.h>

namespace pris {

/// How the backward pass treats the non-differentiable rounding step.
enum class GradMode {
    kZero,  // block the gradient entirely
    kOne,   // straight-through (identity gradient)
    kGaf,   // derivative of the gradient approximation function
};

std::string_view to_string(GradMode mode) noexcept;
GradMode parse_grad_mode(std::string_view text);

/// Gradient approximation function: a smooth staircase that equals x at
/// every integer and interpolates between neighbours with half a cosine.
///
///   sign(x) = +1 if floor(x) is odd, -1 otherwise
///   gaf(x)  = sign(x) * 0.5 * cos(pi * x) + 0.5 + floor(x)
double gaf(double x) noexcept;

/// d/dx gaf(x) = (pi/2) * sin(pi * frac(x)). Zero at integers, pi/2 at
/// half-integers, never negative.
double gaf_derivative(double x) noexcept;

torch::Tensor gaf(const torch::Tensor& x);
torch::Tensor gaf_derivative(const torch::Tensor& x);

/// Round half away from zero; no autograd history.
torch::Tensor round_half_away(const torch::Tensor& x);

/// Exact rounding in the forward pass with a surrogate backward pass chosen
/// by `mode`. Operates on the tensor's own scale.
torch::Tensor round_with_grad(const torch::Tensor& x, GradMode mode);

/// 8-bit quantization of a [0,1] image: round(255 x) / 255 with the
/// surrogate evaluated at 255 x.
torch::Tensor round_st(const torch::Tensor& x, GradMode mode);

/// Exact 8-bit quantization of a [0,1] image with no autograd history.
torch::Tensor quantize_8bit(const torch::Tensor& x);

}  // namespace pris
