#pragma once

#include <torch/torch.h>

namespace pris {

/// Single-level orthonormal Haar transform.
///
/// Maps (B, C, H, W) to (B, 4C, H/2, W/2). The output channel axis holds four
/// blocks of C channels in the order LL, LH, HL, HH. For a 2x2 block
/// [[a, b], [c, d]]:
///
///   LL = (a + b + c + d) / 2     LH = (a - b + c - d) / 2
///   HL = (a + b - c - d) / 2     HH = (a - b - c + d) / 2
///
/// The kernel is orthonormal, so the transform preserves energy and its
/// inverse is its transpose. Differentiable.
torch::Tensor dwt(const torch::Tensor& x);

/// Exact inverse of dwt(). Channel count must be divisible by 4.
torch::Tensor iwt(const torch::Tensor& f);

}  // namespace pris
