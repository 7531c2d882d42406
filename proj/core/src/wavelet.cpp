#include "pris/wavelet.hpp"

#include <string>

#include "pris/error.hpp"

namespace pris {

using torch::indexing::Slice;

torch::Tensor dwt(const torch::Tensor& x) {
    if (x.dim() != 4) {
        throw DimensionError("dwt: expected a 4-axis tensor, got " + std::to_string(x.dim()) + " axes");
    }
    if (x.size(2) % 2 != 0 || x.size(3) % 2 != 0) {
        throw DimensionError("dwt: spatial dims must be even, got " + std::to_string(x.size(2)) + "x" +
                             std::to_string(x.size(3)));
    }
    const auto a = x.index({Slice(), Slice(), Slice(0, torch::indexing::None, 2), Slice(0, torch::indexing::None, 2)});
    const auto b = x.index({Slice(), Slice(), Slice(0, torch::indexing::None, 2), Slice(1, torch::indexing::None, 2)});
    const auto c = x.index({Slice(), Slice(), Slice(1, torch::indexing::None, 2), Slice(0, torch::indexing::None, 2)});
    const auto d = x.index({Slice(), Slice(), Slice(1, torch::indexing::None, 2), Slice(1, torch::indexing::None, 2)});

    const auto ll = (a + b + c + d) * 0.5;
    const auto lh = (a - b + c - d) * 0.5;
    const auto hl = (a + b - c - d) * 0.5;
    const auto hh = (a - b - c + d) * 0.5;
    return torch::cat({ll, lh, hl, hh}, 1);
}

torch::Tensor iwt(const torch::Tensor& f) {
    if (f.dim() != 4) {
        throw DimensionError("iwt: expected a 4-axis tensor, got " + std::to_string(f.dim()) + " axes");
    }
    if (f.size(1) % 4 != 0) {
        throw DimensionError("iwt: channel count must be divisible by 4, got " + std::to_string(f.size(1)));
    }
    const auto bands = f.chunk(4, 1);
    const auto& ll = bands[0];
    const auto& lh = bands[1];
    const auto& hl = bands[2];
    const auto& hh = bands[3];

    const auto a = (ll + lh + hl + hh) * 0.5;
    const auto b = (ll - lh + hl - hh) * 0.5;
    const auto c = (ll + lh - hl - hh) * 0.5;
    const auto d = (ll - lh - hl + hh) * 0.5;

    const auto top = torch::stack({a, b}, -1);     // (B, C, h, w, 2)
    const auto bottom = torch::stack({c, d}, -1);  // (B, C, h, w, 2)
    const auto rows = torch::stack({top, bottom}, 3);  // (B, C, h, 2, w, 2)
    return rows.reshape({f.size(0), f.size(1) / 4, f.size(2) * 2, f.size(3) * 2});
}

}  // namespace pris
