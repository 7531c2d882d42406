#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

namespace pris {

struct DenseBlockOptions {
    std::int64_t in_channels = 12;
    std::int64_t out_channels = 12;
    int layers = 5;      // total conv layers, including the output conv
    int growth = 32;     // channels added by each hidden layer
    double negative_slope = 0.2;
};

/// Densely connected 3x3 conv stack. Every hidden layer sees the
/// concatenation of the input and all earlier hidden outputs; the output
/// conv is zero-initialized so a fresh block returns exact zeros.
///
/// Used as the f/g/h subnets of the coupling blocks and as the body of the
/// enhance networks.
class DenseBlockImpl : public torch::nn::Module {
public:
    explicit DenseBlockImpl(const DenseBlockOptions& options);

    torch::Tensor forward(const torch::Tensor& x);

    [[nodiscard]] const DenseBlockOptions& options() const noexcept { return options_; }

private:
    DenseBlockOptions options_;
    std::vector<torch::nn::Conv2d> hidden_;
    torch::nn::Conv2d output_{nullptr};
};
TORCH_MODULE(DenseBlock);

}  // namespace pris
