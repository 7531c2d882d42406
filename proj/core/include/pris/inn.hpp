#pragma once

#include <cstdint>
#include <utility>

#include <torch/torch.h>

#include "pris/subnet.hpp"

namespace pris {

struct InnOptions {
    int n_blocks = 8;
    std::int64_t channels = 3;  // image channels; each branch carries 4x this after the DWT
    int subnet_layers = 5;
    int subnet_growth = 32;

    [[nodiscard]] std::int64_t branch_channels() const noexcept { return 4 * channels; }
};

/// One affine coupling step over a (host, secret) pair of frequency tensors.
///
///   forward:  h' = h + f(s)
///             s' = s * exp(sigmoid(g(h'))) + h(h')
///   inverse:  s  = (s' - h(h')) * exp(-sigmoid(g(h')))
///             h  = h' - f(s)
class CouplingBlockImpl : public torch::nn::Module {
public:
    CouplingBlockImpl(std::int64_t branch_channels, int layers, int growth);

    std::pair<torch::Tensor, torch::Tensor> forward(const torch::Tensor& host, const torch::Tensor& secret);
    std::pair<torch::Tensor, torch::Tensor> inverse(const torch::Tensor& host_next, const torch::Tensor& secret_next);

    /// exp(sigmoid(g(h'))): the multiplicative factor applied to the secret
    /// branch, always inside (1, e).
    torch::Tensor scale(const torch::Tensor& host_next);

    DenseBlock& f() { return f_; }
    DenseBlock& g() { return g_; }
    DenseBlock& h() { return h_; }

private:
    DenseBlock f_{nullptr};
    DenseBlock g_{nullptr};
    DenseBlock h_{nullptr};
};
TORCH_MODULE(CouplingBlock);

/// The stack of N coupling blocks with DWT/IWT at both ends.
class InvertibleNetImpl : public torch::nn::Module {
public:
    explicit InvertibleNetImpl(const InnOptions& options);

    /// Frequency-domain forward through all blocks in order.
    std::pair<torch::Tensor, torch::Tensor> forward_freq(torch::Tensor host, torch::Tensor secret);
    /// Frequency-domain inverse through all blocks in reverse order.
    std::pair<torch::Tensor, torch::Tensor> inverse_freq(torch::Tensor host_next, torch::Tensor secret_next);

    [[nodiscard]] const InnOptions& options() const noexcept { return options_; }
    [[nodiscard]] std::size_t size() const noexcept { return blocks_.size(); }
    CouplingBlock& block(std::size_t i) { return blocks_.at(i); }

private:
    InnOptions options_;
    std::vector<CouplingBlock> blocks_;
};
TORCH_MODULE(InvertibleNet);

struct EmbedResult {
    torch::Tensor container;  // spatial, same shape as the host
    torch::Tensor z_hat;      // frequency-domain secret-branch output
};

struct ExtractResult {
    torch::Tensor revealed_host;
    torch::Tensor extracted;
};

/// Spatial in, spatial out embedding without any enhancement.
EmbedResult embed(InvertibleNet& net, const torch::Tensor& host, const torch::Tensor& secret);

/// Reverse pass from a (possibly distorted) container and a latent sample.
ExtractResult extract(InvertibleNet& net, const torch::Tensor& container, const torch::Tensor& z);

/// Latent shape for a spatial image shape (B, C, H, W): (B, 4C, H/2, W/2).
std::vector<std::int64_t> latent_shape(torch::IntArrayRef image_shape);

/// Standard-normal latent for extraction, reproducible from the seed.
torch::Tensor sample_latent(torch::IntArrayRef image_shape, std::uint64_t seed);

}  // namespace pris
