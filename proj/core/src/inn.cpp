#include "pris/inn.hpp"

#include <string>

#include "pris/error.hpp"
#include "pris/rng.hpp"
#include "pris/wavelet.hpp"

namespace pris {

namespace {

void require_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
    if (!a.sizes().equals(b.sizes())) {
        throw DimensionError(std::string(what) + ": branch shapes differ");
    }
}

}  // namespace

CouplingBlockImpl::CouplingBlockImpl(std::int64_t branch_channels, int layers, int growth) {
    const DenseBlockOptions opts{branch_channels, branch_channels, layers, growth, 0.2};
    f_ = register_module("f", DenseBlock(opts));
    g_ = register_module("g", DenseBlock(opts));
    h_ = register_module("h", DenseBlock(opts));
}

torch::Tensor CouplingBlockImpl::scale(const torch::Tensor& host_next) {
    return torch::exp(torch::sigmoid(g_->forward(host_next)));
}

std::pair<torch::Tensor, torch::Tensor> CouplingBlockImpl::forward(const torch::Tensor& host,
                                                                   const torch::Tensor& secret) {
    require_same_shape(host, secret, "coupling forward");
    auto host_next = host + f_->forward(secret);
    auto secret_next = secret * scale(host_next) + h_->forward(host_next);
    return {std::move(host_next), std::move(secret_next)};
}

std::pair<torch::Tensor, torch::Tensor> CouplingBlockImpl::inverse(const torch::Tensor& host_next,
                                                                   const torch::Tensor& secret_next) {
    require_same_shape(host_next, secret_next, "coupling inverse");
    auto secret = (secret_next - h_->forward(host_next)) * torch::exp(-torch::sigmoid(g_->forward(host_next)));
    auto host = host_next - f_->forward(secret);
    return {std::move(host), std::move(secret)};
}

InvertibleNetImpl::InvertibleNetImpl(const InnOptions& options) : options_(options) {
    if (options.n_blocks < 1) throw ConfigError("invertible net: n_blocks must be >= 1");
    if (options.channels < 1) throw ConfigError("invertible net: channels must be >= 1");
    for (int i = 0; i < options.n_blocks; ++i) {
        blocks_.push_back(register_module(
            "block" + std::to_string(i),
            CouplingBlock(options.branch_channels(), options.subnet_layers, options.subnet_growth)));
    }
}

std::pair<torch::Tensor, torch::Tensor> InvertibleNetImpl::forward_freq(torch::Tensor host, torch::Tensor secret) {
    require_same_shape(host, secret, "invertible net forward");
    if (host.dim() != 4 || host.size(1) != options_.branch_channels()) {
        throw DimensionError("invertible net forward: expected " + std::to_string(options_.branch_channels()) +
                             " frequency channels");
    }
    for (auto& block : blocks_) {
        std::tie(host, secret) = block->forward(host, secret);
    }
    return {std::move(host), std::move(secret)};
}

std::pair<torch::Tensor, torch::Tensor> InvertibleNetImpl::inverse_freq(torch::Tensor host_next,
                                                                        torch::Tensor secret_next) {
    require_same_shape(host_next, secret_next, "invertible net inverse");
    if (host_next.dim() != 4 || host_next.size(1) != options_.branch_channels()) {
        throw DimensionError("invertible net inverse: expected " + std::to_string(options_.branch_channels()) +
                             " frequency channels");
    }
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
        std::tie(host_next, secret_next) = (*it)->inverse(host_next, secret_next);
    }
    return {std::move(host_next), std::move(secret_next)};
}

EmbedResult embed(InvertibleNet& net, const torch::Tensor& host, const torch::Tensor& secret) {
    require_same_shape(host, secret, "embed");
    auto [h, z_hat] = net->forward_freq(dwt(host), dwt(secret));
    return {iwt(h), std::move(z_hat)};
}

ExtractResult extract(InvertibleNet& net, const torch::Tensor& container, const torch::Tensor& z) {
    auto freq = dwt(container);
    if (!freq.sizes().equals(z.sizes())) {
        throw DimensionError("extract: latent shape does not match the container's frequency shape");
    }
    auto [h, s] = net->inverse_freq(std::move(freq), z);
    return {iwt(h), iwt(s)};
}

std::vector<std::int64_t> latent_shape(torch::IntArrayRef image_shape) {
    if (image_shape.size() != 4) throw DimensionError("latent_shape: expected a 4-axis image shape");
    if (image_shape[2] % 2 != 0 || image_shape[3] % 2 != 0) {
        throw DimensionError("latent_shape: spatial dims must be even");
    }
    return {image_shape[0], image_shape[1] * 4, image_shape[2] / 2, image_shape[3] / 2};
}

torch::Tensor sample_latent(torch::IntArrayRef image_shape, std::uint64_t seed) {
    auto gen = make_generator(seed);
    return torch::randn(latent_shape(image_shape), gen, torch::kFloat32);
}

}  // namespace pris
