#include "pris/subnet.hpp"

#include <string>

#include "pris/error.hpp"

namespace pris {

namespace {

torch::nn::Conv2d conv3x3(std::int64_t in, std::int64_t out) {
    return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, 3).padding(1).bias(true));
}

}  // namespace

DenseBlockImpl::DenseBlockImpl(const DenseBlockOptions& options) : options_(options) {
    if (options.layers < 1 || options.growth < 1 || options.in_channels < 1 || options.out_channels < 1) {
        throw ConfigError("dense block: layers, growth and channel counts must be positive");
    }
    std::int64_t width = options.in_channels;
    for (int i = 0; i + 1 < options.layers; ++i) {
        hidden_.push_back(register_module("conv" + std::to_string(i + 1), conv3x3(width, options.growth)));
        width += options.growth;
    }
    output_ = register_module("conv" + std::to_string(options.layers), conv3x3(width, options.out_channels));

    torch::NoGradGuard no_grad;
    output_->weight.zero_();
    output_->bias.zero_();
}

torch::Tensor DenseBlockImpl::forward(const torch::Tensor& x) {
    if (hidden_.empty()) return output_->forward(x);

    std::vector<torch::Tensor> features{x};
    features.reserve(hidden_.size() + 1);
    for (auto& conv : hidden_) {
        auto in = features.size() == 1 ? features.front() : torch::cat(features, 1);
        features.push_back(torch::leaky_relu(conv->forward(in), options_.negative_slope));
    }
    return output_->forward(torch::cat(features, 1));
}

}  // namespace pris
