#include "pris/enhance.hpp"

#include "pris/error.hpp"
#include "pris/wavelet.hpp"

namespace pris {

std::string_view to_string(EnhanceDomain domain) noexcept {
    return domain == EnhanceDomain::kSpatial ? "spatial" : "frequency";
}

EnhanceDomain parse_enhance_domain(std::string_view text) {
    if (text == "spatial") return EnhanceDomain::kSpatial;
    if (text == "frequency") return EnhanceDomain::kFrequency;
    throw ConfigError("unknown enhance domain '" + std::string(text) + "' (expected spatial or frequency)");
}

EnhanceNetImpl::EnhanceNetImpl(const EnhanceOptions& options) : options_(options) {
    const auto ch = options.io_channels();
    body_ = register_module("body", DenseBlock(DenseBlockOptions{ch, ch, options.layers, options.growth, 0.2}));
}

torch::Tensor EnhanceNetImpl::forward(const torch::Tensor& x) {
    if (x.dim() != 4 || x.size(1) != options_.io_channels()) {
        throw DimensionError("enhance: expected " + std::to_string(options_.io_channels()) + " channels");
    }
    return x + body_->forward(x);
}

namespace {

torch::Tensor apply_in_domain(EnhanceNet& net, const torch::Tensor& x) {
    if (net->options().domain == EnhanceDomain::kSpatial) return net->forward(x);
    return iwt(net->forward(dwt(x)));
}

}  // namespace

torch::Tensor pre_enhance(EnhanceNet& net, const torch::Tensor& distorted) { return apply_in_domain(net, distorted); }

torch::Tensor post_enhance(EnhanceNet& net, const torch::Tensor& extracted) { return apply_in_domain(net, extracted); }

}  // namespace pris
