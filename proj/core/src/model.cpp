#include "pris/model.hpp"

#include "pris/error.hpp"
#include "pris/wavelet.hpp"

namespace pris {

std::string_view to_string(ParamGroup group) noexcept {
    switch (group) {
        case ParamGroup::kInn: return "inn";
        case ParamGroup::kPreEnhance: return "pre_enhance";
        case ParamGroup::kPostEnhance: return "post_enhance";
    }
    return "inn";
}

namespace {

EnhancerPair make_pair(const ModelConfig& config) {
    EnhancerPair pair;
    if (config.pre_enhance) pair.pre = EnhanceNet(config.enhance_options());
    if (config.post_enhance) pair.post = EnhanceNet(config.enhance_options());
    return pair;
}

void copy_parameters(torch::nn::Module& dst, torch::nn::Module& src) {
    torch::NoGradGuard no_grad;
    auto d = dst.parameters();
    auto s = src.parameters();
    for (std::size_t i = 0; i < d.size(); ++i) d[i].copy_(s[i]);
}

}  // namespace

PrisModel::PrisModel(const ModelConfig& config) : config_(config) {
    inn_ = InvertibleNet(config.inn);
    enhancers_.emplace(kDefaultEnhancers, make_pair(config));
}

EmbedResult PrisModel::embed(const torch::Tensor& host, const torch::Tensor& secret) {
    return pris::embed(inn_, host, secret);
}

ExtractResult PrisModel::extract(const torch::Tensor& distorted, const torch::Tensor& z,
                                 const ExtractOptions& options) {
    EnhancerPair* pair = options.enhance ? &enhancers(options.enhancer_set) : nullptr;
    const bool frequency = config_.enhance_domain == EnhanceDomain::kFrequency;

    torch::Tensor freq;
    if (pair && pair->pre) {
        freq = frequency ? pair->pre->forward(dwt(distorted)) : dwt(pair->pre->forward(distorted));
    } else {
        freq = dwt(distorted);
    }
    if (!freq.sizes().equals(z.sizes())) {
        throw DimensionError("extract: latent shape does not match the container's frequency shape");
    }

    auto [host_f, secret_f] = inn_->inverse_freq(freq, z);
    torch::Tensor secret;
    if (pair && pair->post) {
        secret = frequency ? iwt(pair->post->forward(secret_f)) : pair->post->forward(iwt(secret_f));
    } else {
        secret = iwt(secret_f);
    }
    return {iwt(host_f), std::move(secret)};
}

bool PrisModel::has_enhancer_set(const std::string& label) const { return enhancers_.contains(label); }

std::vector<std::string> PrisModel::enhancer_sets() const {
    std::vector<std::string> out;
    for (const auto& [label, _] : enhancers_) out.push_back(label);
    return out;
}

EnhancerPair& PrisModel::enhancers(const std::string& label) {
    auto it = enhancers_.find(label);
    if (it == enhancers_.end()) {
        std::string known;
        for (const auto& [l, _] : enhancers_) known += (known.empty() ? "" : ", ") + l;
        throw ConfigError("no enhancer set for attack '" + label + "' (available: " + known + ")");
    }
    return it->second;
}

EnhancerPair& PrisModel::clone_enhancers(const std::string& from, const std::string& label) {
    auto& src = enhancers(from);
    auto pair = make_pair(config_);
    if (pair.pre) copy_parameters(*pair.pre, *src.pre);
    if (pair.post) copy_parameters(*pair.post, *src.post);
    enhancers_.insert_or_assign(label, pair);
    return enhancers_.at(label);
}

std::vector<std::pair<std::string, torch::Tensor>> PrisModel::named_parameters() {
    std::vector<std::pair<std::string, torch::Tensor>> out;
    for (const auto& item : inn_->named_parameters()) out.emplace_back("inn." + item.key(), item.value());
    for (auto& [label, pair] : enhancers_) {
        if (pair.pre) {
            for (const auto& item : pair.pre->named_parameters()) {
                out.emplace_back("enhance:" + label + ":pre." + item.key(), item.value());
            }
        }
        if (pair.post) {
            for (const auto& item : pair.post->named_parameters()) {
                out.emplace_back("enhance:" + label + ":post." + item.key(), item.value());
            }
        }
    }
    return out;
}

std::vector<torch::Tensor> PrisModel::parameters(ParamGroup group, const std::string& set) {
    switch (group) {
        case ParamGroup::kInn: return inn_->parameters();
        case ParamGroup::kPreEnhance: {
            auto& pair = enhancers(set);
            return pair.pre ? pair.pre->parameters() : std::vector<torch::Tensor>{};
        }
        case ParamGroup::kPostEnhance: {
            auto& pair = enhancers(set);
            return pair.post ? pair.post->parameters() : std::vector<torch::Tensor>{};
        }
    }
    return {};
}

PrisModel make_model(const ModelConfig& config, std::uint64_t init_seed) {
    torch::manual_seed(init_seed);
    return PrisModel(config);
}

}  // namespace pris
