#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "pris/enhance.hpp"
#include "pris/inn.hpp"

namespace pris {

struct ModelConfig {
    InnOptions inn{};
    bool pre_enhance = true;
    bool post_enhance = true;
    EnhanceDomain enhance_domain = EnhanceDomain::kSpatial;
    int enhance_layers = 5;
    int enhance_growth = 32;

    [[nodiscard]] EnhanceOptions enhance_options() const {
        return EnhanceOptions{inn.channels, enhance_domain, enhance_layers, enhance_growth};
    }
    bool operator==(const ModelConfig& o) const {
        return inn.n_blocks == o.inn.n_blocks && inn.channels == o.inn.channels &&
               inn.subnet_layers == o.inn.subnet_layers && inn.subnet_growth == o.inn.subnet_growth &&
               pre_enhance == o.pre_enhance && post_enhance == o.post_enhance &&
               enhance_domain == o.enhance_domain && enhance_layers == o.enhance_layers &&
               enhance_growth == o.enhance_growth;
    }
};

/// One (pre, post) pair. Either side is null when disabled in the config.
struct EnhancerPair {
    EnhanceNet pre{nullptr};
    EnhanceNet post{nullptr};
};

enum class ParamGroup { kInn, kPreEnhance, kPostEnhance };

std::string_view to_string(ParamGroup group) noexcept;

inline const std::string kDefaultEnhancers = "default";

struct ExtractOptions {
    bool enhance = true;                         // false: skip both enhancers
    std::string enhancer_set = kDefaultEnhancers;  // attack label for per-attack sets
};

/// Full system: the invertible stack plus one default enhancer pair and any
/// number of per-attack pairs (attack-aware extraction).
class PrisModel {
public:
    explicit PrisModel(const ModelConfig& config);

    [[nodiscard]] const ModelConfig& config() const noexcept { return config_; }
    InvertibleNet& inn() { return inn_; }

    /// Host/secret (B, C, H, W) in [0,1] -> container and latent.
    EmbedResult embed(const torch::Tensor& host, const torch::Tensor& secret);

    /// Distorted container + latent -> revealed host and (post-enhanced) secret.
    ExtractResult extract(const torch::Tensor& distorted, const torch::Tensor& z, const ExtractOptions& options = {});

    [[nodiscard]] bool has_enhancer_set(const std::string& label) const;
    [[nodiscard]] std::vector<std::string> enhancer_sets() const;
    EnhancerPair& enhancers(const std::string& label = kDefaultEnhancers);

    /// Deep-copy `from` into a new (or replaced) set named `label`.
    EnhancerPair& clone_enhancers(const std::string& from, const std::string& label);

    /// Ordered (name, tensor) list of every parameter, namespaced as
    /// inn.<...> and enhance:<set>:<pre|post>.<...>.
    [[nodiscard]] std::vector<std::pair<std::string, torch::Tensor>> named_parameters();

    std::vector<torch::Tensor> parameters(ParamGroup group, const std::string& set = kDefaultEnhancers);

    int step_reached = 0;

private:
    ModelConfig config_;
    InvertibleNet inn_{nullptr};
    std::map<std::string, EnhancerPair> enhancers_;
};

/// Constructs a model with parameters initialized from `init_seed`.
PrisModel make_model(const ModelConfig& config, std::uint64_t init_seed);

}  // namespace pris
