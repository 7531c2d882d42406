#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <torch/torch.h>

#include "pris/subnet.hpp"

namespace pris {

enum class EnhanceDomain { kSpatial, kFrequency };

std::string_view to_string(EnhanceDomain domain) noexcept;
EnhanceDomain parse_enhance_domain(std::string_view text);

struct EnhanceOptions {
    std::int64_t image_channels = 3;
    EnhanceDomain domain = EnhanceDomain::kSpatial;
    int layers = 5;
    int growth = 32;

    /// Channels the network actually sees: C in the spatial domain, 4C after a DWT.
    [[nodiscard]] std::int64_t io_channels() const noexcept {
        return domain == EnhanceDomain::kSpatial ? image_channels : 4 * image_channels;
    }
};

/// Residual dense-block correction: output = input + body(input). The body's
/// last conv starts at zero, so a fresh network is the identity.
class EnhanceNetImpl : public torch::nn::Module {
public:
    explicit EnhanceNetImpl(const EnhanceOptions& options);

    torch::Tensor forward(const torch::Tensor& x);

    [[nodiscard]] const EnhanceOptions& options() const noexcept { return options_; }

private:
    EnhanceOptions options_;
    DenseBlock body_{nullptr};
};
TORCH_MODULE(EnhanceNet);

/// Denoise the distorted container. Spatial nets run before the DWT and
/// frequency nets after it; the caller always passes and gets back a spatial
/// image.
torch::Tensor pre_enhance(EnhanceNet& net, const torch::Tensor& distorted);

/// Refine the extracted secret (spatial in, spatial out).
torch::Tensor post_enhance(EnhanceNet& net, const torch::Tensor& extracted);

}  // namespace pris
