#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>
#include <torch/torch.h>

#include "pris/gaf.hpp"

namespace pris {

enum class DistortionKind { kIdentity, kGaussian, kJpeg, kRound, kRGaussian, kRJpeg };

std::string_view to_string(DistortionKind kind) noexcept;
DistortionKind parse_distortion_kind(std::string_view text);

/// Declarative description of one attack on the container.
struct DistortionSpec {
    DistortionKind kind = DistortionKind::kIdentity;
    double sigma = 0.0;  // noise std on the 0-255 scale (gaussian kinds)
    int qf = 90;         // JPEG quality factor (jpeg kinds)
    GradMode grad_mode = GradMode::kGaf;

    /// Throws ParameterError for sigma < 0 or qf outside [1, 100].
    void validate() const;

    /// Canonical label: identity, gauss10, jpeg90, round, rgauss1, rjpeg80, ...
    [[nodiscard]] std::string label() const;

    bool operator==(const DistortionSpec&) const = default;
};

/// Parse a CLI attack label. Accepts the canonical labels for any sigma/qf
/// (e.g. gauss2.5, jpeg75).
DistortionSpec parse_attack_label(std::string_view label, GradMode grad_mode = GradMode::kGaf);

/// Comma-separated label list; throws ConfigError on the first unknown label.
std::vector<DistortionSpec> parse_attack_list(std::string_view labels, GradMode grad_mode = GradMode::kGaf);

/// The labels listed for the CLI.
const std::vector<std::string>& standard_attack_labels();

void to_json(nlohmann::json& j, const DistortionSpec& spec);
void from_json(const nlohmann::json& j, DistortionSpec& spec);

/// x + N(0, (sigma/255)^2) per element, clamped to [0, 1].
torch::Tensor gaussian_noise(const torch::Tensor& x, double sigma, std::uint64_t seed);

/// Dispatch an attack. In train mode every rounding step carries the spec's
/// gradient mode; in eval mode rounding is exact with no gradient.
/// The composites round to 8 bits first, then add noise / compress.
torch::Tensor apply(const DistortionSpec& spec, const torch::Tensor& x, std::uint64_t seed, bool train);

}  // namespace pris
