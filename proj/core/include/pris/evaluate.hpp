#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pris/dataset.hpp"
#include "pris/distortion.hpp"
#include "pris/model.hpp"

namespace pris {

struct EvalRow {
    std::string attack;
    double psnr_c = 0.0;  // dB, +inf when identical
    double psnr_s = 0.0;
    int n_images = 0;
};

struct EvalReport {
    int level = 4;
    std::string model_id;
    std::vector<EvalRow> rows;

    [[nodiscard]] nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
    /// Fixed-width text table.
    [[nodiscard]] std::string to_table() const;
};

/// Models available to an evaluation. Levels 1 and 2 select a full model
/// per attack label; levels 3 and 4 share one model (level 3 additionally
/// picks that model's enhancer set named after the attack).
struct EvalModels {
    PrisModel* shared = nullptr;
    std::map<std::string, PrisModel*> per_attack;
};

/// For every test image i (host) paired with image i+1 mod n (secret) and
/// every attack: embed, quantize the container to 8 bits, attack in eval
/// mode, extract with a latent seeded by (seed, i), quantize the secret to 8
/// bits, and average PSNR-C / PSNR-S over the set.
/// Throws ConfigError when the level's models or enhancer sets are missing.
EvalReport evaluate(const EvalModels& models, int level, const std::vector<DistortionSpec>& attacks,
                    const Dataset& data, std::uint64_t seed);

}  // namespace pris
