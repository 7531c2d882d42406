#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pris/distortion.hpp"
#include "pris/model.hpp"
#include "pris/training.hpp"

namespace pris {

struct TrainSection {
    bool three_step = true;
    std::array<int, 3> epochs{50, 50, 50};  // joint runs use the sum
    std::array<double, 3> learning_rates{kStep12LearningRate, kStep12LearningRate, kStep3LearningRate};
    int lr_half_period = 200;
    int batch_size = 4;
    double beta1 = 0.9;
    double beta2 = 0.99;
    LossWeights weights{};
    GradMode grad_mode = GradMode::kGaf;
    /// 4: one model, every attack. 3: level 4 plus per-attack enhancers.
    /// 1 and 2: one full model per attack.
    int level = 4;
};

struct DataSection {
    std::filesystem::path train_dir;
    std::filesystem::path test_dir;
    int crop_size = 64;
    std::size_t max_images = 0;
};

struct OutputSection {
    std::filesystem::path dir = "runs";
    std::string name = "pris";
};

struct Seeds {
    std::uint64_t init = 1;
    std::uint64_t train = 2;
    std::uint64_t eval = 3;
};

/// Everything a run needs. Parsing rejects unknown keys.
struct Config {
    ModelConfig model{};
    TrainSection train{};
    DataSection data{};
    std::vector<DistortionSpec> attacks{};
    OutputSection output{};
    Seeds seeds{};

    void validate() const;

    /// Training plan for one attack set.
    [[nodiscard]] TrainPlan plan(const std::vector<DistortionSpec>& attack_set) const;

    /// Relative paths are resolved against `base`.
    static Config from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
    static Config load(const std::filesystem::path& path);
    [[nodiscard]] nlohmann::json to_json() const;

    /// Overwrites every seed with values derived from `seed` (PRIS_SEED).
    void override_seeds(std::uint64_t seed);
};

}  // namespace pris
