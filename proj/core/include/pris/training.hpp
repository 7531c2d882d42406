#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>
#include <torch/torch.h>

#include "pris/dataset.hpp"
#include "pris/distortion.hpp"
#include "pris/model.hpp"

namespace pris {

struct LossWeights {
    double lambda_c = 1.0;
    double lambda_s = 1.0;
    double lambda_z = 0.0;  // optional latent penalty, off by default

    /// Throws ConfigError on negative weights or lambda_c + lambda_s == 0.
    void validate() const;
};

/// Sum of squared pixel differences, divided by the batch size.
torch::Tensor loss_c(const torch::Tensor& container, const torch::Tensor& host);
torch::Tensor loss_s(const torch::Tensor& secret, const torch::Tensor& extracted);

double total_loss(const LossWeights& w, double lc, double ls, double lz = 0.0);
torch::Tensor total_loss(const LossWeights& w, const torch::Tensor& lc, const torch::Tensor& ls,
                         const torch::Tensor& lz);

/// lr0 * 0.5^floor(epoch / half_period)
double learning_rate(double initial_lr, int epoch, int half_period);

inline constexpr double kStep12LearningRate = 3.1622776601683795e-05;  // 10^-4.5
inline constexpr double kStep3LearningRate = 3.1622776601683795e-06;   // 10^-5.5

/// One stage of a plan. `number` is 1, 2 or 3 for the staged schedule and
/// 0 for a single joint run.
struct StepPlan {
    int number = 1;
    int epochs = 50;
    double initial_lr = kStep12LearningRate;
    int lr_half_period = 200;
    std::vector<ParamGroup> trainable{ParamGroup::kInn};
    bool enhance = false;  // run the enhancers in forward/backward
    std::vector<DistortionSpec> attacks;

    [[nodiscard]] bool trains(ParamGroup g) const;
};

struct TrainPlan {
    std::vector<StepPlan> steps;
    double beta1 = 0.9;
    double beta2 = 0.99;
    int batch_size = 4;
    LossWeights weights{};
    std::uint64_t seed = 0;

    /// Pre-train the invertible blocks, pre-train the enhancers with the
    /// blocks frozen, then fine-tune everything.
    static TrainPlan three_step(std::vector<DistortionSpec> attacks, std::array<int, 3> epochs,
                                std::array<double, 3> lrs = {kStep12LearningRate, kStep12LearningRate,
                                                             kStep3LearningRate},
                                int lr_half_period = 200);

    /// Same phases, epochs and learning rates as three_step, but every group
    /// trains with the enhancers active from the first epoch.
    static TrainPlan joint(std::vector<DistortionSpec> attacks, std::array<int, 3> epochs,
                           std::array<double, 3> lrs = {kStep12LearningRate, kStep12LearningRate,
                                                        kStep3LearningRate},
                           int lr_half_period = 200);

    /// Checks the freeze contract of each staged step and basic ranges.
    void validate() const;
};

struct EpochMetrics {
    int step = 0;
    int epoch = 0;
    double lr = 0.0;
    double loss = 0.0;
    double loss_c = 0.0;
    double loss_s = 0.0;
    double psnr_c = 0.0;
    double psnr_s = 0.0;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Uniform per-batch choice among the active attacks.
class AttackSampler {
public:
    AttackSampler(std::size_t count, std::uint64_t seed);
    std::size_t next();

private:
    std::size_t count_;
    std::mt19937_64 rng_;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

struct StepOptions {
    std::string enhancer_set = kDefaultEnhancers;
    EpochCallback on_epoch;
};

/// Trains one step of the plan. Parameters outside the step's trainable
/// groups are never handed to the optimizer and are bitwise unchanged.
/// Throws DataError for fewer than two images and NumericError on a
/// non-finite loss.
std::vector<EpochMetrics> run_step(const TrainPlan& plan, std::size_t step_index, PrisModel& model,
                                   const Dataset& data, const StepOptions& options = {});

using StepDoneCallback = std::function<void(const StepPlan&, PrisModel&)>;

/// Runs every step in order; `on_step_done` fires after each (checkpoints).
std::vector<EpochMetrics> train_full(const TrainPlan& plan, PrisModel& model, const Dataset& data,
                                     const StepOptions& options = {}, const StepDoneCallback& on_step_done = {});

/// Attack-aware extraction: copy the default enhancers into a set named
/// after `attack` and re-run the enhancer pre-training step on that attack
/// alone. Returns the step's metrics.
std::vector<EpochMetrics> finetune_attack_enhancers(const TrainPlan& plan, PrisModel& model, const Dataset& data,
                                                    const DistortionSpec& attack, const EpochCallback& on_epoch = {});

/// Append-only line-delimited JSON metrics log.
class MetricsLog {
public:
    explicit MetricsLog(const std::filesystem::path& path);
    void append(const EpochMetrics& m);

private:
    std::ofstream out_;
};

}  // namespace pris
