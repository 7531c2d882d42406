#include "pris/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pris/error.hpp"
#include "pris/inn.hpp"
#include "pris/metrics.hpp"
#include "pris/rng.hpp"

namespace pris {

void LossWeights::validate() const {
    if (lambda_c < 0.0 || lambda_s < 0.0 || lambda_z < 0.0) throw ConfigError("loss weights must be >= 0");
    if (!(lambda_c + lambda_s > 0.0)) throw ConfigError("lambda_c + lambda_s must be > 0");
}

namespace {

torch::Tensor batch_sse(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
    if (!a.sizes().equals(b.sizes())) throw DimensionError(std::string(what) + ": shape mismatch");
    if (a.dim() != 4) throw DimensionError(std::string(what) + ": expected (B, C, H, W)");
    return (a - b).square().sum() / static_cast<double>(a.size(0));
}

}  // namespace

torch::Tensor loss_c(const torch::Tensor& container, const torch::Tensor& host) {
    return batch_sse(container, host, "loss_c");
}

torch::Tensor loss_s(const torch::Tensor& secret, const torch::Tensor& extracted) {
    return batch_sse(secret, extracted, "loss_s");
}

double total_loss(const LossWeights& w, double lc, double ls, double lz) {
    return w.lambda_c * lc + w.lambda_s * ls + w.lambda_z * lz;
}

torch::Tensor total_loss(const LossWeights& w, const torch::Tensor& lc, const torch::Tensor& ls,
                         const torch::Tensor& lz) {
    auto out = w.lambda_c * lc + w.lambda_s * ls;
    if (w.lambda_z != 0.0) out = out + w.lambda_z * lz;
    return out;
}

double learning_rate(double initial_lr, int epoch, int half_period) {
    if (half_period <= 0) return initial_lr;
    return initial_lr * std::pow(0.5, epoch / half_period);
}

bool StepPlan::trains(ParamGroup g) const { return std::find(trainable.begin(), trainable.end(), g) != trainable.end(); }

TrainPlan TrainPlan::three_step(std::vector<DistortionSpec> attacks, std::array<int, 3> epochs,
                                std::array<double, 3> lrs, int lr_half_period) {
    TrainPlan plan;
    plan.steps.push_back(StepPlan{1, epochs[0], lrs[0], lr_half_period, {ParamGroup::kInn}, false, attacks});
    plan.steps.push_back(StepPlan{2, epochs[1], lrs[1], lr_half_period,
                                  {ParamGroup::kPreEnhance, ParamGroup::kPostEnhance}, true, attacks});
    plan.steps.push_back(StepPlan{3, epochs[2], lrs[2], lr_half_period,
                                  {ParamGroup::kInn, ParamGroup::kPreEnhance, ParamGroup::kPostEnhance}, true,
                                  std::move(attacks)});
    return plan;
}

TrainPlan TrainPlan::joint(std::vector<DistortionSpec> attacks, std::array<int, 3> epochs,
                           std::array<double, 3> lrs, int lr_half_period) {
    TrainPlan plan;
    for (std::size_t i = 0; i < 3; ++i) {
        plan.steps.push_back(StepPlan{0, epochs[i], lrs[i], lr_half_period,
                                      {ParamGroup::kInn, ParamGroup::kPreEnhance, ParamGroup::kPostEnhance}, true,
                                      attacks});
    }
    return plan;
}

void TrainPlan::validate() const {
    if (steps.empty()) throw ConfigError("training plan has no steps");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must be in [0,1)");
    weights.validate();
    for (const auto& s : steps) {
        if (s.epochs < 0) throw ConfigError("step epochs must be >= 0");
        if (!(s.initial_lr > 0.0)) throw ConfigError("learning rates must be > 0");
        for (const auto& a : s.attacks) a.validate();
        const bool inn = s.trains(ParamGroup::kInn);
        const bool pre = s.trains(ParamGroup::kPreEnhance);
        const bool post = s.trains(ParamGroup::kPostEnhance);
        switch (s.number) {
            case 0: break;
            case 1:
                if (!inn || pre || post || s.enhance) {
                    throw ConfigError("step 1 must train the invertible blocks only, with enhancers disabled");
                }
                break;
            case 2:
                if (inn || !s.enhance) throw ConfigError("step 2 must freeze the invertible blocks and run enhancers");
                break;
            case 3:
                if (!inn || !pre || !post || !s.enhance) throw ConfigError("step 3 must train every group");
                break;
            default: throw ConfigError("step number must be 0 (joint), 1, 2 or 3");
        }
    }
}

nlohmann::json EpochMetrics::to_json() const {
    return nlohmann::json{{"step", step},     {"epoch", epoch},   {"lr", lr},
                          {"L", loss},        {"L_c", loss_c},    {"L_s", loss_s},
                          {"psnr_c", psnr_to_json(psnr_c)}, {"psnr_s", psnr_to_json(psnr_s)}};
}

AttackSampler::AttackSampler(std::size_t count, std::uint64_t seed) : count_(count), rng_(seed) {}

std::size_t AttackSampler::next() {
    if (count_ <= 1) return 0;
    std::uniform_int_distribution<std::size_t> pick(0, count_ - 1);
    return pick(rng_);
}

namespace {

/// Turns requires_grad off for every parameter outside the trainable set and
/// restores the previous flags on scope exit.
class FreezeGuard {
public:
    FreezeGuard(PrisModel& model, const std::vector<torch::Tensor>& trainable) {
        for (auto& [name, p] : model.named_parameters()) {
            const bool keep = std::any_of(trainable.begin(), trainable.end(),
                                          [&](const torch::Tensor& t) { return t.is_same(p); });
            saved_.emplace_back(p, p.requires_grad());
            p.set_requires_grad(keep);
        }
    }
    ~FreezeGuard() {
        for (auto& [p, flag] : saved_) p.set_requires_grad(flag);
    }
    FreezeGuard(const FreezeGuard&) = delete;
    FreezeGuard& operator=(const FreezeGuard&) = delete;

private:
    std::vector<std::pair<torch::Tensor, bool>> saved_;
};

std::vector<torch::Tensor> collect_trainable(const StepPlan& step, PrisModel& model, const std::string& set) {
    std::vector<torch::Tensor> out;
    for (auto g : step.trainable) {
        if (g != ParamGroup::kInn && !step.enhance) continue;
        auto ps = model.parameters(g, set);
        out.insert(out.end(), ps.begin(), ps.end());
    }
    return out;
}

}  // namespace

std::vector<EpochMetrics> run_step(const TrainPlan& plan, std::size_t step_index, PrisModel& model,
                                   const Dataset& data, const StepOptions& options) {
    plan.validate();
    const auto& step = plan.steps.at(step_index);
    if (data.size() < 2) throw DataError("training needs at least two images (host/secret pairs)");

    auto params = collect_trainable(step, model, options.enhancer_set);
    if (params.empty() || step.epochs == 0) return {};
    if (step.enhance) model.enhancers(options.enhancer_set);  // fail early on a missing set

    FreezeGuard freeze(model, params);
    torch::optim::Adam optimizer(params,
                                 torch::optim::AdamOptions(step.initial_lr).betas({plan.beta1, plan.beta2}));

    const auto step_seed = derive_seed(plan.seed, {static_cast<std::uint64_t>(step_index),
                                                   static_cast<std::uint64_t>(step.number), tag(options.enhancer_set)});
    std::mt19937_64 rng(derive_seed(step_seed, {tag("data")}));
    AttackSampler sampler(step.attacks.size(), derive_seed(step_seed, {tag("attack")}));
    const ExtractOptions extract_opts{step.enhance, options.enhancer_set};
    const DistortionSpec identity{};

    std::vector<std::size_t> order(data.size());
    std::vector<EpochMetrics> history;
    std::uint64_t batch_counter = 0;

    for (int epoch = 0; epoch < step.epochs; ++epoch) {
        const double lr = learning_rate(step.initial_lr, epoch, step.lr_half_period);
        for (auto& group : optimizer.param_groups()) {
            static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
        }

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t n_pairs = order.size() / 2;

        double sum_l = 0.0, sum_lc = 0.0, sum_ls = 0.0;
        std::vector<double> psnr_c, psnr_s;
        std::size_t n_batches = 0;

        for (std::size_t start = 0; start < n_pairs; start += static_cast<std::size_t>(plan.batch_size)) {
            const std::size_t end = std::min(n_pairs, start + static_cast<std::size_t>(plan.batch_size));
            std::vector<torch::Tensor> hosts, secrets;
            for (std::size_t k = start; k < end; ++k) {
                hosts.push_back(data.sample(order[2 * k], rng));
                secrets.push_back(data.sample(order[2 * k + 1], rng));
            }
            const auto host = torch::cat(hosts, 0);
            const auto secret = torch::cat(secrets, 0);

            const auto& attack = step.attacks.empty() ? identity : step.attacks[sampler.next()];
            const auto noise_seed = derive_seed(step_seed, {tag("noise"), batch_counter});
            const auto z_seed = derive_seed(step_seed, {tag("z"), batch_counter});
            ++batch_counter;

            auto embedded = model.embed(host, secret);
            auto distorted = apply(attack, embedded.container, noise_seed, /*train=*/true);
            auto z = sample_latent(host.sizes(), z_seed);
            auto extracted = model.extract(distorted, z, extract_opts);

            auto lc = loss_c(embedded.container, host);
            auto ls = loss_s(secret, extracted.extracted);
            auto lz = embedded.z_hat.square().sum() / static_cast<double>(host.size(0));
            auto loss = total_loss(plan.weights, lc, ls, lz);

            const double l_value = loss.item<double>();
            if (!std::isfinite(l_value)) {
                std::ostringstream os;
                os << "non-finite loss at step " << step.number << " epoch " << epoch << " batch " << n_batches
                   << " (L_c=" << lc.item<double>() << ", L_s=" << ls.item<double>() << ", attack "
                   << attack.label() << ", lr " << lr << ")";
                throw NumericError(os.str());
            }

            optimizer.zero_grad();
            loss.backward();
            optimizer.step();

            sum_l += l_value;
            sum_lc += lc.item<double>();
            sum_ls += ls.item<double>();
            for (double v : batch_psnr_8bit(embedded.container, host)) psnr_c.push_back(v);
            for (double v : batch_psnr_8bit(extracted.extracted, secret)) psnr_s.push_back(v);
            ++n_batches;
        }

        const double nb = static_cast<double>(std::max<std::size_t>(n_batches, 1));
        EpochMetrics m{step.number, epoch, lr, sum_l / nb, sum_lc / nb, sum_ls / nb, mean_psnr(psnr_c),
                       mean_psnr(psnr_s)};
        if (options.on_epoch) options.on_epoch(m);
        history.push_back(m);
    }
    return history;
}

std::vector<EpochMetrics> train_full(const TrainPlan& plan, PrisModel& model, const Dataset& data,
                                     const StepOptions& options, const StepDoneCallback& on_step_done) {
    plan.validate();
    std::vector<EpochMetrics> all;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        auto h = run_step(plan, i, model, data, options);
        all.insert(all.end(), h.begin(), h.end());
        model.step_reached = std::max(model.step_reached, plan.steps[i].number == 0 ? 3 : plan.steps[i].number);
        if (on_step_done) on_step_done(plan.steps[i], model);
    }
    return all;
}

std::vector<EpochMetrics> finetune_attack_enhancers(const TrainPlan& plan, PrisModel& model, const Dataset& data,
                                                    const DistortionSpec& attack, const EpochCallback& on_epoch) {
    if (!model.config().pre_enhance && !model.config().post_enhance) {
        throw ConfigError("attack-specific enhancers need pre or post enhancement enabled");
    }
    const auto it = std::find_if(plan.steps.begin(), plan.steps.end(), [](const StepPlan& s) { return s.number == 2; });
    StepPlan step = it != plan.steps.end()
                        ? *it
                        : StepPlan{2, plan.steps.front().epochs, kStep12LearningRate, plan.steps.front().lr_half_period,
                                   {ParamGroup::kPreEnhance, ParamGroup::kPostEnhance}, true, {}};
    step.attacks = {attack};

    TrainPlan single = plan;
    single.steps = {step};
    const auto label = attack.label();
    model.clone_enhancers(kDefaultEnhancers, label);
    return run_step(single, 0, model, data, StepOptions{label, on_epoch});
}

MetricsLog::MetricsLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
    if (!out_) throw DataError("cannot open metrics log " + path.string());
}

void MetricsLog::append(const EpochMetrics& m) {
    out_ << m.to_json().dump() << '\n';
    out_.flush();
}

}  // namespace pris
