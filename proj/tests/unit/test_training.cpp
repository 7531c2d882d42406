#include <gtest/gtest.h>

#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pris/checkpoint.hpp"
#include "pris/distortion.hpp"
#include "pris/error.hpp"
#include "pris/metrics.hpp"
#include "pris/training.hpp"
#include "test_support.hpp"

namespace pris {
namespace {

std::vector<torch::Tensor> snapshot(PrisModel& model, const std::string& prefix) {
    std::vector<torch::Tensor> out;
    for (auto& [name, p] : model.named_parameters()) {
        if (name.rfind(prefix, 0) == 0) out.push_back(p.detach().clone());
    }
    return out;
}

bool all_equal(const std::vector<torch::Tensor>& a, const std::vector<torch::Tensor>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!torch::equal(a[i], b[i])) return false;
    }
    return true;
}

TrainPlan small_plan(std::array<int, 3> epochs = {2, 2, 2}) {
    auto plan = TrainPlan::three_step(parse_attack_list("identity,round"), epochs, {1e-3, 1e-3, 1e-4});
    plan.batch_size = 2;
    plan.seed = 5;
    return plan;
}

TEST(Loss, SumOfSquaresOverBatch) {
    const auto a = torch::zeros({2, 3, 4, 4});
    const auto b = torch::full({2, 3, 4, 4}, 0.5);
    EXPECT_DOUBLE_EQ(loss_c(a, b).item<double>(), 0.25 * 3 * 16);
    EXPECT_DOUBLE_EQ(loss_s(a, b).item<double>(), 0.25 * 3 * 16);
    EXPECT_THROW(loss_c(a, torch::zeros({2, 3, 4, 5})), DimensionError);
}

TEST(Loss, WeightedTotal) {
    const LossWeights w{0.1, 1.9};
    EXPECT_DOUBLE_EQ(total_loss(w, 10.0, 1.0), 0.1 * 10.0 + 1.9);
    EXPECT_DOUBLE_EQ(total_loss(LossWeights{2.0, 3.0, 0.5}, 1.0, 1.0, 2.0), 6.0);
    EXPECT_THROW((LossWeights{-1.0, 1.0}.validate()), ConfigError);
    EXPECT_THROW((LossWeights{0.0, 0.0}.validate()), ConfigError);
}

TEST(Schedule, HalvesEveryPeriod) {
    EXPECT_DOUBLE_EQ(learning_rate(1e-4, 0, 200), 1e-4);
    EXPECT_DOUBLE_EQ(learning_rate(1e-4, 199, 200), 1e-4);
    EXPECT_DOUBLE_EQ(learning_rate(1e-4, 200, 200), 5e-5);
    EXPECT_DOUBLE_EQ(learning_rate(1e-4, 400, 200), 2.5e-5);
    EXPECT_NEAR(kStep12LearningRate, std::pow(10.0, -4.5), 1e-18);
    EXPECT_NEAR(kStep3LearningRate, std::pow(10.0, -5.5), 1e-19);
}

TEST(Plan, StepContractsEnforced) {
    auto plan = small_plan();
    EXPECT_NO_THROW(plan.validate());
    auto bad = plan;
    bad.steps[1].trainable.push_back(ParamGroup::kInn);
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = plan;
    bad.steps[0].enhance = true;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = plan;
    bad.batch_size = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    EXPECT_NO_THROW(TrainPlan::joint(parse_attack_list("round"), {1, 1, 1}).validate());
}

TEST(Sampler, UniformWithinTenPercent) {
    AttackSampler sampler(2, 123);
    int counts[2] = {0, 0};
    for (int i = 0; i < 1000; ++i) ++counts[sampler.next()];
    EXPECT_NEAR(counts[0], 500, 50);
    EXPECT_NEAR(counts[1], 500, 50);
    AttackSampler single(1, 1);
    EXPECT_EQ(single.next(), 0u);
}

TEST(Freeze, StepTwoLeavesInnUntouched) {
    auto model = make_model(testing::tiny_config(), 1);
    const auto data = testing::synthetic_dataset(4, 24, 16, Split::kTrain);
    const auto plan = small_plan();
    run_step(plan, 0, model, data);
    const auto inn_before = snapshot(model, "inn.");
    const auto enh_before = snapshot(model, "enhance:");
    run_step(plan, 1, model, data);
    EXPECT_TRUE(all_equal(inn_before, snapshot(model, "inn.")));
    EXPECT_FALSE(all_equal(enh_before, snapshot(model, "enhance:")));
    for (auto& [name, p] : model.named_parameters()) EXPECT_TRUE(p.requires_grad()) << name;
}

TEST(Freeze, StepOneLeavesEnhancersUntouched) {
    auto model = make_model(testing::tiny_config(), 2);
    const auto data = testing::synthetic_dataset(4, 24, 16, Split::kTrain);
    const auto inn_before = snapshot(model, "inn.");
    const auto enh_before = snapshot(model, "enhance:");
    run_step(small_plan(), 0, model, data);
    EXPECT_TRUE(all_equal(enh_before, snapshot(model, "enhance:")));
    EXPECT_FALSE(all_equal(inn_before, snapshot(model, "inn.")));
}

TEST(Training, SameSeedSameHistoryAndWeights) {
    const auto data = testing::synthetic_dataset(4, 24, 16, Split::kTrain);
    auto a = make_model(testing::tiny_config(), 3);
    auto b = make_model(testing::tiny_config(), 3);
    const auto ha = train_full(small_plan({1, 1, 1}), a, data);
    const auto hb = train_full(small_plan({1, 1, 1}), b, data);
    ASSERT_EQ(ha.size(), 3u);
    ASSERT_EQ(ha.size(), hb.size());
    for (std::size_t i = 0; i < ha.size(); ++i) EXPECT_EQ(ha[i].to_json().dump(), hb[i].to_json().dump());
    EXPECT_TRUE(all_equal(snapshot(a, ""), snapshot(b, "")));
    EXPECT_EQ(a.step_reached, 3);
}

TEST(Training, ResumeFromStepCheckpointMatchesContinuousRun) {
    testing::TempDir dir("pris-resume");
    const auto data = testing::synthetic_dataset(4, 24, 16, Split::kTrain);
    const auto plan = small_plan({1, 1, 1});
    auto full = make_model(testing::tiny_config(), 4);
    train_full(plan, full, data);

    auto partial = make_model(testing::tiny_config(), 4);
    run_step(plan, 0, partial, data);
    run_step(plan, 1, partial, data);
    save_checkpoint(dir / "mid.ckpt", partial);
    auto resumed = load_checkpoint(dir / "mid.ckpt");
    run_step(plan, 2, resumed, data);
    EXPECT_TRUE(all_equal(snapshot(full, ""), snapshot(resumed, "")));
}

TEST(Training, NonFiniteLossAborts) {
    auto model = make_model(testing::tiny_config(), 5);
    const auto data = testing::synthetic_dataset(4, 24, 16, Split::kTrain);
    auto plan = small_plan();
    plan.weights.lambda_s = std::numeric_limits<double>::infinity();
    try {
        run_step(plan, 0, model, data);
        FAIL() << "expected a numeric abort";
    } catch (const NumericError& e) {
        EXPECT_EQ(e.exit_code(), ExitCode::kNumeric);
        EXPECT_NE(std::string(e.what()).find("epoch 0"), std::string::npos);
    }
}

TEST(Training, NeedsTwoImages) {
    auto model = make_model(testing::tiny_config(), 5);
    const auto data = testing::synthetic_dataset(1, 24, 16, Split::kTrain);
    EXPECT_THROW(run_step(small_plan(), 0, model, data), DataError);
}

TEST(Training, MetricsLogIsJsonLines) {
    testing::TempDir dir("pris-log");
    {
        MetricsLog log(dir / "m.jsonl");
        log.append(EpochMetrics{1, 0, 1e-3, 2.0, 1.0, 1.0, kInfinitePsnr, 30.0});
    }
    std::ifstream in(dir / "m.jsonl");
    std::string line;
    std::getline(in, line);
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"step", "epoch", "lr", "L", "L_c", "L_s", "psnr_c", "psnr_s"}) EXPECT_TRUE(j.contains(key));
    EXPECT_EQ(j["psnr_c"], "inf");
}

// Gradient of L_s reaching the invertible blocks through the embedding path.
// Extraction runs on a parameter copy so only the container carries gradient.
double embedding_path_grad(GradMode mode, const char* attack) {
    auto cfg = testing::tiny_config(2, false);
    auto model = make_model(cfg, 7);
    testing::randomize(*model.inn(), 8);
    auto reader = make_model(cfg, 7);
    {
        torch::NoGradGuard ng;
        auto src = model.named_parameters();
        auto dst = reader.named_parameters();
        for (std::size_t i = 0; i < src.size(); ++i) dst[i].second.copy_(src[i].second);
    }
    const auto host = testing::uniform_images(2, 3, 16, 16, 9);
    const auto secret = testing::uniform_images(2, 3, 16, 16, 10);
    auto e = model.embed(host, secret);
    auto distorted = apply(parse_attack_label(attack, mode), e.container, 1, true);
    auto x = reader.extract(distorted, sample_latent(host.sizes(), 2)).extracted;
    auto ls = loss_s(secret, x);
    const auto params = model.parameters(ParamGroup::kInn);
    const auto grads = torch::autograd::grad({ls}, params, {}, false, false, true);
    double total = 0.0;
    for (const auto& g : grads) {
        if (g.defined()) total += g.abs().sum().item<double>();
    }
    return total;
}

TEST(GradientMode, ZeroModeCutsEmbeddingPath) {
    EXPECT_EQ(embedding_path_grad(GradMode::kZero, "round"), 0.0);
    EXPECT_EQ(embedding_path_grad(GradMode::kZero, "rjpeg90"), 0.0);
    EXPECT_GT(embedding_path_grad(GradMode::kOne, "round"), 0.0);
    EXPECT_GT(embedding_path_grad(GradMode::kGaf, "round"), 0.0);
    EXPECT_GT(embedding_path_grad(GradMode::kGaf, "rjpeg90"), 0.0);
}

}  // namespace
}  // namespace pris
