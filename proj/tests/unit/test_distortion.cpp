#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "pris/distortion.hpp"
#include "pris/error.hpp"
#include "pris/jpeg.hpp"
#include "test_support.hpp"

namespace pris {
namespace {

TEST(Distortion, LabelsRoundTrip) {
    for (const auto& label : standard_attack_labels()) {
        EXPECT_EQ(parse_attack_label(label).label(), label);
    }
    EXPECT_EQ(parse_attack_label("gauss2.5").sigma, 2.5);
    EXPECT_EQ(parse_attack_label("rjpeg80").kind, DistortionKind::kRJpeg);
    EXPECT_EQ(parse_attack_label("rjpeg80").qf, 80);
    EXPECT_EQ(parse_attack_list("identity,round").size(), 2u);
}

TEST(Distortion, UnknownLabelsRejected) {
    EXPECT_THROW(parse_attack_label("blur3"), ConfigError);
    EXPECT_THROW(parse_attack_label("gauss"), ConfigError);
    EXPECT_THROW(parse_attack_label("jpeg101"), ConfigError);
    EXPECT_THROW(parse_attack_label("gauss-1"), ConfigError);
    EXPECT_THROW(parse_attack_list(""), ConfigError);
    try {
        parse_attack_label("median");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("rjpeg80"), std::string::npos);
    }
}

TEST(Distortion, InvalidParametersRejected) {
    DistortionSpec bad{DistortionKind::kGaussian, -1.0};
    EXPECT_THROW(bad.validate(), ParameterError);
    DistortionSpec q{DistortionKind::kJpeg, 0.0, 0};
    EXPECT_THROW(apply(q, torch::rand({1, 3, 8, 8}), 0, false), ParameterError);
}

TEST(Distortion, JsonRoundTripAndStrictKeys) {
    const DistortionSpec spec{DistortionKind::kRGaussian, 10.0, 90, GradMode::kOne};
    const nlohmann::json j = spec;
    EXPECT_EQ(j.get<DistortionSpec>(), spec);
    auto extra = j;
    extra["radius"] = 3;
    EXPECT_THROW(extra.get<DistortionSpec>(), ConfigError);
}

TEST(Distortion, GaussianStdWithinTwoPercent) {
    const auto x = torch::full({1, 1, 1000, 1000}, 0.5);
    const auto y = gaussian_noise(x, 10.0, 77);
    const double std255 = ((y - x) * 255.0).std().item<double>();
    EXPECT_NEAR(std255, 10.0, 0.2);
    EXPECT_NEAR(((y - x) * 255.0).mean().item<double>(), 0.0, 0.05);
}

TEST(Distortion, GaussianDeterministicPerSeed) {
    const auto x = testing::uniform_images(2, 3, 16, 16, 1);
    EXPECT_TRUE(torch::equal(gaussian_noise(x, 10, 5), gaussian_noise(x, 10, 5)));
    EXPECT_FALSE(torch::equal(gaussian_noise(x, 10, 5), gaussian_noise(x, 10, 6)));
    EXPECT_TRUE(torch::equal(gaussian_noise(x, 0, 5), x));
}

TEST(Distortion, OutputsStayInUnitRange) {
    const auto x = testing::uniform_images(2, 3, 16, 16, 2);
    for (const auto& label : standard_attack_labels()) {
        for (bool train : {false, true}) {
            const auto y = apply(parse_attack_label(label), x, 3, train);
            EXPECT_EQ(y.sizes(), x.sizes()) << label;
            EXPECT_GE(y.min().item<float>(), 0.0f) << label;
            EXPECT_LE(y.max().item<float>(), 1.0f) << label;
        }
    }
}

TEST(Distortion, CompositesQuantizeFirst) {
    const auto x = testing::uniform_images(1, 3, 16, 16, 3);
    const auto rounded = quantize_8bit(x);
    EXPECT_TRUE(torch::equal(apply(parse_attack_label("rgauss0"), x, 1, false), rounded));
    EXPECT_TRUE(torch::equal(apply(parse_attack_label("rgauss10"), x, 1, false),
                             gaussian_noise(rounded, 10, 1)));
    EXPECT_TRUE(torch::equal(apply(parse_attack_label("rjpeg80"), x, 1, false),
                             jpeg::jpeg_sim(rounded, 80, GradMode::kGaf, true)));
    // order matters: noise-then-round differs from round-then-noise
    EXPECT_FALSE(torch::equal(quantize_8bit(gaussian_noise(x, 10, 1)), gaussian_noise(rounded, 10, 1)));
}

TEST(Distortion, RoundTrainForwardMatchesEval) {
    const auto x = testing::uniform_images(1, 3, 16, 16, 4);
    const auto spec = parse_attack_label("round");
    EXPECT_LE((apply(spec, x, 0, true) - apply(spec, x, 0, false)).abs().max().item<float>(), 1e-6f);
}

TEST(Distortion, ZeroModeBlocksGradientThroughRounding) {
    for (const char* label : {"round", "rjpeg90", "jpeg90"}) {
        auto x = testing::uniform_images(1, 3, 16, 16, 5).requires_grad_(true);
        const auto spec = parse_attack_label(label, GradMode::kZero);
        apply(spec, x, 0, true).sum().backward();
        EXPECT_EQ(x.grad().abs().sum().item<float>(), 0.0f) << label;
    }
    auto x = testing::uniform_images(1, 3, 16, 16, 5).requires_grad_(true);
    apply(parse_attack_label("gauss10", GradMode::kZero), x, 0, true).sum().backward();
    EXPECT_GT(x.grad().abs().sum().item<float>(), 0.0f);
}

}  // namespace
}  // namespace pris
