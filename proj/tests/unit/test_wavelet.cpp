#include <gtest/gtest.h>

#include "pris/error.hpp"
#include "pris/wavelet.hpp"
#include "test_support.hpp"

namespace pris {
namespace {

// Reference Haar analysis written as explicit loops over 2x2 blocks with
// the orthonormal 4x4 kernel, independent of the tensor-slicing version.
torch::Tensor reference_dwt(const torch::Tensor& x) {
    const auto xd = x.to(torch::kFloat64).contiguous();
    const auto b = x.size(0), c = x.size(1), h = x.size(2), w = x.size(3);
    auto out = torch::zeros({b, 4 * c, h / 2, w / 2}, torch::kFloat64);
    auto in = xd.accessor<double, 4>();
    auto o = out.accessor<double, 4>();
    const double kernel[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
    for (int n = 0; n < b; ++n)
        for (int ch = 0; ch < c; ++ch)
            for (int i = 0; i < h / 2; ++i)
                for (int j = 0; j < w / 2; ++j) {
                    const double v[4] = {in[n][ch][2 * i][2 * j], in[n][ch][2 * i][2 * j + 1],
                                         in[n][ch][2 * i + 1][2 * j], in[n][ch][2 * i + 1][2 * j + 1]};
                    for (int band = 0; band < 4; ++band) {
                        double acc = 0;
                        for (int k = 0; k < 4; ++k) acc += kernel[band][k] * v[k];
                        o[n][band * c + ch][i][j] = acc / 2.0;
                    }
                }
    return out;
}

TEST(Wavelet, ConstantImageHasOnlyLowBand) {
    const auto x = torch::full({1, 3, 8, 8}, 0.3f);
    const auto f = dwt(x);
    ASSERT_EQ(f.sizes(), (std::vector<int64_t>{1, 12, 4, 4}));
    EXPECT_TRUE(torch::allclose(f.slice(1, 0, 3), torch::full({1, 3, 4, 4}, 0.6f)));
    EXPECT_EQ(f.slice(1, 3, 12).abs().max().item<float>(), 0.0f);
}

TEST(Wavelet, TwoByTwoClosedForm) {
    const float a = 0.1f, b = 0.7f, c = 0.4f, d = 0.9f;
    const auto x = torch::tensor({a, b, c, d}).reshape({1, 1, 2, 2});
    const auto f = dwt(x).flatten();
    EXPECT_NEAR(f[0].item<float>(), (a + b + c + d) / 2, 1e-7);
    EXPECT_NEAR(f[1].item<float>(), (a - b + c - d) / 2, 1e-7);
    EXPECT_NEAR(f[2].item<float>(), (a + b - c - d) / 2, 1e-7);
    EXPECT_NEAR(f[3].item<float>(), (a - b - c + d) / 2, 1e-7);
}

TEST(Wavelet, MatchesLoopReference) {
    const auto x = testing::uniform_images(2, 3, 10, 6, 5);
    EXPECT_TRUE(torch::allclose(dwt(x).to(torch::kFloat64), reference_dwt(x), 0, 1e-6));
}

TEST(Wavelet, ZeroInZeroOut) {
    EXPECT_EQ(dwt(torch::zeros({1, 3, 4, 4})).abs().sum().item<float>(), 0.0f);
    EXPECT_EQ(iwt(torch::zeros({1, 12, 2, 2})).abs().sum().item<float>(), 0.0f);
}

TEST(Wavelet, InverseOfConstantBand) {
    auto f = torch::zeros({1, 12, 3, 3});
    f.slice(1, 0, 3).fill_(1.4f);
    EXPECT_TRUE(torch::allclose(iwt(f), torch::full({1, 3, 6, 6}, 0.7f)));
}

TEST(Wavelet, PerfectReconstructionAndEnergy) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = testing::uniform_images(2, 3, 16, 24, seed);
        const auto f = dwt(x);
        EXPECT_LE((iwt(f) - x).abs().max().item<float>(), 1e-6f);
        const double ex = x.to(torch::kFloat64).norm().item<double>();
        const double ef = f.to(torch::kFloat64).norm().item<double>();
        EXPECT_LE(std::abs(ex - ef) / ex, 1e-5);
    }
}

TEST(Wavelet, Linearity) {
    const auto x = testing::uniform_images(1, 3, 8, 8, 1);
    const auto y = testing::uniform_images(1, 3, 8, 8, 2);
    const auto lhs = dwt(0.3 * x - 1.7 * y);
    const auto rhs = 0.3 * dwt(x) - 1.7 * dwt(y);
    EXPECT_LE((lhs - rhs).abs().max().item<float>(), 1e-6f);
}

TEST(Wavelet, RejectsBadShapes) {
    EXPECT_THROW(dwt(torch::zeros({1, 3, 5, 4})), DimensionError);
    EXPECT_THROW(dwt(torch::zeros({1, 3, 4, 7})), DimensionError);
    EXPECT_THROW(dwt(torch::zeros({3, 4, 4})), DimensionError);
    EXPECT_THROW(iwt(torch::zeros({1, 6, 4, 4})), DimensionError);
}

}  // namespace
}  // namespace pris
