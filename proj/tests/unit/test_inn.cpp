#include <gtest/gtest.h>

#include <cmath>

#include "pris/error.hpp"
#include "pris/inn.hpp"
#include "pris/wavelet.hpp"
#include "test_support.hpp"

namespace pris {
namespace {

InnOptions small_inn(int n_blocks) {
    InnOptions o;
    o.n_blocks = n_blocks;
    o.channels = 3;
    o.subnet_layers = 3;
    o.subnet_growth = 8;
    return o;
}

TEST(DenseBlock, FreshBlockOutputsZeros) {
    DenseBlock block(DenseBlockOptions{12, 12, 5, 32, 0.2});
    const auto y = block->forward(torch::randn({2, 12, 8, 8}));
    EXPECT_EQ(y.sizes(), (std::vector<int64_t>{2, 12, 8, 8}));
    EXPECT_EQ(y.abs().max().item<float>(), 0.0f);
}

TEST(CouplingBlock, ZeroSubnetsScaleSecretBySqrtE) {
    CouplingBlock block(12, 3, 8);
    const auto h = torch::randn({1, 12, 4, 4});
    const auto s = torch::randn({1, 12, 4, 4});
    const auto [h1, s1] = block->forward(h, s);
    EXPECT_TRUE(torch::equal(h1, h));
    EXPECT_TRUE(torch::allclose(s1, s * std::exp(0.5), 1e-6, 1e-6));

    const auto [h0, s0] = block->inverse(h1, s1);
    EXPECT_TRUE(torch::allclose(h0, h, 1e-6, 1e-6));
    EXPECT_TRUE(torch::allclose(s0, s, 1e-6, 1e-6));
}

TEST(CouplingBlock, RandomParametersRoundTrip) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CouplingBlock block(12, 3, 8);
        testing::randomize(*block, seed);
        torch::manual_seed(100 + seed);
        const auto h = torch::randn({2, 12, 8, 8});
        const auto s = torch::randn({2, 12, 8, 8});
        const auto [h1, s1] = block->forward(h, s);
        const auto [h0, s0] = block->inverse(h1, s1);
        EXPECT_LE((h0 - h).abs().max().item<float>(), 1e-5f);
        EXPECT_LE((s0 - s).abs().max().item<float>(), 1e-5f);
    }
}

TEST(CouplingBlock, ScaleStaysWithinOneAndE) {
    CouplingBlock block(12, 3, 8);
    testing::randomize(*block, 3, 1.0);
    const auto scale = block->scale(torch::randn({2, 12, 8, 8}) * 10);
    EXPECT_GE(scale.min().item<float>(), 1.0f);
    EXPECT_LE(scale.max().item<float>(), static_cast<float>(std::exp(1.0)));
    EXPECT_GT((scale.max() - scale.min()).item<float>(), 1.0f);
    const auto inv = 1.0 / scale;
    EXPECT_GE(inv.min().item<float>(), static_cast<float>(std::exp(-1.0)));
    EXPECT_LE(inv.max().item<float>(), 1.0f);
}

TEST(CouplingBlock, RejectsMismatchedBranches) {
    CouplingBlock block(12, 2, 4);
    EXPECT_THROW(block->forward(torch::zeros({1, 12, 4, 4}), torch::zeros({1, 12, 2, 4})), DimensionError);
    EXPECT_THROW(block->inverse(torch::zeros({1, 12, 4, 4}), torch::zeros({2, 12, 4, 4})), DimensionError);
}

// Analytic gradients against central differences, in double precision.
TEST(CouplingBlock, GradientsMatchFiniteDifferences) {
    CouplingBlock block(4, 3, 4);
    testing::randomize(*block, 21, 0.3);
    block->to(torch::kFloat64);
    torch::manual_seed(22);
    const auto h = torch::randn({1, 4, 4, 4}, torch::kFloat64);
    const auto s = torch::randn({1, 4, 4, 4}, torch::kFloat64);
    const auto weights = torch::randn({1, 4, 4, 4}, torch::kFloat64);

    auto loss = [&]() {
        const auto [h1, s1] = block->forward(h, s);
        return ((h1 * weights).sum() + (s1 * s1).sum() * 0.5);
    };

    for (auto& p : block->parameters()) p.mutable_grad() = torch::Tensor();
    loss().backward();

    const double eps = 1e-6;
    int checked = 0;
    for (auto& p : block->parameters()) {
        auto flat = p.detach().view(-1);
        const auto grad = p.grad().view(-1);
        for (int64_t i = 0; i < flat.numel(); i += std::max<int64_t>(1, flat.numel() / 7)) {
            const double orig = flat[i].item<double>();
            double plus, minus;
            {
                torch::NoGradGuard ng;
                flat[i] = orig + eps;
                plus = loss().item<double>();
                flat[i] = orig - eps;
                minus = loss().item<double>();
                flat[i] = orig;
            }
            const double fd = (plus - minus) / (2 * eps);
            const double an = grad[i].item<double>();
            EXPECT_NEAR(an, fd, 1e-3 * std::max(1.0, std::abs(fd))) << "param element " << i;
            ++checked;
        }
    }
    EXPECT_GT(checked, 20);
}

TEST(InvertibleNet, EightBlockStackRoundTrip) {
    InvertibleNet net(small_inn(8));
    testing::default_init(*net, 9);
    torch::manual_seed(10);
    const auto h = torch::randn({2, 12, 8, 8});
    const auto s = torch::randn({2, 12, 8, 8});
    torch::NoGradGuard ng;
    const auto [h1, s1] = net->forward_freq(h, s);
    const auto [h0, s0] = net->inverse_freq(h1, s1);
    EXPECT_LE((h0 - h).abs().max().item<float>(), 1e-4f);
    EXPECT_LE((s0 - s).abs().max().item<float>(), 1e-4f);
}

TEST(InvertibleNet, UntrainedEmbedLeavesHostUntouched) {
    InvertibleNet net(small_inn(4));
    const auto host = testing::uniform_images(1, 3, 16, 16, 1);
    const auto secret = testing::uniform_images(1, 3, 16, 16, 2);
    torch::NoGradGuard ng;
    const auto r = embed(net, host, secret);
    EXPECT_EQ(r.container.sizes(), host.sizes());
    // f outputs zeros so the host branch is only DWT -> IWT.
    EXPECT_LE((r.container - host).abs().max().item<float>(), 1e-6f);
    EXPECT_TRUE(torch::allclose(r.z_hat, dwt(secret) * std::exp(0.5 * 4), 1e-5, 1e-5));
}

TEST(InvertibleNet, ExtractWithTrueLatentRecoversSecret) {
    InvertibleNet net(small_inn(4));
    testing::default_init(*net, 4);
    const auto host = testing::uniform_images(2, 3, 16, 16, 3);
    const auto secret = testing::uniform_images(2, 3, 16, 16, 4);
    torch::NoGradGuard ng;
    const auto e = embed(net, host, secret);
    const auto x = extract(net, e.container, e.z_hat);
    EXPECT_LE((x.extracted - secret).abs().max().item<float>(), 1e-4f);
    EXPECT_LE((x.revealed_host - host).abs().max().item<float>(), 1e-4f);

    const auto again = extract(net, e.container, e.z_hat);
    EXPECT_TRUE(torch::equal(again.extracted, x.extracted));
}

TEST(InvertibleNet, ResampledLatentChangesExtraction) {
    InvertibleNet net(small_inn(2));
    testing::randomize(*net, 5, 0.05);
    const auto host = testing::uniform_images(1, 3, 16, 16, 5);
    const auto secret = testing::uniform_images(1, 3, 16, 16, 6);
    torch::NoGradGuard ng;
    const auto e = embed(net, host, secret);
    const auto a = extract(net, e.container, sample_latent(host.sizes(), 1)).extracted;
    const auto b = extract(net, e.container, sample_latent(host.sizes(), 2)).extracted;
    const auto a2 = extract(net, e.container, sample_latent(host.sizes(), 1)).extracted;
    EXPECT_GT((a - b).abs().max().item<float>(), 1e-3f);
    EXPECT_TRUE(torch::equal(a, a2));
}

TEST(InvertibleNet, LatentSampleIsStandardNormal) {
    const auto z = sample_latent({4, 3, 64, 64}, 77);
    EXPECT_EQ(z.sizes(), (std::vector<int64_t>{4, 12, 32, 32}));
    EXPECT_NEAR(z.mean().item<double>(), 0.0, 0.02);
    EXPECT_NEAR(z.std().item<double>(), 1.0, 0.02);
}

TEST(InvertibleNet, ShapeErrors) {
    InvertibleNet net(small_inn(1));
    EXPECT_THROW(embed(net, torch::zeros({1, 3, 8, 8}), torch::zeros({1, 3, 8, 6})), DimensionError);
    EXPECT_THROW(extract(net, torch::zeros({1, 3, 8, 8}), torch::zeros({1, 12, 2, 2})), DimensionError);
    EXPECT_THROW(net->forward_freq(torch::zeros({1, 8, 4, 4}), torch::zeros({1, 8, 4, 4})), DimensionError);
    EXPECT_THROW(InvertibleNet(small_inn(0)), ConfigError);
}

}  // namespace
}  // namespace pris
