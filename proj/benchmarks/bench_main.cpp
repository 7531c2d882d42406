#include <benchmark/benchmark.h>

#include "pris/bitpack.hpp"
#include "pris/gaf.hpp"
#include "pris/inn.hpp"
#include "pris/jpeg.hpp"
#include "pris/wavelet.hpp"

namespace {

void BM_Dwt(benchmark::State& state) {
    const auto n = state.range(0);
    const auto x = torch::rand({1, 3, n, n});
    for (auto _ : state) {
        auto y = pris::iwt(pris::dwt(x));
        benchmark::DoNotOptimize(y.data_ptr());
    }
}
BENCHMARK(BM_Dwt)->Arg(64)->Arg(256);

void BM_JpegSim(benchmark::State& state) {
    const auto n = state.range(0);
    const auto x = torch::rand({1, 3, n, n});
    for (auto _ : state) {
        auto y = pris::jpeg::jpeg_sim(x, 80, pris::GradMode::kGaf, true);
        benchmark::DoNotOptimize(y.data_ptr());
    }
}
BENCHMARK(BM_JpegSim)->Arg(64)->Arg(256);

void BM_CouplingForward(benchmark::State& state) {
    torch::NoGradGuard ng;
    pris::CouplingBlock block(12, 5, 32);
    const auto h = torch::randn({1, 12, 32, 32});
    const auto s = torch::randn({1, 12, 32, 32});
    for (auto _ : state) {
        auto out = block->forward(h, s);
        benchmark::DoNotOptimize(out.second.data_ptr());
    }
}
BENCHMARK(BM_CouplingForward);

void BM_BitpackPack(benchmark::State& state) {
    pris::Image8 host(256, 256, 3, 200);
    pris::Image8 secret(256, 256, 3, 17);
    for (auto _ : state) {
        auto c = pris::bitpack::pack(host, secret);
        benchmark::DoNotOptimize(c.words.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(host.size()));
}
BENCHMARK(BM_BitpackPack);

void BM_RoundWithGaf(benchmark::State& state) {
    auto x = torch::rand({1, 3, 128, 128}).requires_grad_(true);
    for (auto _ : state) {
        auto y = pris::round_st(x, pris::GradMode::kGaf).sum();
        y.backward();
        benchmark::DoNotOptimize(x.grad().data_ptr());
    }
}
BENCHMARK(BM_RoundWithGaf);

}  // namespace

BENCHMARK_MAIN();
