// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "tscc/agent.hpp"
#include "tscc/channel.hpp"
#include "tscc/harness/dataset.hpp"
#include "tscc/jscc.hpp"
#include "tscc/metrics.hpp"
#include "tscc/rng.hpp"

using namespace tscc;

namespace {

void CodecForwardPipeline(benchmark::State& state) {
    const auto samples = harness::generate_dataset(harness::SceneSpec{}, 1);
    const int l = samples[0].image.size();
    JsccEncoder enc(l, {128}, 32, 1);
    JsccDecoder dec(3, 32, 64, {128}, 32, 2);
    ChannelConfig cc;
    cc.kind = ChannelKind::Awgn;
    cc.snr_db = 10.0;
    cc.seed = 3;
    const std::vector<double> eps(32, 0.0);
    uint64_t stream = 0;
    for (auto _ : state) {
        auto out = forward_pipeline(enc, dec, samples[0].image, cc, eps, ++stream);
        benchmark::DoNotOptimize(out.output.data().data());
    }
}
BENCHMARK(CodecForwardPipeline);

void AwgnTransmit(benchmark::State& state) {
    Rng rng(1);
    std::vector<std::complex<double>> z(static_cast<size_t>(state.range(0)));
    for (auto& s : z) s = {rng.next_gaussian(), rng.next_gaussian()};
    const SymbolFrame frame = normalize_power(z, 1.0);
    ChannelConfig cc;
    cc.kind = ChannelKind::Awgn;
    cc.snr_db = 0.0;
    cc.seed = 7;
    uint64_t stream = 0;
    for (auto _ : state) {
        auto received = transmit_awgn(frame, cc, ++stream);
        benchmark::DoNotOptimize(received.symbols.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(AwgnTransmit)->Arg(2048);

void MsSsimDeskScale(benchmark::State& state) {
    const auto samples = harness::generate_dataset(harness::SceneSpec{}, 2);
    for (auto _ : state) {
        const double v = ms_ssim(samples[0].image, samples[1].image);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(MsSsimDeskScale);

void SurrogateAgentForward(benchmark::State& state) {
    const auto samples = harness::generate_dataset(harness::SceneSpec{}, 1);
    const SurrogateAgent agent(3, 32, 64, {256, 64}, 7);
    for (auto _ : state) {
        const ActionVector a = agent_act(agent, samples[0].image, samples[0].state);
        benchmark::DoNotOptimize(a.steer);
    }
}
BENCHMARK(SurrogateAgentForward);

} // namespace
