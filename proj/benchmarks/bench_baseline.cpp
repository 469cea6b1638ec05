// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "tscc/baseline/chain.hpp"
#include "tscc/harness/dataset.hpp"
#include "tscc/rng.hpp"
#include "tscc/snr.hpp"

using namespace tscc;
using namespace tscc::baseline;

namespace {

void LdpcDecodeNearThreshold(benchmark::State& state) {
    const LdpcCode code = LdpcCode::build(1536, 512, 3, 1);
    Rng rng(2);
    std::vector<uint8_t> message(512);
    for (auto& b : message) b = rng.next_double() < 0.5;
    const auto cw = code.encode(message);
    // 2 dB Eb/N0 over BPSK: a busy decoding point
    const double sigma2 = 1.0 / (2.0 * code.rate() * std::pow(10.0, 0.2));
    std::vector<double> llrs(cw.size());
    for (size_t i = 0; i < cw.size(); ++i) {
        const double x = cw[i] ? -1.0 : 1.0;
        llrs[i] = 2.0 * (x + std::sqrt(sigma2) * rng.next_gaussian()) / sigma2;
    }
    for (auto _ : state) {
        auto result = code.decode_bp(llrs);
        benchmark::DoNotOptimize(result.message.data());
    }
}
BENCHMARK(LdpcDecodeNearThreshold);

void DctEncodeScene(benchmark::State& state) {
    const auto samples = harness::generate_dataset(harness::SceneSpec{}, 1);
    for (auto _ : state) {
        auto result = dct_encode(samples[0].image, CodecQuality{1.0});
        benchmark::DoNotOptimize(result.bits.bytes().data());
    }
    state.SetItemsProcessed(state.iterations() * samples[0].image.size());
}
BENCHMARK(DctEncodeScene);

void QamSoftDemap(benchmark::State& state) {
    const QamConstellation c = QamConstellation::make(64);
    Rng rng(5);
    std::vector<std::complex<double>> rx(4096);
    for (auto& s : rx) s = {rng.next_gaussian(), rng.next_gaussian()};
    for (auto _ : state) {
        auto llrs = qam_demodulate_llr(rx, c, 0.1);
        benchmark::DoNotOptimize(llrs.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rx.size()));
}
BENCHMARK(QamSoftDemap);

} // namespace
