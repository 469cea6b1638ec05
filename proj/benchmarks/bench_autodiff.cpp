// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "tscc/optim.hpp"
#include "tscc/rng.hpp"
#include "tscc/tape.hpp"

using namespace tscc;

namespace {

ad::Tensor random_tensor(std::vector<int> shape, uint64_t seed) {
    ad::Tensor t(std::move(shape));
    Rng rng(seed);
    for (int i = 0; i < t.size(); ++i) t[i] = rng.next_symmetric();
    return t;
}

void TrainingStepShapedMatmul(benchmark::State& state) {
    const int batch = 16;
    const int in = static_cast<int>(state.range(0));
    const int out = 128;
    ad::Parameter w(random_tensor({out, in}, 1));
    const ad::Tensor x = random_tensor({batch, in}, 2);
    for (auto _ : state) {
        ad::Tape tape;
        ad::Var h = tape.matmul_nt(tape.constant(x), tape.parameter(w));
        ad::Var loss = tape.mean(tape.square(tape.tanh(h)));
        w.zero_grad();
        tape.backward(loss);
        benchmark::DoNotOptimize(w.grad.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t{batch} * in * out);
}
BENCHMARK(TrainingStepShapedMatmul)->Arg(1536)->Arg(6144);

void AdamStep(benchmark::State& state) {
    ad::Parameter p(random_tensor({static_cast<int>(state.range(0))}, 3));
    for (int i = 0; i < p.grad.size(); ++i) p.grad[i] = 0.01;
    std::vector<ad::Parameter*> params{&p};
    for (auto _ : state) {
        ad::adam_update(params, {});
        benchmark::DoNotOptimize(p.value.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(AdamStep)->Arg(1 << 16);

} // namespace
