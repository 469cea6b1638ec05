// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "tscc/tensor.hpp"

namespace tscc::ad {

/// A trainable tensor with its accumulated gradient and Adam state.
struct Parameter {
    Tensor value;
    Tensor grad;
    Tensor moment1;
    Tensor moment2;
    int64_t step = 0;

    Parameter() = default;
    explicit Parameter(Tensor init)
        : value(std::move(init)),
          grad(Tensor::zeros_like(value)),
          moment1(Tensor::zeros_like(value)),
          moment2(Tensor::zeros_like(value)) {}

    void zero_grad() { grad = Tensor::zeros_like(value); }
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam step on each parameter from its accumulated
/// gradient. Rejects non-finite gradients.
void adam_update(std::span<Parameter* const> params, const AdamConfig& cfg);

/// Uniform fan-in initialization in [-sqrt(6/fan_in), +sqrt(6/fan_in)],
/// fully determined by the seed.
Tensor seeded_init(std::vector<int> shape, int fan_in, uint64_t seed);

/// Central-difference gradient check.
///
/// `eval(true)` must run the forward pass at the current parameter values,
/// backpropagate, and accumulate gradients into `params`; `eval(false)` must
/// only return the loss. Returns the max over all parameter coordinates of
/// |analytic - (f(p+h) - f(p-h)) / 2h| / (|analytic| + 1e-8).
double finite_difference_check(const std::function<double(bool with_grad)>& eval,
                               std::span<Parameter* const> params, double h = 1e-6);

} // namespace tscc::ad
