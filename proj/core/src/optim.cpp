// SPDX-License-Identifier: Apache-2.0
#include "tscc/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "tscc/rng.hpp"

namespace tscc::ad {

void adam_update(std::span<Parameter* const> params, const AdamConfig& cfg) {
    for (Parameter* p : params) {
        if (!p->grad.all_finite()) {
            throw std::runtime_error("adam_update: non-finite gradient");
        }
        if (!p->grad.same_shape(p->value)) {
            throw std::invalid_argument("adam_update: gradient/value shape mismatch");
        }
        p->step += 1;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->step));
        for (int i = 0; i < p->value.size(); ++i) {
            const double g = p->grad[i];
            p->moment1[i] = cfg.beta1 * p->moment1[i] + (1.0 - cfg.beta1) * g;
            p->moment2[i] = cfg.beta2 * p->moment2[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = p->moment1[i] / bc1;
            const double vhat = p->moment2[i] / bc2;
            p->value[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

Tensor seeded_init(std::vector<int> shape, int fan_in, uint64_t seed) {
    if (fan_in < 1) throw std::invalid_argument("seeded_init: fan_in must be >= 1");
    Tensor t(std::move(shape));
    const double bound = std::sqrt(6.0 / fan_in);
    Rng rng(seed);
    for (int i = 0; i < t.size(); ++i) {
        t[i] = bound * rng.next_symmetric();
    }
    return t;
}

double finite_difference_check(const std::function<double(bool)>& eval,
                               std::span<Parameter* const> params, double h) {
    for (Parameter* p : params) p->zero_grad();
    const double f0 = eval(true);
    if (!std::isfinite(f0)) {
        throw std::runtime_error("finite_difference_check: non-finite loss");
    }
    double max_rel = 0.0;
    for (Parameter* p : params) {
        for (int i = 0; i < p->value.size(); ++i) {
            const double orig = p->value[i];
            p->value[i] = orig + h;
            const double fp = eval(false);
            p->value[i] = orig - h;
            const double fm = eval(false);
            p->value[i] = orig;
            if (!std::isfinite(fp) || !std::isfinite(fm)) {
                throw std::runtime_error("finite_difference_check: non-finite evaluation");
            }
            const double fd = (fp - fm) / (2.0 * h);
            const double analytic = p->grad[i];
            const double rel = std::abs(analytic - fd) / (std::abs(analytic) + 1e-8);
            if (rel > max_rel) max_rel = rel;
        }
    }
    return max_rel;
}

} // namespace tscc::ad
