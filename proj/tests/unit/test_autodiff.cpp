// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "tscc/optim.hpp"
#include "tscc/rng.hpp"
#include "tscc/tape.hpp"

using namespace tscc;
using ad::Parameter;
using ad::Tape;
using ad::Tensor;
using ad::Var;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo, double hi) {
    Tensor t(std::move(shape));
    for (int i = 0; i < t.size(); ++i) t[i] = lo + (hi - lo) * rng.next_double();
    return t;
}

// FD-checks d(sum(op(...) .* c))/d(params) for a graph builder.
double check_op(const std::function<Var(Tape&, std::vector<Var>&)>& build,
                std::vector<Parameter*> params, uint64_t seed) {
    Rng rng(seed);
    auto eval = [&](bool with_grad) {
        Tape tape;
        std::vector<Var> leaves;
        leaves.reserve(params.size());
        for (Parameter* p : params) leaves.push_back(tape.parameter(*p));
        Var out = build(tape, leaves);
        const double value = tape.value(out).item();
        if (with_grad) tape.backward(out);
        return value;
    };
    return ad::finite_difference_check(eval, params, 1e-6);
}

// random positive weights so the output adjoint is non-uniform
Var weighted_sum(Tape& tape, Var v, uint64_t seed) {
    Rng rng(seed);
    Tensor c = tape.value(v);
    for (int i = 0; i < c.size(); ++i) c[i] = 0.5 + rng.next_double();
    return tape.sum(tape.mul(v, tape.constant(std::move(c))));
}

} // namespace

TEST_CASE("primitive values: trivial cases") {
    Tape tape;
    Var a = tape.input(Tensor::vector({1, 2}));
    Var b = tape.input(Tensor::vector({3, 4}));
    CHECK(tape.value(tape.add(a, b)).values() == std::vector<double>{4, 6});

    Var r = tape.input(Tensor::vector({-1, 2}));
    CHECK(tape.value(tape.relu(r)).values() == std::vector<double>{0, 2});

    Var m1 = tape.input(Tensor::matrix(1, 2, {1, 2}));
    Var m2 = tape.input(Tensor::matrix(2, 1, {3, 4}));
    CHECK(tape.value(tape.matmul(m1, m2)).values() == std::vector<double>{11});
}

TEST_CASE("primitive domain errors") {
    Tape tape;
    Var a = tape.input(Tensor::vector({1, 2}));
    Var b = tape.input(Tensor::vector({1, 2, 3}));
    CHECK_THROWS_AS(tape.add(a, b), std::invalid_argument);
    Var z = tape.input(Tensor::vector({1, 0}));
    CHECK_THROWS_AS(tape.div(a, z), std::invalid_argument);
    Var neg = tape.input(Tensor::vector({1, -1}));
    CHECK_THROWS_AS(tape.log(neg), std::invalid_argument);
    CHECK_THROWS_AS(tape.sqrt(neg), std::invalid_argument);
    Var zero = tape.input(Tensor::vector({0.0, 1.0}));
    CHECK_THROWS_AS(tape.log(zero), std::invalid_argument);
}

TEST_CASE("every primitive adjoint passes finite differences") {
    const double kTol = 1e-6;
    for (uint64_t trial = 0; trial < 10; ++trial) {
        Rng rng(1000 + trial);

        // elementwise binary on 2x3 matrices
        {
            Parameter pa(random_tensor({2, 3}, rng, -2.0, 2.0));
            Parameter pb(random_tensor({2, 3}, rng, 1.0, 2.0));  // safe denominator
            auto bin = [&](auto op) {
                return check_op(
                    [&op, trial](Tape& t, std::vector<Var>& v) {
                        return weighted_sum(t, op(t, v[0], v[1]), 50 + trial);
                    },
                    {&pa, &pb}, trial);
            };
            CHECK(bin([](Tape& t, Var a, Var b) { return t.add(a, b); }) < kTol);
            CHECK(bin([](Tape& t, Var a, Var b) { return t.sub(a, b); }) < kTol);
            CHECK(bin([](Tape& t, Var a, Var b) { return t.mul(a, b); }) < kTol);
            CHECK(bin([](Tape& t, Var a, Var b) { return t.div(a, b); }) < kTol);
        }

        // matmul variants
        {
            Parameter pa(random_tensor({3, 4}, rng, -1.0, 1.0));
            Parameter pb(random_tensor({4, 2}, rng, -1.0, 1.0));
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.matmul(v[0], v[1]), 60 + trial);
                      },
                      {&pa, &pb}, trial) < kTol);
            Parameter pc(random_tensor({2, 4}, rng, -1.0, 1.0));
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.matmul_nt(v[0], v[1]), 61 + trial);
                      },
                      {&pa, &pc}, trial) < kTol);
        }

        // unaries; domains keep clear of kinks and singularities
        {
            Parameter positive(random_tensor({5}, rng, 0.5, 2.0));
            Parameter anywhere(random_tensor({5}, rng, -2.0, 2.0));
            // keep relu inputs away from 0
            for (int i = 0; i < anywhere.value.size(); ++i) {
                if (std::abs(anywhere.value[i]) < 0.05) anywhere.value[i] = 0.1;
            }
            auto un = [&](Parameter& p, auto op, uint64_t s) {
                return check_op(
                    [&op, s](Tape& t, std::vector<Var>& v) {
                        return weighted_sum(t, op(t, v[0]), s);
                    },
                    {&p}, s);
            };
            CHECK(un(anywhere, [](Tape& t, Var a) { return t.relu(a); }, 70 + trial) < kTol);
            CHECK(un(anywhere, [](Tape& t, Var a) { return t.tanh(a); }, 71 + trial) < kTol);
            CHECK(un(anywhere, [](Tape& t, Var a) { return t.exp(a); }, 72 + trial) < kTol);
            CHECK(un(positive, [](Tape& t, Var a) { return t.log(a); }, 73 + trial) < kTol);
            CHECK(un(positive, [](Tape& t, Var a) { return t.sqrt(a); }, 74 + trial) < kTol);
            CHECK(un(anywhere, [](Tape& t, Var a) { return t.square(a); }, 75 + trial) < kTol);
            CHECK(un(anywhere,
                     [](Tape& t, Var a) { return t.affine(a, 1.7, -0.3); }, 76 + trial) < kTol);
            // clamp bounds outside the sampled range: gradient passes everywhere
            CHECK(un(anywhere,
                     [](Tape& t, Var a) { return t.clamp(a, -3.0, 3.0); }, 77 + trial) < kTol);
        }

        // reductions and shape plumbing
        {
            Parameter pm(random_tensor({3, 4}, rng, -1.0, 1.0));
            Parameter pv(random_tensor({4}, rng, -1.0, 1.0));
            Parameter pc(random_tensor({3, 1}, rng, -1.0, 1.0));
            CHECK(check_op(
                      [](Tape& t, std::vector<Var>& v) { return t.sum(v[0]); },
                      {&pm}, trial) < kTol);
            CHECK(check_op(
                      [](Tape& t, std::vector<Var>& v) { return t.mean(v[0]); },
                      {&pm}, trial) < kTol);
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.row_sum(v[0]), 80 + trial);
                      },
                      {&pm}, trial) < kTol);
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.broadcast_rows(v[0], 3), 81 + trial);
                      },
                      {&pv}, trial) < kTol);
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.broadcast_cols(v[0], 5), 82 + trial);
                      },
                      {&pc}, trial) < kTol);
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.slice_cols(v[0], 1, 2), 83 + trial);
                      },
                      {&pm}, trial) < kTol);
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.slice(v[0], 1, 2), 84 + trial);
                      },
                      {&pv}, trial) < kTol);
            Parameter pv2(random_tensor({3}, rng, -1.0, 1.0));
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.concat(v[0], v[1]), 85 + trial);
                      },
                      {&pv, &pv2}, trial) < kTol);
            Parameter pm2(random_tensor({3, 2}, rng, -1.0, 1.0));
            CHECK(check_op(
                      [trial](Tape& t, std::vector<Var>& v) {
                          return weighted_sum(t, t.concat_cols(v[0], v[1]), 86 + trial);
                      },
                      {&pm, &pm2}, trial) < kTol);
        }
    }
}

TEST_CASE("backward basics") {
    // f(w) = w^2 at w = 3 -> grad 6
    Parameter w(Tensor::vector({3.0}));
    Tape tape;
    Var wv = tape.parameter(w);
    Var loss = tape.sum(tape.square(wv));
    tape.backward(loss);
    CHECK(w.grad[0] == doctest::Approx(6.0).epsilon(1e-14));

    // f(w) = sum(relu(w)), w = [-1, 2] -> grad [0, 1]
    Parameter w2(Tensor::vector({-1.0, 2.0}));
    Tape tape2;
    Var loss2 = tape2.sum(tape2.relu(tape2.parameter(w2)));
    tape2.backward(loss2);
    CHECK(w2.grad[0] == 0.0);
    CHECK(w2.grad[1] == 1.0);
}

TEST_CASE("backward error paths") {
    Tape empty;
    CHECK_THROWS_AS(empty.backward(Var{0}), std::logic_error);

    Tape tape;
    Var v = tape.input(Tensor::vector({1.0, 2.0}));
    CHECK_THROWS_AS(tape.backward(v), std::invalid_argument);  // non-scalar

    Var s = tape.sum(v);
    tape.backward(s);
    CHECK_THROWS_AS(tape.backward(s), std::logic_error);  // one backward per tape
}

TEST_CASE("backward is linear in the objective") {
    Rng rng(5);
    Parameter p(random_tensor({4}, rng, -1.0, 1.0));

    auto grad_of = [&p](const std::function<Var(Tape&, Var)>& f) {
        p.zero_grad();
        Tape tape;
        Var leaf = tape.parameter(p);
        tape.backward(f(tape, leaf));
        return p.grad;
    };

    auto f = [](Tape& t, Var v) { return t.sum(t.square(v)); };
    auto g = [](Tape& t, Var v) { return t.sum(t.tanh(v)); };
    auto fg = [&](Tape& t, Var v) { return t.add(f(t, v), g(t, v)); };

    const Tensor gf = grad_of(f);
    const Tensor gg = grad_of(g);
    const Tensor gfg = grad_of(fg);
    for (int i = 0; i < 4; ++i) {
        CHECK(gfg[i] == doctest::Approx(gf[i] + gg[i]).epsilon(1e-12));
    }
}

TEST_CASE("tape replay determinism is bit exact") {
    auto run = []() {
        Rng rng(99);
        Parameter w(random_tensor({3, 3}, rng, -1.0, 1.0));
        Tape tape;
        Var x = tape.constant(random_tensor({2, 3}, rng, -1.0, 1.0));
        Var h = tape.tanh(tape.matmul_nt(x, tape.parameter(w)));
        Var loss = tape.mean(tape.square(h));
        const double value = tape.value(loss).item();
        tape.backward(loss);
        return std::make_pair(value, w.grad.values());
    };
    const auto [v1, g1] = run();
    const auto [v2, g2] = run();
    CHECK(v1 == v2);
    CHECK(g1 == g2);
}

TEST_CASE("frozen constants get no parameter gradient but pass-through works") {
    Rng rng(11);
    Parameter w(random_tensor({2, 2}, rng, -1.0, 1.0));
    Tape tape;
    Var frozen = tape.constant(random_tensor({2, 2}, rng, -1.0, 1.0));
    Var x = tape.parameter(w);
    Var y = tape.matmul(x, frozen);
    Var loss = tape.sum(tape.square(y));
    tape.backward(loss);
    // gradient flowed through the constant into w
    double norm = 0.0;
    for (int i = 0; i < w.grad.size(); ++i) norm += std::abs(w.grad[i]);
    CHECK(norm > 0.0);
    // the constant itself reports a zero gradient
    const Tensor& gc = tape.grad(frozen);
    for (int i = 0; i < gc.size(); ++i) CHECK(gc[i] == 0.0);
}

TEST_CASE("adam: zero gradient leaves parameters and moments untouched") {
    Parameter p(Tensor::vector({1.0, -2.0}));
    std::vector<Parameter*> params{&p};
    ad::adam_update(params, {});
    CHECK(p.value.values() == std::vector<double>{1.0, -2.0});
    CHECK(p.moment1.values() == std::vector<double>{0.0, 0.0});
    CHECK(p.moment2.values() == std::vector<double>{0.0, 0.0});
    CHECK(p.step == 1);
}

TEST_CASE("adam: first step from zero moments moves by about -lr") {
    Parameter p(Tensor::vector({0.5}));
    p.grad[0] = 1.0;
    std::vector<Parameter*> params{&p};
    ad::AdamConfig cfg;  // lr = 1e-3
    ad::adam_update(params, cfg);
    CHECK(p.value[0] == doctest::Approx(0.5 - 1e-3).epsilon(1e-7));
}

TEST_CASE("adam: constant gradient walks opposite its sign") {
    Parameter p(Tensor::vector({0.0}));
    std::vector<Parameter*> params{&p};
    for (int i = 0; i < 100; ++i) {
        p.grad[0] = 2.5;
        ad::adam_update(params, {});
    }
    CHECK(p.value[0] < -0.05);

    Parameter q(Tensor::vector({0.0}));
    std::vector<Parameter*> qparams{&q};
    for (int i = 0; i < 100; ++i) {
        q.grad[0] = -2.5;
        ad::adam_update(qparams, {});
    }
    CHECK(q.value[0] > 0.05);
}

TEST_CASE("adam rejects non-finite gradients") {
    Parameter p(Tensor::vector({0.0}));
    p.grad[0] = std::numeric_limits<double>::quiet_NaN();
    std::vector<Parameter*> params{&p};
    CHECK_THROWS_AS(ad::adam_update(params, {}), std::runtime_error);
}

TEST_CASE("seeded_init: determinism and range") {
    const Tensor a = ad::seeded_init({100}, 25, 7);
    const Tensor b = ad::seeded_init({100}, 25, 7);
    const Tensor c = ad::seeded_init({100}, 25, 8);
    CHECK(a.values() == b.values());
    CHECK(a.values() != c.values());
    const double bound = std::sqrt(6.0 / 25);
    for (int i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i]) <= bound);
    }
    CHECK_THROWS_AS(ad::seeded_init({4}, 0, 1), std::invalid_argument);
}

TEST_CASE("seeded_init: empirical mean is centered") {
    const int n = 100000;
    const Tensor t = ad::seeded_init({n}, 10, 3);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += t[i];
    mean /= n;
    const double range = 2.0 * std::sqrt(6.0 / 10);
    CHECK(std::abs(mean) < 0.01 * range);
}

TEST_CASE("finite_difference_check: quadratic form is near exact") {
    Rng rng(21);
    Parameter p(random_tensor({6}, rng, -1.0, 1.0));
    Tensor coef = random_tensor({6}, rng, 0.5, 2.0);
    std::vector<Parameter*> params{&p};
    auto eval = [&](bool with_grad) {
        Tape tape;
        Var v = tape.parameter(p);
        Var loss = tape.sum(tape.mul(tape.square(v), tape.constant(coef)));
        const double value = tape.value(loss).item();
        if (with_grad) tape.backward(loss);
        return value;
    };
    CHECK(ad::finite_difference_check(eval, params) < 1e-8);
}
