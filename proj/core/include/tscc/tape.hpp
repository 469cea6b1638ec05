// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>

#include "tscc/optim.hpp"
#include "tscc/tensor.hpp"

namespace tscc::ad {

/// Handle to a node on a Tape.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Reverse-mode tape over dense tensors.
///
/// A tape records one forward pass and supports exactly one backward pass.
/// Leaves come in three flavors: constants (no gradient), inputs (gradient
/// queryable via grad()), and parameters (gradient accumulated into the
/// bound Parameter). Adjoint computation is skipped along subgraphs that
/// cannot reach an input or parameter, so frozen weights recorded as
/// constants cost nothing on the way back.
class Tape {
public:
    Var constant(Tensor v);
    Var input(Tensor v);
    Var parameter(Parameter& p);

    // Elementwise binary; shapes must match.
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var div(Var a, Var b);  // rejects zero denominators

    // matmul(a, b):    a (m x p) * b (p x n) -> (m x n)
    // matmul_nt(a, b): a (m x p) * b^T with b (n x p) -> (m x n)
    Var matmul(Var a, Var b);
    Var matmul_nt(Var a, Var b);

    // Elementwise unary.
    Var relu(Var a);
    Var tanh(Var a);
    Var exp(Var a);
    Var log(Var a);   // rejects non-positive entries
    Var sqrt(Var a);  // rejects non-positive entries
    Var square(Var a);
    Var clamp(Var a, double lo, double hi);
    Var affine(Var a, double scale, double shift);  // scale * a + shift

    // Reductions.
    Var sum(Var a);      // -> scalar
    Var mean(Var a);     // -> scalar
    Var row_sum(Var a);  // (m x n) -> (m x 1)

    // Shape plumbing.
    Var broadcast_rows(Var v, int rows);   // (n) or (1 x n) -> (rows x n)
    Var broadcast_cols(Var c, int cols);   // (m) or (m x 1) -> (m x cols)
    Var slice(Var a, int offset, int len);          // 1-D range
    Var slice_cols(Var a, int col0, int ncols);     // (m x n) -> (m x ncols)
    Var concat(Var a, Var b);                       // 1-D
    Var concat_cols(Var a, Var b);                  // (m x n1), (m x n2) -> (m x (n1+n2))

    const Tensor& value(Var v) const;

    /// Backpropagate from a scalar output. Accumulates into bound
    /// Parameters; callable once per tape.
    void backward(Var scalar_output);

    /// Gradient of the last backward() w.r.t. any node that needs one.
    const Tensor& grad(Var v) const;

    size_t node_count() const { return nodes_.size(); }
    void clear();

private:
    struct Node {
        Tensor value;
        std::array<int, 2> in{-1, -1};
        Parameter* param = nullptr;
        bool needs_grad = false;
        std::function<void(Tape&, int self)> back;
    };

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    std::vector<bool> grad_set_;
    bool backward_done_ = false;

    Var push(Node node);
    const Tensor& val(int id) const { return nodes_[id].value; }
    bool wants(int id) const { return id >= 0 && nodes_[id].needs_grad; }
    Tensor& grad_buffer(int id);
    void accumulate(int id, const Tensor& g);
    void check_finite(const Tensor& t, const char* op) const;

    // Adjoint helpers need buffer access.
    friend struct TapeAccess;
};

} // namespace tscc::ad
