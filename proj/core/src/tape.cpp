// SPDX-License-Identifier: Apache-2.0
#include "tscc/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace tscc::ad {

namespace {

// C (m x n) += A (m x p) * B (p x n)
void mm_nn(const double* a, int m, int p, const double* b, int n, double* c) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * p;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int t = 0; t < p; ++t) {
            const double av = arow[t];
            if (av == 0.0) continue;
            const double* brow = b + static_cast<size_t>(t) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C (m x n) += A (m x p) * B^T, B given as (n x p)
void mm_nt(const double* a, int m, int p, const double* b, int n, double* c) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * p;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* brow = b + static_cast<size_t>(j) * p;
            double acc = 0.0;
            for (int t = 0; t < p; ++t) acc += arow[t] * brow[t];
            crow[j] += acc;
        }
    }
}

// C (p x n) += A^T * B, with A (m x p), B (m x n)
void mm_tn(const double* a, int m, int p, const double* b, int n, double* c) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * p;
        const double* brow = b + static_cast<size_t>(i) * n;
        for (int t = 0; t < p; ++t) {
            const double av = arow[t];
            if (av == 0.0) continue;
            double* crow = c + static_cast<size_t>(t) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

Var Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant(Tensor v) {
    check_finite(v, "constant");
    Node n;
    n.value = std::move(v);
    n.needs_grad = false;
    return push(std::move(n));
}

Var Tape::input(Tensor v) {
    check_finite(v, "input");
    Node n;
    n.value = std::move(v);
    n.needs_grad = true;
    return push(std::move(n));
}

Var Tape::parameter(Parameter& p) {
    check_finite(p.value, "parameter");
    Node n;
    n.value = p.value;
    n.param = &p;
    n.needs_grad = true;
    return push(std::move(n));
}

const Tensor& Tape::value(Var v) const {
    require(v.valid() && v.id < static_cast<int>(nodes_.size()), "Tape: bad Var");
    return nodes_[v.id].value;
}

Tensor& Tape::grad_buffer(int id) {
    if (!grad_set_[id]) {
        grads_[id] = Tensor::zeros_like(nodes_[id].value);
        grad_set_[id] = true;
    }
    return grads_[id];
}

void Tape::accumulate(int id, const Tensor& g) {
    Tensor& buf = grad_buffer(id);
    double* dst = buf.data();
    const double* src = g.data();
    for (int i = 0; i < buf.size(); ++i) dst[i] += src[i];
}

void Tape::check_finite(const Tensor& t, const char* op) const {
    if (!t.all_finite()) {
        throw std::runtime_error(std::string("Tape: non-finite output of ") + op);
    }
}

// ---------------------------------------------------------------------------
// binary elementwise

Var Tape::add(Var a, Var b) {
    require(value(a).same_shape(value(b)), "add: shape mismatch");
    Tensor out = value(a);
    const Tensor& bv = value(b);
    for (int i = 0; i < out.size(); ++i) out[i] += bv[i];
    check_finite(out, "add");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            if (t.wants(node.in[0])) t.accumulate(node.in[0], g);
            if (t.wants(node.in[1])) t.accumulate(node.in[1], g);
        };
    }
    return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
    require(value(a).same_shape(value(b)), "sub: shape mismatch");
    Tensor out = value(a);
    const Tensor& bv = value(b);
    for (int i = 0; i < out.size(); ++i) out[i] -= bv[i];
    check_finite(out, "sub");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            if (t.wants(node.in[0])) t.accumulate(node.in[0], g);
            if (t.wants(node.in[1])) {
                Tensor& buf = t.grad_buffer(node.in[1]);
                for (int i = 0; i < buf.size(); ++i) buf[i] -= g[i];
            }
        };
    }
    return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
    require(value(a).same_shape(value(b)), "mul: shape mismatch");
    Tensor out = value(a);
    const Tensor& bv = value(b);
    for (int i = 0; i < out.size(); ++i) out[i] *= bv[i];
    check_finite(out, "mul");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& av = t.val(node.in[0]);
            const Tensor& bv2 = t.val(node.in[1]);
            if (t.wants(node.in[0])) {
                Tensor& buf = t.grad_buffer(node.in[0]);
                for (int i = 0; i < buf.size(); ++i) buf[i] += g[i] * bv2[i];
            }
            if (t.wants(node.in[1])) {
                Tensor& buf = t.grad_buffer(node.in[1]);
                for (int i = 0; i < buf.size(); ++i) buf[i] += g[i] * av[i];
            }
        };
    }
    return push(std::move(n));
}

Var Tape::div(Var a, Var b) {
    require(value(a).same_shape(value(b)), "div: shape mismatch");
    const Tensor& bv = value(b);
    for (int i = 0; i < bv.size(); ++i) require(bv[i] != 0.0, "div: zero denominator");
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] /= bv[i];
    check_finite(out, "div");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& outv = node.value;
            const Tensor& bv2 = t.val(node.in[1]);
            if (t.wants(node.in[0])) {
                Tensor& buf = t.grad_buffer(node.in[0]);
                for (int i = 0; i < buf.size(); ++i) buf[i] += g[i] / bv2[i];
            }
            if (t.wants(node.in[1])) {
                Tensor& buf = t.grad_buffer(node.in[1]);
                for (int i = 0; i < buf.size(); ++i) buf[i] -= g[i] * outv[i] / bv2[i];
            }
        };
    }
    return push(std::move(n));
}

// ---------------------------------------------------------------------------
// matmul

Var Tape::matmul(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require(av.is_matrix() && bv.is_matrix(), "matmul: operands must be matrices");
    require(av.cols() == bv.rows(), "matmul: inner dimensions differ");
    const int m = av.rows(), p = av.cols(), nn = bv.cols();
    Tensor out({m, nn});
    mm_nn(av.data(), m, p, bv.data(), nn, out.data());
    check_finite(out, "matmul");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        n.back = [m, p, nn](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            if (t.wants(node.in[0])) {
                // dA = g * B^T
                mm_nt(g.data(), m, nn, t.val(node.in[1]).data(), p,
                      t.grad_buffer(node.in[0]).data());
            }
            if (t.wants(node.in[1])) {
                // dB = A^T * g
                mm_tn(t.val(node.in[0]).data(), m, p, g.data(), nn,
                      t.grad_buffer(node.in[1]).data());
            }
        };
    }
    return push(std::move(n));
}

Var Tape::matmul_nt(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require(av.is_matrix() && bv.is_matrix(), "matmul_nt: operands must be matrices");
    require(av.cols() == bv.cols(), "matmul_nt: inner dimensions differ");
    const int m = av.rows(), p = av.cols(), nn = bv.rows();
    Tensor out({m, nn});
    mm_nt(av.data(), m, p, bv.data(), nn, out.data());
    check_finite(out, "matmul_nt");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        n.back = [m, p, nn](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            if (t.wants(node.in[0])) {
                // dA = g * B
                mm_nn(g.data(), m, nn, t.val(node.in[1]).data(), p,
                      t.grad_buffer(node.in[0]).data());
            }
            if (t.wants(node.in[1])) {
                // dB = g^T * A
                mm_tn(g.data(), m, nn, t.val(node.in[0]).data(), p,
                      t.grad_buffer(node.in[1]).data());
            }
        };
    }
    return push(std::move(n));
}

// ---------------------------------------------------------------------------
// unary elementwise

Var Tape::relu(Var a) {
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& av = t.val(node.in[0]);
            Tensor& buf = t.grad_buffer(node.in[0]);
            // subgradient 0 at exactly 0
            for (int i = 0; i < buf.size(); ++i) buf[i] += av[i] > 0.0 ? g[i] : 0.0;
        };
    }
    return push(std::move(n));
}

Var Tape::tanh(Var a) {
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& outv = node.value;
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += g[i] * (1.0 - outv[i] * outv[i]);
        };
    }
    return push(std::move(n));
}

Var Tape::exp(Var a) {
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
    check_finite(out, "exp");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& outv = node.value;
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += g[i] * outv[i];
        };
    }
    return push(std::move(n));
}

Var Tape::log(Var a) {
    const Tensor& av = value(a);
    for (int i = 0; i < av.size(); ++i) require(av[i] > 0.0, "log: non-positive input");
    Tensor out = av;
    for (int i = 0; i < out.size(); ++i) out[i] = std::log(out[i]);
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& av2 = t.val(node.in[0]);
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += g[i] / av2[i];
        };
    }
    return push(std::move(n));
}

Var Tape::sqrt(Var a) {
    const Tensor& av = value(a);
    for (int i = 0; i < av.size(); ++i) require(av[i] > 0.0, "sqrt: non-positive input");
    Tensor out = av;
    for (int i = 0; i < out.size(); ++i) out[i] = std::sqrt(out[i]);
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& outv = node.value;
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += g[i] * 0.5 / outv[i];
        };
    }
    return push(std::move(n));
}

Var Tape::square(Var a) {
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] *= out[i];
    check_finite(out, "square");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& av = t.val(node.in[0]);
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += 2.0 * g[i] * av[i];
        };
    }
    return push(std::move(n));
}

Var Tape::clamp(Var a, double lo, double hi) {
    require(lo < hi, "clamp: lo must be < hi");
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] = std::min(std::max(out[i], lo), hi);
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [lo, hi](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            const Tensor& av = t.val(node.in[0]);
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) {
                if (av[i] > lo && av[i] < hi) buf[i] += g[i];
            }
        };
    }
    return push(std::move(n));
}

Var Tape::affine(Var a, double scale, double shift) {
    Tensor out = value(a);
    for (int i = 0; i < out.size(); ++i) out[i] = scale * out[i] + shift;
    check_finite(out, "affine");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [scale](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += scale * g[i];
        };
    }
    return push(std::move(n));
}

// ---------------------------------------------------------------------------
// reductions

Var Tape::sum(Var a) {
    const Tensor& av = value(a);
    double acc = 0.0;
    for (int i = 0; i < av.size(); ++i) acc += av[i];
    Tensor out = Tensor::scalar(acc);
    check_finite(out, "sum");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const double g = t.grads_[self][0];
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += g;
        };
    }
    return push(std::move(n));
}

Var Tape::mean(Var a) {
    const Tensor& av = value(a);
    require(av.size() > 0, "mean: empty tensor");
    double acc = 0.0;
    for (int i = 0; i < av.size(); ++i) acc += av[i];
    const double inv = 1.0 / av.size();
    Tensor out = Tensor::scalar(acc * inv);
    check_finite(out, "mean");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [inv](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const double g = t.grads_[self][0] * inv;
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < buf.size(); ++i) buf[i] += g;
        };
    }
    return push(std::move(n));
}

Var Tape::row_sum(Var a) {
    const Tensor& av = value(a);
    require(av.is_matrix(), "row_sum: matrix required");
    const int m = av.rows(), c = av.cols();
    Tensor out({m, 1});
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* row = av.data() + static_cast<size_t>(i) * c;
        for (int j = 0; j < c; ++j) acc += row[j];
        out[i] = acc;
    }
    check_finite(out, "row_sum");
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [m, c](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < m; ++i) {
                double* row = buf.data() + static_cast<size_t>(i) * c;
                const double gi = g[i];
                for (int j = 0; j < c; ++j) row[j] += gi;
            }
        };
    }
    return push(std::move(n));
}

// ---------------------------------------------------------------------------
// shape plumbing

Var Tape::broadcast_rows(Var v, int rows) {
    const Tensor& vv = value(v);
    require(vv.is_vector() || (vv.is_matrix() && vv.rows() == 1),
            "broadcast_rows: need a vector or 1 x n matrix");
    require(rows >= 1, "broadcast_rows: rows must be >= 1");
    const int c = vv.cols();
    Tensor out({rows, c});
    for (int i = 0; i < rows; ++i) {
        std::copy(vv.data(), vv.data() + c, out.data() + static_cast<size_t>(i) * c);
    }
    Node n;
    n.value = std::move(out);
    n.in = {v.id, -1};
    n.needs_grad = wants(v.id);
    if (n.needs_grad) {
        n.back = [rows, c](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < rows; ++i) {
                const double* row = g.data() + static_cast<size_t>(i) * c;
                for (int j = 0; j < c; ++j) buf[j] += row[j];
            }
        };
    }
    return push(std::move(n));
}

Var Tape::broadcast_cols(Var cvar, int cols) {
    const Tensor& cv = value(cvar);
    require(cv.is_vector() || (cv.is_matrix() && cv.cols() == 1),
            "broadcast_cols: need a vector or m x 1 matrix");
    require(cols >= 1, "broadcast_cols: cols must be >= 1");
    const int m = cv.is_vector() ? cv.cols() : cv.rows();
    Tensor out({m, cols});
    for (int i = 0; i < m; ++i) {
        double* row = out.data() + static_cast<size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) row[j] = cv[i];
    }
    Node n;
    n.value = std::move(out);
    n.in = {cvar.id, -1};
    n.needs_grad = wants(cvar.id);
    if (n.needs_grad) {
        n.back = [m, cols](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < m; ++i) {
                const double* row = g.data() + static_cast<size_t>(i) * cols;
                double acc = 0.0;
                for (int j = 0; j < cols; ++j) acc += row[j];
                buf[i] += acc;
            }
        };
    }
    return push(std::move(n));
}

Var Tape::slice(Var a, int offset, int len) {
    const Tensor& av = value(a);
    require(av.is_vector(), "slice: vector required");
    require(offset >= 0 && len >= 1 && offset + len <= av.size(), "slice: out of range");
    Tensor out({len});
    std::copy(av.data() + offset, av.data() + offset + len, out.data());
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [offset, len](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < len; ++i) buf[offset + i] += g[i];
        };
    }
    return push(std::move(n));
}

Var Tape::slice_cols(Var a, int col0, int ncols) {
    const Tensor& av = value(a);
    require(av.is_matrix(), "slice_cols: matrix required");
    require(col0 >= 0 && ncols >= 1 && col0 + ncols <= av.cols(), "slice_cols: out of range");
    const int m = av.rows(), c = av.cols();
    Tensor out({m, ncols});
    for (int i = 0; i < m; ++i) {
        const double* src = av.data() + static_cast<size_t>(i) * c + col0;
        std::copy(src, src + ncols, out.data() + static_cast<size_t>(i) * ncols);
    }
    Node n;
    n.value = std::move(out);
    n.in = {a.id, -1};
    n.needs_grad = wants(a.id);
    if (n.needs_grad) {
        n.back = [m, c, col0, ncols](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            Tensor& buf = t.grad_buffer(node.in[0]);
            for (int i = 0; i < m; ++i) {
                double* dst = buf.data() + static_cast<size_t>(i) * c + col0;
                const double* src = g.data() + static_cast<size_t>(i) * ncols;
                for (int j = 0; j < ncols; ++j) dst[j] += src[j];
            }
        };
    }
    return push(std::move(n));
}

Var Tape::concat(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require(av.is_vector() && bv.is_vector(), "concat: vectors required");
    Tensor out({av.size() + bv.size()});
    std::copy(av.data(), av.data() + av.size(), out.data());
    std::copy(bv.data(), bv.data() + bv.size(), out.data() + av.size());
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        const int na = av.size(), nb = bv.size();
        n.back = [na, nb](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            if (t.wants(node.in[0])) {
                Tensor& buf = t.grad_buffer(node.in[0]);
                for (int i = 0; i < na; ++i) buf[i] += g[i];
            }
            if (t.wants(node.in[1])) {
                Tensor& buf = t.grad_buffer(node.in[1]);
                for (int i = 0; i < nb; ++i) buf[i] += g[na + i];
            }
        };
    }
    return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require(av.is_matrix() && bv.is_matrix(), "concat_cols: matrices required");
    require(av.rows() == bv.rows(), "concat_cols: row mismatch");
    const int m = av.rows(), ca = av.cols(), cb = bv.cols();
    Tensor out({m, ca + cb});
    for (int i = 0; i < m; ++i) {
        double* dst = out.data() + static_cast<size_t>(i) * (ca + cb);
        std::copy(av.data() + static_cast<size_t>(i) * ca,
                  av.data() + static_cast<size_t>(i) * ca + ca, dst);
        std::copy(bv.data() + static_cast<size_t>(i) * cb,
                  bv.data() + static_cast<size_t>(i) * cb + cb, dst + ca);
    }
    Node n;
    n.value = std::move(out);
    n.in = {a.id, b.id};
    n.needs_grad = wants(a.id) || wants(b.id);
    if (n.needs_grad) {
        n.back = [m, ca, cb](Tape& t, int self) {
            const auto& node = t.nodes_[self];
            const Tensor& g = t.grads_[self];
            if (t.wants(node.in[0])) {
                Tensor& buf = t.grad_buffer(node.in[0]);
                for (int i = 0; i < m; ++i) {
                    const double* src = g.data() + static_cast<size_t>(i) * (ca + cb);
                    double* dst = buf.data() + static_cast<size_t>(i) * ca;
                    for (int j = 0; j < ca; ++j) dst[j] += src[j];
                }
            }
            if (t.wants(node.in[1])) {
                Tensor& buf = t.grad_buffer(node.in[1]);
                for (int i = 0; i < m; ++i) {
                    const double* src = g.data() + static_cast<size_t>(i) * (ca + cb) + ca;
                    double* dst = buf.data() + static_cast<size_t>(i) * cb;
                    for (int j = 0; j < cb; ++j) dst[j] += src[j];
                }
            }
        };
    }
    return push(std::move(n));
}

// ---------------------------------------------------------------------------
// backward

void Tape::backward(Var scalar_output) {
    if (nodes_.empty()) throw std::logic_error("Tape::backward: empty tape");
    if (backward_done_) throw std::logic_error("Tape::backward: tape already consumed");
    require(scalar_output.valid() && scalar_output.id < static_cast<int>(nodes_.size()),
            "backward: bad Var");
    const Tensor& out = nodes_[scalar_output.id].value;
    require(out.size() == 1, "backward: output must be scalar");

    backward_done_ = true;
    grads_.assign(nodes_.size(), Tensor());
    grad_set_.assign(nodes_.size(), false);

    Tensor seed = Tensor::zeros_like(out);
    seed[0] = 1.0;
    grads_[scalar_output.id] = std::move(seed);
    grad_set_[scalar_output.id] = true;

    for (int i = scalar_output.id; i >= 0; --i) {
        if (!grad_set_[i] || !nodes_[i].back) continue;
        nodes_[i].back(*this, i);
    }
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].param != nullptr && grad_set_[i]) {
            Tensor& g = nodes_[i].param->grad;
            const Tensor& src = grads_[i];
            for (int j = 0; j < g.size(); ++j) g[j] += src[j];
        }
    }
}

const Tensor& Tape::grad(Var v) const {
    require(v.valid() && v.id < static_cast<int>(nodes_.size()), "grad: bad Var");
    if (!backward_done_) throw std::logic_error("Tape::grad: backward not run");
    auto* self = const_cast<Tape*>(this);
    if (!grad_set_[v.id]) {
        // untouched by the backward sweep: gradient is exactly zero
        self->grads_[v.id] = Tensor::zeros_like(nodes_[v.id].value);
        self->grad_set_[v.id] = true;
    }
    return grads_[v.id];
}

void Tape::clear() {
    nodes_.clear();
    grads_.clear();
    grad_set_.clear();
    backward_done_ = false;
}

} // namespace tscc::ad
