// SPDX-License-Identifier: Apache-2.0
#include "tscc/baseline/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "tscc/rng.hpp"

namespace tscc::baseline {

namespace {

constexpr int kBuildRetries = 20;
constexpr double kLlrClamp = 30.0;
constexpr double kTanhClamp = 1.0 - 1e-15;

struct DenseGf2 {
    int rows = 0, cols = 0, words = 0;
    std::vector<uint64_t> data;

    DenseGf2(int r, int c) : rows(r), cols(c), words((c + 63) / 64), data(static_cast<size_t>(r) * words, 0) {}

    void set(int r, int c) { data[static_cast<size_t>(r) * words + (c >> 6)] ^= 1ULL << (c & 63); }
    bool get(int r, int c) const {
        return (data[static_cast<size_t>(r) * words + (c >> 6)] >> (c & 63)) & 1;
    }
    void xor_rows(int dst, int src) {
        uint64_t* d = data.data() + static_cast<size_t>(dst) * words;
        const uint64_t* s = data.data() + static_cast<size_t>(src) * words;
        for (int i = 0; i < words; ++i) d[i] ^= s[i];
    }
    void swap_rows(int a, int b) {
        if (a == b) return;
        uint64_t* pa = data.data() + static_cast<size_t>(a) * words;
        uint64_t* pb = data.data() + static_cast<size_t>(b) * words;
        for (int i = 0; i < words; ++i) std::swap(pa[i], pb[i]);
    }
};

// Random regular-column-weight placement with balanced check degrees and
// greedy avoidance of repeated row pairs (4-cycles).
std::vector<std::vector<int>> place_columns(int n, int m, int column_weight, Rng& rng,
                                            std::unordered_set<uint64_t>& used_pairs) {
    std::vector<std::vector<int>> columns(n);
    std::vector<int> degree(m, 0);
    used_pairs.clear();

    auto pair_key = [m](int a, int b) {
        if (a > b) std::swap(a, b);
        return static_cast<uint64_t>(a) * static_cast<uint64_t>(m) + b;
    };

    for (int col = 0; col < n; ++col) {
        std::vector<int> picked;
        int best_conflicts = column_weight * column_weight + 1;
        std::vector<int> best;
        for (int attempt = 0; attempt < 40; ++attempt) {
            picked.clear();
            while (static_cast<int>(picked.size()) < column_weight) {
                // tournament pick: least-loaded of a small random sample
                int cand = -1;
                for (int t = 0; t < 8; ++t) {
                    const int r = static_cast<int>(rng.next_double() * m);
                    if (std::find(picked.begin(), picked.end(), r) != picked.end()) continue;
                    if (cand < 0 || degree[r] < degree[cand]) cand = r;
                }
                if (cand < 0) continue;
                picked.push_back(cand);
            }
            int conflicts = 0;
            for (size_t i = 0; i < picked.size(); ++i) {
                for (size_t j = i + 1; j < picked.size(); ++j) {
                    if (used_pairs.count(pair_key(picked[i], picked[j]))) ++conflicts;
                }
            }
            if (conflicts < best_conflicts) {
                best_conflicts = conflicts;
                best = picked;
                if (conflicts == 0) break;
            }
        }
        std::sort(best.begin(), best.end());
        for (size_t i = 0; i < best.size(); ++i) {
            degree[best[i]] += 1;
            for (size_t j = i + 1; j < best.size(); ++j) {
                used_pairs.insert(pair_key(best[i], best[j]));
            }
        }
        columns[col] = std::move(best);
    }
    return columns;
}

} // namespace

LdpcCode LdpcCode::build(int n, int k_info, int column_weight, uint64_t seed) {
    if (n <= k_info || k_info <= 0) {
        throw std::invalid_argument("LdpcCode::build: need n > k_info > 0");
    }
    if (column_weight < 2 || column_weight >= n - k_info) {
        throw std::invalid_argument("LdpcCode::build: bad column weight");
    }
    const int m = n - k_info;

    for (int retry = 0; retry < kBuildRetries; ++retry) {
        Rng rng(seed, 0x1D9C, static_cast<uint64_t>(retry));
        std::unordered_set<uint64_t> pairs;
        auto columns = place_columns(n, m, column_weight, rng, pairs);

        DenseGf2 dense(m, n);
        for (int c = 0; c < n; ++c) {
            for (int r : columns[c]) dense.set(r, c);
        }

        // Gauss-Jordan; pivot columns become the parity positions.
        std::vector<int> pivot_col(m, -1);
        std::vector<char> is_pivot(n, 0);
        int rank = 0;
        for (int col = n - 1; col >= 0 && rank < m; --col) {
            int pivot = -1;
            for (int r = rank; r < m; ++r) {
                if (dense.get(r, col)) {
                    pivot = r;
                    break;
                }
            }
            if (pivot < 0) continue;
            dense.swap_rows(rank, pivot);
            for (int r = 0; r < m; ++r) {
                if (r != rank && dense.get(r, col)) dense.xor_rows(r, rank);
            }
            pivot_col[rank] = col;
            is_pivot[col] = 1;
            ++rank;
        }
        if (rank < m) continue;  // singular draw, re-seed

        // Variable relabeling: message positions first, then parity in
        // pivot-row order.
        std::vector<int> new_of_old(n, -1);
        int next = 0;
        for (int c = 0; c < n; ++c) {
            if (!is_pivot[c]) new_of_old[c] = next++;
        }
        for (int r = 0; r < m; ++r) new_of_old[pivot_col[r]] = k_info + r;

        LdpcCode code;
        code.n_ = n;
        code.k_ = k_info;
        code.seed_ = seed;
        code.rows_.assign(m, {});
        for (int c = 0; c < n; ++c) {
            for (int r : columns[c]) code.rows_[r].push_back(new_of_old[c]);
        }
        for (auto& row : code.rows_) std::sort(row.begin(), row.end());

        // Reduced row r: parity r = sum over message columns with a set bit.
        code.words_per_row_ = (k_info + 63) / 64;
        code.phi_.assign(static_cast<size_t>(m) * code.words_per_row_, 0);
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < n; ++c) {
                if (is_pivot[c] || !dense.get(r, c)) continue;
                const int msg = new_of_old[c];
                code.phi_[static_cast<size_t>(r) * code.words_per_row_ + (msg >> 6)] ^=
                    1ULL << (msg & 63);
            }
        }
        code.build_edges();
        return code;
    }
    throw std::runtime_error("LdpcCode::build: construction failed after retries");
}

std::vector<uint8_t> LdpcCode::encode(std::span<const uint8_t> message) const {
    if (static_cast<int>(message.size()) != k_) {
        throw std::invalid_argument("LdpcCode::encode: message length mismatch");
    }
    std::vector<uint64_t> packed(words_per_row_, 0);
    for (int i = 0; i < k_; ++i) {
        if (message[i] & 1) packed[i >> 6] |= 1ULL << (i & 63);
    }
    std::vector<uint8_t> codeword(n_, 0);
    std::copy(message.begin(), message.end(), codeword.begin());
    const int m = checks();
    for (int r = 0; r < m; ++r) {
        const uint64_t* row = phi_.data() + static_cast<size_t>(r) * words_per_row_;
        uint64_t acc = 0;
        for (int wdx = 0; wdx < words_per_row_; ++wdx) acc ^= row[wdx] & packed[wdx];
        codeword[k_ + r] = static_cast<uint8_t>(__builtin_popcountll(acc) & 1);
    }
    return codeword;
}

bool LdpcCode::syndrome_ok(std::span<const uint8_t> codeword) const {
    if (static_cast<int>(codeword.size()) != n_) {
        throw std::invalid_argument("LdpcCode::syndrome_ok: codeword length mismatch");
    }
    for (const auto& row : rows_) {
        int parity = 0;
        for (int v : row) parity ^= codeword[v] & 1;
        if (parity) return false;
    }
    return true;
}

void LdpcCode::build_edges() {
    const int m = checks();
    offsets_.assign(m + 1, 0);
    for (int r = 0; r < m; ++r) {
        offsets_[r + 1] = offsets_[r] + static_cast<int>(rows_[r].size());
    }
    edge_var_.resize(offsets_[m]);
    int e = 0;
    for (int r = 0; r < m; ++r) {
        for (int v : rows_[r]) edge_var_[e++] = v;
    }
    var_edges_.assign(n_, {});
    for (int i = 0; i < offsets_[m]; ++i) var_edges_[edge_var_[i]].push_back(i);
}

LdpcCode::DecodeResult LdpcCode::decode_bp(std::span<const double> llrs,
                                           int max_iterations) const {
    if (static_cast<int>(llrs.size()) != n_) {
        throw std::invalid_argument("LdpcCode::decode_bp: LLR length mismatch");
    }
    const int m = checks();
    const int edges = offsets_[m];

    std::vector<double> v2c(edges), c2v(edges, 0.0);
    for (int e = 0; e < edges; ++e) v2c[e] = llrs[edge_var_[e]];

    std::vector<uint8_t> hard(n_);
    std::vector<double> fwd, bwd;
    DecodeResult result;

    auto boxtanh = [](double l) {
        const double t = std::tanh(0.5 * std::clamp(l, -kLlrClamp, kLlrClamp));
        return std::clamp(t, -kTanhClamp, kTanhClamp);
    };

    int iter = 0;
    for (iter = 1; iter <= max_iterations; ++iter) {
        // check-node update via forward/backward partial products
        for (int r = 0; r < m; ++r) {
            const int begin = offsets_[r];
            const int deg = offsets_[r + 1] - begin;
            if (deg == 1) {
                c2v[begin] = 0.0;
                continue;
            }
            fwd.resize(deg);
            bwd.resize(deg);
            fwd[0] = boxtanh(v2c[begin]);
            for (int i = 1; i < deg; ++i) fwd[i] = fwd[i - 1] * boxtanh(v2c[begin + i]);
            bwd[deg - 1] = boxtanh(v2c[begin + deg - 1]);
            for (int i = deg - 2; i >= 0; --i) bwd[i] = bwd[i + 1] * boxtanh(v2c[begin + i]);
            for (int i = 0; i < deg; ++i) {
                double prod = 1.0;
                if (i > 0) prod *= fwd[i - 1];
                if (i + 1 < deg) prod *= bwd[i + 1];
                prod = std::clamp(prod, -kTanhClamp, kTanhClamp);
                c2v[begin + i] = 2.0 * std::atanh(prod);
            }
        }

        // variable-node update and hard decision
        for (int v = 0; v < n_; ++v) {
            double total = llrs[v];
            for (int e : var_edges_[v]) total += c2v[e];
            hard[v] = total < 0.0 ? 1 : 0;
            for (int e : var_edges_[v]) v2c[e] = total - c2v[e];
        }

        if (syndrome_ok(hard)) {
            result.converged = true;
            break;
        }
    }
    result.iterations = std::min(iter, max_iterations);
    result.message.assign(hard.begin(), hard.begin() + k_);
    return result;
}

} // namespace tscc::baseline
