// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tscc::baseline {

/// Sparse binary parity-check code with a systematic encoder.
///
/// Construction: seeded pseudorandom regular column-weight placement with
/// balanced check degrees and 4-cycle avoidance, then GF(2) Gauss-Jordan
/// elimination; variables are relabeled so codewords are [message | parity].
/// Rank-deficient draws re-seed up to a bounded retry count.
class LdpcCode {
public:
    static LdpcCode build(int n, int k_info, int column_weight = 3, uint64_t seed = 1);

    int n() const { return n_; }
    int k_info() const { return k_; }
    int checks() const { return n_ - k_; }
    double rate() const { return static_cast<double>(k_) / n_; }
    uint64_t seed() const { return seed_; }

    /// Systematic encoding; message bits appear verbatim in positions
    /// [0, k_info). Rejects wrong message length.
    std::vector<uint8_t> encode(std::span<const uint8_t> message) const;

    /// H * c^T == 0 over GF(2).
    bool syndrome_ok(std::span<const uint8_t> codeword) const;

    struct DecodeResult {
        std::vector<uint8_t> message;
        bool converged = false;
        int iterations = 0;
    };

    /// Sum-product belief propagation. LLR convention: positive means bit 0
    /// is more likely. Early-stops on a zero syndrome; non-convergence is
    /// reported through the flag, never an error.
    DecodeResult decode_bp(std::span<const double> llrs, int max_iterations = 50) const;

    const std::vector<std::vector<int>>& check_neighbors() const { return rows_; }

private:
    LdpcCode() = default;
    void build_edges();

    int n_ = 0, k_ = 0;
    uint64_t seed_ = 0;
    std::vector<std::vector<int>> rows_;  // per check: sorted variable indices

    // flat edge arrays, check-major; fixed at construction
    std::vector<int> offsets_;   // per check: first edge index
    std::vector<int> edge_var_;  // per edge: variable index
    std::vector<std::vector<int>> var_edges_;

    // parity generator, bit-packed: parity r = <phi row r, message>
    int words_per_row_ = 0;
    std::vector<uint64_t> phi_;
};

} // namespace tscc::baseline
