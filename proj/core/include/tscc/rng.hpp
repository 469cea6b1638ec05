// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>

namespace tscc {

/// Counter-based deterministic random stream.
///
/// Each draw is out = mix(key + i * gamma) where mix is the SplitMix64
/// finalizer, so a stream is fully determined by (seed, stream, substream)
/// and independent streams can be handed to parallel workers in any order.
/// Gaussian variates use the Marsaglia polar method with one cached spare;
/// the exact draw sequence is part of the fixture contract of this library.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0, uint64_t substream = 0);

    uint64_t next_u64();

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double();

    /// Uniform in (-1, 1), excluding exact zero only with probability ~2^-53.
    double next_symmetric();

    /// Standard normal via Marsaglia polar.
    double next_gaussian();

private:
    uint64_t key_;
    uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// FNV-1a over a list of 64-bit words; used to key per-job RNG streams
/// so results never depend on scheduling order.
uint64_t stream_key(std::initializer_list<uint64_t> parts);

} // namespace tscc
