// SPDX-License-Identifier: Apache-2.0
#include "tscc/rng.hpp"

#include <cmath>

namespace tscc {

namespace {

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Stafford mix13).
inline uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

} // namespace

Rng::Rng(uint64_t seed, uint64_t stream, uint64_t substream) {
    uint64_t k = mix64(seed + kGamma);
    k = mix64(k ^ (stream + kGamma));
    k = mix64(k ^ (substream + kGamma));
    key_ = k;
}

uint64_t Rng::next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * kGamma);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_symmetric() {
    return 2.0 * next_double() - 1.0;
}

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = next_symmetric();
        v = next_symmetric();
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

uint64_t stream_key(std::initializer_list<uint64_t> parts) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (uint64_t p : parts) {
        for (int i = 0; i < 8; ++i) {
            h ^= (p >> (8 * i)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

} // namespace tscc
