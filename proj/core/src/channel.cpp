// SPDX-License-Identifier: Apache-2.0
#include "tscc/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tscc/rng.hpp"

namespace tscc {

namespace {
// Noise and fading of one transmission use disjoint substreams.
constexpr uint64_t kNoiseSubstream = 0;
constexpr uint64_t kFadingSubstream = 1;
} // namespace

NoiseDraw draw_noise(int length, double variance, uint64_t seed, uint64_t stream) {
    if (length < 0) throw std::invalid_argument("draw_noise: negative length");
    if (variance < 0.0) throw std::invalid_argument("draw_noise: negative variance");
    NoiseDraw draw;
    draw.seed = seed;
    draw.variance = variance;
    draw.n.resize(length);
    if (variance == 0.0) return draw;
    Rng rng(seed, stream, kNoiseSubstream);
    const double component_std = std::sqrt(variance / 2.0);
    for (auto& v : draw.n) {
        const double re = component_std * rng.next_gaussian();
        const double im = component_std * rng.next_gaussian();
        v = {re, im};
    }
    return draw;
}

FadingDraw draw_fading(int length, uint64_t seed, uint64_t stream) {
    if (length < 0) throw std::invalid_argument("draw_fading: negative length");
    FadingDraw draw;
    draw.seed = seed;
    draw.h.resize(length);
    Rng rng(seed, stream, kFadingSubstream);
    const double component_std = std::sqrt(0.5);  // E|h|^2 = 1
    for (auto& v : draw.h) {
        const double re = component_std * rng.next_gaussian();
        const double im = component_std * rng.next_gaussian();
        v = {re, im};
    }
    return draw;
}

SymbolFrame transmit_awgn(const SymbolFrame& frame, const ChannelConfig& config,
                          uint64_t stream) {
    if (config.kind != ChannelKind::Awgn) {
        throw std::invalid_argument("transmit_awgn: config kind is not AWGN");
    }
    const double variance = config.noise_variance();
    NoiseDraw noise = draw_noise(frame.length(), variance, config.seed, stream);
    SymbolFrame out = frame;
    for (size_t i = 0; i < out.symbols.size(); ++i) {
        out.symbols[i] += noise.n[i];
    }
    return out;
}

SymbolFrame transmit_rayleigh(const SymbolFrame& frame, const ChannelConfig& config,
                              bool equalize, uint64_t stream) {
    if (config.kind != ChannelKind::Rayleigh) {
        throw std::invalid_argument("transmit_rayleigh: config kind is not Rayleigh");
    }
    const double variance = config.noise_variance();
    NoiseDraw noise = draw_noise(frame.length(), variance, config.seed, stream);
    FadingDraw fading = draw_fading(frame.length(), config.seed, stream);
    SymbolFrame out = frame;
    for (size_t i = 0; i < out.symbols.size(); ++i) {
        out.symbols[i] = fading.h[i] * frame.symbols[i] + noise.n[i];
        if (equalize) {
            if (std::abs(fading.h[i]) < 1e-12) {
                throw std::runtime_error("transmit_rayleigh: deep fade under equalization");
            }
            out.symbols[i] /= fading.h[i];
        }
    }
    return out;
}

double measure_empirical_snr(const std::vector<SymbolFrame>& sent,
                             const std::vector<SymbolFrame>& received) {
    if (sent.size() != received.size()) {
        throw std::invalid_argument("measure_empirical_snr: frame count mismatch");
    }
    size_t symbols = 0;
    double signal_energy = 0.0;
    double noise_energy = 0.0;
    for (size_t f = 0; f < sent.size(); ++f) {
        if (sent[f].symbols.size() != received[f].symbols.size()) {
            throw std::invalid_argument("measure_empirical_snr: frame length mismatch");
        }
        for (size_t i = 0; i < sent[f].symbols.size(); ++i) {
            signal_energy += std::norm(sent[f].symbols[i]);
            noise_energy += std::norm(received[f].symbols[i] - sent[f].symbols[i]);
            ++symbols;
        }
    }
    if (symbols < 10000) {
        throw std::invalid_argument("measure_empirical_snr: need at least 10^4 symbols");
    }
    if (noise_energy == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(signal_energy / noise_energy);
}

} // namespace tscc
