// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include "tscc/types.hpp"

namespace tscc {

/// One complex noise realization, n ~ CN(0, variance * I): real and
/// imaginary parts each carry variance/2.
struct NoiseDraw {
    std::vector<std::complex<double>> n;
    uint64_t seed = 0;
    double variance = 0.0;
};

/// One Rayleigh coefficient realization, h_j ~ CN(0, 1).
struct FadingDraw {
    std::vector<std::complex<double>> h;
    uint64_t seed = 0;
};

NoiseDraw draw_noise(int length, double variance, uint64_t seed, uint64_t stream);
FadingDraw draw_fading(int length, uint64_t seed, uint64_t stream);

/// z_hat = z_tilde + n over the AWGN channel. The noise stream is keyed by
/// (config.seed, stream) so sweeps are reproducible under any scheduling.
SymbolFrame transmit_awgn(const SymbolFrame& frame, const ChannelConfig& config,
                          uint64_t stream = 0);

/// z_hat = h .* z_tilde + n; with `equalize` the receiver divides by h
/// componentwise (perfect CSI, zero forcing). Rejects fades below 1e-12 in
/// magnitude when equalizing.
SymbolFrame transmit_rayleigh(const SymbolFrame& frame, const ChannelConfig& config,
                              bool equalize = true, uint64_t stream = 0);

/// 10*log10(mean |sent|^2 / mean |received - sent|^2) over all symbols.
/// Requires matched frame lists totalling at least 10^4 symbols; returns
/// +infinity when the noise energy is exactly zero.
double measure_empirical_snr(const std::vector<SymbolFrame>& sent,
                             const std::vector<SymbolFrame>& received);

} // namespace tscc
