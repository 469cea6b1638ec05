// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "tscc/baseline/bitstream.hpp"

namespace tscc::baseline {

/// Gray-coded square QAM with unit average energy.
///
/// A symbol label carries bits_per_symbol() bits: the high half selects the
/// in-phase level, the low half the quadrature level. Per axis, the label
/// of level index i (levels ascending) is gray(side - 1 - i), so the
/// all-zero label lands on the most positive corner; any two adjacent
/// levels differ in exactly one bit. 64-QAM uses levels {+-1,..,+-7}/sqrt(42).
class QamConstellation {
public:
    static QamConstellation make(int order);  // 4, 16 or 64

    int order() const { return order_; }
    int bits_per_symbol() const { return bps_; }
    double axis_scale() const { return scale_; }

    std::complex<double> map_label(uint32_t label) const { return points_[label]; }
    const std::vector<std::complex<double>>& points() const { return points_; }

    /// Nearest constellation point, by per-axis threshold.
    uint32_t hard_label(std::complex<double> received) const;

    const std::vector<double>& axis_levels() const { return levels_; }
    uint32_t axis_label_of_index(int index) const { return axis_label_[index]; }

private:
    int order_ = 0, bps_ = 0, side_ = 0;
    double scale_ = 1.0;
    std::vector<double> levels_;          // ascending, scaled
    std::vector<uint32_t> axis_label_;    // level index -> Gray label
    std::vector<int> axis_index_;         // Gray label -> level index
    std::vector<std::complex<double>> points_;
};

struct QamModulation {
    std::vector<std::complex<double>> symbols;
    int pad_bits = 0;  // zero bits appended to fill the last symbol
};

/// Maps the stream onto symbols, zero-padding the tail.
QamModulation qam_modulate(const Bitstream& bits, const QamConstellation& constellation);

/// Exact per-bit log-likelihood ratios (full sum over the constellation,
/// computed per axis, which is algebraically identical for square QAM):
/// LLR_b = ln [ sum_{s: b=0} e^{-|r-s|^2 / sigma^2} /
///              sum_{s: b=1} e^{-|r-s|^2 / sigma^2} ].
/// Positive LLR means bit 0. Requires sigma^2 > 0.
std::vector<double> qam_demodulate_llr(std::span<const std::complex<double>> symbols,
                                       const QamConstellation& constellation,
                                       double noise_variance);

} // namespace tscc::baseline
