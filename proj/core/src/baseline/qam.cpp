// SPDX-License-Identifier: Apache-2.0
#include "tscc/baseline/qam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tscc::baseline {

namespace {

uint32_t binary_to_gray(uint32_t x) { return x ^ (x >> 1); }

} // namespace

QamConstellation QamConstellation::make(int order) {
    if (order != 4 && order != 16 && order != 64) {
        throw std::invalid_argument("QamConstellation: order must be 4, 16 or 64");
    }
    QamConstellation c;
    c.order_ = order;
    c.side_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    c.bps_ = 0;
    while ((1 << c.bps_) < order) ++c.bps_;

    // unnormalized mean power per axis: sum of odd squares / side
    double axis_power = 0.0;
    for (int i = 0; i < c.side_; ++i) {
        const double level = 2.0 * i - (c.side_ - 1);
        axis_power += level * level;
    }
    axis_power /= c.side_;
    c.scale_ = 1.0 / std::sqrt(2.0 * axis_power);

    c.levels_.resize(c.side_);
    c.axis_label_.resize(c.side_);
    c.axis_index_.assign(c.side_, 0);
    for (int i = 0; i < c.side_; ++i) {
        c.levels_[i] = (2.0 * i - (c.side_ - 1)) * c.scale_;
        c.axis_label_[i] = binary_to_gray(static_cast<uint32_t>(c.side_ - 1 - i));
        c.axis_index_[c.axis_label_[i]] = i;
    }

    const int half = c.bps_ / 2;
    c.points_.resize(order);
    for (uint32_t label = 0; label < static_cast<uint32_t>(order); ++label) {
        const uint32_t ilab = label >> half;
        const uint32_t qlab = label & ((1u << half) - 1);
        c.points_[label] = {c.levels_[c.axis_index_[ilab]],
                            c.levels_[c.axis_index_[qlab]]};
    }
    return c;
}

uint32_t QamConstellation::hard_label(std::complex<double> received) const {
    auto nearest = [this](double v) {
        // levels are uniform: snap by index
        const double step = 2.0 * scale_;
        int idx = static_cast<int>(std::lround((v - levels_[0]) / step));
        idx = std::clamp(idx, 0, side_ - 1);
        return axis_label_[idx];
    };
    const int half = bps_ / 2;
    return (nearest(received.real()) << half) | nearest(received.imag());
}

QamModulation qam_modulate(const Bitstream& bits, const QamConstellation& constellation) {
    const int bps = constellation.bits_per_symbol();
    QamModulation out;
    const size_t nbits = bits.bit_size();
    const size_t symbols = (nbits + bps - 1) / bps;
    out.pad_bits = static_cast<int>(symbols * bps - nbits);
    out.symbols.reserve(symbols);
    for (size_t s = 0; s < symbols; ++s) {
        uint32_t label = 0;
        for (int b = 0; b < bps; ++b) {
            const size_t idx = s * bps + b;
            const int bit = idx < nbits ? bits.bit_at(idx) : 0;
            label = (label << 1) | static_cast<uint32_t>(bit);
        }
        out.symbols.push_back(constellation.map_label(label));
    }
    return out;
}

std::vector<double> qam_demodulate_llr(std::span<const std::complex<double>> symbols,
                                       const QamConstellation& constellation,
                                       double noise_variance) {
    if (!(noise_variance > 0.0)) {
        throw std::invalid_argument("qam_demodulate_llr: noise variance must be positive");
    }
    const int bps = constellation.bits_per_symbol();
    const int half = bps / 2;
    const int side = static_cast<int>(constellation.axis_levels().size());
    const auto& levels = constellation.axis_levels();

    std::vector<double> llrs;
    llrs.reserve(symbols.size() * bps);

    // log-sum-exp per axis; the orthogonal axis factorizes out of the ratio
    std::vector<double> metric(side);
    auto axis_llrs = [&](double r, std::vector<double>& out_bits) {
        double best = -1e300;
        for (int i = 0; i < side; ++i) {
            const double d = r - levels[i];
            metric[i] = -d * d / noise_variance;
            best = std::max(best, metric[i]);
        }
        for (int b = 0; b < half; ++b) {
            const uint32_t mask = 1u << (half - 1 - b);
            double num = 0.0, den = 0.0;  // bit 0 / bit 1
            for (int i = 0; i < side; ++i) {
                const double e = std::exp(metric[i] - best);
                if (constellation.axis_label_of_index(i) & mask) {
                    den += e;
                } else {
                    num += e;
                }
            }
            // floor keeps fully-underflowed classes at a large finite LLR
            out_bits[b] = std::log(std::max(num, 1e-300)) - std::log(std::max(den, 1e-300));
        }
    };

    std::vector<double> ibits(half), qbits(half);
    for (const auto& r : symbols) {
        axis_llrs(r.real(), ibits);
        axis_llrs(r.imag(), qbits);
        for (double v : ibits) llrs.push_back(v);
        for (double v : qbits) llrs.push_back(v);
    }
    return llrs;
}

} // namespace tscc::baseline
