// SPDX-License-Identifier: Apache-2.0
#include "tscc/snr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tscc {

double snr_to_noise_variance(double snr_db, double power_budget) {
    if (!(power_budget > 0.0)) {
        throw std::invalid_argument("snr_to_noise_variance: power budget must be positive");
    }
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("snr_to_noise_variance: bad SNR");
    }
    // +inf dB is the noiseless edge: variance 0
    return power_budget * std::pow(10.0, -snr_db / 10.0);
}

double noise_variance_to_snr(double variance, double power_budget) {
    if (!(variance > 0.0) || !(power_budget > 0.0)) {
        throw std::invalid_argument("noise_variance_to_snr: inputs must be positive");
    }
    return 10.0 * std::log10(power_budget / variance);
}

double compression_ratio(long long channel_bandwidth, long long source_bandwidth) {
    if (channel_bandwidth < 1) {
        throw std::invalid_argument("compression_ratio: channel bandwidth must be >= 1");
    }
    if (source_bandwidth < 1) {
        throw std::invalid_argument("compression_ratio: source bandwidth must be >= 1");
    }
    return static_cast<double>(channel_bandwidth) / static_cast<double>(source_bandwidth);
}

} // namespace tscc
