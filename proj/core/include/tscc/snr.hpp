// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace tscc {

/// sigma^2 = P * 10^(-snr_db / 10). Rejects non-positive P.
double snr_to_noise_variance(double snr_db, double power_budget);

/// 10 * log10(P / sigma^2). Rejects non-positive inputs.
/// Round-trips with snr_to_noise_variance to within 1e-12 relative.
double noise_variance_to_snr(double variance, double power_budget);

/// k / l: complex channel uses per source dimension. Rejects k < 1 or l < 1.
double compression_ratio(long long channel_bandwidth, long long source_bandwidth);

} // namespace tscc
