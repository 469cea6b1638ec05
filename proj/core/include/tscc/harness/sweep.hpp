// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tscc/agent.hpp"
#include "tscc/baseline/chain.hpp"
#include "tscc/checkpoint.hpp"
#include "tscc/harness/config.hpp"

namespace tscc::harness {

/// One row of an experiment: aggregates over the held-out set.
struct SweepRecord {
    std::string method;
    double snr_db = 0.0;
    double compression_ratio = 0.0;
    double task_score = 0.0;
    double action_mse = 0.0;
    double psnr = 0.0;
    double ms_ssim = 0.0;
    double failure_rate = 0.0;
    uint64_t seed = 0;
};

/// Header + one RFC-4180 line per record; column order is the field order
/// above; +inf serializes as "inf".
void emit_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::string render_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> parse_csv(const std::string& path);

struct NeuralCodecs {
    std::optional<CodecCheckpoint> tscc;
    std::optional<CodecCheckpoint> jscc_rec;
};

/// Seeded training/evaluation splits from the config (synthetic scenes or
/// an image directory; directory images get seeded synthetic states).
std::vector<Sample> build_train_set(const ExperimentConfig& config);
std::vector<Sample> build_eval_set(const ExperimentConfig& config);
std::unique_ptr<TaskAgent> build_agent(const ExperimentConfig& config);

/// Evaluates every (method, snr, seed) grid point on the held-out set.
/// Jobs run on a worker pool; each owns RNG streams keyed by its own
/// coordinates, so records never depend on scheduling. Missing checkpoints
/// for a listed neural method abort with the method named.
std::vector<SweepRecord> run_snr_sweep(const ExperimentConfig& config,
                                       const NeuralCodecs& codecs, int threads = 1);

struct RatioSweepResult {
    std::vector<SweepRecord> records;  // digital rows over the quality grid + neural rows
    double tscc_ratio = 0.0;
    double tscc_score = 0.0;
    /// 1 - ratio_tscc / ratio_digital at the cheapest digital point whose
    /// task score reaches the codec's; negative infinity when none does.
    double bandwidth_saving = 0.0;
    bool saving_valid = false;
};

/// Fixed-SNR sweep of the digital chain over its quality grid, with the
/// learned codec evaluated at its fixed k/l ratio.
RatioSweepResult run_ratio_sweep(const ExperimentConfig& config, const NeuralCodecs& codecs,
                                 int threads = 1);

// ---------------------------------------------------------------------------
// coded BER measurement

enum class BerModulation {
    Bpsk,  // grid axis: Eb/N0 in dB
    Qam,   // grid axis: SNR per complex symbol in dB (unit signal power)
};

struct BerPoint {
    double grid_db = 0.0;
    double ber = 0.0;
    double bler = 0.0;
    double mean_iterations = 0.0;
    size_t info_bits = 0;
};

std::vector<BerPoint> run_ber_sweep(const baseline::LdpcCode& code, BerModulation modulation,
                                    const baseline::QamConstellation* constellation,
                                    const std::vector<double>& grid_db, size_t min_info_bits,
                                    uint64_t seed, int max_iterations = 50);

/// Highest grid point where BER crosses the target, log-interpolated;
/// nullopt when the curve never crosses.
std::optional<double> ber_threshold(const std::vector<BerPoint>& points, double target_ber);

} // namespace tscc::harness
