// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "tscc/harness/dataset.hpp"
#include "tscc/types.hpp"

namespace tscc::harness {

/// Declarative experiment description, parsed from an INI-style text file
/// ("[section]" headers, "key = value" lines, "#" comments). Unknown keys
/// are rejected. Every run writes its resolved copy next to the outputs.
struct ExperimentConfig {
    // [dataset]
    std::string dataset_kind = "synthetic";  // synthetic | directory
    std::string dataset_dir;
    int train_count = 256;
    int eval_count = 64;
    SceneSpec scene;

    // [codec]
    CodecConfig codec;

    // [agent]
    std::string agent_kind = "mlp";  // mlp | structured
    std::vector<int> agent_hidden = {256, 64};
    uint64_t agent_seed = 11;

    // [channel]
    ChannelKind channel_kind = ChannelKind::Awgn;
    std::vector<double> snr_grid_db = {-10, -5, 0, 5, 10, 15, 20};
    double power = 1.0;

    // [methods]
    std::vector<std::string> methods = {"tscc", "jscc-rec", "digital"};
    std::string tscc_checkpoint = "tscc.ckpt";
    std::string jscc_rec_checkpoint = "jscc-rec.ckpt";

    // [digital]
    int ldpc_n = 1536;
    int ldpc_k = 512;
    int ldpc_column_weight = 3;
    int qam_order = 64;
    double quality_q = 1.0;
    uint64_t digital_seed = 3;
    // spans achieved ratios from > 1 down to the one-block padding floor
    // (ldpc_n / qam bits) / l at desk scale
    std::vector<double> quality_grid = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};

    // [sweep]
    std::vector<uint64_t> seeds = {1};
    double task_tolerance = 0.05;
    double ratio_snr_db = 10.0;  // the fixed SNR of the ratio sweep

    // [output]
    std::string output_dir = "out";

    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Resolved key-value rendering, parseable by parse_config_text.
std::string render_config(const ExperimentConfig& config);

} // namespace tscc::harness
