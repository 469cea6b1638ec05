// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "tscc/baseline/dct_codec.hpp"
#include "tscc/baseline/ldpc.hpp"
#include "tscc/baseline/qam.hpp"
#include "tscc/types.hpp"

namespace tscc::baseline {

struct StageDiagnostics {
    size_t source_bits = 0;     // entropy-coded payload
    size_t ldpc_blocks = 0;
    size_t failed_blocks = 0;   // non-converged decodes
    double mean_iterations = 0.0;
    int qam_pad_bits = 0;
};

struct DigitalChainResult {
    ImageTensor image;          // constant 0.5 gray on failure
    bool failed = false;
    size_t channel_uses = 0;    // emitted QAM symbols
    double bandwidth_ratio = 0.0;  // channel_uses / source bandwidth l
    StageDiagnostics diagnostics;
};

/// End-to-end classical chain: block codec -> seeded bit interleaver ->
/// systematic LDPC per k_info block -> Gray QAM -> sqrt(P) scaling -> AWGN
/// -> soft demapping -> belief propagation -> reassembly -> block decode.
/// Any non-converged block or unparsable stream yields the failure image
/// (total information loss) with the flag set; never a crash.
DigitalChainResult run_digital_chain(const ImageTensor& image, const CodecQuality& quality,
                                     const LdpcCode& code,
                                     const QamConstellation& constellation,
                                     const ChannelConfig& channel, uint64_t stream = 0,
                                     uint64_t interleaver_seed = 0x1EAF);

} // namespace tscc::baseline
