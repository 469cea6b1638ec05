// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "tscc/baseline/bitstream.hpp"
#include "tscc/types.hpp"

namespace tscc::baseline {

/// Quality dial of the block codec: quantization step scale q. Larger q
/// means coarser quantization and fewer bits.
struct CodecQuality {
    double q = 1.0;
    static constexpr int kBlock = 8;
};

struct DctEncodeResult {
    Bitstream bits;
    /// Emitted bits over the 8-bit raw size (bits / (8 * C*H*W)).
    double ratio_vs_raw = 0.0;
};

/// Per 8x8 block and channel: 2-D DCT, uniform quantization by
/// q * weight table, zig-zag scan, run-length + Exp-Golomb entropy coding.
///
/// Container layout: magic "TDC1" (4 bytes as bits), u8 version, u8
/// channels, u16 height, u16 width, f64 q bits, then per channel per block
/// (row-major blocks): signed-Exp-Golomb DC delta, (run, level) pairs with
/// an end-of-block marker. Images whose sides are not multiples of 8 are
/// edge-padded.
DctEncodeResult dct_encode(const ImageTensor& image, const CodecQuality& quality);

/// Inverse of dct_encode up to quantization error, clamped to [0,1].
/// Malformed or truncated streams yield nullopt, never a crash.
std::optional<ImageTensor> dct_decode(const Bitstream& bits);

} // namespace tscc::baseline
