// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "tscc/jscc.hpp"

namespace tscc {

/// On-disk codec snapshot.
///
/// Layout (all integers little-endian):
///   bytes 0..7    magic "TSCCCKP1"
///   u32           format version (1)
///   u32 x 3       image channels, height, width
///   u32           latent dimension d
///   u64           training seed
///   f64           beta_c_rec
///   u32           encoder layer count, then per layer { u32 in, u32 out }
///   u32           decoder layer count, then per layer { u32 in, u32 out }
///   f64[]         parameters in declaration order: encoder layers
///                 (weights row-major out x in, then bias), then decoder
///   u64           FNV-1a over every preceding byte
struct CodecCheckpoint {
    JsccEncoder encoder;
    JsccDecoder decoder;
    double beta_c_rec = 0.0;
    uint64_t seed = 0;
};

void save_checkpoint(const JsccEncoder& encoder, const JsccDecoder& decoder,
                     double beta_c_rec, uint64_t seed, const std::string& path);

/// Rejects bad magic, version mismatch and checksum failure.
CodecCheckpoint load_checkpoint(const std::string& path);

/// FNV-1a of a whole file; the immutability probe used around evaluation.
uint64_t file_checksum(const std::string& path);

/// FNV-1a over a codec's parameter values.
uint64_t parameter_checksum(const JsccEncoder& encoder, const JsccDecoder& decoder);

} // namespace tscc
