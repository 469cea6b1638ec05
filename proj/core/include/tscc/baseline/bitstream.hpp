// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tscc::baseline {

/// Packed bit container, MSB-first within each byte.
class Bitstream {
public:
    Bitstream() = default;

    void push_bit(int bit);
    /// Appends `count` bits of `value`, most significant first (count <= 64).
    void push_bits(uint64_t value, int count);
    void append(const Bitstream& other);

    size_t bit_size() const { return bit_size_; }
    const std::vector<uint8_t>& bytes() const { return bytes_; }

    int bit_at(size_t index) const {
        return (bytes_[index >> 3] >> (7 - (index & 7))) & 1;
    }

    static Bitstream from_bits(std::span<const uint8_t> bits);
    static Bitstream from_bytes(std::vector<uint8_t> bytes, size_t bit_size);

private:
    std::vector<uint8_t> bytes_;
    size_t bit_size_ = 0;
};

/// Sequential reader; overruns latch a failure flag instead of throwing so
/// decoders can treat truncation as a decode failure.
class BitReader {
public:
    explicit BitReader(const Bitstream& stream) : stream_(&stream) {}

    int read_bit();
    uint64_t read_bits(int count);

    /// Exp-Golomb codes; used by the block codec's entropy layer.
    uint64_t read_ue();
    int64_t read_se();

    bool ok() const { return ok_; }
    size_t remaining() const { return stream_->bit_size() - pos_; }

private:
    const Bitstream* stream_;
    size_t pos_ = 0;
    bool ok_ = true;
};

/// Exp-Golomb writers (unsigned, and zigzag-signed).
void write_ue(Bitstream& stream, uint64_t value);
void write_se(Bitstream& stream, int64_t value);

} // namespace tscc::baseline
