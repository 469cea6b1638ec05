// SPDX-License-Identifier: Apache-2.0
#include "tscc/baseline/bitstream.hpp"

#include <stdexcept>

namespace tscc::baseline {

void Bitstream::push_bit(int bit) {
    const size_t byte = bit_size_ >> 3;
    if (byte >= bytes_.size()) bytes_.push_back(0);
    if (bit) bytes_[byte] |= static_cast<uint8_t>(1u << (7 - (bit_size_ & 7)));
    ++bit_size_;
}

void Bitstream::push_bits(uint64_t value, int count) {
    if (count < 0 || count > 64) throw std::invalid_argument("push_bits: bad count");
    for (int i = count - 1; i >= 0; --i) {
        push_bit(static_cast<int>((value >> i) & 1));
    }
}

void Bitstream::append(const Bitstream& other) {
    for (size_t i = 0; i < other.bit_size_; ++i) push_bit(other.bit_at(i));
}

Bitstream Bitstream::from_bits(std::span<const uint8_t> bits) {
    Bitstream s;
    for (uint8_t b : bits) s.push_bit(b & 1);
    return s;
}

Bitstream Bitstream::from_bytes(std::vector<uint8_t> bytes, size_t bit_size) {
    if (bit_size > bytes.size() * 8) {
        throw std::invalid_argument("from_bytes: bit_size exceeds data");
    }
    Bitstream s;
    s.bytes_ = std::move(bytes);
    s.bit_size_ = bit_size;
    return s;
}

int BitReader::read_bit() {
    if (pos_ >= stream_->bit_size()) {
        ok_ = false;
        return 0;
    }
    return stream_->bit_at(pos_++);
}

uint64_t BitReader::read_bits(int count) {
    uint64_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<uint64_t>(read_bit());
    return v;
}

uint64_t BitReader::read_ue() {
    int zeros = 0;
    while (ok_ && read_bit() == 0) {
        if (++zeros > 63) {
            ok_ = false;
            return 0;
        }
    }
    if (!ok_) return 0;
    const uint64_t suffix = read_bits(zeros);
    return ((1ULL << zeros) - 1) + suffix;
}

int64_t BitReader::read_se() {
    const uint64_t u = read_ue();
    // zigzag: 0 -> 0, 1 -> 1, 2 -> -1, 3 -> 2, 4 -> -2, ...
    if (u == 0) return 0;
    const int64_t mag = static_cast<int64_t>((u + 1) / 2);
    return (u & 1) ? mag : -mag;
}

void write_ue(Bitstream& stream, uint64_t value) {
    const uint64_t v = value + 1;
    int bits = 0;
    while ((v >> bits) > 1) ++bits;
    for (int i = 0; i < bits; ++i) stream.push_bit(0);
    stream.push_bits(v, bits + 1);
}

void write_se(Bitstream& stream, int64_t value) {
    uint64_t u;
    if (value == 0) {
        u = 0;
    } else if (value > 0) {
        u = 2 * static_cast<uint64_t>(value) - 1;
    } else {
        u = 2 * static_cast<uint64_t>(-value);
    }
    write_ue(stream, u);
}

} // namespace tscc::baseline
