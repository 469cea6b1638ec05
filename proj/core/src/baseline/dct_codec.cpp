// SPDX-License-Identifier: Apache-2.0
#include "tscc/baseline/dct_codec.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace tscc::baseline {

namespace {

constexpr int kB = CodecQuality::kBlock;
constexpr uint32_t kMagic = 0x54444331;  // "TDC1"
constexpr uint8_t kVersion = 1;

// luminance-style base quantization weights, applied to every channel
constexpr int kQuantTable[kB * kB] = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

// AC symbols: ue(0) ends the block; ue(run + 1) precedes each level.
// EOB is by far the most frequent symbol, so it gets the 1-bit code.
constexpr uint64_t kEobSymbol = 0;

const std::array<int, kB * kB>& zigzag_order() {
    static const std::array<int, kB * kB> order = [] {
        std::array<int, kB * kB> o{};
        int idx = 0;
        for (int s = 0; s < 2 * kB - 1; ++s) {
            if (s % 2 == 0) {
                for (int y = std::min(s, kB - 1); y >= 0 && s - y < kB; --y) {
                    o[idx++] = y * kB + (s - y);
                }
            } else {
                for (int x = std::min(s, kB - 1); x >= 0 && s - x < kB; --x) {
                    o[idx++] = (s - x) * kB + x;
                }
            }
        }
        return o;
    }();
    return order;
}

struct CosTable {
    double c[kB][kB];  // c[u][x] = cu(u) * cos((2x+1) u pi / 16) / 2
    CosTable() {
        for (int u = 0; u < kB; ++u) {
            const double cu = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
            for (int x = 0; x < kB; ++x) {
                c[u][x] = 0.5 * cu * std::cos((2 * x + 1) * u * M_PI / (2.0 * kB));
            }
        }
    }
};

const CosTable& cos_table() {
    static const CosTable t;
    return t;
}

void dct2d(const double in[kB][kB], double out[kB][kB]) {
    const CosTable& t = cos_table();
    double tmp[kB][kB];
    for (int y = 0; y < kB; ++y) {
        for (int u = 0; u < kB; ++u) {
            double acc = 0.0;
            for (int x = 0; x < kB; ++x) acc += in[y][x] * t.c[u][x];
            tmp[y][u] = acc;
        }
    }
    for (int u = 0; u < kB; ++u) {
        for (int v = 0; v < kB; ++v) {
            double acc = 0.0;
            for (int y = 0; y < kB; ++y) acc += tmp[y][u] * t.c[v][y];
            out[v][u] = acc;
        }
    }
}

void idct2d(const double in[kB][kB], double out[kB][kB]) {
    const CosTable& t = cos_table();
    double tmp[kB][kB];
    for (int u = 0; u < kB; ++u) {
        for (int x = 0; x < kB; ++x) {
            double acc = 0.0;
            for (int v = 0; v < kB; ++v) acc += in[v][u] * t.c[v][x];
            tmp[x][u] = acc;
        }
    }
    for (int x = 0; x < kB; ++x) {
        for (int y = 0; y < kB; ++y) {
            double acc = 0.0;
            for (int u = 0; u < kB; ++u) acc += tmp[y][u] * t.c[u][x];
            out[y][x] = acc;
        }
    }
}

} // namespace

DctEncodeResult dct_encode(const ImageTensor& image, const CodecQuality& quality) {
    if (!(quality.q > 0.0)) throw std::invalid_argument("dct_encode: q must be positive");
    const int h = image.height(), w = image.width(), ch = image.channels();
    const int bh = (h + kB - 1) / kB;
    const int bw = (w + kB - 1) / kB;

    DctEncodeResult result;
    Bitstream& bits = result.bits;
    bits.push_bits(kMagic, 32);
    bits.push_bits(kVersion, 8);
    bits.push_bits(static_cast<uint64_t>(ch), 8);
    bits.push_bits(static_cast<uint64_t>(h), 16);
    bits.push_bits(static_cast<uint64_t>(w), 16);
    uint64_t qbits;
    std::memcpy(&qbits, &quality.q, 8);
    bits.push_bits(qbits, 64);

    const auto& zz = zigzag_order();
    for (int c = 0; c < ch; ++c) {
        int prev_dc = 0;
        for (int by = 0; by < bh; ++by) {
            for (int bx = 0; bx < bw; ++bx) {
                double block[kB][kB];
                for (int y = 0; y < kB; ++y) {
                    for (int x = 0; x < kB; ++x) {
                        // edge-replicated padding
                        const int sy = std::min(by * kB + y, h - 1);
                        const int sx = std::min(bx * kB + x, w - 1);
                        block[y][x] = image.at(c, sy, sx) * 255.0 - 128.0;
                    }
                }
                double coef[kB][kB];
                dct2d(block, coef);

                int levels[kB * kB];
                for (int i = 0; i < kB * kB; ++i) {
                    const int pos = zz[i];
                    const double step = quality.q * kQuantTable[pos];
                    levels[i] = static_cast<int>(std::lround(coef[pos / kB][pos % kB] / step));
                }

                write_se(bits, levels[0] - prev_dc);
                prev_dc = levels[0];

                int run = 0;
                for (int i = 1; i < kB * kB; ++i) {
                    if (levels[i] == 0) {
                        ++run;
                        continue;
                    }
                    write_ue(bits, static_cast<uint64_t>(run) + 1);
                    write_se(bits, levels[i]);
                    run = 0;
                }
                write_ue(bits, kEobSymbol);
            }
        }
    }

    result.ratio_vs_raw =
        static_cast<double>(bits.bit_size()) / (8.0 * image.size());
    return result;
}

std::optional<ImageTensor> dct_decode(const Bitstream& bits) {
    BitReader r(bits);
    if (r.read_bits(32) != kMagic) return std::nullopt;
    if (r.read_bits(8) != kVersion) return std::nullopt;
    const int ch = static_cast<int>(r.read_bits(8));
    const int h = static_cast<int>(r.read_bits(16));
    const int w = static_cast<int>(r.read_bits(16));
    uint64_t qbits = r.read_bits(64);
    double q;
    std::memcpy(&q, &qbits, 8);
    if (!r.ok() || ch <= 0 || ch > 4 || h <= 0 || w <= 0) return std::nullopt;
    if (!(q > 0.0) || !std::isfinite(q)) return std::nullopt;

    const int bh = (h + kB - 1) / kB;
    const int bw = (w + kB - 1) / kB;
    const auto& zz = zigzag_order();

    std::vector<double> out(static_cast<size_t>(ch) * h * w);
    for (int c = 0; c < ch; ++c) {
        int prev_dc = 0;
        for (int by = 0; by < bh; ++by) {
            for (int bx = 0; bx < bw; ++bx) {
                int levels[kB * kB] = {0};
                const int64_t dc_delta = r.read_se();
                if (!r.ok()) return std::nullopt;
                prev_dc += static_cast<int>(dc_delta);
                levels[0] = prev_dc;

                int pos = 1;
                while (true) {
                    const uint64_t symbol = r.read_ue();
                    if (!r.ok()) return std::nullopt;
                    if (symbol == kEobSymbol) break;
                    if (symbol > 63) return std::nullopt;
                    pos += static_cast<int>(symbol - 1);
                    if (pos >= kB * kB) return std::nullopt;
                    const int64_t level = r.read_se();
                    if (!r.ok() || level == 0) return std::nullopt;
                    if (level > (1 << 24) || level < -(1 << 24)) return std::nullopt;
                    levels[pos++] = static_cast<int>(level);
                    if (pos > kB * kB) return std::nullopt;
                }

                double coef[kB][kB];
                for (int i = 0; i < kB * kB; ++i) {
                    const int p = zz[i];
                    const double step = q * kQuantTable[p];
                    coef[p / kB][p % kB] = levels[i] * step;
                }
                double block[kB][kB];
                idct2d(coef, block);
                for (int y = 0; y < kB; ++y) {
                    const int sy = by * kB + y;
                    if (sy >= h) break;
                    for (int x = 0; x < kB; ++x) {
                        const int sx = bx * kB + x;
                        if (sx >= w) break;
                        const double v = (block[y][x] + 128.0) / 255.0;
                        out[(static_cast<size_t>(c) * h + sy) * w + sx] =
                            std::clamp(v, 0.0, 1.0);
                    }
                }
            }
        }
    }
    return ImageTensor(ch, h, w, std::move(out));
}

} // namespace tscc::baseline
