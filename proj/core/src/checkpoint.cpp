// SPDX-License-Identifier: Apache-2.0
#include "tscc/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace tscc {

namespace {

constexpr char kMagic[8] = {'T', 'S', 'C', 'C', 'C', 'K', 'P', '1'};
constexpr uint32_t kVersion = 1;

class ByteWriter {
public:
    void raw(const void* p, size_t n) {
        const auto* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void u32(uint32_t v) {
        uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                        static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
        raw(b, 4);
    }
    void u64(uint64_t v) {
        u32(static_cast<uint32_t>(v));
        u32(static_cast<uint32_t>(v >> 32));
    }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    const std::vector<uint8_t>& bytes() const { return buf_; }

private:
    std::vector<uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::vector<uint8_t> data) : buf_(std::move(data)) {}
    void raw(void* p, size_t n) {
        if (pos_ + n > buf_.size()) throw std::runtime_error("checkpoint: truncated file");
        std::memcpy(p, buf_.data() + pos_, n);
        pos_ += n;
    }
    uint32_t u32() {
        uint8_t b[4];
        raw(b, 4);
        return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
               (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    }
    uint64_t u64() {
        const uint64_t lo = u32();
        const uint64_t hi = u32();
        return lo | (hi << 32);
    }
    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    size_t pos() const { return pos_; }
    const std::vector<uint8_t>& bytes() const { return buf_; }

private:
    std::vector<uint8_t> buf_;
    size_t pos_ = 0;
};

uint64_t fnv1a(const uint8_t* data, size_t n, uint64_t h = 0xCBF29CE484222325ULL) {
    for (size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

void write_params(ByteWriter& w, const std::vector<const ad::Parameter*>& params) {
    for (const ad::Parameter* p : params) {
        for (double v : p->value.values()) w.f64(v);
    }
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>());
}

} // namespace

class CheckpointIo {
public:
    static void fill_params(std::vector<ad::Parameter>& dst, ByteReader& r) {
        for (ad::Parameter& p : dst) {
            for (int i = 0; i < p.value.size(); ++i) p.value[i] = r.f64();
        }
    }
    static std::vector<ad::Parameter>& raw_params(JsccEncoder& e) { return e.params_; }
    static std::vector<ad::Parameter>& raw_params(JsccDecoder& d) { return d.params_; }
};

void save_checkpoint(const JsccEncoder& encoder, const JsccDecoder& decoder,
                     double beta_c_rec, uint64_t seed, const std::string& path) {
    ByteWriter w;
    w.raw(kMagic, 8);
    w.u32(kVersion);
    w.u32(static_cast<uint32_t>(decoder.channels()));
    w.u32(static_cast<uint32_t>(decoder.height()));
    w.u32(static_cast<uint32_t>(decoder.width()));
    w.u32(static_cast<uint32_t>(encoder.latent_dim()));
    w.u64(seed);
    w.f64(beta_c_rec);

    auto write_shapes = [&w](const std::vector<const ad::Parameter*>& params) {
        w.u32(static_cast<uint32_t>(params.size() / 2));
        for (size_t i = 0; i < params.size(); i += 2) {
            w.u32(static_cast<uint32_t>(params[i]->value.cols()));
            w.u32(static_cast<uint32_t>(params[i]->value.rows()));
        }
    };
    const auto enc_params = encoder.parameters();
    const auto dec_params = decoder.parameters();
    write_shapes(enc_params);
    write_shapes(dec_params);
    write_params(w, enc_params);
    write_params(w, dec_params);

    const uint64_t checksum = fnv1a(w.bytes().data(), w.bytes().size());
    w.u64(checksum);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

CodecCheckpoint load_checkpoint(const std::string& path) {
    std::vector<uint8_t> data = read_file(path);
    if (data.size() < 8 + 4 + 8) throw std::runtime_error("checkpoint: truncated file");

    uint64_t stored_checksum = 0;
    for (int i = 7; i >= 0; --i) {
        stored_checksum = (stored_checksum << 8) | data[data.size() - 8 + i];
    }
    const uint64_t actual = fnv1a(data.data(), data.size() - 8);
    if (actual != stored_checksum) {
        throw std::runtime_error("checkpoint: checksum failure");
    }

    ByteReader r(std::move(data));
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) {
        throw std::runtime_error("checkpoint: bad magic");
    }
    const uint32_t version = r.u32();
    if (version != kVersion) {
        throw std::runtime_error("checkpoint: unsupported version " +
                                 std::to_string(version));
    }
    const int channels = static_cast<int>(r.u32());
    const int height = static_cast<int>(r.u32());
    const int width = static_cast<int>(r.u32());
    const int d = static_cast<int>(r.u32());
    const uint64_t seed = r.u64();
    const double beta = r.f64();

    auto read_shapes = [&r]() {
        std::vector<std::pair<int, int>> shapes;  // (in, out)
        const uint32_t count = r.u32();
        for (uint32_t i = 0; i < count; ++i) {
            const int in = static_cast<int>(r.u32());
            const int out = static_cast<int>(r.u32());
            shapes.emplace_back(in, out);
        }
        return shapes;
    };
    const auto enc_shapes = read_shapes();
    const auto dec_shapes = read_shapes();
    if (enc_shapes.empty() || dec_shapes.empty()) {
        throw std::runtime_error("checkpoint: missing layers");
    }

    auto hidden_of = [](const std::vector<std::pair<int, int>>& shapes) {
        std::vector<int> hidden;
        for (size_t i = 0; i + 1 < shapes.size(); ++i) hidden.push_back(shapes[i].second);
        return hidden;
    };

    CodecCheckpoint ckpt;
    ckpt.encoder = JsccEncoder(enc_shapes.front().first, hidden_of(enc_shapes), d, seed);
    ckpt.decoder = JsccDecoder(channels, height, width, hidden_of(dec_shapes), d, seed);
    ckpt.beta_c_rec = beta;
    ckpt.seed = seed;

    CheckpointIo::fill_params(CheckpointIo::raw_params(ckpt.encoder), r);
    CheckpointIo::fill_params(CheckpointIo::raw_params(ckpt.decoder), r);
    if (r.pos() + 8 != r.bytes().size()) {
        throw std::runtime_error("checkpoint: trailing bytes");
    }
    return ckpt;
}

uint64_t file_checksum(const std::string& path) {
    const std::vector<uint8_t> data = read_file(path);
    return fnv1a(data.data(), data.size());
}

uint64_t parameter_checksum(const JsccEncoder& encoder, const JsccDecoder& decoder) {
    uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](const std::vector<const ad::Parameter*>& params) {
        for (const ad::Parameter* p : params) {
            for (double v : p->value.values()) {
                uint64_t bits;
                std::memcpy(&bits, &v, 8);
                uint8_t b[8];
                std::memcpy(b, &bits, 8);
                h = fnv1a(b, 8, h);
            }
        }
    };
    mix(encoder.parameters());
    mix(decoder.parameters());
    return h;
}

} // namespace tscc
