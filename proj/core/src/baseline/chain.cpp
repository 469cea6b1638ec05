// SPDX-License-Identifier: Apache-2.0
#include "tscc/baseline/chain.hpp"

#include <cmath>

#include "tscc/channel.hpp"
#include "tscc/rng.hpp"

namespace tscc::baseline {

namespace {

ImageTensor failure_image(const ImageTensor& like) {
    return ImageTensor(like.channels(), like.height(), like.width(),
                       std::vector<double>(like.size(), 0.5));
}

// seeded permutation shared by both ends of the link
std::vector<size_t> interleaver_permutation(size_t length, uint64_t seed) {
    std::vector<size_t> perm(length);
    for (size_t i = 0; i < length; ++i) perm[i] = i;
    Rng rng(seed, 0x1E17);
    for (size_t i = length; i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.next_double() * i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

} // namespace

DigitalChainResult run_digital_chain(const ImageTensor& image, const CodecQuality& quality,
                                     const LdpcCode& code,
                                     const QamConstellation& constellation,
                                     const ChannelConfig& channel, uint64_t stream,
                                     uint64_t interleaver_seed) {
    if (channel.kind != ChannelKind::Awgn) {
        // the soft demapper assumes a constant per-symbol noise variance
        throw std::invalid_argument("run_digital_chain: AWGN channels only");
    }
    DigitalChainResult result;

    // source coding
    DctEncodeResult encoded = dct_encode(image, quality);
    const size_t nbits = encoded.bits.bit_size();
    const size_t k_info = static_cast<size_t>(code.k_info());
    const size_t blocks = (nbits + k_info - 1) / k_info;
    const size_t padded = blocks * k_info;
    result.diagnostics.source_bits = nbits;
    result.diagnostics.ldpc_blocks = blocks;

    std::vector<uint8_t> payload(padded, 0);
    for (size_t i = 0; i < nbits; ++i) payload[i] = static_cast<uint8_t>(encoded.bits.bit_at(i));

    // interleave info bits before splitting into code blocks
    const std::vector<size_t> perm = interleaver_permutation(padded, interleaver_seed);
    std::vector<uint8_t> tx_bits(padded);
    for (size_t i = 0; i < padded; ++i) tx_bits[i] = payload[perm[i]];

    // channel coding
    Bitstream coded;
    for (size_t b = 0; b < blocks; ++b) {
        const auto cw = code.encode(
            std::span<const uint8_t>(tx_bits.data() + b * k_info, k_info));
        for (uint8_t bit : cw) coded.push_bit(bit);
    }

    // modulation, power scaling, channel
    QamModulation mod = qam_modulate(coded, constellation);
    result.diagnostics.qam_pad_bits = mod.pad_bits;
    result.channel_uses = mod.symbols.size();
    result.bandwidth_ratio = static_cast<double>(mod.symbols.size()) / image.size();

    const double amp = std::sqrt(channel.power_budget);
    SymbolFrame frame;
    frame.power_budget = channel.power_budget;
    frame.symbols.reserve(mod.symbols.size());
    for (const auto& s : mod.symbols) frame.symbols.push_back(amp * s);

    const SymbolFrame received = transmit_awgn(frame, channel, stream);

    // demap at unit scale: divide symbols by sqrt(P), variance by P;
    // the noiseless edge keeps a tiny floor so LLRs stay finite
    std::vector<std::complex<double>> unit(received.symbols.size());
    for (size_t i = 0; i < unit.size(); ++i) unit[i] = received.symbols[i] / amp;
    const double unit_variance =
        std::max(channel.noise_variance() / channel.power_budget, 1e-9);
    const std::vector<double> llrs =
        qam_demodulate_llr(unit, constellation, unit_variance);

    // belief propagation per block
    const size_t n = static_cast<size_t>(code.n());
    std::vector<uint8_t> rx_tx_bits(padded, 0);
    double iteration_sum = 0.0;
    for (size_t b = 0; b < blocks; ++b) {
        const auto res = code.decode_bp(
            std::span<const double>(llrs.data() + b * n, n));
        iteration_sum += res.iterations;
        if (!res.converged) result.diagnostics.failed_blocks += 1;
        std::copy(res.message.begin(), res.message.end(), rx_tx_bits.begin() + b * k_info);
    }
    result.diagnostics.mean_iterations = blocks > 0 ? iteration_sum / blocks : 0.0;

    if (result.diagnostics.failed_blocks > 0) {
        result.failed = true;
        result.image = failure_image(image);
        return result;
    }

    // de-interleave and parse
    std::vector<uint8_t> rx_payload(padded);
    for (size_t i = 0; i < padded; ++i) rx_payload[perm[i]] = rx_tx_bits[i];
    const Bitstream rx_stream = Bitstream::from_bits(rx_payload);

    std::optional<ImageTensor> decoded = dct_decode(rx_stream);
    if (!decoded || !decoded->same_dims(image)) {
        result.failed = true;
        result.image = failure_image(image);
        return result;
    }
    result.image = std::move(*decoded);
    return result;
}

} // namespace tscc::baseline
