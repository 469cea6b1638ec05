// SPDX-License-Identifier: Apache-2.0
#include "tscc/jscc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tscc/channel.hpp"
#include "tscc/rng.hpp"

namespace tscc {

namespace {

// shared dense-stack plumbing for encoder/decoder

std::vector<ad::Parameter> init_mlp(int input_dim, const std::vector<int>& hidden,
                                    int output_dim, uint64_t seed) {
    std::vector<ad::Parameter> params;
    int in = input_dim;
    std::vector<int> outs = hidden;
    outs.push_back(output_dim);
    for (size_t i = 0; i < outs.size(); ++i) {
        const int out = outs[i];
        if (out <= 0) throw std::invalid_argument("mlp: non-positive layer width");
        params.emplace_back(ad::seeded_init({out, in}, in, stream_key({seed, 2 * i})));
        params.emplace_back(ad::seeded_init({out}, in, stream_key({seed, 2 * i + 1})));
        in = out;
    }
    return params;
}

// relu hidden stack, linear final layer
std::vector<double> mlp_forward(const std::vector<ad::Parameter>& params,
                                std::vector<double> act) {
    const size_t layers = params.size() / 2;
    for (size_t li = 0; li < layers; ++li) {
        const ad::Tensor& w = params[2 * li].value;
        const ad::Tensor& b = params[2 * li + 1].value;
        const int out = w.rows(), in = w.cols();
        if (static_cast<int>(act.size()) != in) {
            throw std::invalid_argument("mlp_forward: dimension mismatch");
        }
        std::vector<double> next(out);
        for (int o = 0; o < out; ++o) {
            const double* wrow = w.data() + static_cast<size_t>(o) * in;
            double acc = b[o];
            for (int j = 0; j < in; ++j) acc += wrow[j] * act[j];
            next[o] = li + 1 < layers ? (acc > 0.0 ? acc : 0.0) : acc;
        }
        act = std::move(next);
    }
    return act;
}

ad::Var mlp_taped(ad::Tape& tape, std::vector<ad::Parameter>& params, ad::Var x) {
    const int batch = tape.value(x).rows();
    const size_t layers = params.size() / 2;
    ad::Var h = x;
    for (size_t li = 0; li < layers; ++li) {
        ad::Var w = tape.parameter(params[2 * li]);
        ad::Var b = tape.parameter(params[2 * li + 1]);
        h = tape.add(tape.matmul_nt(h, w), tape.broadcast_rows(b, batch));
        if (li + 1 < layers) h = tape.relu(h);
    }
    return h;
}

double squared_norm_diff(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

} // namespace

// ---------------------------------------------------------------------------
// JsccEncoder

JsccEncoder::JsccEncoder(int input_dim, std::vector<int> hidden_dims, int latent_dim,
                         uint64_t seed)
    : input_dim_(input_dim), latent_dim_(latent_dim), hidden_(std::move(hidden_dims)) {
    if (input_dim <= 0) throw std::invalid_argument("JsccEncoder: bad input_dim");
    if (latent_dim <= 0 || latent_dim % 2 != 0) {
        throw std::invalid_argument("JsccEncoder: latent_dim must be positive and even");
    }
    params_ = init_mlp(input_dim_, hidden_, 2 * latent_dim_, seed);
}

LatentGaussian JsccEncoder::encode(const ImageTensor& x) const {
    if (x.size() != input_dim_) {
        throw std::invalid_argument("JsccEncoder::encode: image size mismatch");
    }
    std::vector<double> raw = mlp_forward(params_, x.data());
    std::vector<double> mean(raw.begin(), raw.begin() + latent_dim_);
    std::vector<double> std_dev(latent_dim_);
    for (int i = 0; i < latent_dim_; ++i) {
        std_dev[i] = std::exp(0.5 * raw[latent_dim_ + i]);
    }
    return LatentGaussian(std::move(mean), std::move(std_dev));
}

std::pair<ad::Var, ad::Var> JsccEncoder::encode_taped(ad::Tape& tape, ad::Var images) {
    const ad::Tensor& img = tape.value(images);
    if (!img.is_matrix() || img.cols() != input_dim_) {
        throw std::invalid_argument("JsccEncoder::encode_taped: bad batch shape");
    }
    ad::Var raw = mlp_taped(tape, params_, images);
    ad::Var mu = tape.slice_cols(raw, 0, latent_dim_);
    ad::Var logvar = tape.slice_cols(raw, latent_dim_, latent_dim_);
    return {mu, logvar};
}

std::vector<ad::Parameter*> JsccEncoder::parameters() {
    std::vector<ad::Parameter*> out;
    for (auto& p : params_) out.push_back(&p);
    return out;
}

std::vector<const ad::Parameter*> JsccEncoder::parameters() const {
    std::vector<const ad::Parameter*> out;
    for (const auto& p : params_) out.push_back(&p);
    return out;
}

// ---------------------------------------------------------------------------
// JsccDecoder

JsccDecoder::JsccDecoder(int channels, int height, int width,
                         std::vector<int> hidden_dims, int latent_dim, uint64_t seed)
    : channels_(channels), height_(height), width_(width), latent_dim_(latent_dim),
      hidden_(std::move(hidden_dims)) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw std::invalid_argument("JsccDecoder: bad geometry");
    }
    if (latent_dim <= 0 || latent_dim % 2 != 0) {
        throw std::invalid_argument("JsccDecoder: latent_dim must be positive and even");
    }
    params_ = init_mlp(latent_dim_, hidden_, output_dim(), seed);
}

ImageTensor JsccDecoder::decode_latent(std::span<const double> latent) const {
    if (static_cast<int>(latent.size()) != latent_dim_) {
        throw std::invalid_argument("JsccDecoder::decode_latent: latent size mismatch");
    }
    std::vector<double> raw =
        mlp_forward(params_, std::vector<double>(latent.begin(), latent.end()));
    for (double& v : raw) v = 0.5 * std::tanh(0.5 * v) + 0.5;  // logistic squash
    return ImageTensor(channels_, height_, width_, std::move(raw));
}

ad::Var JsccDecoder::decode_taped(ad::Tape& tape, ad::Var latents) {
    const ad::Tensor& z = tape.value(latents);
    if (!z.is_matrix() || z.cols() != latent_dim_) {
        throw std::invalid_argument("JsccDecoder::decode_taped: bad batch shape");
    }
    ad::Var raw = mlp_taped(tape, params_, latents);
    return tape.affine(tape.tanh(tape.affine(raw, 0.5, 0.0)), 0.5, 0.5);
}

std::vector<ad::Parameter*> JsccDecoder::parameters() {
    std::vector<ad::Parameter*> out;
    for (auto& p : params_) out.push_back(&p);
    return out;
}

std::vector<const ad::Parameter*> JsccDecoder::parameters() const {
    std::vector<const ad::Parameter*> out;
    for (const auto& p : params_) out.push_back(&p);
    return out;
}

// ---------------------------------------------------------------------------
// pipeline pieces

LatentGaussian encode(const JsccEncoder& encoder, const ImageTensor& x) {
    return encoder.encode(x);
}

std::vector<double> reparameterize(const LatentGaussian& latent,
                                   std::span<const double> epsilon) {
    if (epsilon.size() != static_cast<size_t>(latent.dim())) {
        throw std::invalid_argument("reparameterize: epsilon dimension mismatch");
    }
    std::vector<double> z(latent.dim());
    for (int i = 0; i < latent.dim(); ++i) {
        z[i] = epsilon[i] * latent.std()[i] + latent.mean()[i];
    }
    return z;
}

std::vector<std::complex<double>> pack_complex(std::span<const double> z) {
    if (z.size() % 2 != 0) {
        throw std::invalid_argument("pack_complex: odd vector length");
    }
    std::vector<std::complex<double>> packed(z.size() / 2);
    for (size_t j = 0; j < packed.size(); ++j) {
        packed[j] = {z[2 * j], z[2 * j + 1]};
    }
    return packed;
}

std::vector<double> unpack_complex(std::span<const std::complex<double>> packed) {
    std::vector<double> z(2 * packed.size());
    for (size_t j = 0; j < packed.size(); ++j) {
        z[2 * j] = packed[j].real();
        z[2 * j + 1] = packed[j].imag();
    }
    return z;
}

SymbolFrame normalize_power(std::span<const std::complex<double>> symbols,
                            double power_budget) {
    if (!(power_budget > 0.0)) {
        throw std::invalid_argument("normalize_power: power budget must be positive");
    }
    if (symbols.empty()) {
        throw std::invalid_argument("normalize_power: empty frame");
    }
    double energy = 0.0;
    for (const auto& s : symbols) energy += std::norm(s);
    if (energy == 0.0) {
        throw std::domain_error("normalize_power: zero-norm frame (degenerate latent)");
    }
    const double k = static_cast<double>(symbols.size());
    const double scale = std::sqrt(k * power_budget) / std::sqrt(energy);
    SymbolFrame frame;
    frame.power_budget = power_budget;
    frame.symbols.reserve(symbols.size());
    for (const auto& s : symbols) frame.symbols.push_back(scale * s);
    return frame;
}

ImageTensor decode(const JsccDecoder& decoder, const SymbolFrame& frame) {
    if (frame.length() * 2 != decoder.latent_dim()) {
        throw std::invalid_argument("decode: frame length does not match d/2");
    }
    return decoder.decode_latent(unpack_complex(frame.symbols));
}

double compute_kl(const LatentGaussian& latent) {
    double acc = 0.0;
    for (int i = 0; i < latent.dim(); ++i) {
        const double mu = latent.mean()[i];
        const double var = latent.std()[i] * latent.std()[i];
        acc += mu * mu + var - std::log(var) - 1.0;
    }
    return std::max(0.0, 0.5 * acc);
}

LossBreakdown compute_vae_loss(const ImageTensor& x,
                               const std::vector<ImageTensor>& reconstructions,
                               const LatentGaussian& latent, double beta_rec) {
    if (reconstructions.empty()) {
        throw std::invalid_argument("compute_vae_loss: empty sample set");
    }
    double rec = 0.0;
    for (const ImageTensor& xhat : reconstructions) {
        if (!x.same_dims(xhat)) {
            throw std::invalid_argument("compute_vae_loss: dimension mismatch");
        }
        rec += squared_norm_diff(x.data(), xhat.data());
    }
    rec /= static_cast<double>(reconstructions.size());
    LossBreakdown out;
    out.reconstruction = rec;
    out.kl = compute_kl(latent);
    out.beta = beta_rec;
    out.total = beta_rec * rec + out.kl;
    return out;
}

LossBreakdown compute_tscc_loss(const ActionVector& coach_action,
                                const std::vector<ActionVector>& agent_actions,
                                const LatentGaussian& latent, double beta_c_rec) {
    if (agent_actions.empty()) {
        throw std::invalid_argument("compute_tscc_loss: empty sample set");
    }
    const auto a = coach_action.to_array();
    double rec = 0.0;
    for (const ActionVector& ahat : agent_actions) {
        rec += squared_norm_diff(a, ahat.to_array());
    }
    rec /= static_cast<double>(agent_actions.size());
    LossBreakdown out;
    out.reconstruction = rec;
    out.kl = compute_kl(latent);
    out.beta = beta_c_rec;
    out.total = beta_c_rec * rec + out.kl;
    return out;
}

PipelineResult forward_pipeline(const JsccEncoder& encoder, const JsccDecoder& decoder,
                                const ImageTensor& x,
                                const std::optional<ChannelConfig>& channel,
                                std::span<const double> epsilon, uint64_t stream) {
    if (encoder.latent_dim() != decoder.latent_dim()) {
        throw std::invalid_argument("forward_pipeline: encoder/decoder latent mismatch");
    }
    PipelineResult result;
    result.latent = encoder.encode(x);
    const std::vector<double> z = reparameterize(result.latent, epsilon);
    const auto packed = pack_complex(z);
    const double power = channel ? channel->power_budget : 1.0;
    result.sent = normalize_power(packed, power);
    SymbolFrame received = result.sent;
    if (channel) {
        received = channel->kind == ChannelKind::Awgn
                       ? transmit_awgn(result.sent, *channel, stream)
                       : transmit_rayleigh(result.sent, *channel, true, stream);
    }
    result.output = decode(decoder, received);
    return result;
}

// ---------------------------------------------------------------------------
// training

namespace {

TrainResult train_impl(JsccEncoder& encoder, JsccDecoder& decoder,
                       const CodecConfig& config, const std::vector<Sample>& dataset,
                       const TaskAgent* agent, const TaskAgent* coach,
                       TrainObjective objective) {
    config.validate();
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    const int l = encoder.input_dim();
    const int d = encoder.latent_dim();
    const int k = d / 2;
    if (decoder.output_dim() != l || decoder.latent_dim() != d) {
        throw std::invalid_argument("train: encoder/decoder geometry mismatch");
    }
    if (objective == TrainObjective::TaskOriented && agent->input_size() != l) {
        throw std::invalid_argument("train: agent input size mismatch");
    }
    for (const Sample& s : dataset) {
        if (s.image.size() != l) throw std::invalid_argument("train: image size mismatch");
    }

    std::vector<ad::Parameter*> params = encoder.parameters();
    for (ad::Parameter* p : decoder.parameters()) params.push_back(p);

    ad::AdamConfig adam;
    adam.lr = config.learning_rate;

    Rng shuffle_rng(config.seed, 0xB00C);
    Rng eps_rng(config.seed, 0xE125);

    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    const int batch_max = config.batch_size;
    TrainResult result;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates with the seeded stream
        for (size_t i = order.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(shuffle_rng.next_double() * i);
            std::swap(order[i - 1], order[j]);
        }
        for (size_t start = 0; start < order.size(); start += batch_max) {
            const int batch =
                static_cast<int>(std::min<size_t>(batch_max, order.size() - start));

            ad::Tensor x_batch({batch, l});
            ad::Tensor m_batch({batch, StateVector::kDim});
            ad::Tensor a_batch({batch, ActionVector::kDim});
            for (int b = 0; b < batch; ++b) {
                const Sample& s = dataset[order[start + b]];
                std::copy(s.image.data().begin(), s.image.data().end(),
                          x_batch.data() + static_cast<size_t>(b) * l);
                const auto st = s.state.to_array();
                std::copy(st.begin(), st.end(),
                          m_batch.data() + static_cast<size_t>(b) * StateVector::kDim);
                if (objective == TrainObjective::TaskOriented) {
                    // coach on the lossless image, off-tape by construction
                    const ActionVector a = coach_act(*coach, s.image, s.state);
                    const auto arr = a.to_array();
                    std::copy(arr.begin(), arr.end(),
                              a_batch.data() + static_cast<size_t>(b) * ActionVector::kDim);
                }
            }

            ad::Tape tape;
            ad::Var xv = tape.constant(x_batch);
            auto [mu, logvar] = encoder.encode_taped(tape, xv);

            // KL rows: 0.5 * sum(mu^2 + exp(logvar) - logvar - 1)
            ad::Var var = tape.exp(logvar);
            ad::Var kl_terms = tape.sub(tape.add(tape.square(mu), var), logvar);
            kl_terms = tape.affine(kl_terms, 1.0, -1.0);
            ad::Var kl_row = tape.affine(tape.row_sum(kl_terms), 0.5, 0.0);

            ad::Var sigma = tape.exp(tape.affine(logvar, 0.5, 0.0));

            ad::Var rec_acc{};
            for (int t = 0; t < config.latent_samples; ++t) {
                ad::Tensor eps({batch, d});
                for (int i = 0; i < eps.size(); ++i) eps[i] = eps_rng.next_gaussian();
                ad::Var z = tape.add(tape.mul(sigma, tape.constant(eps)), mu);

                // Power normalization in the real domain with P = 1; the
                // complex packing is a pure reshape and drops out of the
                // noiseless training path.
                ad::Var r2 = tape.row_sum(tape.square(z));
                ad::Var scale = tape.div(
                    tape.constant(ad::Tensor::matrix(
                        batch, 1, std::vector<double>(batch, std::sqrt(double(k))))),
                    tape.sqrt(r2));
                ad::Var ztilde = tape.mul(z, tape.broadcast_cols(scale, d));

                ad::Var y = decoder.decode_taped(tape, ztilde);

                ad::Var err_row{};
                if (objective == TrainObjective::TaskOriented) {
                    ad::Var ahat = agent->act_taped(tape, y, m_batch);
                    ad::Var diff = tape.sub(tape.constant(a_batch), ahat);
                    err_row = tape.row_sum(tape.square(diff));
                } else {
                    ad::Var diff = tape.sub(xv, y);
                    err_row = tape.row_sum(tape.square(diff));
                }
                rec_acc = t == 0 ? err_row : tape.add(rec_acc, err_row);
            }
            ad::Var rec_row = tape.affine(rec_acc, 1.0 / config.latent_samples, 0.0);
            ad::Var per_example =
                tape.add(tape.affine(rec_row, config.beta_c_rec, 0.0), kl_row);
            ad::Var loss = tape.mean(per_example);

            const double loss_value = tape.value(loss).item();
            if (!std::isfinite(loss_value)) {
                throw std::runtime_error(
                    "train: non-finite loss at epoch " + std::to_string(epoch) +
                    ", step " + std::to_string(start / batch_max));
            }

            for (ad::Parameter* p : params) p->zero_grad();
            tape.backward(loss);
            adam_update(params, adam);
            result.loss_history.push_back(loss_value);
        }
    }
    return result;
}

} // namespace

TrainResult train_tscc(JsccEncoder& encoder, JsccDecoder& decoder,
                       const CodecConfig& config, const std::vector<Sample>& dataset,
                       const TaskAgent& agent, const TaskAgent& coach) {
    return train_impl(encoder, decoder, config, dataset, &agent, &coach,
                      TrainObjective::TaskOriented);
}

TrainResult train_reconstruction(JsccEncoder& encoder, JsccDecoder& decoder,
                                 const CodecConfig& config,
                                 const std::vector<Sample>& dataset) {
    return train_impl(encoder, decoder, config, dataset, nullptr, nullptr,
                      TrainObjective::Reconstruction);
}

} // namespace tscc
