// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "tscc/agent.hpp"
#include "tscc/tape.hpp"
#include "tscc/types.hpp"

namespace tscc {

/// Dense encoder J(x): flattened image (length l) -> hidden (relu) ->
/// 2d linear outputs split into mu and log-variance; sigma = exp(logvar/2)
/// so the standard deviation is positive by construction.
class JsccEncoder {
public:
    JsccEncoder() = default;
    JsccEncoder(int input_dim, std::vector<int> hidden_dims, int latent_dim,
                uint64_t seed);

    int input_dim() const { return input_dim_; }
    int latent_dim() const { return latent_dim_; }
    const std::vector<int>& hidden_dims() const { return hidden_; }

    /// Deterministic (mu, sigma) for one image. Rejects size mismatch.
    LatentGaussian encode(const ImageTensor& x) const;

    /// Batch on tape: images (batch x l) -> (mu, logvar), each (batch x d).
    std::pair<ad::Var, ad::Var> encode_taped(ad::Tape& tape, ad::Var images);

    std::vector<ad::Parameter*> parameters();
    std::vector<const ad::Parameter*> parameters() const;

private:
    friend class CheckpointIo;
    int input_dim_ = 0;
    int latent_dim_ = 0;
    std::vector<int> hidden_;
    std::vector<ad::Parameter> params_;  // W0, b0, W1, b1, ...
};

/// Dense decoder: latent (length d) -> hidden (relu) -> l outputs squashed
/// into [0,1] by a logistic map. Owns the output image geometry.
class JsccDecoder {
public:
    JsccDecoder() = default;
    JsccDecoder(int channels, int height, int width, std::vector<int> hidden_dims,
                int latent_dim, uint64_t seed);

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    int output_dim() const { return channels_ * height_ * width_; }
    int latent_dim() const { return latent_dim_; }
    const std::vector<int>& hidden_dims() const { return hidden_; }

    /// Deterministic image from a latent vector of length d.
    ImageTensor decode_latent(std::span<const double> latent) const;

    /// Batch on tape: latents (batch x d) -> images (batch x l) in [0,1].
    ad::Var decode_taped(ad::Tape& tape, ad::Var latents);

    std::vector<ad::Parameter*> parameters();
    std::vector<const ad::Parameter*> parameters() const;

private:
    friend class CheckpointIo;
    int channels_ = 0, height_ = 0, width_ = 0;
    int latent_dim_ = 0;
    std::vector<int> hidden_;
    std::vector<ad::Parameter> params_;
};

/// Reconstruction/KL split of a training loss value.
struct LossBreakdown {
    double reconstruction = 0.0;  // (1/t) * sum of squared-norm errors
    double kl = 0.0;
    double beta = 1.0;
    double total = 0.0;  // beta * reconstruction + kl
};

LatentGaussian encode(const JsccEncoder& encoder, const ImageTensor& x);

/// z = epsilon .* sigma + mu.
std::vector<double> reparameterize(const LatentGaussian& latent,
                                   std::span<const double> epsilon);

/// Neighboring reals to complex: out[j] = z[2j] + i*z[2j+1]. Rejects odd d.
std::vector<std::complex<double>> pack_complex(std::span<const double> z);

/// Exact inverse of pack_complex.
std::vector<double> unpack_complex(std::span<const std::complex<double>> packed);

/// z_tilde = sqrt(kP) * z / sqrt(z* z): scales the frame so the average
/// energy per complex symbol is exactly P. Rejects the all-zero frame.
SymbolFrame normalize_power(std::span<const std::complex<double>> symbols,
                            double power_budget);

/// Image from a received frame: unpack, then run the decoder network.
ImageTensor decode(const JsccDecoder& decoder, const SymbolFrame& frame);

/// 0.5 * sum(mu^2 + sigma^2 - ln sigma^2 - 1) >= 0; the divergence from
/// the standard Gaussian prior.
double compute_kl(const LatentGaussian& latent);

/// total = beta_rec * (1/t) sum_i ||x - xhat_i||^2 + KL. Rejects an empty
/// sample set or mismatched dimensions.
LossBreakdown compute_vae_loss(const ImageTensor& x,
                               const std::vector<ImageTensor>& reconstructions,
                               const LatentGaussian& latent, double beta_rec);

/// total = beta_c_rec * (1/t) sum_i ||a - ahat_i||^2 + KL.
LossBreakdown compute_tscc_loss(const ActionVector& coach_action,
                                const std::vector<ActionVector>& agent_actions,
                                const LatentGaussian& latent, double beta_c_rec);

struct PipelineResult {
    LatentGaussian latent;
    SymbolFrame sent;
    ImageTensor output;
};

/// encode -> reparameterize -> pack -> normalize -> channel -> unpack ->
/// decode. Without a channel config the received frame equals the sent one
/// (the training regime). epsilon must have length d.
PipelineResult forward_pipeline(const JsccEncoder& encoder, const JsccDecoder& decoder,
                                const ImageTensor& x,
                                const std::optional<ChannelConfig>& channel,
                                std::span<const double> epsilon, uint64_t stream = 0);

enum class TrainObjective {
    TaskOriented,    // beta * (1/t) sum ||a - ahat_i||^2 + KL
    Reconstruction,  // beta * (1/t) sum ||x - xhat_i||^2 + KL
};

struct TrainResult {
    std::vector<double> loss_history;  // per optimizer step, batch mean
};

/// Trains encoder and decoder in place, noiselessly, against the frozen
/// agent. The coach is evaluated off-tape on the lossless image; gradients
/// reach only the codec parameters. Aborts on a non-finite loss.
TrainResult train_tscc(JsccEncoder& encoder, JsccDecoder& decoder,
                       const CodecConfig& config, const std::vector<Sample>& dataset,
                       const TaskAgent& agent, const TaskAgent& coach);

/// Same pipeline and budget, but the reconstruction objective.
TrainResult train_reconstruction(JsccEncoder& encoder, JsccDecoder& decoder,
                                 const CodecConfig& config,
                                 const std::vector<Sample>& dataset);

} // namespace tscc
