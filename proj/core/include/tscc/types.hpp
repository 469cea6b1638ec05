// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace tscc {

/// A C x H x W image with intensities in [0, 1], stored row-major
/// (channel-major, then rows, then columns). The flattened length
/// C*H*W is the source bandwidth of the transmission problem.
class ImageTensor {
public:
    ImageTensor() = default;

    /// All-zero image of the given geometry.
    ImageTensor(int channels, int height, int width);

    /// Takes ownership of `values`; rejects wrong length or out-of-range
    /// intensities.
    ImageTensor(int channels, int height, int width, std::vector<double> values);

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    int size() const { return channels_ * height_ * width_; }

    double at(int c, int y, int x) const {
        return data_[(static_cast<size_t>(c) * height_ + y) * width_ + x];
    }
    double& at(int c, int y, int x) {
        return data_[(static_cast<size_t>(c) * height_ + y) * width_ + x];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_dims(const ImageTensor& other) const {
        return channels_ == other.channels_ && height_ == other.height_ &&
               width_ == other.width_;
    }

private:
    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

/// Side information carried over the conventional link: navigation goal,
/// speed and the previous control state. Fixed at six components.
struct StateVector {
    double speed = 0.0;     // normalized [0, 1]
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]
    double steer = 0.0;     // [-1, 1]
    double goal_dx = 0.0;   // normalized
    double goal_dy = 0.0;   // normalized

    static constexpr int kDim = 6;

    std::array<double, kDim> to_array() const {
        return {speed, throttle, brake, steer, goal_dx, goal_dy};
    }

    /// Rejects non-finite components.
    void validate() const;
};

/// Control command triple produced by the driving agent.
struct ActionVector {
    double steer = 0.0;     // [-1, 1]
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]

    static constexpr int kDim = 3;

    std::array<double, kDim> to_array() const { return {steer, throttle, brake}; }
};

/// One paired example: the camera image and the accompanying state.
struct Sample {
    ImageTensor image;
    StateVector state;
};

/// Diagonal Gaussian over the latent space: the encoder output (mu, sigma).
class LatentGaussian {
public:
    LatentGaussian() = default;

    /// Rejects mismatched lengths and non-positive standard deviations.
    LatentGaussian(std::vector<double> mean, std::vector<double> std);

    int dim() const { return static_cast<int>(mean_.size()); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& std() const { return std_; }

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

/// A length-k complex channel frame with an average-power budget P
/// (energy per complex symbol).
struct SymbolFrame {
    std::vector<std::complex<double>> symbols;
    double power_budget = 1.0;

    int length() const { return static_cast<int>(symbols.size()); }
};

enum class ChannelKind { Awgn, Rayleigh };

/// Channel dial: kind, SNR in dB per complex symbol, power budget and the
/// seed of the noise stream. SNR is P / sigma^2 with sigma^2 the total
/// complex noise variance; each real component carries sigma^2 / 2.
struct ChannelConfig {
    ChannelKind kind = ChannelKind::Awgn;
    double snr_db = 10.0;
    double power_budget = 1.0;
    uint64_t seed = 0;

    /// sigma^2 = P * 10^(-snr_db / 10); rejects non-positive P.
    double noise_variance() const;
};

/// Hyper-parameters of the learned codec and its training run.
struct CodecConfig {
    int latent_dim = 32;                  // d, must be even
    std::vector<int> hidden_dims = {256}; // encoder hidden widths; decoder mirrors
    double beta_c_rec = 2048.0;           // reconstruction weight of the task loss
    int latent_samples = 1;               // t
    double learning_rate = 1e-3;
    int epochs = 10;
    int batch_size = 16;
    uint64_t seed = 1;

    /// Rejects odd latent_dim, t < 1 and non-positive beta.
    void validate() const;
};

} // namespace tscc
