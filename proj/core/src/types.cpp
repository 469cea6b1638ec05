// SPDX-License-Identifier: Apache-2.0
#include "tscc/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tscc/snr.hpp"

namespace tscc {

ImageTensor::ImageTensor(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw std::invalid_argument("ImageTensor: dimensions must be positive");
    }
    data_.assign(static_cast<size_t>(channels) * height * width, 0.0);
}

ImageTensor::ImageTensor(int channels, int height, int width, std::vector<double> values)
    : channels_(channels), height_(height), width_(width), data_(std::move(values)) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw std::invalid_argument("ImageTensor: dimensions must be positive");
    }
    if (data_.size() != static_cast<size_t>(channels) * height * width) {
        throw std::invalid_argument("ImageTensor: value count does not match C*H*W");
    }
    for (double v : data_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("ImageTensor: intensity outside [0,1]: " +
                                        std::to_string(v));
        }
    }
}

void StateVector::validate() const {
    for (double v : to_array()) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("StateVector: non-finite component");
        }
    }
}

LatentGaussian::LatentGaussian(std::vector<double> mean, std::vector<double> std)
    : mean_(std::move(mean)), std_(std::move(std)) {
    if (mean_.size() != std_.size()) {
        throw std::invalid_argument("LatentGaussian: mean/std length mismatch");
    }
    for (double s : std_) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("LatentGaussian: sigma must be positive and finite");
        }
    }
}

double ChannelConfig::noise_variance() const {
    return snr_to_noise_variance(snr_db, power_budget);
}

void CodecConfig::validate() const {
    if (latent_dim <= 0 || latent_dim % 2 != 0) {
        throw std::invalid_argument("CodecConfig: latent_dim must be positive and even");
    }
    if (latent_samples < 1) {
        throw std::invalid_argument("CodecConfig: latent_samples must be >= 1");
    }
    if (!(beta_c_rec > 0.0)) {
        throw std::invalid_argument("CodecConfig: beta_c_rec must be positive");
    }
    if (batch_size < 1 || epochs < 0) {
        throw std::invalid_argument("CodecConfig: bad batch_size/epochs");
    }
}

} // namespace tscc
