// SPDX-License-Identifier: Apache-2.0
#include "tscc/agent.hpp"

#include <cmath>
#include <stdexcept>

#include "tscc/optim.hpp"
#include "tscc/rng.hpp"

namespace tscc {

namespace {

double sigmoid(double x) { return 0.5 * std::tanh(0.5 * x) + 0.5; }

// sigmoid(x) = 0.5 * tanh(0.5 x) + 0.5, built from tape primitives
ad::Var taped_sigmoid(ad::Tape& tape, ad::Var x) {
    return tape.affine(tape.tanh(tape.affine(x, 0.5, 0.0)), 0.5, 0.5);
}

uint64_t fnv1a_doubles(uint64_t h, const std::vector<double>& values) {
    for (double v : values) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        __builtin_memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

// throttle rises when below cruise speed, brake engages near the cap
double throttle_of_speed(double speed) { return sigmoid(3.0 * (0.6 - speed)); }
double brake_of_speed(double speed) { return sigmoid(6.0 * (speed - 0.85)); }

constexpr double kCentroidGain = 2.0;
constexpr double kGoalGain = 1.0;

} // namespace

ActionVector agent_act(const TaskAgent& agent, const ImageTensor& image,
                       const StateVector& state) {
    if (image.size() != agent.input_size()) {
        throw std::invalid_argument("agent_act: image size does not match agent input");
    }
    state.validate();
    return agent.act(image, state);
}

ActionVector coach_act(const TaskAgent& agent, const ImageTensor& image,
                       const StateVector& state) {
    if (image.size() != agent.input_size()) {
        throw std::invalid_argument("coach_act: image size does not match agent input");
    }
    state.validate();
    return agent.act(image, state);
}

// ---------------------------------------------------------------------------
// SurrogateAgent

SurrogateAgent::SurrogateAgent(int channels, int height, int width,
                               std::vector<int> hidden_dims, uint64_t seed)
    : channels_(channels), height_(height), width_(width),
      hidden_(std::move(hidden_dims)), seed_(seed) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw std::invalid_argument("SurrogateAgent: dimensions must be positive");
    }
    int in = input_size() + StateVector::kDim;
    uint64_t layer_seed = seed;
    for (size_t i = 0; i <= hidden_.size(); ++i) {
        const int out = i < hidden_.size() ? hidden_[i] : ActionVector::kDim;
        if (out <= 0) throw std::invalid_argument("SurrogateAgent: bad hidden width");
        Layer layer;
        layer.weight = ad::seeded_init({out, in}, in, stream_key({layer_seed, 2 * i}));
        layer.bias = ad::seeded_init({out}, in, stream_key({layer_seed, 2 * i + 1}));
        layers_.push_back(std::move(layer));
        in = out;
    }
}

std::vector<double> SurrogateAgent::forward_raw(const std::vector<double>& input) const {
    std::vector<double> act = input;
    for (size_t li = 0; li < layers_.size(); ++li) {
        const Layer& layer = layers_[li];
        const int out = layer.weight.rows();
        const int in = layer.weight.cols();
        std::vector<double> next(out);
        for (int o = 0; o < out; ++o) {
            const double* wrow = layer.weight.data() + static_cast<size_t>(o) * in;
            double acc = layer.bias[o];
            for (int j = 0; j < in; ++j) acc += wrow[j] * act[j];
            next[o] = li + 1 < layers_.size() ? std::tanh(acc) : acc;
        }
        act = std::move(next);
    }
    return act;
}

ActionVector SurrogateAgent::act(const ImageTensor& image, const StateVector& state) const {
    std::vector<double> input;
    input.reserve(image.size() + StateVector::kDim);
    input.insert(input.end(), image.data().begin(), image.data().end());
    for (double v : state.to_array()) input.push_back(v);
    const std::vector<double> raw = forward_raw(input);
    ActionVector a;
    a.steer = std::tanh(raw[0]);
    a.throttle = sigmoid(raw[1]);
    a.brake = sigmoid(raw[2]);
    return a;
}

ad::Var SurrogateAgent::act_taped(ad::Tape& tape, ad::Var images,
                                  const ad::Tensor& states) const {
    // copy the batch size out: recording ops may reallocate node storage
    const int batch = tape.value(images).rows();
    if (!tape.value(images).is_matrix() || tape.value(images).cols() != input_size()) {
        throw std::invalid_argument("SurrogateAgent::act_taped: bad image batch shape");
    }
    if (!states.is_matrix() || states.rows() != batch ||
        states.cols() != StateVector::kDim) {
        throw std::invalid_argument("SurrogateAgent::act_taped: bad state batch shape");
    }
    ad::Var h = tape.concat_cols(images, tape.constant(states));
    for (size_t li = 0; li < layers_.size(); ++li) {
        const Layer& layer = layers_[li];
        ad::Var w = tape.constant(layer.weight);  // frozen: recorded as data
        ad::Var b = tape.constant(ad::Tensor::matrix(1, layer.bias.size(),
                                                     layer.bias.values()));
        h = tape.add(tape.matmul_nt(h, w), tape.broadcast_rows(b, batch));
        if (li + 1 < layers_.size()) h = tape.tanh(h);
    }
    ad::Var steer = tape.tanh(tape.slice_cols(h, 0, 1));
    ad::Var throttle = taped_sigmoid(tape, tape.slice_cols(h, 1, 1));
    ad::Var brake = taped_sigmoid(tape, tape.slice_cols(h, 2, 1));
    return tape.concat_cols(tape.concat_cols(steer, throttle), brake);
}

uint64_t SurrogateAgent::parameter_checksum() const {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (const Layer& layer : layers_) {
        h = fnv1a_doubles(h, layer.weight.values());
        h = fnv1a_doubles(h, layer.bias.values());
    }
    return h;
}

SurrogateAgent build_surrogate_agent(int channels, int height, int width,
                                     std::vector<int> hidden_dims, uint64_t seed) {
    return SurrogateAgent(channels, height, width, std::move(hidden_dims), seed);
}

// ---------------------------------------------------------------------------
// StructuredAgent

StructuredAgent::StructuredAgent(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw std::invalid_argument("StructuredAgent: dimensions must be positive");
    }
    const int lower = height - height / 2;
    xnorm_.resize(static_cast<size_t>(lower) * width);
    for (int y = 0; y < lower; ++y) {
        for (int x = 0; x < width; ++x) {
            xnorm_[static_cast<size_t>(y) * width + x] =
                width > 1 ? 2.0 * x / (width - 1) - 1.0 : 0.0;
        }
    }
}

ActionVector StructuredAgent::act(const ImageTensor& image, const StateVector& state) const {
    const int hw = height_ * width_;
    const int y0 = height_ / 2;
    double num = 0.0, den = 1e-6;
    for (int y = y0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            double lum = 0.0;
            for (int c = 0; c < channels_; ++c) lum += image.at(c, y, x);
            lum /= channels_;
            const double w = lum * lum;
            const double xn = xnorm_[static_cast<size_t>(y - y0) * width_ + x];
            num += w * xn;
            den += w;
        }
    }
    (void)hw;
    const double centroid = num / den;
    ActionVector a;
    a.steer = std::tanh(kCentroidGain * centroid + kGoalGain * state.goal_dx);
    a.throttle = throttle_of_speed(state.speed);
    a.brake = brake_of_speed(state.speed);
    return a;
}

ad::Var StructuredAgent::act_taped(ad::Tape& tape, ad::Var images,
                                   const ad::Tensor& states) const {
    const int batch = tape.value(images).rows();
    if (!tape.value(images).is_matrix() || tape.value(images).cols() != input_size()) {
        throw std::invalid_argument("StructuredAgent::act_taped: bad image batch shape");
    }
    const int hw = height_ * width_;
    const int y0 = height_ / 2;
    const int lower = (height_ - y0) * width_;

    // luminance over channels, lower image half only (contiguous columns)
    ad::Var lum = tape.slice_cols(images, y0 * width_, lower);
    for (int c = 1; c < channels_; ++c) {
        lum = tape.add(lum, tape.slice_cols(images, c * hw + y0 * width_, lower));
    }
    lum = tape.affine(lum, 1.0 / channels_, 0.0);
    ad::Var w = tape.square(lum);

    ad::Var xn = tape.broadcast_rows(
        tape.constant(ad::Tensor::matrix(1, lower, xnorm_)), batch);
    ad::Var num = tape.row_sum(tape.mul(w, xn));
    ad::Var den = tape.affine(tape.row_sum(w), 1.0, 1e-6);
    ad::Var centroid = tape.div(num, den);

    std::vector<double> goal(batch), throttle(batch), brake(batch);
    for (int i = 0; i < batch; ++i) {
        const double speed = states[i * StateVector::kDim + 0];
        goal[i] = kGoalGain * states[i * StateVector::kDim + 4];
        throttle[i] = throttle_of_speed(speed);
        brake[i] = brake_of_speed(speed);
    }
    ad::Var steer = tape.tanh(
        tape.add(tape.affine(centroid, kCentroidGain, 0.0),
                 tape.constant(ad::Tensor::matrix(batch, 1, goal))));
    ad::Var th = tape.constant(ad::Tensor::matrix(batch, 1, throttle));
    ad::Var br = tape.constant(ad::Tensor::matrix(batch, 1, brake));
    return tape.concat_cols(tape.concat_cols(steer, th), br);
}

uint64_t StructuredAgent::parameter_checksum() const {
    uint64_t h = 0xCBF29CE484222325ULL;
    return fnv1a_doubles(h, xnorm_);
}

} // namespace tscc
