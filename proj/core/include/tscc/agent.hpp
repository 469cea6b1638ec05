// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tscc/tape.hpp"
#include "tscc/types.hpp"

namespace tscc {

/// The surrogate control agent A(y, m): a deterministic differentiable map
/// from (image, state) to control commands. Parameters are fixed at
/// construction; gradients flow through the image input only.
class TaskAgent {
public:
    virtual ~TaskAgent() = default;

    /// Flattened image length the agent expects.
    virtual int input_size() const = 0;

    virtual ActionVector act(const ImageTensor& image, const StateVector& state) const = 0;

    /// Batch evaluation on a tape: images (batch x l) with gradient,
    /// states (batch x 6) as data. Returns actions (batch x 3), columns
    /// (steer, throttle, brake), already squashed into range.
    virtual ad::Var act_taped(ad::Tape& tape, ad::Var images,
                              const ad::Tensor& states) const = 0;

    /// FNV-1a over the parameter bytes; stable across calls (freeze probe).
    virtual uint64_t parameter_checksum() const = 0;
};

/// a_hat = A(y, m). Rejects images whose flattened size differs from the
/// agent's construction.
ActionVector agent_act(const TaskAgent& agent, const ImageTensor& image,
                       const StateVector& state);

/// Baseline commands from the lossless image: numerically identical to
/// agent_act but never recorded on a tape, so no gradient ever flows
/// through the coach path.
ActionVector coach_act(const TaskAgent& agent, const ImageTensor& image,
                       const StateVector& state);

/// Seeded dense network (image ++ state) -> hidden -> 3, tanh hidden units,
/// output squashed per component. Random-but-fixed: the task objective only
/// needs a deterministic differentiable target function.
class SurrogateAgent final : public TaskAgent {
public:
    SurrogateAgent(int channels, int height, int width, std::vector<int> hidden_dims,
                   uint64_t seed);

    int input_size() const override { return channels_ * height_ * width_; }
    ActionVector act(const ImageTensor& image, const StateVector& state) const override;
    ad::Var act_taped(ad::Tape& tape, ad::Var images,
                      const ad::Tensor& states) const override;
    uint64_t parameter_checksum() const override;

    uint64_t seed() const { return seed_; }
    const std::vector<int>& hidden_dims() const { return hidden_; }

private:
    struct Layer {
        ad::Tensor weight;  // out x in
        ad::Tensor bias;    // out
    };

    std::vector<double> forward_raw(const std::vector<double>& input) const;

    int channels_, height_, width_;
    std::vector<int> hidden_;
    uint64_t seed_;
    std::vector<Layer> layers_;
};

SurrogateAgent build_surrogate_agent(int channels, int height, int width,
                                     std::vector<int> hidden_dims, uint64_t seed);

/// Interpretable variant: steering follows the brightness-weighted
/// horizontal centroid of lane markings in the lower image half, blended
/// with the navigation goal; throttle and brake depend on speed only.
class StructuredAgent final : public TaskAgent {
public:
    StructuredAgent(int channels, int height, int width);

    int input_size() const override { return channels_ * height_ * width_; }
    ActionVector act(const ImageTensor& image, const StateVector& state) const override;
    ad::Var act_taped(ad::Tape& tape, ad::Var images,
                      const ad::Tensor& states) const override;
    uint64_t parameter_checksum() const override;

private:
    int channels_, height_, width_;
    std::vector<double> xnorm_;  // per lower-half pixel, column in [-1, 1]
};

} // namespace tscc
