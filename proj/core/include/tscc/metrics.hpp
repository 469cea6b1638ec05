// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tscc/types.hpp"

namespace tscc {

/// Fidelity summary of one evaluation point.
struct MetricReport {
    double psnr = 0.0;      // dB, +inf sentinel for identical images
    double ms_ssim = 0.0;   // [0, 1]
    double action_mse = 0.0;
    double task_score = 0.0;  // [0, 1]
};

/// 10*log10(1 / MSE) on [0,1] images; +inf for identical inputs.
double psnr(const ImageTensor& x, const ImageTensor& y);

/// Multi-scale structural similarity. Gaussian 7x7 window (sigma 1.5),
/// dyadic 2x2-average downsampling, weights renormalized from the published
/// five-scale constants to `scales`. Clamped into [0, 1] (the negative-
/// structure variant is cut off at zero). Requires
/// min(H, W) >= window * 2^(scales-1).
double ms_ssim(const ImageTensor& x, const ImageTensor& y, int scales = 3,
               int window = 7);

/// Mean squared componentwise error between two action triples.
double action_mse(const ActionVector& a, const ActionVector& a_hat);

/// Fraction of pairs with ||a - a_hat||_inf <= tolerance.
double task_score(const std::vector<std::pair<ActionVector, ActionVector>>& batch,
                  double tolerance = 0.05);

/// Cliff locator: plateau = mean of the two best scores; returns the
/// highest SNR whose score falls below plateau_fraction * plateau, linearly
/// interpolated toward the next grid point; nullopt when no point is below
/// the cut (or the plateau is degenerate at zero). Input must be ascending
/// in SNR with at least 4 points.
std::optional<double> detect_cliff(const std::vector<std::pair<double, double>>& sweep,
                                   double plateau_fraction = 0.5);

} // namespace tscc
