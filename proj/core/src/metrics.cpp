// SPDX-License-Identifier: Apache-2.0
#include "tscc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tscc {

double psnr(const ImageTensor& x, const ImageTensor& y) {
    if (!x.same_dims(y)) throw std::invalid_argument("psnr: dimension mismatch");
    double mse = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double d = x.data()[i] - y.data()[i];
        mse += d * d;
    }
    mse /= x.size();
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

// published five-scale exponents; renormalized to the scale count in use
constexpr double kMsSsimWeights5[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

struct Plane {
    int h = 0, w = 0;
    std::vector<double> v;
    double at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
};

Plane channel_plane(const ImageTensor& img, int c) {
    Plane p;
    p.h = img.height();
    p.w = img.width();
    p.v.resize(static_cast<size_t>(p.h) * p.w);
    for (int y = 0; y < p.h; ++y) {
        for (int x = 0; x < p.w; ++x) p.v[static_cast<size_t>(y) * p.w + x] = img.at(c, y, x);
    }
    return p;
}

Plane downsample2(const Plane& p) {
    Plane out;
    out.h = p.h / 2;
    out.w = p.w / 2;
    out.v.resize(static_cast<size_t>(out.h) * out.w);
    for (int y = 0; y < out.h; ++y) {
        for (int x = 0; x < out.w; ++x) {
            out.v[static_cast<size_t>(y) * out.w + x] =
                0.25 * (p.at(2 * y, 2 * x) + p.at(2 * y, 2 * x + 1) +
                        p.at(2 * y + 1, 2 * x) + p.at(2 * y + 1, 2 * x + 1));
        }
    }
    return out;
}

std::vector<double> gaussian_kernel(int window, double sigma) {
    std::vector<double> k(window);
    const double c = (window - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        k[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// mean luminance-comparison and contrast-structure over valid positions
// of one scale, Gaussian-windowed
std::pair<double, double> ssim_scale(const Plane& a, const Plane& b, int window,
                                     const std::vector<double>& kern) {
    const int oh = a.h - window + 1;
    const int ow = a.w - window + 1;
    double lum_sum = 0.0, cs_sum = 0.0;
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double ma = 0.0, mb = 0.0;
            for (int i = 0; i < window; ++i) {
                for (int j = 0; j < window; ++j) {
                    const double wgt = kern[i] * kern[j];
                    ma += wgt * a.at(y + i, x + j);
                    mb += wgt * b.at(y + i, x + j);
                }
            }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int i = 0; i < window; ++i) {
                for (int j = 0; j < window; ++j) {
                    const double wgt = kern[i] * kern[j];
                    const double da = a.at(y + i, x + j) - ma;
                    const double db = b.at(y + i, x + j) - mb;
                    va += wgt * da * da;
                    vb += wgt * db * db;
                    cov += wgt * da * db;
                }
            }
            lum_sum += (2.0 * ma * mb + kC1) / (ma * ma + mb * mb + kC1);
            cs_sum += (2.0 * cov + kC2) / (va + vb + kC2);
        }
    }
    const double n = static_cast<double>(oh) * ow;
    return {lum_sum / n, cs_sum / n};
}

} // namespace

double ms_ssim(const ImageTensor& x, const ImageTensor& y, int scales, int window) {
    if (!x.same_dims(y)) throw std::invalid_argument("ms_ssim: dimension mismatch");
    if (scales < 1 || scales > 5) throw std::invalid_argument("ms_ssim: scales in [1,5]");
    const int min_side = std::min(x.height(), x.width());
    if (min_side < window * (1 << (scales - 1))) {
        throw std::invalid_argument("ms_ssim: image too small for scale count");
    }

    std::vector<double> weights(kMsSsimWeights5, kMsSsimWeights5 + scales);
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (double& w : weights) w /= wsum;

    const std::vector<double> kern = gaussian_kernel(window, 1.5);

    double value = 0.0;
    for (int c = 0; c < x.channels(); ++c) {
        Plane a = channel_plane(x, c);
        Plane b = channel_plane(y, c);
        double prod = 1.0;
        for (int s = 0; s < scales; ++s) {
            auto [lum, cs] = ssim_scale(a, b, window, kern);
            if (s + 1 < scales) {
                prod *= std::pow(std::max(cs, 0.0), weights[s]);
                a = downsample2(a);
                b = downsample2(b);
            } else {
                prod *= std::pow(std::max(lum * cs, 0.0), weights[s]);
            }
        }
        value += prod;
    }
    return std::clamp(value / x.channels(), 0.0, 1.0);
}

double action_mse(const ActionVector& a, const ActionVector& a_hat) {
    const auto av = a.to_array();
    const auto bv = a_hat.to_array();
    double acc = 0.0;
    for (int i = 0; i < ActionVector::kDim; ++i) {
        const double d = av[i] - bv[i];
        acc += d * d;
    }
    return acc / ActionVector::kDim;
}

double task_score(const std::vector<std::pair<ActionVector, ActionVector>>& batch,
                  double tolerance) {
    if (batch.empty()) throw std::invalid_argument("task_score: empty batch");
    if (!(tolerance > 0.0)) throw std::invalid_argument("task_score: tolerance must be > 0");
    int within = 0;
    for (const auto& [a, ahat] : batch) {
        const auto av = a.to_array();
        const auto bv = ahat.to_array();
        double linf = 0.0;
        for (int i = 0; i < ActionVector::kDim; ++i) {
            linf = std::max(linf, std::abs(av[i] - bv[i]));
        }
        if (linf <= tolerance) ++within;
    }
    return static_cast<double>(within) / batch.size();
}

std::optional<double> detect_cliff(const std::vector<std::pair<double, double>>& sweep,
                                   double plateau_fraction) {
    if (sweep.size() < 4) throw std::invalid_argument("detect_cliff: need >= 4 points");
    for (size_t i = 1; i < sweep.size(); ++i) {
        if (!(sweep[i].first > sweep[i - 1].first)) {
            throw std::invalid_argument("detect_cliff: SNRs must be ascending");
        }
    }
    double best1 = -std::numeric_limits<double>::infinity();
    double best2 = best1;
    for (const auto& [snr, score] : sweep) {
        (void)snr;
        if (score > best1) {
            best2 = best1;
            best1 = score;
        } else if (score > best2) {
            best2 = score;
        }
    }
    const double plateau = 0.5 * (best1 + best2);
    if (!(plateau > 0.0)) return std::nullopt;  // degenerate all-zero sweep
    const double cut = plateau_fraction * plateau;

    for (size_t i = sweep.size(); i-- > 0;) {
        if (sweep[i].second < cut) {
            if (i + 1 >= sweep.size()) return sweep[i].first;  // never recovers
            const auto [s0, v0] = sweep[i];
            const auto [s1, v1] = sweep[i + 1];
            if (v1 <= v0) return s0;
            return s0 + (cut - v0) * (s1 - s0) / (v1 - v0);
        }
    }
    return std::nullopt;
}

} // namespace tscc
