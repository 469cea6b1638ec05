// SPDX-License-Identifier: Apache-2.0
#include "tscc/harness/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tscc/rng.hpp"

namespace tscc::harness {

namespace {

struct SceneDraws {
    double curvature;
    double lighting;
    int obstacles;
    double speed;
};

SceneDraws draw_scene(const SceneSpec& spec, int index, Rng& rng) {
    SceneDraws d;
    d.curvature =
        spec.curvature_min + (spec.curvature_max - spec.curvature_min) * rng.next_double();
    d.lighting =
        spec.lighting_min + (spec.lighting_max - spec.lighting_min) * rng.next_double();
    const int span = spec.obstacles_max - spec.obstacles_min + 1;
    d.obstacles = spec.obstacles_min + static_cast<int>(rng.next_double() * span);
    d.obstacles = std::min(d.obstacles, spec.obstacles_max);
    d.speed = 0.2 + 0.7 * rng.next_double();
    (void)index;
    return d;
}

void put(ImageTensor& img, int y, int x, double r, double g, double b) {
    if (y < 0 || y >= img.height() || x < 0 || x >= img.width()) return;
    img.at(0, y, x) = std::clamp(r, 0.0, 1.0);
    if (img.channels() > 1) img.at(1, y, x) = std::clamp(g, 0.0, 1.0);
    if (img.channels() > 2) img.at(2, y, x) = std::clamp(b, 0.0, 1.0);
}

} // namespace

double scene_curvature(const SceneSpec& spec, int index) {
    Rng rng(spec.seed, static_cast<uint64_t>(index));
    return draw_scene(spec, index, rng).curvature;
}

std::vector<Sample> generate_dataset(const SceneSpec& spec, int count) {
    if (count < 1) throw std::invalid_argument("generate_dataset: count must be >= 1");
    if (spec.channels < 1 || spec.channels > 3 || spec.height < 8 || spec.width < 8) {
        throw std::invalid_argument("generate_dataset: bad geometry");
    }
    if (spec.obstacles_min < 0 || spec.obstacles_max < spec.obstacles_min) {
        throw std::invalid_argument("generate_dataset: bad obstacle range");
    }

    std::vector<Sample> out;
    out.reserve(count);
    const int h = spec.height, w = spec.width;
    const int horizon = h * 2 / 5;

    for (int idx = 0; idx < count; ++idx) {
        Rng rng(spec.seed, static_cast<uint64_t>(idx));
        const SceneDraws d = draw_scene(spec, idx, rng);

        ImageTensor img(spec.channels, h, w);
        const double light = d.lighting;

        // sky gradient down to the horizon
        for (int y = 0; y < horizon; ++y) {
            const double t = static_cast<double>(y) / std::max(1, horizon);
            for (int x = 0; x < w; ++x) {
                put(img, y, x, light * (0.35 + 0.25 * t), light * (0.55 + 0.2 * t),
                    light * (0.85 - 0.1 * t));
            }
        }

        // ground and road trapezoid; the center line bends with curvature
        const double bottom_half = 0.42 * w;
        const double top_half = 0.06 * w;
        auto center_at = [&](double t) {
            // t = 0 at horizon, 1 at bottom; quadratic bend toward the goal
            return 0.5 * w + d.curvature * w * 0.35 * (1.0 - t) * (1.0 - t);
        };
        for (int y = horizon; y < h; ++y) {
            const double t = static_cast<double>(y - horizon) / std::max(1, h - horizon);
            const double center = center_at(t);
            const double half = top_half + (bottom_half - top_half) * t;
            for (int x = 0; x < w; ++x) {
                const bool on_road = std::abs(x - center) <= half;
                if (on_road) {
                    const double g = light * (0.25 + 0.1 * t);
                    put(img, y, x, g, g, g + 0.02);
                } else {
                    put(img, y, x, light * (0.2 + 0.15 * t), light * (0.45 + 0.15 * t),
                        light * 0.2);
                }
            }
            // dashed center marking, bright for the lane-statistics agent
            if ((y - horizon) % 4 < 2) {
                const int cx = static_cast<int>(std::lround(center));
                const double m = light * 0.95;
                put(img, y, cx, m, m, m * 0.85);
                if (half > 4.0) put(img, y, cx + 1, m, m, m * 0.85);
            }
        }

        // obstacle boxes sitting on the road
        for (int o = 0; o < d.obstacles; ++o) {
            const double t = 0.25 + 0.6 * rng.next_double();
            const int oy = horizon + static_cast<int>(t * (h - horizon));
            const double center = center_at(t);
            const double half = top_half + (bottom_half - top_half) * t;
            const int ox = static_cast<int>(center + (2.0 * rng.next_double() - 1.0) * half);
            const int size = 1 + static_cast<int>(t * 0.12 * h);
            const double cr = 0.3 + 0.7 * rng.next_double();
            const double cg = 0.2 + 0.5 * rng.next_double();
            const double cb = 0.2 + 0.5 * rng.next_double();
            for (int yy = oy - size; yy <= oy; ++yy) {
                for (int xx = ox - size / 2; xx <= ox + size / 2; ++xx) {
                    put(img, yy, xx, cr * light, cg * light, cb * light);
                }
            }
        }

        StateVector state;
        state.speed = d.speed;
        state.steer = std::clamp(d.curvature + 0.05 * rng.next_symmetric(), -1.0, 1.0);
        state.throttle = std::clamp(0.8 - 0.6 * d.speed, 0.0, 1.0);
        state.brake = d.speed > 0.85 ? 0.3 : 0.0;
        state.goal_dx = d.curvature;  // goal offset follows the lane bend
        state.goal_dy = 0.5 + 0.5 * rng.next_double();
        state.validate();

        out.push_back(Sample{std::move(img), state});
    }
    return out;
}

} // namespace tscc::harness
