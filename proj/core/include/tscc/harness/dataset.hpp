// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "tscc/types.hpp"

namespace tscc::harness {

/// Procedural road-scene recipe. Scenes are fully determined by
/// (spec, index): a horizon gradient, a road trapezoid bending with the
/// lane curvature, dashed center markings, and colored obstacle boxes.
/// The paired state is derived from the same geometry, so the navigation
/// goal always points where the lane bends.
struct SceneSpec {
    int channels = 3;
    int height = 32;
    int width = 64;
    double curvature_min = -0.5;
    double curvature_max = 0.5;
    int obstacles_min = 0;
    int obstacles_max = 3;
    double lighting_min = 0.7;
    double lighting_max = 1.0;
    uint64_t seed = 1;
};

std::vector<Sample> generate_dataset(const SceneSpec& spec, int count);

/// The curvature that generate_dataset drew for one index; exposed so
/// consistency checks can compare rendered geometry against the state.
double scene_curvature(const SceneSpec& spec, int index);

} // namespace tscc::harness
