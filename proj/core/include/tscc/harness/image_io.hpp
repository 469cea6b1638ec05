// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tscc/types.hpp"

namespace tscc::harness {

/// Binary PPM (P6), 8-bit.
std::optional<ImageTensor> load_ppm(const std::string& path);
void save_ppm(const ImageTensor& image, const std::string& path);

/// PNG via zlib: 8-bit gray, RGB or RGBA, non-interlaced. RGBA alpha is
/// dropped; gray replicates into three channels when the target is RGB.
std::optional<ImageTensor> load_png(const std::string& path);
void save_png(const ImageTensor& image, const std::string& path);

struct LoadReport {
    std::vector<ImageTensor> images;
    int skipped = 0;  // unreadable or undecodable files
};

/// Loads every .png/.ppm in the directory in filename order, center-crops
/// to the target aspect ratio and bilinearly resizes to target_height x
/// target_width. Unreadable files are skipped and counted.
LoadReport load_image_dir(const std::string& dir, int target_height, int target_width);

/// Center-crop to the target aspect then bilinear resize.
ImageTensor resize_image(const ImageTensor& image, int target_height, int target_width);

} // namespace tscc::harness
