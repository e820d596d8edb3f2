// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "specsep/raster.hpp"

namespace specsep {

enum class ImageFormat { Ppm, Png };

/// Picks the format from the file extension (.ppm/.pgm -> Ppm, .png -> Png).
ImageFormat format_from_path(const std::filesystem::path& path);

/// Loads an 8-bit image and maps bytes to [0,1] as v / 255. PPM accepts
/// binary P6 (RGB) and P5 (gray); PNG accepts gray, RGB, palette and alpha
/// variants (alpha is dropped) at bit depth <= 8, non-interlaced.
Raster load_raster(const std::filesystem::path& path, ImageFormat format);
Raster load_raster(const std::filesystem::path& path);

/// Writes 1- or 3-channel images as 8-bit, byte = floor(255 v + 0.5).
/// Samples outside [0,1] are an error unless clamp is set.
void save_raster(const Raster& image, const std::filesystem::path& path,
                 ImageFormat format, bool clamp = false);
void save_raster(const Raster& image, const std::filesystem::path& path,
                 bool clamp = false);

}  // namespace specsep
