// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "specsep/raster.hpp"

namespace specsep {

/// Floor of the multiplicative texture; the texture never drops below it.
inline constexpr double kTextureFloor = 1e-3;

enum class TextureNormalization {
    /// a = exp(log_albedo), then per-channel affine map of [min, max] onto
    /// [kTextureFloor, 1]. A constant channel maps to 1.
    ExpMinMax,
    /// a = exp(log_albedo), floored at kTextureFloor, no upper bound.
    None,
};

std::string to_string(TextureNormalization rule);
TextureNormalization texture_normalization_from_string(const std::string& s);

struct RetinexConfig {
    std::vector<double> sigmas{15.0, 80.0, 120.0};
    double epsilon = kDefaultLogEpsilon;
    TextureNormalization normalization = TextureNormalization::ExpMinMax;

    /// Throws if sigmas are empty, non-positive or not strictly increasing.
    void validate() const;
};

struct TextureMap {
    Raster log_albedo;
    Raster albedo;
};

/// log(I) - log(G_sigma * I), per channel.
Raster single_scale_retinex(const Raster& image, double sigma,
                            double epsilon = kDefaultLogEpsilon);

/// Unweighted mean of single-scale outputs over config.sigmas, followed by
/// normalize_texture.
TextureMap multi_scale_retinex(const Raster& image,
                               const RetinexConfig& config = {});

/// Statistics for the min/max rule are taken over the pixels selected by
/// mask (all pixels when mask is empty); unselected pixels are set to 1.
Raster normalize_texture(const Raster& log_albedo, TextureNormalization rule,
                         std::span<const std::uint8_t> mask = {});

}  // namespace specsep
