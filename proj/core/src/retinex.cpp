// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/retinex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specsep/error.hpp"

namespace specsep {

std::string
to_string(TextureNormalization rule)
{
    return rule == TextureNormalization::ExpMinMax ? "exp-minmax" : "none";
}

TextureNormalization
texture_normalization_from_string(const std::string& s)
{
    if (s == "exp-minmax")
        return TextureNormalization::ExpMinMax;
    if (s == "none")
        return TextureNormalization::None;
    fail(ErrorKind::InvalidArgument, "unknown texture normalization '" + s + "'");
}

void
RetinexConfig::validate() const
{
    require(!sigmas.empty(), "retinex needs at least one sigma");
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        require(sigmas[i] > 0.0, "retinex sigmas must be positive");
        if (i > 0)
            require(sigmas[i] > sigmas[i - 1],
                    "retinex sigmas must be strictly increasing");
    }
    require(epsilon > 0.0, "retinex epsilon must be positive");
}

Raster
single_scale_retinex(const Raster& image, double sigma, double epsilon)
{
    return log_map(image, epsilon)
           - log_map(gaussian_blur(image, GaussianSpec{sigma}), epsilon);
}

TextureMap
multi_scale_retinex(const Raster& image, const RetinexConfig& config)
{
    config.validate();
    const Raster log_image = log_map(image, config.epsilon);
    Raster sum(image.width(), image.height(), image.channels());
    for (double sigma : config.sigmas) {
        const Raster ssr
            = log_image
              - log_map(gaussian_blur(image, GaussianSpec{sigma}),
                        config.epsilon);
        sum = sum + ssr;
    }
    TextureMap out;
    out.log_albedo = (1.0 / double(config.sigmas.size())) * sum;
    out.albedo = normalize_texture(out.log_albedo, config.normalization);
    return out;
}

Raster
normalize_texture(const Raster& log_albedo, TextureNormalization rule,
                  std::span<const std::uint8_t> mask)
{
    require(mask.empty() || mask.size() == log_albedo.pixel_count(),
            "texture mask size mismatch");
    require(log_albedo.all_finite(), "log albedo must be finite");
    const auto selected = [&](std::size_t p) {
        return mask.empty() || mask[p] != 0;
    };

    Raster out(log_albedo.width(), log_albedo.height(), log_albedo.channels(),
               1.0);
    const std::size_t n = log_albedo.pixel_count();
    for (int c = 0; c < log_albedo.channels(); ++c) {
        if (rule == TextureNormalization::None) {
            for (std::size_t p = 0; p < n; ++p)
                if (selected(p))
                    out.at(p, c) = std::max(std::exp(log_albedo.at(p, c)),
                                            kTextureFloor);
            continue;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t p = 0; p < n; ++p)
            if (selected(p)) {
                const double a = std::exp(log_albedo.at(p, c));
                lo = std::min(lo, a);
                hi = std::max(hi, a);
            }
        // Blur round-off leaves ~1e-16 ripples on constant input; treat a
        // channel as constant when its range is at round-off level.
        if (!(hi - lo > 1e-9 * std::max(1.0, hi)))
            continue;
        const double scale = (1.0 - kTextureFloor) / (hi - lo);
        for (std::size_t p = 0; p < n; ++p)
            if (selected(p)) {
                const double a = std::exp(log_albedo.at(p, c));
                out.at(p, c) = std::clamp(kTextureFloor + (a - lo) * scale,
                                          kTextureFloor, 1.0);
            }
    }
    return out;
}

}  // namespace specsep
