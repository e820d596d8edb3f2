// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "specsep/phong.hpp"
#include "specsep/raster.hpp"

namespace specsep {

/// Seeded skin-like albedo: a base tint modulated by a few oriented
/// sinusoids and fine per-texel grain.
struct ProceduralAlbedo {
    Rgb base{0.78, 0.58, 0.47};
    double contrast = 0.35;   // relative amplitude of the sinusoid pattern
    double min_frequency = 6.0;  // cycles per unit uv
    double max_frequency = 18.0;
    int waves = 4;
    double grain = 0.05;      // relative amplitude of per-texel noise
    double floor = 0.05;      // albedo never drops below this
    std::uint64_t seed = 0;

    void validate() const;
};

void to_json(nlohmann::json& j, const ProceduralAlbedo& p);
void from_json(const nlohmann::json& j, ProceduralAlbedo& p);

/// resolution x resolution x 3 albedo in [floor, 1].
Raster make_procedural_albedo(int resolution, const ProceduralAlbedo& params);

}  // namespace specsep
