// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "specsep/decompose.hpp"
#include "specsep/geometry.hpp"

namespace specsep {

enum class ScoreMode {
    /// Grid search over light (icosphere), exponent and a closed-form gain.
    Free,
    /// Light direction and gain taken from the fitted first-order
    /// harmonics (Dir * l = c1 * (gamma_x, gamma_y, gamma_z)); only the
    /// exponent is searched.
    Coupled,
};

std::string to_string(ScoreMode m);
ScoreMode score_mode_from_string(const std::string& s);

struct PhysicsScoreOptions {
    ScoreMode mode = ScoreMode::Free;
    std::vector<double> exponents{4, 8, 16, 32, 64, 128};
    int light_subdivisions = 2;  // 162 candidate lights
};

struct PhysicsScore {
    double score = 0.0;  // normalized residual RMS; higher = less physical
    double exponent = 0.0;
    Vec3 light{};
    double gain = 0.0;
};

/// Rec. 709 luminance weights.
inline constexpr double kLuma[3] = {0.2126, 0.7152, 0.0722};

/// Fits g * max(<r(l, n_p), v>, 0)^n to the luminance of the specular map
/// and returns min RMS residual / (RMS(specular luminance) + 1e-9).
PhysicsScore physics_residual_score(const Decomposition& dec,
                                    const GeometryBuffers& buffers,
                                    const PhysicsScoreOptions& options = {});

}  // namespace specsep
