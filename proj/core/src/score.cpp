// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specsep/error.hpp"
#include "specsep/sh.hpp"

namespace specsep {

std::string
to_string(ScoreMode m)
{
    return m == ScoreMode::Free ? "free" : "coupled";
}

ScoreMode
score_mode_from_string(const std::string& s)
{
    if (s == "free")
        return ScoreMode::Free;
    if (s == "coupled")
        return ScoreMode::Coupled;
    fail(ErrorKind::InvalidArgument, "unknown score mode '" + s + "'");
}

namespace {

struct Pixels {
    std::vector<Vec3> normal;
    std::vector<double> y;
    double sum_y2 = 0.0;
};

/// base^e, by repeated squaring when e is a positive integer.
double
power(double base, double e)
{
    if (e == std::floor(e) && e >= 1.0 && e <= 1024.0) {
        unsigned k = unsigned(e);
        double r = 1.0, b = base;
        while (k) {
            if (k & 1u)
                r *= b;
            b *= b;
            k >>= 1u;
        }
        return r;
    }
    return std::pow(base, e);
}

}  // namespace

PhysicsScore
physics_residual_score(const Decomposition& dec, const GeometryBuffers& buffers,
                       const PhysicsScoreOptions& options)
{
    require(!options.exponents.empty(), "need at least one exponent");
    require(dec.specular.width() == buffers.width
                && dec.specular.height() == buffers.height
                && dec.specular.channels() == 3,
            "specular map does not match the geometry buffers");
    Pixels px;
    for (std::size_t p = 0; p < buffers.pixel_count(); ++p) {
        if (!buffers.mask[p])
            continue;
        double y = 0.0;
        for (int c = 0; c < 3; ++c)
            y += kLuma[c] * dec.specular.at(p, c);
        px.normal.push_back(buffers.normal[p]);
        px.y.push_back(y);
        px.sum_y2 += y * y;
    }
    const std::size_t m = px.y.size();
    if (m == 0)
        fail(ErrorKind::Geometry, "mask is empty");
    const Vec3 v = normalize(buffers.view_dir);
    const double rms_y = std::sqrt(px.sum_y2 / double(m));
    if (px.sum_y2 == 0.0)
        return {};

    PhysicsScore best;
    double best_res = std::numeric_limits<double>::infinity();
    std::vector<double> rv(m);

    auto fill_rv = [&](const Vec3& l) {
        for (std::size_t i = 0; i < m; ++i) {
            const Vec3& n = px.normal[i];
            const double d = dot(2.0 * dot(n, l) * n - l, v);
            rv[i] = d > 0.0 ? d : 0.0;
        }
    };

    if (options.mode == ScoreMode::Free) {
        const Mesh grid = make_icosphere(options.light_subdivisions);
        for (const Vec3& lraw : grid.vertices) {
            const Vec3 l = normalize(lraw);
            fill_rv(l);
            for (double e : options.exponents) {
                double sby = 0.0, sbb = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double b = power(rv[i], e);
                    sby += b * px.y[i];
                    sbb += b * b;
                }
                const double g = sbb > 0.0 ? sby / sbb : 0.0;
                const double res = std::max(px.sum_y2 - g * sby, 0.0);
                if (res < best_res) {
                    best_res = res;
                    best = {0.0, e, l, g};
                }
            }
        }
    } else {
        double dl[3] = {0.0, 0.0, 0.0};
        for (int c = 0; c < 3; ++c) {
            dl[0] += kLuma[c] * dec.coeffs.gamma[3][c];
            dl[1] += kLuma[c] * dec.coeffs.gamma[1][c];
            dl[2] += kLuma[c] * dec.coeffs.gamma[2][c];
        }
        const Vec3 dir_light = sh_constants::c1 * Vec3{dl[0], dl[1], dl[2]};
        const double g = length(dir_light);
        const Vec3 l = g > 0.0 ? (1.0 / g) * dir_light : v;
        fill_rv(l);
        for (double e : options.exponents) {
            double res = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double r = px.y[i] - g * power(rv[i], e);
                res += r * r;
            }
            if (res < best_res) {
                best_res = res;
                best = {0.0, e, l, g};
            }
        }
    }
    best.score = std::sqrt(best_res / double(m)) / (rms_y + 1e-9);
    return best;
}

}  // namespace specsep
