// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "specsep/geometry.hpp"
#include "specsep/raster.hpp"
#include "specsep/vec.hpp"

namespace specsep {

using Rgb = std::array<double, 3>;

struct PhongParams {
    Rgb ambient{0.2, 0.2, 0.2};
    Rgb direct{0.8, 0.8, 0.8};
    Vec3 light_dir{0.0, 0.0, 1.0};  // toward the light
    Vec3 view_dir{0.0, 0.0, 1.0};   // toward the viewer
    double exponent = 16.0;

    /// Throws unless both directions are unit, the exponent is positive and
    /// radiances are non-negative.
    void validate() const;
};

enum Component : unsigned {
    kAmbient = 1u,
    kDiffuse = 2u,
    kSpecular = 4u,
    kAllComponents = 7u,
};

/// 2 <n, l> n - l.
inline Vec3
reflect(const Vec3& normal, const Vec3& light)
{
    return 2.0 * dot(normal, light) * normal - light;
}

/// max(<n, l>, 0).
double diffuse_factor(const Vec3& normal, const PhongParams& params);

/// max(<r, v>, 0)^exponent with r = reflect(n, l).
double specular_factor(const Vec3& normal, const PhongParams& params);

Rgb shade_pixel(const Vec3& normal, const Rgb& texture,
                const PhongParams& params,
                unsigned components = kAllComponents);

/// Nearest-texel lookup of a UV-space texture.
Rgb sample_texture(const Raster& texture_uv, const Vec2& uv);

/// Texture sampled at every masked pixel; `fill` elsewhere.
Raster sample_texture_image(const Raster& texture_uv,
                            const GeometryBuffers& buffers,
                            double fill = 0.0);

/// Shades every masked pixel; background stays 0.
Raster shade_buffers(const GeometryBuffers& buffers, const Raster& texture_uv,
                     const PhongParams& params,
                     unsigned components = kAllComponents);

Raster render_scene(const Mesh& mesh, const Camera& camera, int width,
                    int height, const Raster& texture_uv,
                    const PhongParams& params,
                    unsigned components = kAllComponents);

/// Single-channel map of specular_factor under the mask.
Raster specular_factor_map(const GeometryBuffers& buffers,
                           const PhongParams& params);

}  // namespace specsep
