// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/phong.hpp"

#include <cmath>

#include "specsep/error.hpp"

namespace specsep {

void
PhongParams::validate() const
{
    require(std::abs(length(light_dir) - 1.0) <= 1e-9,
            "light direction must be a unit vector");
    require(std::abs(length(view_dir) - 1.0) <= 1e-9,
            "view direction must be a unit vector");
    require(exponent > 0.0 && std::isfinite(exponent),
            "specular exponent must be positive");
    for (int c = 0; c < 3; ++c)
        require(ambient[c] >= 0.0 && direct[c] >= 0.0,
                "radiances must be non-negative");
}

double
diffuse_factor(const Vec3& normal, const PhongParams& params)
{
    return std::max(dot(normal, params.light_dir), 0.0);
}

double
specular_factor(const Vec3& normal, const PhongParams& params)
{
    const double rv = dot(reflect(normal, params.light_dir), params.view_dir);
    return rv > 0.0 ? std::pow(rv, params.exponent) : 0.0;
}

Rgb
shade_pixel(const Vec3& normal, const Rgb& texture, const PhongParams& params,
            unsigned components)
{
    const double d = components & kDiffuse ? diffuse_factor(normal, params)
                                           : 0.0;
    const double s = components & kSpecular ? specular_factor(normal, params)
                                            : 0.0;
    Rgb out{};
    for (int c = 0; c < 3; ++c) {
        const double a = components & kAmbient ? params.ambient[c] : 0.0;
        out[c] = a * texture[c] + d * params.direct[c] * texture[c]
                 + s * params.direct[c] * texture[c];
    }
    return out;
}

Rgb
sample_texture(const Raster& texture_uv, const Vec2& uv)
{
    const int x = uv_to_texel(uv.x, texture_uv.width());
    const int y = uv_to_texel(uv.y, texture_uv.height());
    Rgb out{};
    for (int c = 0; c < 3; ++c)
        out[c] = texture_uv.at(x, y, texture_uv.channels() == 1 ? 0 : c);
    return out;
}

Raster
sample_texture_image(const Raster& texture_uv, const GeometryBuffers& buffers,
                     double fill)
{
    require(!texture_uv.empty(), "texture is empty");
    Raster out(buffers.width, buffers.height, 3, fill);
    for (std::size_t p = 0; p < buffers.pixel_count(); ++p) {
        if (!buffers.mask[p])
            continue;
        const Rgb t = sample_texture(texture_uv, buffers.uv[p]);
        for (int c = 0; c < 3; ++c)
            out.at(p, c) = t[c];
    }
    return out;
}

Raster
shade_buffers(const GeometryBuffers& buffers, const Raster& texture_uv,
              const PhongParams& params, unsigned components)
{
    params.validate();
    require(!texture_uv.empty(), "texture is empty");
    Raster out(buffers.width, buffers.height, 3, 0.0);
    for (std::size_t p = 0; p < buffers.pixel_count(); ++p) {
        if (!buffers.mask[p])
            continue;
        const Rgb t = sample_texture(texture_uv, buffers.uv[p]);
        const Rgb c = shade_pixel(buffers.normal[p], t, params, components);
        for (int k = 0; k < 3; ++k)
            out.at(p, k) = c[k];
    }
    return out;
}

Raster
render_scene(const Mesh& mesh, const Camera& camera, int width, int height,
             const Raster& texture_uv, const PhongParams& params,
             unsigned components)
{
    return shade_buffers(rasterize(mesh, camera, width, height), texture_uv,
                         params, components);
}

Raster
specular_factor_map(const GeometryBuffers& buffers, const PhongParams& params)
{
    Raster out(buffers.width, buffers.height, 1, 0.0);
    for (std::size_t p = 0; p < buffers.pixel_count(); ++p)
        if (buffers.mask[p])
            out.at(p, 0) = specular_factor(buffers.normal[p], params);
    return out;
}

}  // namespace specsep
