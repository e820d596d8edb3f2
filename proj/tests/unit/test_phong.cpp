// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "specsep/error.hpp"
#include "specsep/phong.hpp"
#include "specsep/scene.hpp"

using namespace specsep;

namespace {

Vec3
random_unit(std::mt19937_64& gen)
{
    std::normal_distribution<double> d;
    return normalize({d(gen), d(gen), d(gen)});
}

// Straight scalar transcription of the three shading terms for one channel.
double
phong_scalar(const Vec3& n, const Vec3& l, const Vec3& v, double amb,
             double dir, double t, double e)
{
    const double nl = n.x * l.x + n.y * l.y + n.z * l.z;
    const double rx = 2 * nl * n.x - l.x, ry = 2 * nl * n.y - l.y,
                 rz = 2 * nl * n.z - l.z;
    const double rv = rx * v.x + ry * v.y + rz * v.z;
    return amb * t + std::max(nl, 0.0) * dir * t
           + std::pow(std::max(rv, 0.0), e) * dir * t;
}

RenderedScene
front_lit_sphere(double exponent, unsigned components)
{
    SceneSpec s;
    s.mesh.kind = MeshSpec::Kind::Sphere;
    s.width = s.height = 128;
    s.texture.kind = TextureSpec::Kind::Constant;
    s.phong.exponent = exponent;
    s.components = components;
    return render_scene_spec(s);
}

}  // namespace

TEST(Reflect, AlignedAndGrazing)
{
    const Vec3 l = normalize({0.3, -0.2, 0.9});
    EXPECT_NEAR(length(reflect(l, l) - l), 0.0, 1e-15);
    const Vec3 n{0, 0, 1};
    const Vec3 g{1, 0, 0};
    EXPECT_EQ(reflect(n, g), -g);
}

TEST(Reflect, PreservesLength)
{
    std::mt19937_64 gen(61);
    for (int i = 0; i < 1000; ++i)
        EXPECT_NEAR(length(reflect(random_unit(gen), random_unit(gen))), 1.0,
                    1e-12);
}

TEST(ShadePixel, AlignedCase)
{
    PhongParams p;
    p.ambient = {0, 0, 0};
    p.direct = {1, 1, 1};
    p.exponent = 37.0;
    const Rgb c = shade_pixel({0, 0, 1}, {1, 1, 1}, p);
    for (double v : c)
        EXPECT_DOUBLE_EQ(v, 2.0);
}

TEST(ShadePixel, GrazingLightBehindView)
{
    PhongParams p;
    p.ambient = {0, 0, 0};
    p.direct = {0.3, 0.6, 0.9};
    p.light_dir = {1, 0, 0};
    p.view_dir = {-1, 0, 0};
    const Rgb t{0.5, 0.4, 0.2};
    const Rgb c = shade_pixel({0, 0, 1}, t, p);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(c[k], p.direct[k] * t[k], 1e-15);
}

TEST(ShadePixel, HandEvaluatedExample)
{
    PhongParams p;
    p.ambient = {0.2, 0.2, 0.2};
    p.direct = {1, 1, 1};
    p.light_dir = {0.6, 0, 0.8};
    p.exponent = 4.0;
    const Rgb c = shade_pixel({0, 0, 1}, {0.5, 0.5, 0.5}, p);
    const double expect
        = phong_scalar({0, 0, 1}, {0.6, 0, 0.8}, {0, 0, 1}, 0.2, 1.0, 0.5, 4.0);
    EXPECT_NEAR(expect, 0.7048, 1e-12);
    for (double v : c)
        EXPECT_NEAR(v, expect, 1e-12);
}

TEST(ShadePixel, MatchesScalarTranscription)
{
    std::mt19937_64 gen(62);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int i = 0; i < 500; ++i) {
        PhongParams p;
        p.light_dir = random_unit(gen);
        p.view_dir = random_unit(gen);
        p.ambient = {u(gen), u(gen), u(gen)};
        p.direct = {u(gen), u(gen), u(gen)};
        p.exponent = 1.0 + 60.0 * u(gen);
        const Vec3 n = random_unit(gen);
        const Rgb t{u(gen), u(gen), u(gen)};
        const Rgb c = shade_pixel(n, t, p);
        for (int k = 0; k < 3; ++k)
            EXPECT_NEAR(c[k],
                        phong_scalar(n, p.light_dir, p.view_dir, p.ambient[k],
                                     p.direct[k], t[k], p.exponent),
                        1e-12);
    }
}

TEST(ShadePixel, ComponentsAreAdditive)
{
    std::mt19937_64 gen(63);
    for (int i = 0; i < 200; ++i) {
        PhongParams p;
        p.light_dir = random_unit(gen);
        const Vec3 n = random_unit(gen);
        const Rgb t{0.3, 0.5, 0.7};
        const Rgb all = shade_pixel(n, t, p);
        const Rgb a = shade_pixel(n, t, p, kAmbient);
        const Rgb d = shade_pixel(n, t, p, kDiffuse);
        const Rgb s = shade_pixel(n, t, p, kSpecular);
        for (int k = 0; k < 3; ++k)
            EXPECT_NEAR(all[k], a[k] + d[k] + s[k], 1e-15);
    }
}

TEST(PhongParams, RejectsBadValues)
{
    PhongParams p;
    p.exponent = 0.0;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.ambient[1] = -0.1;
    EXPECT_THROW(p.validate(), Error);
}

TEST(RenderScene, AmbientOnlyIsScaledTexture)
{
    SceneSpec s;
    s.width = s.height = 96;
    s.phong.ambient = {0.37, 0.37, 0.37};
    s.components = kAmbient;
    auto r = render_scene_spec(s);
    Raster tex = sample_texture_image(r.texture_uv, r.buffers);
    for (std::size_t p = 0; p < r.buffers.pixel_count(); ++p)
        for (int c = 0; c < 3; ++c)
            EXPECT_NEAR(r.image.at(p, c),
                        r.buffers.mask[p] ? 0.37 * tex.at(p, c) : 0.0, 1e-15);
}

TEST(RenderScene, ComponentRendersSumToImage)
{
    SceneSpec s;
    s.width = s.height = 96;
    s.phong.light_dir = normalize({0.3, 0.2, 1.0});
    auto r = render_scene_spec(s);
    EXPECT_LT(specsep::testing::max_abs_diff(r.image,
                                             r.ambient + r.diffuse + r.specular),
              1e-14);
}

TEST(RenderScene, HighlightCentredAndNarrowing)
{
    double previous = 1e9;
    for (double e : {8.0, 16.0, 64.0}) {
        auto r = front_lit_sphere(e, kSpecular);
        const Raster& s = r.specular_light;
        double peak = 0.0, w = 0.0, cx = 0.0, cy = 0.0;
        for (int y = 0; y < s.height(); ++y)
            for (int x = 0; x < s.width(); ++x) {
                const double v = s.at(x, y, 0);
                peak = std::max(peak, v);
                w += v;
                cx += v * (x + 0.5);
                cy += v * (y + 0.5);
            }
        EXPECT_NEAR(cx / w, 64.0, 0.5) << e;
        EXPECT_NEAR(cy / w, 64.0, 0.5) << e;
        int above = 0;
        for (double v : s.plane(0))
            above += v >= 0.5 * peak;
        const double half_width = std::sqrt(above / 3.14159265);
        EXPECT_LT(half_width, previous) << e;
        previous = half_width;
    }
}
