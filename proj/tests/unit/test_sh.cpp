// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "specsep/error.hpp"
#include "specsep/geometry.hpp"
#include "specsep/scene.hpp"
#include "specsep/sh.hpp"

using namespace specsep;
using specsep::testing::relative_l2;

namespace {

GeometryBuffers
sphere_buffers(int size)
{
    static const Mesh sphere
        = compute_vertex_normals(assign_spherical_uvs(make_icosphere(5)));
    return rasterize(sphere, Camera::framing({0, 0, 1}, 1.0, size, size, 2.0),
                     size, size);
}

// The nine real harmonics with the library's published 8-digit constants.
std::array<double, 9>
harmonics(const Vec3& n)
{
    const double k0 = 0.28209479, k1 = 0.48860251, k2 = 1.09254843,
                 k3 = 0.31539157, k4 = 0.54627422;
    return {k0,
            k1 * n.y,
            k1 * n.z,
            k1 * n.x,
            k2 * n.x * n.y,
            k2 * n.y * n.z,
            k3 * (3.0 * n.z * n.z - 1.0),
            k2 * n.x * n.z,
            k4 * (n.x * n.x - n.y * n.y)};
}

// Normalization constants derived from the spherical integrals.
std::array<double, 5>
closed_form_constants()
{
    const double pi = std::numbers::pi;
    return {0.5 * std::sqrt(1.0 / pi), std::sqrt(3.0 / (4.0 * pi)),
            0.5 * std::sqrt(15.0 / pi), 0.25 * std::sqrt(5.0 / pi),
            0.25 * std::sqrt(15.0 / pi)};
}

SHCoefficients
random_coeffs(std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> d(-0.3, 0.3);
    SHCoefficients g;
    for (int k = 0; k < kShCount; ++k)
        for (int c = 0; c < 3; ++c)
            g.gamma[k][c] = (k == 0 ? 2.0 : 0.0) + d(gen);
    return g;
}

Raster
synth(const SHCoefficients& g, const Raster& tex, const GeometryBuffers& buf)
{
    Raster img(buf.width, buf.height, 3);
    for (std::size_t p = 0; p < buf.pixel_count(); ++p) {
        if (!buf.mask[p])
            continue;
        const auto h = harmonics(buf.normal[p]);
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 9; ++k)
                s += h[k] * g.gamma[k][c];
            img.at(p, c) = s * tex.at(p, c);
        }
    }
    return img;
}

double
residual_ss(const SHCoefficients& g, const Raster& img, const Raster& tex,
            const GeometryBuffers& buf)
{
    Raster model = synth(g, tex, buf);
    double s = 0.0;
    for (std::size_t p = 0; p < buf.pixel_count(); ++p)
        if (buf.mask[p])
            for (int c = 0; c < 3; ++c)
                s += std::pow(img.at(p, c) - model.at(p, c), 2);
    return s;
}

double
max_gamma_diff(const SHCoefficients& a, const SHCoefficients& b)
{
    double m = 0.0;
    for (int k = 0; k < kShCount; ++k)
        for (int c = 0; c < 3; ++c)
            m = std::max(m, std::abs(a.gamma[k][c] - b.gamma[k][c]));
    return m;
}

FitOptions
plain()
{
    FitOptions o;
    o.robust = false;
    return o;
}

}  // namespace

TEST(ShBasis, AxisValue)
{
    const auto h = sh_basis({0, 0, 1});
    using namespace sh_constants;
    const std::array<double, 9> expect{c0, 0, c1, 0, 0, 0, c3 * 2, 0, 0};
    for (int k = 0; k < 9; ++k)
        EXPECT_DOUBLE_EQ(h[k], expect[k]);
}

TEST(ShBasis, MatchesPolynomialForms)
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> d;
    for (int i = 0; i < 200; ++i) {
        const Vec3 n = normalize({d(gen), d(gen), d(gen)});
        const auto a = sh_basis(n);
        const auto b = harmonics(n);
        for (int k = 0; k < 9; ++k)
            EXPECT_NEAR(a[k], b[k], 1e-15);
    }
}

TEST(ShBasis, ConstantsMatchClosedForms)
{
    const auto k = closed_form_constants();
    using namespace sh_constants;
    const std::array<double, 5> c{c0, c1, c2, c3, c4};
    for (int i = 0; i < 5; ++i)
        EXPECT_NEAR(c[i], k[i], 5e-9);
}

TEST(ShBasis, MonteCarloGramIsIdentity)
{
    std::mt19937_64 gen(5);
    std::normal_distribution<double> d;
    std::array<std::array<double, 9>, 9> gram{};
    const int n = 1'000'000;
    for (int s = 0; s < n; ++s) {
        const auto h = sh_basis(normalize({d(gen), d(gen), d(gen)}));
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                gram[i][j] += h[i] * h[j];
    }
    const double scale = 4.0 * std::numbers::pi / n;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            EXPECT_NEAR(gram[i][j] * scale, i == j ? 1.0 : 0.0, 1e-2);
}

TEST(ShBasis, RejectsNonUnitNormal)
{
    EXPECT_THROW(sh_basis({0, 0, 1.1}), Error);
}

TEST(ShFit, ExactModelRecovery)
{
    auto buf = sphere_buffers(256);
    auto tex = specsep::testing::random_raster(256, 256, 3, 41, 0.2, 1.0);
    auto truth = random_coeffs(42);
    auto img = synth(truth, tex, buf);
    EXPECT_LT(max_gamma_diff(fit_sh_coefficients(img, tex, buf, plain()), truth),
              1e-8);
    EXPECT_LT(max_gamma_diff(fit_sh_coefficients(img, tex, buf), truth), 1e-8);
}

TEST(ShFit, AmbientOnly)
{
    auto buf = sphere_buffers(64);
    auto tex = specsep::testing::random_raster(64, 64, 3, 43, 0.2, 1.0);
    auto g = fit_sh_coefficients(0.35 * tex, tex, buf, plain());
    for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(g.gamma[0][c], 0.35 / sh_constants::c0, 1e-9);
        for (int k = 1; k < 9; ++k)
            EXPECT_NEAR(g.gamma[k][c], 0.0, 1e-9);
    }
}

TEST(ShFit, IsTheLeastSquaresMinimum)
{
    auto buf = sphere_buffers(48);
    auto tex = specsep::testing::random_raster(48, 48, 3, 44, 0.2, 1.0);
    auto img = specsep::testing::random_raster(48, 48, 3, 45, 0.0, 1.0);
    auto g = fit_sh_coefficients(img, tex, buf, plain());
    const double best = residual_ss(g, img, tex, buf);
    std::mt19937_64 gen(46);
    std::normal_distribution<double> d(0.0, 1e-3);
    for (int trial = 0; trial < 30; ++trial) {
        SHCoefficients h = g;
        for (auto& row : h.gamma)
            for (double& v : row)
                v += d(gen);
        EXPECT_GT(residual_ss(h, img, tex, buf), best);
    }
}

TEST(ShFit, ScalesWithImage)
{
    auto buf = sphere_buffers(48);
    auto tex = specsep::testing::random_raster(48, 48, 3, 47, 0.2, 1.0);
    auto img = specsep::testing::random_raster(48, 48, 3, 48, 0.0, 1.0);
    auto a = fit_sh_coefficients(img, tex, buf, plain());
    auto b = fit_sh_coefficients(3.0 * img, tex, buf, plain());
    for (int k = 0; k < 9; ++k)
        for (int c = 0; c < 3; ++c)
            EXPECT_NEAR(b.gamma[k][c], 3.0 * a.gamma[k][c], 1e-10);
}

TEST(ShFit, ZeroTrimEqualsPlainFit)
{
    auto buf = sphere_buffers(48);
    auto tex = specsep::testing::random_raster(48, 48, 3, 49, 0.2, 1.0);
    auto img = specsep::testing::random_raster(48, 48, 3, 50, 0.0, 1.0);
    FitOptions trimmed;
    trimmed.trim_fraction = 0.0;
    EXPECT_EQ(fit_sh_coefficients(img, tex, buf, trimmed),
              fit_sh_coefficients(img, tex, buf, plain()));
}

TEST(ShFit, RobustFitIgnoresNarrowHighlight)
{
    SceneSpec s;
    s.mesh.kind = MeshSpec::Kind::Sphere;
    s.phong.exponent = 64.0;
    auto r = render_scene_spec(s);
    std::size_t lit = 0;
    for (std::size_t p = 0; p < r.buffers.pixel_count(); ++p)
        lit += r.buffers.mask[p] && r.specular_light.at(p, 0) > 1e-3;
    ASSERT_LT(double(lit), 0.05 * double(r.buffers.covered_count()));
    auto g = fit_sh_coefficients(r.image, r.albedo, r.buffers);
    Raster recon = sh_shading(g, r.buffers) * r.albedo;
    EXPECT_LT(relative_l2(recon, r.ambient + r.diffuse, r.buffers.mask), 0.02);
}

TEST(ShFit, DegenerateInputsAreFitErrors)
{
    GeometryBuffers few(4, 1);
    for (std::size_t p = 0; p < 4; ++p) {
        few.mask[p] = 1;
        few.normal[p] = {0, 0, 1};
    }
    Raster img(4, 1, 3, 0.5), tex(4, 1, 3, 0.5);
    try {
        fit_sh_coefficients(img, tex, few);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Fit);
    }
    GeometryBuffers flat(8, 8);
    for (std::size_t p = 0; p < 64; ++p) {
        flat.mask[p] = 1;
        flat.normal[p] = {0, 0, 1};
    }
    Raster img2(8, 8, 3, 0.5), tex2(8, 8, 3, 0.5);
    try {
        fit_sh_coefficients(img2, tex2, flat);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Fit);
    }
}

TEST(ShSplit, PartitionsShading)
{
    auto buf = sphere_buffers(64);
    auto g = random_coeffs(51);
    auto split = split_ambient_direct(g, buf);
    auto full = sh_shading(g, buf);
    EXPECT_LT(specsep::testing::max_abs_diff(split.ambient + split.direct_unclamped,
                                             full),
              1e-12);
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < split.direct.size(); ++i) {
        EXPECT_GE(split.direct.data()[i], 0.0);
        EXPECT_EQ(split.direct.data()[i],
                  std::max(split.direct_unclamped.data()[i], 0.0));
        clamped += split.direct_unclamped.data()[i] < 0.0;
    }
    EXPECT_EQ(split.clamped_samples, clamped);
}

TEST(ShSplit, AmbientOnlyCoefficientsGiveNoDirect)
{
    auto buf = sphere_buffers(32);
    SHCoefficients g;
    g.gamma[0] = {1.0, 2.0, 3.0};
    auto split = split_ambient_direct(g, buf);
    EXPECT_EQ(split.direct, Raster(32, 32, 3));
    EXPECT_EQ(split.clamped_samples, 0u);
}

TEST(PcaBaseline, RecoversKnownTextureAndLight)
{
    auto buf = sphere_buffers(96);
    auto basis = make_synthetic_pca_basis(32, 6, 52);
    std::vector<double> beta{0.8, -0.5, 0.3, 0.2, -0.7, 0.4};
    auto truth = random_coeffs(53);
    auto img = synth(truth, pca_texture(basis, beta, buf), buf);
    auto fit = fit_pca_texture_baseline(img, buf, basis, 20, 0.0);
    EXPECT_LE(fit.iterations, 20);
    for (int k = 0; k < 9; ++k)
        for (int c = 0; c < 3; ++c)
            EXPECT_NEAR(fit.gamma.gamma[k][c], truth.gamma[k][c],
                        1e-4 * std::max(1.0, std::abs(truth.gamma[k][c])));
    for (std::size_t k = 0; k < beta.size(); ++k)
        EXPECT_NEAR(fit.beta[k], beta[k], 1e-4 * std::max(1.0, std::abs(beta[k])));
}

TEST(PcaBaseline, RankZeroIsThePlainShFit)
{
    auto buf = sphere_buffers(64);
    auto basis = make_synthetic_pca_basis(32, 0, 54);
    auto img = specsep::testing::random_raster(64, 64, 3, 55, 0.0, 1.0);
    auto fit = fit_pca_texture_baseline(img, buf, basis, 5, 0.0);
    auto ref = fit_sh_coefficients(img, pca_texture(basis, {}, buf), buf, plain());
    EXPECT_LT(max_gamma_diff(fit.gamma, ref), 1e-12);
    EXPECT_TRUE(fit.beta.empty());
}

TEST(PcaBasis, AxesAreOrthonormal)
{
    auto basis = make_synthetic_pca_basis(16, 5, 56);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < basis.axes[i].size(); ++t)
                s += basis.axes[i][t] * basis.axes[j][t];
            EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
        }
}
