// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "specsep/error.hpp"
#include "specsep/retinex.hpp"

using namespace specsep;
using specsep::testing::dense_blur;
using specsep::testing::max_abs_diff;
using specsep::testing::random_raster;

namespace {

// Smooth horizontal illumination ramp times an 8-pixel checkerboard.
void
ramp_checker(int n, double lo, double hi, Raster& image, Raster& albedo)
{
    image = Raster(n, n, 1);
    albedo = Raster(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double l = lo + (hi - lo) * x / double(n - 1);
            const double r = ((x / 8 + y / 8) % 2) ? 0.8 : 0.3;
            albedo.at(x, y, 0) = r;
            image.at(x, y, 0) = l * r;
        }
}

Raster
remove_mean(const Raster& r)
{
    double m = 0.0;
    for (double v : r.data())
        m += v;
    m /= double(r.size());
    Raster out = r;
    for (double& v : out.data())
        v -= m;
    return out;
}

}  // namespace

TEST(SingleScaleRetinex, ConstantGivesZero)
{
    Raster img(24, 24, 3, 0.42);
    EXPECT_LT(max_abs_diff(single_scale_retinex(img, 15.0), Raster(24, 24, 3)),
              1e-12);
}

TEST(SingleScaleRetinex, MatchesDirectFormula)
{
    auto img = random_raster(40, 30, 1, 21, 0.05, 1.0);
    const double eps = 1e-4;
    Raster blurred = dense_blur(img, 6.0);
    Raster ref(40, 30, 1);
    for (std::size_t i = 0; i < ref.size(); ++i)
        ref.data()[i] = std::log(std::max(img.data()[i], eps))
                        - std::log(std::max(blurred.data()[i], eps));
    EXPECT_LT(max_abs_diff(single_scale_retinex(img, 6.0, eps), ref), 1e-10);
}

TEST(SingleScaleRetinex, TracksLogAlbedoUnderSmoothLight)
{
    Raster img, albedo;
    ramp_checker(64, 0.2, 1.0, img, albedo);
    auto out = single_scale_retinex(img, 15.0);
    std::vector<std::uint8_t> all(img.pixel_count(), 1);
    EXPECT_GT(specsep::testing::pearson(out, log_map(albedo), all), 0.95);
}

TEST(MultiScaleRetinex, SingleScaleEqualsSsr)
{
    auto img = random_raster(32, 32, 3, 22, 0.01, 1.0);
    RetinexConfig cfg;
    cfg.sigmas = {9.0};
    EXPECT_EQ(multi_scale_retinex(img, cfg).log_albedo,
              single_scale_retinex(img, 9.0, cfg.epsilon));
}

TEST(MultiScaleRetinex, ConstantImage)
{
    auto tm = multi_scale_retinex(Raster(20, 20, 3, 0.3));
    EXPECT_LT(max_abs_diff(tm.log_albedo, Raster(20, 20, 3)), 1e-12);
    EXPECT_EQ(tm.albedo, Raster(20, 20, 3, 1.0));
}

TEST(MultiScaleRetinex, InvariantToGlobalGain)
{
    auto img = random_raster(48, 40, 3, 23, 0.05, 0.5);
    auto a = multi_scale_retinex(img).log_albedo;
    auto b = multi_scale_retinex(1.9 * img).log_albedo;
    EXPECT_LT(max_abs_diff(a, b), 1e-12);
}

TEST(MultiScaleRetinex, DefaultScalesRecoverLogAlbedo)
{
    Raster img, albedo;
    ramp_checker(128, 0.6, 0.9, img, albedo);
    auto out = remove_mean(multi_scale_retinex(img).log_albedo);
    auto ref = remove_mean(log_map(albedo));
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        s += (out.data()[i] - ref.data()[i]) * (out.data()[i] - ref.data()[i]);
    EXPECT_LT(std::sqrt(s / double(out.size())), 0.1);
}

TEST(MultiScaleRetinex, RejectsBadConfig)
{
    RetinexConfig cfg;
    cfg.sigmas = {};
    EXPECT_THROW(multi_scale_retinex(Raster(4, 4, 1, 0.5), cfg), Error);
    cfg.sigmas = {80.0, 15.0};
    EXPECT_THROW(multi_scale_retinex(Raster(4, 4, 1, 0.5), cfg), Error);
}

TEST(NormalizeTexture, ZeroLogMapsToOne)
{
    EXPECT_EQ(normalize_texture(Raster(5, 5, 3), TextureNormalization::ExpMinMax),
              Raster(5, 5, 3, 1.0));
}

TEST(NormalizeTexture, EndpointsOfAffineMap)
{
    Raster log_a(2, 1, 1);
    log_a.at(0, 0, 0) = std::log(0.25);
    log_a.at(1, 0, 0) = 0.0;
    auto t = normalize_texture(log_a, TextureNormalization::ExpMinMax);
    EXPECT_NEAR(t.at(0, 0, 0), kTextureFloor, 1e-15);
    EXPECT_NEAR(t.at(1, 0, 0), 1.0, 1e-15);
}

TEST(NormalizeTexture, MonotoneAndBounded)
{
    auto log_a = random_raster(16, 16, 1, 24, -3.0, 1.0);
    auto t = normalize_texture(log_a, TextureNormalization::ExpMinMax);
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_GE(t.data()[i], kTextureFloor);
        EXPECT_LE(t.data()[i], 1.0);
        for (std::size_t j = 0; j < t.size(); j += 17) {
            if (log_a.data()[i] < log_a.data()[j]) {
                EXPECT_LE(t.data()[i], t.data()[j]);
            }
        }
    }
}

TEST(NormalizeTexture, MaskSelectsRangeAndFillsOutside)
{
    Raster log_a(3, 1, 1);
    log_a.at(0, 0, 0) = -1.0;
    log_a.at(1, 0, 0) = 0.0;
    log_a.at(2, 0, 0) = -10.0;
    std::vector<std::uint8_t> mask{1, 1, 0};
    auto t = normalize_texture(log_a, TextureNormalization::ExpMinMax, mask);
    EXPECT_NEAR(t.at(0, 0, 0), kTextureFloor, 1e-15);
    EXPECT_NEAR(t.at(1, 0, 0), 1.0, 1e-15);
    EXPECT_EQ(t.at(2, 0, 0), 1.0);
}

TEST(NormalizeTexture, NoneIsFlooredExp)
{
    Raster log_a(2, 1, 1);
    log_a.at(0, 0, 0) = -20.0;
    log_a.at(1, 0, 0) = std::log(0.5);
    auto t = normalize_texture(log_a, TextureNormalization::None);
    EXPECT_EQ(t.at(0, 0, 0), kTextureFloor);
    EXPECT_NEAR(t.at(1, 0, 0), 0.5, 1e-15);
}
