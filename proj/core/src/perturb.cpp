// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specsep/error.hpp"
#include "specsep/random.hpp"

namespace specsep {

const std::array<int, 64> kJpegLuminanceTable = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99,
};

std::string
to_string(Perturbation p)
{
    switch (p) {
    case Perturbation::None: return "none";
    case Perturbation::GaussianBlur: return "gaussian_blur";
    case Perturbation::JpegLike: return "jpeg_like";
    case Perturbation::GaussianNoise: return "gaussian_noise";
    }
    return "?";
}

Perturbation
perturbation_from_string(const std::string& s)
{
    for (Perturbation p : {Perturbation::None, Perturbation::GaussianBlur,
                           Perturbation::JpegLike, Perturbation::GaussianNoise})
        if (to_string(p) == s)
            return p;
    fail(ErrorKind::InvalidArgument, "unknown perturbation '" + s + "'");
}

std::array<int, 64>
jpeg_quant_table(int quality)
{
    require(quality >= 1 && quality <= 100, "quality must lie in [1, 100]");
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<int, 64> q{};
    for (int i = 0; i < 64; ++i)
        q[i] = std::clamp((kJpegLuminanceTable[i] * scale + 50) / 100, 1, 255);
    return q;
}

namespace {

struct DctBasis {
    double m[8][8];  // m[k][n] = a(k) cos((2n+1) k pi / 16)

    DctBasis()
    {
        for (int k = 0; k < 8; ++k) {
            const double a = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int n = 0; n < 8; ++n)
                m[k][n] = a * std::cos((2 * n + 1) * k * std::numbers::pi / 16.0);
        }
    }
};

double
round_half_away(double v)
{
    return v < 0.0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5);
}

}  // namespace

Raster
jpeg_like(const Raster& image, int quality)
{
    static const DctBasis dct;
    const std::array<int, 64> q = jpeg_quant_table(quality);
    const int W = image.width(), H = image.height();
    Raster out(W, H, image.channels());
    double block[8][8], tmp[8][8], coef[8][8];
    for (int c = 0; c < image.channels(); ++c) {
        for (int by = 0; by < H; by += 8) {
            for (int bx = 0; bx < W; bx += 8) {
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x)
                        block[y][x] = 255.0
                                          * image.at(std::min(bx + x, W - 1),
                                                     std::min(by + y, H - 1), c)
                                      - 128.0;
                // rows then columns
                for (int y = 0; y < 8; ++y)
                    for (int k = 0; k < 8; ++k) {
                        double s = 0.0;
                        for (int n = 0; n < 8; ++n)
                            s += dct.m[k][n] * block[y][n];
                        tmp[y][k] = s;
                    }
                for (int k = 0; k < 8; ++k)
                    for (int x = 0; x < 8; ++x) {
                        double s = 0.0;
                        for (int n = 0; n < 8; ++n)
                            s += dct.m[k][n] * tmp[n][x];
                        const double qv = q[k * 8 + x];
                        coef[k][x] = round_half_away(s / qv) * qv;
                    }
                for (int n = 0; n < 8; ++n)
                    for (int x = 0; x < 8; ++x) {
                        double s = 0.0;
                        for (int k = 0; k < 8; ++k)
                            s += dct.m[k][n] * coef[k][x];
                        tmp[n][x] = s;
                    }
                for (int y = 0; y < 8 && by + y < H; ++y)
                    for (int x = 0; x < 8 && bx + x < W; ++x) {
                        double s = 0.0;
                        for (int k = 0; k < 8; ++k)
                            s += dct.m[k][x] * tmp[y][k];
                        out.at(bx + x, by + y, c)
                            = std::clamp((s + 128.0) / 255.0, 0.0, 1.0);
                    }
            }
        }
    }
    return out;
}

Raster
apply_perturbation(const Raster& image, Perturbation kind, std::uint64_t seed)
{
    switch (kind) {
    case Perturbation::None: return image;
    case Perturbation::GaussianBlur:
        return gaussian_blur(image, GaussianSpec{kPerturbBlurSigma});
    case Perturbation::JpegLike: return jpeg_like(image, kPerturbJpegQuality);
    case Perturbation::GaussianNoise: {
        Rng rng(seed);
        Raster out = image;
        for (double& v : out.data())
            v = std::clamp(v + kPerturbNoiseSigma * rng.normal(), 0.0, 1.0);
        return out;
    }
    }
    fail(ErrorKind::Internal, "unhandled perturbation");
}

}  // namespace specsep
