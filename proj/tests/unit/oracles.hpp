// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "specsep/raster.hpp"

namespace specsep::testing {

inline Raster
random_raster(int w, int h, int c, std::uint64_t seed, double lo = 0.0,
              double hi = 1.0)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Raster r(w, h, c);
    for (double& v : r.data())
        v = dist(gen);
    return r;
}

inline double
max_abs_diff(const Raster& a, const Raster& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

/// sqrt(sum (a-b)^2 / sum b^2) over masked pixels, all channels.
inline double
relative_l2(const Raster& a, const Raster& b,
            const std::vector<std::uint8_t>& mask)
{
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < a.pixel_count(); ++p) {
        if (!mask[p])
            continue;
        for (int c = 0; c < a.channels(); ++c) {
            const double d = a.at(p, c) - b.at(p, c);
            num += d * d;
            den += b.at(p, c) * b.at(p, c);
        }
    }
    return std::sqrt(num / den);
}

inline double
pearson(const Raster& a, const Raster& b, const std::vector<std::uint8_t>& mask)
{
    double sa = 0.0, sb = 0.0, n = 0.0;
    for (std::size_t p = 0; p < a.pixel_count(); ++p) {
        if (!mask[p])
            continue;
        for (int c = 0; c < a.channels(); ++c) {
            sa += a.at(p, c);
            sb += b.at(p, c);
            n += 1.0;
        }
    }
    sa /= n;
    sb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t p = 0; p < a.pixel_count(); ++p) {
        if (!mask[p])
            continue;
        for (int c = 0; c < a.channels(); ++c) {
            const double x = a.at(p, c) - sa;
            const double y = b.at(p, c) - sb;
            sab += x * y;
            saa += x * x;
            sbb += y * y;
        }
    }
    return sab / std::sqrt(saa * sbb);
}

// Mirror index without repeating the edge sample, by repeated folding.
inline int
fold(long i, int n)
{
    if (n == 1)
        return 0;
    while (i < 0 || i >= n) {
        if (i < 0)
            i = -i;
        if (i >= n)
            i = 2L * (n - 1) - i;
    }
    return int(i);
}

inline Raster
dense_blur(const Raster& img, double sigma)
{
    const int r = int(std::ceil(3.0 * sigma));
    std::vector<double> g(2 * r + 1);
    double s = 0.0;
    for (int j = -r; j <= r; ++j)
        s += g[j + r] = std::exp(-0.5 * j * j / (sigma * sigma));
    Raster out(img.width(), img.height(), img.channels());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) {
                double acc = 0.0;
                for (int dy = -r; dy <= r; ++dy)
                    for (int dx = -r; dx <= r; ++dx)
                        acc += g[dy + r] * g[dx + r] / (s * s)
                               * img.at(fold(x + dx, img.width()),
                                        fold(y + dy, img.height()), c);
                out.at(x, y, c) = acc;
            }
    return out;
}

inline std::string
read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

inline std::filesystem::path
scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("specsep_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace specsep::testing
