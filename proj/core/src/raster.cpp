// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/raster.hpp"

#include <algorithm>
#include <cmath>

#include "specsep/error.hpp"

namespace specsep {

const char*
to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Fit: return "fit error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Internal: return "internal error";
    }
    return "unknown error";
}

Raster::Raster(int width, int height, int channels, double fill)
    : m_width(width), m_height(height), m_channels(channels)
{
    require(width > 0 && height > 0, "raster dimensions must be positive");
    require(channels >= 1, "raster needs at least one channel");
    m_data.assign(std::size_t(width) * height * channels, fill);
}

bool
Raster::all_finite() const noexcept
{
    return std::all_of(m_data.begin(), m_data.end(),
                       [](double v) { return std::isfinite(v); });
}

int
GaussianSpec::radius() const
{
    return int(std::ceil(3.0 * sigma));
}

std::vector<double>
gaussian_kernel(const GaussianSpec& spec)
{
    require(spec.sigma > 0.0 && std::isfinite(spec.sigma),
            "gaussian sigma must be positive");
    const int r = spec.radius();
    std::vector<double> k(2 * r + 1);
    const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
    double sum = 0.0;
    for (int j = -r; j <= r; ++j) {
        k[j + r] = std::exp(-double(j) * j * inv2s2);
        sum += k[j + r];
    }
    for (double& w : k)
        w /= sum;
    return k;
}

int
reflect_index(long i, int n)
{
    if (n == 1)
        return 0;
    const long period = 2L * n - 2;
    long m = i % period;
    if (m < 0)
        m += period;
    return int(m < n ? m : period - m);
}

namespace {

// Symmetric kernel: out = k0 * e[x] + sum_j kj * (e[x-j] + e[x+j]).
void
blur_rows(std::span<const double> in, std::span<double> out, int width,
          int height, const std::vector<double>& k, int r)
{
    std::vector<double> ext(std::size_t(width) + 2 * r);
    for (int y = 0; y < height; ++y) {
        const double* row = in.data() + std::size_t(y) * width;
        for (long i = 0; i < long(ext.size()); ++i)
            ext[i] = row[reflect_index(i - r, width)];
        double* dst = out.data() + std::size_t(y) * width;
        const double* e = ext.data() + r;
        for (int x = 0; x < width; ++x)
            dst[x] = k[r] * e[x];
        for (int j = 1; j <= r; ++j) {
            const double kj = k[r + j];
            const double* lo = e - j;
            const double* hi = e + j;
            for (int x = 0; x < width; ++x)
                dst[x] += kj * (lo[x] + hi[x]);
        }
    }
}

void
blur_columns(std::span<const double> in, std::span<double> out, int width,
             int height, const std::vector<double>& k, int r)
{
    for (int y = 0; y < height; ++y) {
        double* dst = out.data() + std::size_t(y) * width;
        const double* center = in.data() + std::size_t(y) * width;
        for (int x = 0; x < width; ++x)
            dst[x] = k[r] * center[x];
        for (int j = 1; j <= r; ++j) {
            const double kj = k[r + j];
            const double* up = in.data()
                               + std::size_t(reflect_index(y - j, height))
                                     * width;
            const double* down = in.data()
                                 + std::size_t(reflect_index(y + j, height))
                                       * width;
            for (int x = 0; x < width; ++x)
                dst[x] += kj * (up[x] + down[x]);
        }
    }
}

template<class Op>
Raster
map_samples(const Raster& image, Op op)
{
    Raster out = image;
    for (double& v : out.data())
        v = op(v);
    return out;
}

template<class Op>
Raster
zip_samples(const Raster& a, const Raster& b, Op op)
{
    require(a.same_shape(b), "raster shape mismatch");
    Raster out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = op(o[i], bd[i]);
    return out;
}

}  // namespace

Raster
gaussian_blur(const Raster& image, const GaussianSpec& spec)
{
    const std::vector<double> k = gaussian_kernel(spec);
    const int r = spec.radius();
    Raster out(image.width(), image.height(), image.channels());
    std::vector<double> tmp(image.pixel_count());
    for (int c = 0; c < image.channels(); ++c) {
        blur_rows(image.plane(c), tmp, image.width(), image.height(), k, r);
        blur_columns(tmp, out.plane(c), image.width(), image.height(), k, r);
    }
    return out;
}

Raster
log_map(const Raster& image, double epsilon)
{
    require(epsilon > 0.0, "log epsilon must be positive");
    return map_samples(image,
                       [epsilon](double v) {
                           return std::log(std::max(v, epsilon));
                       });
}

Raster
exp_map(const Raster& image)
{
    return map_samples(image, [](double v) { return std::exp(v); });
}

Raster
flip_horizontal(const Raster& image)
{
    Raster out = image;
    for (int c = 0; c < image.channels(); ++c)
        for (int y = 0; y < image.height(); ++y)
            for (int x = 0; x < image.width(); ++x)
                out.at(image.width() - 1 - x, y, c) = image.at(x, y, c);
    return out;
}

Raster
operator+(const Raster& a, const Raster& b)
{
    return zip_samples(a, b, [](double x, double y) { return x + y; });
}

Raster
operator-(const Raster& a, const Raster& b)
{
    return zip_samples(a, b, [](double x, double y) { return x - y; });
}

Raster
operator*(const Raster& a, const Raster& b)
{
    return zip_samples(a, b, [](double x, double y) { return x * y; });
}

Raster
operator*(double k, const Raster& a)
{
    return map_samples(a, [k](double v) { return k * v; });
}

Raster
clamp(const Raster& image, double lo, double hi)
{
    return map_samples(image,
                       [lo, hi](double v) { return std::clamp(v, lo, hi); });
}

}  // namespace specsep
