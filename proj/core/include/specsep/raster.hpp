// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace specsep {

/// H x W x C image of doubles. Samples are stored planar: each channel is a
/// contiguous row-major plane, so index = (c * height + y) * width + x.
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, int channels, double fill = 0.0);

    int width() const noexcept { return m_width; }
    int height() const noexcept { return m_height; }
    int channels() const noexcept { return m_channels; }
    std::size_t pixel_count() const noexcept
    {
        return std::size_t(m_width) * std::size_t(m_height);
    }
    std::size_t size() const noexcept { return m_data.size(); }
    bool empty() const noexcept { return m_data.empty(); }

    double& at(int x, int y, int c)
    {
        return m_data[(std::size_t(c) * m_height + y) * m_width + x];
    }
    double at(int x, int y, int c) const
    {
        return m_data[(std::size_t(c) * m_height + y) * m_width + x];
    }

    /// Sample c of the pixel with linear index p = y * width + x.
    double& at(std::size_t p, int c) { return m_data[c * pixel_count() + p]; }
    double at(std::size_t p, int c) const
    {
        return m_data[c * pixel_count() + p];
    }

    std::span<double> plane(int c)
    {
        return {m_data.data() + c * pixel_count(), pixel_count()};
    }
    std::span<const double> plane(int c) const
    {
        return {m_data.data() + c * pixel_count(), pixel_count()};
    }

    std::span<double> data() noexcept { return m_data; }
    std::span<const double> data() const noexcept { return m_data; }

    bool same_shape(const Raster& other) const noexcept
    {
        return m_width == other.m_width && m_height == other.m_height
               && m_channels == other.m_channels;
    }

    bool all_finite() const noexcept;

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int m_width = 0;
    int m_height = 0;
    int m_channels = 0;
    std::vector<double> m_data;
};

/// Gaussian blur parameters. Radius is ceil(3 sigma); the truncated kernel
/// is renormalized to unit sum. Boundaries reflect without repeating the
/// edge sample (period 2n - 2), which stays well defined for radii larger
/// than the image.
struct GaussianSpec {
    double sigma = 1.0;

    int radius() const;
};

/// Normalized 1-D kernel of length 2 * radius + 1.
std::vector<double> gaussian_kernel(const GaussianSpec& spec);

/// Maps any integer index into [0, n) by mirror reflection about the edge
/// samples.
int reflect_index(long i, int n);

Raster gaussian_blur(const Raster& image, const GaussianSpec& spec);

inline constexpr double kDefaultLogEpsilon = 1e-4;

/// out = ln(max(in, epsilon)) per sample.
Raster log_map(const Raster& image, double epsilon = kDefaultLogEpsilon);
Raster exp_map(const Raster& image);

Raster flip_horizontal(const Raster& image);

/// Per-channel arithmetic helpers used across the pipeline.
Raster operator+(const Raster& a, const Raster& b);
Raster operator-(const Raster& a, const Raster& b);
Raster operator*(const Raster& a, const Raster& b);
Raster operator*(double k, const Raster& a);

Raster clamp(const Raster& image, double lo, double hi);

}  // namespace specsep
