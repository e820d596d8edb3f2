// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/sh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "specsep/error.hpp"
#include "specsep/internal/sh_solver.hpp"

namespace specsep {

SHBasis
sh_basis_unchecked(const Vec3& n)
{
    using namespace sh_constants;
    return {c0,
            c1 * n.y,
            c1 * n.z,
            c1 * n.x,
            c2 * n.x * n.y,
            c2 * n.y * n.z,
            c3 * (3.0 * n.z * n.z - 1.0),
            c2 * n.x * n.z,
            c4 * (n.x * n.x - n.y * n.y)};
}

SHBasis
sh_basis(const Vec3& normal)
{
    const double len = length(normal);
    if (!(std::abs(len - 1.0) <= 1e-6))
        fail(ErrorKind::InvalidArgument,
             "sh_basis needs a unit normal, got length " + std::to_string(len));
    return sh_basis_unchecked(normal);
}

void
to_json(nlohmann::json& j, const SHCoefficients& coeffs)
{
    j = nlohmann::json::array();
    for (const auto& row : coeffs.gamma)
        j.push_back({row[0], row[1], row[2]});
}

void
from_json(const nlohmann::json& j, SHCoefficients& coeffs)
{
    if (!j.is_array() || j.size() != std::size_t(kShCount))
        fail(ErrorKind::InvalidArgument, "SH coefficients must be a 9x3 array");
    for (int k = 0; k < kShCount; ++k) {
        const auto& row = j[k];
        if (!row.is_array() || row.size() != 3)
            fail(ErrorKind::InvalidArgument,
                 "SH coefficients must be a 9x3 array");
        for (int c = 0; c < 3; ++c)
            coeffs.gamma[k][c] = row[c].get<double>();
    }
}

void
FitOptions::validate() const
{
    require(trim_fraction >= 0.0 && trim_fraction < 1.0,
            "trim_fraction must lie in [0, 1)");
    require(refit_passes >= 0, "refit_passes must be non-negative");
}

namespace detail {

MaskedBasis
masked_basis(const GeometryBuffers& buffers)
{
    MaskedBasis out;
    const std::size_t n = buffers.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        if (!buffers.mask[p])
            continue;
        out.pixel.push_back(p);
        out.h.push_back(sh_basis_unchecked(buffers.normal[p]));
    }
    return out;
}

std::array<double, kShCount>
solve_normal_equations(const double* upper, const double* rhs)
{
    Eigen::Matrix<double, kShCount, kShCount> a;
    Eigen::Matrix<double, kShCount, 1> b;
    int u = 0;
    for (int i = 0; i < kShCount; ++i) {
        b(i) = rhs[i];
        for (int j = i; j < kShCount; ++j, ++u) {
            a(i, j) = upper[u];
            a(j, i) = upper[u];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, kShCount, kShCount>>
        eig(a, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(kShCount - 1);
    if (!(lo > 0.0) || !(hi / lo <= kSingularCondition))
        fail(ErrorKind::Fit,
             "singular normal matrix (eigenvalues " + std::to_string(lo)
                 + " .. " + std::to_string(hi) + ")");
    const Eigen::Matrix<double, kShCount, 1> x = a.ldlt().solve(b);
    std::array<double, kShCount> out{};
    for (int i = 0; i < kShCount; ++i)
        out[i] = x(i);
    return out;
}

std::array<double, kShCount>
fit_channel(const MaskedBasis& basis, std::span<const double> image,
            std::span<const double> texture,
            std::span<const std::size_t> rows)
{
    constexpr int kUpper = kShCount * (kShCount + 1) / 2;
    double upper[kUpper] = {};
    double rhs[kShCount] = {};
    for (std::size_t r : rows) {
        const std::size_t p = basis.pixel[r];
        const double t = texture[p];
        double a[kShCount];
        for (int k = 0; k < kShCount; ++k)
            a[k] = basis.h[r][k] * t;
        const double y = image[p];
        int u = 0;
        for (int i = 0; i < kShCount; ++i) {
            rhs[i] += a[i] * y;
            for (int j = i; j < kShCount; ++j, ++u)
                upper[u] += a[i] * a[j];
        }
    }
    return solve_normal_equations(upper, rhs);
}

}  // namespace detail

namespace {

void
check_fit_inputs(const Raster& image, const Raster& texture,
                 const GeometryBuffers& buffers)
{
    require(image.width() == buffers.width && image.height() == buffers.height,
            "image and geometry buffers differ in size");
    require(image.same_shape(texture), "image and texture differ in shape");
    require(image.channels() == 1 || image.channels() == 3,
            "image must have 1 or 3 channels");
}

}  // namespace

SHCoefficients
fit_sh_coefficients(const Raster& image, const Raster& texture,
                    const GeometryBuffers& buffers, const FitOptions& options)
{
    check_fit_inputs(image, texture, buffers);
    options.validate();

    const detail::MaskedBasis basis = detail::masked_basis(buffers);
    const std::size_t n = basis.pixel.size();
    if (n < std::size_t(kShCount))
        fail(ErrorKind::Fit, "need at least 9 masked pixels, got "
                                 + std::to_string(n));

    SHCoefficients out;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t(0));
    const std::size_t trim_count
        = options.robust ? std::size_t(std::floor(options.trim_fraction
                                                  * double(n)))
                         : 0;

    for (int c = 0; c < image.channels(); ++c) {
        const auto img = image.plane(c);
        const auto tex = texture.plane(c);
        for (std::size_t r = 0; r < n; ++r)
            if (!(tex[basis.pixel[r]] > 0.0))
                fail(ErrorKind::InvalidArgument,
                     "texture must be strictly positive under the mask");

        auto gamma = detail::fit_channel(basis, img, tex, all);

        if (trim_count > 0) {
            std::vector<double> residual(n);
            std::vector<std::size_t> order(n);
            std::vector<std::uint8_t> dropped(n);
            std::vector<std::size_t> kept;
            for (int pass = 0; pass < options.refit_passes; ++pass) {
                for (std::size_t r = 0; r < n; ++r) {
                    const std::size_t p = basis.pixel[r];
                    double s = 0.0;
                    for (int k = 0; k < kShCount; ++k)
                        s += basis.h[r][k] * gamma[k];
                    residual[r] = img[p] - s * tex[p];
                }
                std::iota(order.begin(), order.end(), std::size_t(0));
                std::partial_sort(order.begin(),
                                  order.begin() + std::ptrdiff_t(trim_count),
                                  order.end(),
                                  [&](std::size_t a, std::size_t b) {
                                      if (residual[a] != residual[b])
                                          return residual[a] > residual[b];
                                      return a < b;
                                  });
                std::fill(dropped.begin(), dropped.end(), std::uint8_t(0));
                for (std::size_t i = 0; i < trim_count; ++i)
                    if (residual[order[i]] > 0.0)
                        dropped[order[i]] = 1;
                kept.clear();
                for (std::size_t r = 0; r < n; ++r)
                    if (!dropped[r])
                        kept.push_back(r);
                gamma = detail::fit_channel(basis, img, tex, kept);
            }
        }
        for (int k = 0; k < kShCount; ++k)
            out.gamma[k][c] = gamma[k];
    }
    if (image.channels() == 1)
        for (auto& row : out.gamma)
            row[1] = row[2] = row[0];
    return out;
}

Raster
sh_shading(const SHCoefficients& coeffs, const GeometryBuffers& buffers,
           int channels)
{
    Raster out(buffers.width, buffers.height, channels, 0.0);
    const std::size_t n = buffers.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        if (!buffers.mask[p])
            continue;
        const SHBasis h = sh_basis_unchecked(buffers.normal[p]);
        for (int c = 0; c < channels; ++c)
            out.at(p, c) = coeffs.shading(h, c);
    }
    return out;
}

AmbientDirect
split_ambient_direct(const SHCoefficients& coeffs,
                     const GeometryBuffers& buffers, int channels)
{
    AmbientDirect out;
    out.ambient = Raster(buffers.width, buffers.height, channels, 0.0);
    out.direct = out.ambient;
    out.direct_unclamped = out.ambient;
    const std::size_t n = buffers.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        if (!buffers.mask[p])
            continue;
        const SHBasis h = sh_basis_unchecked(buffers.normal[p]);
        for (int c = 0; c < channels; ++c) {
            out.ambient.at(p, c) = h[0] * coeffs.gamma[0][c];
            double d = 0.0;
            for (int k = 1; k < kShCount; ++k)
                d += h[k] * coeffs.gamma[k][c];
            out.direct_unclamped.at(p, c) = d;
            if (d < 0.0) {
                ++out.clamped_samples;
                d = 0.0;
            }
            out.direct.at(p, c) = d;
        }
    }
    return out;
}

}  // namespace specsep
