// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specsep/geometry.hpp"
#include "specsep/raster.hpp"
#include "specsep/vec.hpp"

namespace specsep {

inline constexpr int kShCount = 9;

namespace sh_constants {
inline constexpr double c0 = 0.28209479;
inline constexpr double c1 = 0.48860251;
inline constexpr double c2 = 1.09254843;
inline constexpr double c3 = 0.31539157;
inline constexpr double c4 = 0.54627422;
}  // namespace sh_constants

using SHBasis = std::array<double, kShCount>;

/// Real order-2 harmonics in the order 1, y, z, x, xy, yz, 3z^2-1, xz,
/// x^2-y^2. Throws InvalidArgument if |normal| differs from 1 by more than
/// 1e-6.
SHBasis sh_basis(const Vec3& normal);

/// Same values without the unit-length check.
SHBasis sh_basis_unchecked(const Vec3& normal);

struct SHCoefficients {
    /// gamma[k][c]: weight of harmonic k for channel c.
    std::array<std::array<double, 3>, kShCount> gamma{};

    double shading(const SHBasis& h, int c) const
    {
        double s = 0.0;
        for (int k = 0; k < kShCount; ++k)
            s += h[k] * gamma[k][c];
        return s;
    }

    friend bool operator==(const SHCoefficients&,
                           const SHCoefficients&) = default;
};

void to_json(nlohmann::json& j, const SHCoefficients& coeffs);
void from_json(const nlohmann::json& j, SHCoefficients& coeffs);

struct FitOptions {
    bool robust = true;
    /// Fraction of masked pixels with the largest positive residual that
    /// is dropped before each re-fit.
    double trim_fraction = 0.10;
    /// Number of trimmed re-fits when robust is set. Each pass ranks the
    /// residuals of the previous fit over all masked pixels.
    int refit_passes = 3;

    void validate() const;
};

/// Condition number (eigenvalue ratio of the normal matrix) above which a
/// fit is reported as singular.
inline constexpr double kSingularCondition = 1e12;

/// Per-channel least squares of image ~ (H gamma) * texture over the
/// masked pixels. Throws a Fit error when fewer than 9 pixels are masked
/// or the normal matrix is singular.
SHCoefficients fit_sh_coefficients(const Raster& image, const Raster& texture,
                                   const GeometryBuffers& buffers,
                                   const FitOptions& options = {});

/// H gamma evaluated at every masked pixel; 0 elsewhere. No clamping.
Raster sh_shading(const SHCoefficients& coeffs, const GeometryBuffers& buffers,
                  int channels = 3);

struct AmbientDirect {
    Raster ambient;           // h_1 gamma_1 under the mask
    Raster direct;            // sum over k >= 2, clamped at 0
    Raster direct_unclamped;  // same sum without the clamp
    std::size_t clamped_samples = 0;
};

AmbientDirect split_ambient_direct(const SHCoefficients& coeffs,
                                   const GeometryBuffers& buffers,
                                   int channels = 3);

struct PCATextureBasis {
    int resolution = 0;  // texel grid is resolution x resolution
    Raster mean;         // resolution x resolution x 3
    /// K orthonormal directions, each of length resolution^2 * 3 laid out
    /// like Raster data.
    std::vector<std::vector<double>> axes;

    int rank() const noexcept { return int(axes.size()); }
};

/// Smooth mean texture plus K orthonormal axes obtained by QR of seeded
/// Gaussian vectors.
PCATextureBasis make_synthetic_pca_basis(int resolution, int rank,
                                         std::uint64_t seed);

/// T = mean + sum_k beta_k axes_k, sampled at each masked pixel's uv texel.
Raster pca_texture(const PCATextureBasis& basis,
                   const std::vector<double>& beta,
                   const GeometryBuffers& buffers);

struct PCAFitResult {
    SHCoefficients gamma;
    std::vector<double> beta;
    int iterations = 0;
    std::vector<double> residual_history;  // RMS after each iteration
    double wall_time_s = 0.0;
};

/// Alternates a gamma solve with the texture fixed and a beta solve with
/// the shading fixed. Stops after max_iters or when the relative change in
/// RMS residual drops below tol (tol <= 0 disables early stopping). Three
/// consecutive residual increases raise a Fit error.
PCAFitResult fit_pca_texture_baseline(const Raster& image,
                                      const GeometryBuffers& buffers,
                                      const PCATextureBasis& basis,
                                      int max_iters, double tol);

}  // namespace specsep
