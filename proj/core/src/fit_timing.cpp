// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/fit_timing.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include "specsep/error.hpp"

namespace specsep {

namespace {

using Clock = std::chrono::steady_clock;

double
median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

FitTiming
time_fit_paths(const Raster& image, const GeometryBuffers& buffers,
               const FitTimingOptions& options)
{
    require(options.repeats > 0, "repeats must be positive");
    require(options.pca_iterations > 0, "pca_iterations must be positive");
    options.retinex.validate();
    options.fit.validate();
    const PCATextureBasis basis = make_synthetic_pca_basis(
        options.pca_resolution, options.pca_rank, options.seed);

    RetinexConfig log_only = options.retinex;
    log_only.normalization = TextureNormalization::None;

    FitTiming out;
    std::vector<double> msr, pca;
    for (int r = 0; r < options.repeats; ++r) {
        const auto t0 = Clock::now();
        const TextureMap tex = multi_scale_retinex(image, log_only);
        const Raster albedo = normalize_texture(
            tex.log_albedo, options.retinex.normalization, buffers.mask);
        const SHCoefficients coeffs
            = fit_sh_coefficients(image, albedo, buffers, options.fit);
        const auto t1 = Clock::now();
        const PCAFitResult fit = fit_pca_texture_baseline(
            image, buffers, basis, options.pca_iterations, 0.0);
        const auto t2 = Clock::now();
        msr.push_back(std::chrono::duration<double>(t1 - t0).count());
        pca.push_back(std::chrono::duration<double>(t2 - t1).count());
        out.pca_iterations = fit.iterations;
        (void)coeffs;
    }
    out.msr_s = median(msr);
    out.pca_s = median(pca);
    return out;
}

}  // namespace specsep
