// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "specsep/geometry.hpp"
#include "specsep/raster.hpp"
#include "specsep/retinex.hpp"
#include "specsep/sh.hpp"

namespace specsep {

struct FitTimingOptions {
    RetinexConfig retinex;
    FitOptions fit;
    int pca_rank = 16;
    int pca_iterations = 10;
    int pca_resolution = 128;
    int repeats = 3;
    std::uint64_t seed = 0;  // PCA basis
};

struct FitTiming {
    double msr_s = 0.0;  // MSR texture, normalization and SH fit (median)
    double pca_s = 0.0;  // alternating PCA texture fit (median)
    int pca_iterations = 0;

    /// pca_s / msr_s; above 1 means the MSR path is faster.
    double ratio() const { return pca_s / msr_s; }
};

/// Times both texture/illumination fits on the same input. The PCA basis
/// is built before timing starts and the PCA fit runs a fixed iteration
/// count.
FitTiming time_fit_paths(const Raster& image, const GeometryBuffers& buffers,
                         const FitTimingOptions& options);

}  // namespace specsep
