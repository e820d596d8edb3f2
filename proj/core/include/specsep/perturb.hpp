// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "specsep/raster.hpp"

namespace specsep {

enum class Perturbation { None, GaussianBlur, JpegLike, GaussianNoise };

std::string to_string(Perturbation p);
Perturbation perturbation_from_string(const std::string& s);

inline constexpr double kPerturbBlurSigma = 1.0;
inline constexpr double kPerturbNoiseSigma = 0.02;
inline constexpr int kPerturbJpegQuality = 75;

/// Standard JPEG luminance quantization table (quality 50), row-major.
extern const std::array<int, 64> kJpegLuminanceTable;

/// Table scaled to `quality` with the usual IJG rule, entries >= 1.
std::array<int, 64> jpeg_quant_table(int quality);

/// Per channel and per 8x8 block: scale to [0,255], subtract 128,
/// orthonormal DCT-II, divide by the table and round half away from zero,
/// multiply back, inverse DCT, add 128, scale to [0,1] and clamp. Partial
/// edge blocks are padded by edge replication.
Raster jpeg_like(const Raster& image, int quality = kPerturbJpegQuality);

/// Blur with sigma 1, JPEG-like quality 75, or additive N(0, 0.02^2) noise
/// clamped to [0,1]. Deterministic for a fixed seed.
Raster apply_perturbation(const Raster& image, Perturbation kind,
                          std::uint64_t seed);

}  // namespace specsep
