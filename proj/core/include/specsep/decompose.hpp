// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specsep/geometry.hpp"
#include "specsep/raster.hpp"
#include "specsep/retinex.hpp"
#include "specsep/sh.hpp"

namespace specsep {

enum class TextureSource { Msr, Provided };

std::string to_string(TextureSource s);
TextureSource texture_source_from_string(const std::string& s);

struct DecomposeConfig {
    RetinexConfig retinex;
    FitOptions fit;
    int uv_resolution = 128;
    TextureSource texture_source = TextureSource::Msr;
    double epsilon_div = kTextureFloor;

    void validate() const;
};

/// (I - (H gamma) T) / max(T, epsilon_div) under the mask, 0 elsewhere.
/// Uses the unclamped SH shading.
Raster extract_specular(const Raster& image, const Raster& albedo,
                        const SHCoefficients& coeffs,
                        const GeometryBuffers& buffers,
                        double epsilon_div = kTextureFloor);

struct Decomposition {
    TextureMap texture;
    Raster ambient;
    Raster direct;            // clamped at 0
    Raster direct_unclamped;
    Raster specular;
    Raster uv_texture;
    Raster uv_direct;
    Raster uv_specular;
    std::vector<std::uint8_t> uv_coverage;
    SHCoefficients coeffs;
    std::vector<std::uint8_t> mask;
    std::size_t clamped_direct_samples = 0;
    TextureSource texture_source = TextureSource::Msr;
    /// Wall time per stage in seconds, in execution order.
    std::vector<std::pair<std::string, double>> timings;
};

/// Texture, SH fit, ambient/direct split, specular residual, then UV
/// flattening. `provided_albedo` is required when the config selects
/// TextureSource::Provided and must be >= kTextureFloor under the mask.
/// Errors are rethrown as StageError tagged with the failing stage.
Decomposition decompose(const Raster& image, const GeometryBuffers& buffers,
                        const DecomposeConfig& config,
                        const Raster* provided_albedo = nullptr);

struct ExportOptions {
    bool include_timings = false;
};

/// Writes texture, direct, specular and their UV variants as PNG (each
/// affinely mapped from its [lo, hi] range, recorded in meta.json) plus
/// coeffs.json and meta.json.
void export_decomposition(const Decomposition& dec,
                          const DecomposeConfig& config,
                          const std::filesystem::path& dir,
                          const ExportOptions& options = {});

/// Reads a map written by export_decomposition back to its original range
/// (up to 8-bit quantization).
Raster load_exported_map(const std::filesystem::path& dir,
                         const std::string& name);

}  // namespace specsep
