// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specsep/decompose.hpp"
#include "specsep/geometry.hpp"
#include "specsep/phong.hpp"
#include "specsep/texture.hpp"

namespace specsep {

enum class FakeMode {
    None,
    WrongExponent,
    WrongSpecularLight,
    TransplantedSpecular,
    ScaledSpecular,
};

inline constexpr std::array<FakeMode, 4> kFakeModes = {
    FakeMode::WrongExponent, FakeMode::WrongSpecularLight,
    FakeMode::TransplantedSpecular, FakeMode::ScaledSpecular};

std::string to_string(FakeMode m);
FakeMode fake_mode_from_string(const std::string& s);

inline constexpr int kManifestVersion = 1;

struct DatasetConfig {
    int n_real = 400;
    int n_fake = 400;
    std::uint64_t seed = 0;
    /// Relative weights of wrong_exponent, wrong_specular_light,
    /// transplanted_specular and scaled_specular.
    std::array<double, 4> mode_weights{1.0, 1.0, 1.0, 1.0};
    int image_size = 64;
    int mesh_resolution = 32;
    int texture_resolution = 128;
    DecomposeConfig decompose = default_decompose();

    void validate() const;

    static DecomposeConfig default_decompose();
};

void to_json(nlohmann::json& j, const DatasetConfig& c);
void from_json(const nlohmann::json& j, DatasetConfig& c);

/// Everything that determines one rendered scene.
struct SceneDraw {
    SyntheticFaceParams face;
    ProceduralAlbedo albedo;
    Vec3 view_dir{0.0, 0.0, 1.0};
    PhongParams phong;
    double smoothness = 0.5;
};

void to_json(nlohmann::json& j, const SceneDraw& s);
void from_json(const nlohmann::json& j, SceneDraw& s);

struct SampleManifest {
    std::string id;
    int label = 0;  // 1 = fake
    FakeMode mode = FakeMode::None;
    std::uint64_t seed = 0;
    SceneDraw scene;
    int twin = -1;   // index of the real sample sharing diffuse and ambient
    int donor = -1;  // real sample whose specular is transplanted
    double fake_exponent = 0.0;
    double fake_scale = 0.0;
    Vec3 fake_light{};
    std::string image_path;          // relative to the dataset directory
    std::string albedo_path;
    std::string decomposition_dir;
};

void to_json(nlohmann::json& j, const SampleManifest& m);
void from_json(const nlohmann::json& j, SampleManifest& m);

/// Draws a real scene from a seed. The exponent is one of 8, 16, 32, 64,
/// tied to the albedo grain through the smoothness parameter, and the light
/// is a vertex of the 162-direction icosphere within 20 degrees of the view.
SceneDraw draw_scene(std::uint64_t seed, const DatasetConfig& config);

/// Deterministic sample list: reals first, then fakes whose twin is
/// fake_index mod n_real.
std::vector<SampleManifest> plan_dataset(const DatasetConfig& config);

struct GeneratedSample {
    GeometryBuffers buffers;
    Raster image;    // 8-bit quantized, as stored on disk
    Raster albedo;   // 8-bit quantized, 1 outside the mask
    Raster ambient;  // component renders before quantization
    Raster diffuse;
    Raster specular;
};

/// Rasterized buffers of a scene draw at the configured image size.
GeometryBuffers scene_buffers(const SceneDraw& scene,
                              const DatasetConfig& config);

GeneratedSample render_sample(const std::vector<SampleManifest>& plan,
                              std::size_t index, const DatasetConfig& config);

/// Renders every sample, decomposes it with the provided albedo and writes
/// image.png, albedo.png and the decomposition bundle per sample plus
/// manifest.json (which embeds the dataset config).
std::vector<SampleManifest> generate_dataset(const DatasetConfig& config,
                                             const std::filesystem::path& dir);

struct LoadedManifest {
    DatasetConfig config;
    std::vector<SampleManifest> samples;
};

LoadedManifest load_manifest(const std::filesystem::path& dir);

/// Quantizes to 8 bits exactly as save_raster would (clamped).
Raster quantize8(const Raster& image);

}  // namespace specsep
