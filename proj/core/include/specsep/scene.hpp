// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "specsep/geometry.hpp"
#include "specsep/phong.hpp"
#include "specsep/texture.hpp"

namespace specsep {

void to_json(nlohmann::json& j, const Vec3& v);
void from_json(const nlohmann::json& j, Vec3& v);
void to_json(nlohmann::json& j, const SyntheticFaceParams& p);
void from_json(const nlohmann::json& j, SyntheticFaceParams& p);
void to_json(nlohmann::json& j, const PhongParams& p);
void from_json(const nlohmann::json& j, PhongParams& p);

struct MeshSpec {
    enum class Kind { Face, Sphere, Obj };
    Kind kind = Kind::Face;
    SyntheticFaceParams face;
    int subdivisions = 5;  // sphere only
    std::string path;      // obj only, relative to the scene file
};

struct TextureSpec {
    enum class Kind { Procedural, File, Constant };
    Kind kind = Kind::Procedural;
    ProceduralAlbedo procedural;
    int resolution = 256;
    std::string path;  // file only
    Rgb constant{0.6, 0.6, 0.6};
};

/// Everything needed to render one image. The Phong view direction is
/// always the camera view direction.
struct SceneSpec {
    MeshSpec mesh;
    Vec3 view_dir{0.0, 0.0, 1.0};
    Vec3 up_hint{0.0, 1.0, 0.0};
    int width = 256;
    int height = 256;
    double margin = 4.0;
    TextureSpec texture;
    PhongParams phong;
    unsigned components = kAllComponents;
};

void to_json(nlohmann::json& j, const SceneSpec& s);
/// Unknown keys are rejected.
void from_json(const nlohmann::json& j, SceneSpec& s);

SceneSpec load_scene_spec(const std::filesystem::path& path);

struct RenderedScene {
    Mesh mesh;
    Camera camera;
    GeometryBuffers buffers;
    Raster texture_uv;
    Raster albedo;    // texture sampled per pixel, 1 outside the mask
    Raster image;     // sum of the selected components
    Raster ambient;   // per-component renders
    Raster diffuse;
    Raster specular;
    /// Ground-truth specular term divided by texture: s[p] * Dir.
    Raster specular_light;
};

Mesh build_mesh(const MeshSpec& spec, const std::filesystem::path& base_dir);
Raster build_texture(const TextureSpec& spec,
                     const std::filesystem::path& base_dir);
Camera scene_camera(const SceneSpec& spec, const Mesh& mesh);

RenderedScene render_scene_spec(const SceneSpec& spec,
                                const std::filesystem::path& base_dir = {});

/// Renders the scene's mesh, camera and texture with different Phong
/// parameters, reusing rasterized buffers.
RenderedScene shade_rendered(const RenderedScene& base,
                             const PhongParams& params,
                             unsigned components = kAllComponents);

std::string to_string(Component c);

}  // namespace specsep
