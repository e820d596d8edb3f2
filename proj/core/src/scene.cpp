// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/scene.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "specsep/error.hpp"
#include "specsep/image_io.hpp"

namespace specsep {

using nlohmann::json;

void
to_json(json& j, const Vec3& v)
{
    j = json::array({v.x, v.y, v.z});
}

void
from_json(const json& j, Vec3& v)
{
    if (!j.is_array() || j.size() != 3)
        fail(ErrorKind::InvalidArgument, "expected a 3-vector, got " + j.dump());
    v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace {

Vec3
unit_from_json(const json& j)
{
    const Vec3 v = j.get<Vec3>();
    if (std::abs(length(v) - 1.0) <= 1e-14)
        return v;
    return normalize(v);
}

}  // namespace

void
to_json(json& j, const SyntheticFaceParams& p)
{
    j = {{"radii", p.radii},
         {"nose_amplitude", p.nose_amplitude},
         {"brow_amplitude", p.brow_amplitude},
         {"resolution", p.resolution},
         {"seed", p.seed}};
}

void
from_json(const json& j, SyntheticFaceParams& p)
{
    SyntheticFaceParams d;
    for (const auto& [key, value] : j.items()) {
        if (key == "radii")
            d.radii = value.get<Vec3>();
        else if (key == "nose_amplitude")
            d.nose_amplitude = value.get<double>();
        else if (key == "brow_amplitude")
            d.brow_amplitude = value.get<double>();
        else if (key == "resolution")
            d.resolution = value.get<int>();
        else if (key == "seed")
            d.seed = value.get<std::uint64_t>();
        else
            fail(ErrorKind::InvalidArgument, "unknown face key '" + key + "'");
    }
    p = d;
}

void
to_json(json& j, const PhongParams& p)
{
    j = {{"ambient", p.ambient},
         {"direct", p.direct},
         {"light_dir", p.light_dir},
         {"exponent", p.exponent}};
}

void
from_json(const json& j, PhongParams& p)
{
    PhongParams d;
    for (const auto& [key, value] : j.items()) {
        if (key == "ambient")
            d.ambient = value.get<Rgb>();
        else if (key == "direct")
            d.direct = value.get<Rgb>();
        else if (key == "light_dir")
            d.light_dir = unit_from_json(value);
        else if (key == "exponent")
            d.exponent = value.get<double>();
        else
            fail(ErrorKind::InvalidArgument, "unknown phong key '" + key + "'");
    }
    p = d;
}

std::string
to_string(Component c)
{
    switch (c) {
    case kAmbient: return "ambient";
    case kDiffuse: return "diffuse";
    case kSpecular: return "specular";
    default: break;
    }
    fail(ErrorKind::InvalidArgument, "not a single component");
}

namespace {

const char*
mesh_kind_name(MeshSpec::Kind k)
{
    switch (k) {
    case MeshSpec::Kind::Face: return "face";
    case MeshSpec::Kind::Sphere: return "sphere";
    case MeshSpec::Kind::Obj: return "obj";
    }
    return "?";
}

const char*
texture_kind_name(TextureSpec::Kind k)
{
    switch (k) {
    case TextureSpec::Kind::Procedural: return "procedural";
    case TextureSpec::Kind::File: return "file";
    case TextureSpec::Kind::Constant: return "constant";
    }
    return "?";
}

json
mesh_to_json(const MeshSpec& m)
{
    json j = {{"kind", mesh_kind_name(m.kind)}};
    switch (m.kind) {
    case MeshSpec::Kind::Face: j["face"] = m.face; break;
    case MeshSpec::Kind::Sphere: j["subdivisions"] = m.subdivisions; break;
    case MeshSpec::Kind::Obj: j["path"] = m.path; break;
    }
    return j;
}

MeshSpec
mesh_from_json(const json& j)
{
    MeshSpec m;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            const auto k = value.get<std::string>();
            if (k == "face")
                m.kind = MeshSpec::Kind::Face;
            else if (k == "sphere")
                m.kind = MeshSpec::Kind::Sphere;
            else if (k == "obj")
                m.kind = MeshSpec::Kind::Obj;
            else
                fail(ErrorKind::InvalidArgument, "unknown mesh kind '" + k + "'");
        } else if (key == "face") {
            m.face = value.get<SyntheticFaceParams>();
        } else if (key == "subdivisions") {
            m.subdivisions = value.get<int>();
        } else if (key == "path") {
            m.path = value.get<std::string>();
        } else {
            fail(ErrorKind::InvalidArgument, "unknown mesh key '" + key + "'");
        }
    }
    return m;
}

json
texture_to_json(const TextureSpec& t)
{
    json j = {{"kind", texture_kind_name(t.kind)}};
    switch (t.kind) {
    case TextureSpec::Kind::Procedural:
        j["procedural"] = t.procedural;
        j["resolution"] = t.resolution;
        break;
    case TextureSpec::Kind::File: j["path"] = t.path; break;
    case TextureSpec::Kind::Constant:
        j["constant"] = t.constant;
        j["resolution"] = t.resolution;
        break;
    }
    return j;
}

TextureSpec
texture_from_json(const json& j)
{
    TextureSpec t;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            const auto k = value.get<std::string>();
            if (k == "procedural")
                t.kind = TextureSpec::Kind::Procedural;
            else if (k == "file")
                t.kind = TextureSpec::Kind::File;
            else if (k == "constant")
                t.kind = TextureSpec::Kind::Constant;
            else
                fail(ErrorKind::InvalidArgument,
                     "unknown texture kind '" + k + "'");
        } else if (key == "procedural") {
            t.procedural = value.get<ProceduralAlbedo>();
        } else if (key == "resolution") {
            t.resolution = value.get<int>();
        } else if (key == "path") {
            t.path = value.get<std::string>();
        } else if (key == "constant") {
            t.constant = value.get<Rgb>();
        } else {
            fail(ErrorKind::InvalidArgument, "unknown texture key '" + key + "'");
        }
    }
    return t;
}

unsigned
components_from_json(const json& j)
{
    unsigned mask = 0;
    for (const auto& item : j) {
        const auto name = item.get<std::string>();
        if (name == "ambient")
            mask |= kAmbient;
        else if (name == "diffuse")
            mask |= kDiffuse;
        else if (name == "specular")
            mask |= kSpecular;
        else
            fail(ErrorKind::InvalidArgument, "unknown component '" + name + "'");
    }
    return mask;
}

json
components_to_json(unsigned mask)
{
    json j = json::array();
    for (Component c : {kAmbient, kDiffuse, kSpecular})
        if (mask & c)
            j.push_back(to_string(c));
    return j;
}

}  // namespace

void
to_json(json& j, const SceneSpec& s)
{
    j = {{"mesh", mesh_to_json(s.mesh)},
         {"view_dir", s.view_dir},
         {"up_hint", s.up_hint},
         {"width", s.width},
         {"height", s.height},
         {"margin", s.margin},
         {"texture", texture_to_json(s.texture)},
         {"phong", s.phong},
         {"components", components_to_json(s.components)}};
}

void
from_json(const json& j, SceneSpec& s)
{
    SceneSpec d;
    for (const auto& [key, value] : j.items()) {
        if (key == "mesh")
            d.mesh = mesh_from_json(value);
        else if (key == "view_dir")
            d.view_dir = unit_from_json(value);
        else if (key == "up_hint")
            d.up_hint = value.get<Vec3>();
        else if (key == "width")
            d.width = value.get<int>();
        else if (key == "height")
            d.height = value.get<int>();
        else if (key == "margin")
            d.margin = value.get<double>();
        else if (key == "texture")
            d.texture = texture_from_json(value);
        else if (key == "phong")
            d.phong = value.get<PhongParams>();
        else if (key == "components")
            d.components = components_from_json(value);
        else
            fail(ErrorKind::InvalidArgument, "unknown scene key '" + key + "'");
    }
    d.phong.view_dir = d.view_dir;
    s = d;
}

SceneSpec
load_scene_spec(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open scene file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument,
             "malformed scene file " + path.string() + ": " + e.what());
    }
    return j.get<SceneSpec>();
}

Mesh
build_mesh(const MeshSpec& spec, const std::filesystem::path& base_dir)
{
    switch (spec.kind) {
    case MeshSpec::Kind::Face: return make_synthetic_face(spec.face);
    case MeshSpec::Kind::Sphere: return make_icosphere(spec.subdivisions);
    case MeshSpec::Kind::Obj: {
        const std::filesystem::path p = base_dir / spec.path;
        if (!std::filesystem::exists(p))
            fail(ErrorKind::Geometry, "mesh file not found: " + p.string());
        return load_obj(p);
    }
    }
    fail(ErrorKind::Internal, "unhandled mesh kind");
}

Raster
build_texture(const TextureSpec& spec, const std::filesystem::path& base_dir)
{
    switch (spec.kind) {
    case TextureSpec::Kind::Procedural:
        return make_procedural_albedo(spec.resolution, spec.procedural);
    case TextureSpec::Kind::File: {
        Raster t = load_raster(base_dir / spec.path);
        require(t.channels() == 3 || t.channels() == 1,
                "texture must have 1 or 3 channels");
        return t;
    }
    case TextureSpec::Kind::Constant: {
        require(spec.resolution > 0, "texture resolution must be positive");
        Raster t(spec.resolution, spec.resolution, 3);
        for (int c = 0; c < 3; ++c)
            for (double& v : t.plane(c))
                v = spec.constant[c];
        return t;
    }
    }
    fail(ErrorKind::Internal, "unhandled texture kind");
}

Camera
scene_camera(const SceneSpec& spec, const Mesh& mesh)
{
    double radius = 0.0;
    for (const Vec3& v : mesh.vertices)
        radius = std::max(radius, length(v));
    Camera cam = Camera::framing(spec.view_dir, radius, spec.width,
                                 spec.height, spec.margin);
    cam.up_hint = spec.up_hint;
    return cam;
}

RenderedScene
shade_rendered(const RenderedScene& base, const PhongParams& params,
               unsigned components)
{
    RenderedScene out;
    out.mesh = base.mesh;
    out.camera = base.camera;
    out.buffers = base.buffers;
    out.texture_uv = base.texture_uv;
    out.albedo = base.albedo;
    out.ambient = shade_buffers(out.buffers, out.texture_uv, params, kAmbient);
    out.diffuse = shade_buffers(out.buffers, out.texture_uv, params, kDiffuse);
    out.specular = shade_buffers(out.buffers, out.texture_uv, params, kSpecular);
    out.image = shade_buffers(out.buffers, out.texture_uv, params, components);
    const Raster s = specular_factor_map(out.buffers, params);
    out.specular_light = Raster(s.width(), s.height(), 3, 0.0);
    for (std::size_t p = 0; p < s.pixel_count(); ++p)
        for (int c = 0; c < 3; ++c)
            out.specular_light.at(p, c) = s.at(p, 0) * params.direct[c];
    return out;
}

RenderedScene
render_scene_spec(const SceneSpec& spec, const std::filesystem::path& base_dir)
{
    RenderedScene base;
    base.mesh = build_mesh(spec.mesh, base_dir);
    base.camera = scene_camera(spec, base.mesh);
    base.buffers = rasterize(base.mesh, base.camera, spec.width, spec.height);
    base.texture_uv = build_texture(spec.texture, base_dir);
    base.albedo = sample_texture_image(base.texture_uv, base.buffers, 1.0);
    PhongParams params = spec.phong;
    params.view_dir = normalize(spec.view_dir);
    return shade_rendered(base, params, spec.components);
}

}  // namespace specsep
