// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "specsep/config.hpp"
#include "specsep/error.hpp"
#include "specsep/image_io.hpp"
#include "specsep/random.hpp"
#include "specsep/scene.hpp"

namespace specsep {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kLightGridSubdivisions = 2;
constexpr double kMaxLightTilt = 20.0;

// sub-stream tags for Rng::mix
constexpr std::uint64_t kRealStream = 0x5245414c00000000ull;
constexpr std::uint64_t kFakeStream = 0x46414b4500000000ull;
constexpr std::uint64_t kDonorStream = 0x444f4e4f00000000ull;

}  // namespace

std::string
to_string(FakeMode m)
{
    switch (m) {
    case FakeMode::None: return "none";
    case FakeMode::WrongExponent: return "wrong_exponent";
    case FakeMode::WrongSpecularLight: return "wrong_specular_light";
    case FakeMode::TransplantedSpecular: return "transplanted_specular";
    case FakeMode::ScaledSpecular: return "scaled_specular";
    }
    return "?";
}

FakeMode
fake_mode_from_string(const std::string& s)
{
    if (s == "none")
        return FakeMode::None;
    for (FakeMode m : kFakeModes)
        if (to_string(m) == s)
            return m;
    fail(ErrorKind::InvalidArgument, "unknown fake mode '" + s + "'");
}

DecomposeConfig
DatasetConfig::default_decompose()
{
    DecomposeConfig d;
    d.texture_source = TextureSource::Provided;
    d.uv_resolution = 32;
    return d;
}

void
DatasetConfig::validate() const
{
    require(n_real >= 1, "need at least one real sample");
    require(n_fake >= 0, "fake count must be non-negative");
    double total = 0.0;
    for (double w : mode_weights) {
        require(w >= 0.0, "mode weights must be non-negative");
        total += w;
    }
    require(n_fake == 0 || total > 0.0, "at least one fake mode needs weight");
    require(image_size >= 16, "image size must be at least 16");
    require(mesh_resolution >= 4, "mesh resolution must be at least 4");
    require(texture_resolution >= 8, "texture resolution must be at least 8");
    decompose.validate();
}

void
to_json(json& j, const DatasetConfig& c)
{
    json w;
    for (std::size_t i = 0; i < kFakeModes.size(); ++i)
        w[to_string(kFakeModes[i])] = c.mode_weights[i];
    j = {{"n_real", c.n_real},
         {"n_fake", c.n_fake},
         {"seed", c.seed},
         {"mode_weights", w},
         {"image_size", c.image_size},
         {"mesh_resolution", c.mesh_resolution},
         {"texture_resolution", c.texture_resolution},
         {"decompose", c.decompose}};
}

void
from_json(const json& j, DatasetConfig& c)
{
    DatasetConfig d;
    for (const auto& [key, value] : j.items()) {
        if (key == "n_real")
            d.n_real = value.get<int>();
        else if (key == "n_fake")
            d.n_fake = value.get<int>();
        else if (key == "seed")
            d.seed = value.get<std::uint64_t>();
        else if (key == "mode_weights") {
            d.mode_weights.fill(0.0);
            for (const auto& [mode, weight] : value.items()) {
                const FakeMode m = fake_mode_from_string(mode);
                require(m != FakeMode::None, "'none' cannot carry a weight");
                d.mode_weights[std::size_t(int(m) - 1)] = weight.get<double>();
            }
        } else if (key == "image_size")
            d.image_size = value.get<int>();
        else if (key == "mesh_resolution")
            d.mesh_resolution = value.get<int>();
        else if (key == "texture_resolution")
            d.texture_resolution = value.get<int>();
        else if (key == "decompose")
            d.decompose = value.get<DecomposeConfig>();
        else
            fail(ErrorKind::InvalidArgument, "unknown dataset key '" + key + "'");
    }
    c = d;
}

void
to_json(json& j, const SceneDraw& s)
{
    j = {{"face", s.face},
         {"albedo", s.albedo},
         {"view_dir", s.view_dir},
         {"phong", s.phong},
         {"smoothness", s.smoothness}};
}

void
from_json(const json& j, SceneDraw& s)
{
    SceneDraw d;
    for (const auto& [key, value] : j.items()) {
        if (key == "face")
            d.face = value.get<SyntheticFaceParams>();
        else if (key == "albedo")
            d.albedo = value.get<ProceduralAlbedo>();
        else if (key == "view_dir")
            d.view_dir = value.get<Vec3>();
        else if (key == "phong")
            d.phong = value.get<PhongParams>();
        else if (key == "smoothness")
            d.smoothness = value.get<double>();
        else
            fail(ErrorKind::InvalidArgument, "unknown scene key '" + key + "'");
    }
    d.phong.view_dir = d.view_dir;
    s = d;
}

void
to_json(json& j, const SampleManifest& m)
{
    j = {{"id", m.id},
         {"label", m.label == 1 ? "fake" : "real"},
         {"fake_mode", to_string(m.mode)},
         {"seed", m.seed},
         {"scene", m.scene},
         {"twin", m.twin},
         {"donor", m.donor},
         {"fake_exponent", m.fake_exponent},
         {"fake_scale", m.fake_scale},
         {"fake_light", m.fake_light},
         {"image", m.image_path},
         {"albedo", m.albedo_path},
         {"decomposition", m.decomposition_dir}};
}

void
from_json(const json& j, SampleManifest& m)
{
    SampleManifest d;
    for (const auto& [key, value] : j.items()) {
        if (key == "id")
            d.id = value.get<std::string>();
        else if (key == "label") {
            const auto l = value.get<std::string>();
            require(l == "real" || l == "fake", "label must be real or fake");
            d.label = l == "fake" ? 1 : 0;
        } else if (key == "fake_mode")
            d.mode = fake_mode_from_string(value.get<std::string>());
        else if (key == "seed")
            d.seed = value.get<std::uint64_t>();
        else if (key == "scene")
            d.scene = value.get<SceneDraw>();
        else if (key == "twin")
            d.twin = value.get<int>();
        else if (key == "donor")
            d.donor = value.get<int>();
        else if (key == "fake_exponent")
            d.fake_exponent = value.get<double>();
        else if (key == "fake_scale")
            d.fake_scale = value.get<double>();
        else if (key == "fake_light")
            d.fake_light = value.get<Vec3>();
        else if (key == "image")
            d.image_path = value.get<std::string>();
        else if (key == "albedo")
            d.albedo_path = value.get<std::string>();
        else if (key == "decomposition")
            d.decomposition_dir = value.get<std::string>();
        else
            fail(ErrorKind::InvalidArgument,
                 "unknown manifest key '" + key + "'");
    }
    require((d.label == 0) == (d.mode == FakeMode::None),
            "sample " + d.id + ": real samples must have fake_mode none");
    m = d;
}

namespace {

/// Unit vector perpendicular to v, at a uniformly drawn azimuth.
Vec3
random_perpendicular(const Vec3& v, Rng& rng)
{
    const Vec3 helper = std::abs(v.x) < 0.9 ? Vec3{1.0, 0.0, 0.0}
                                           : Vec3{0.0, 1.0, 0.0};
    const Vec3 a = normalize(cross(v, helper));
    const Vec3 b = cross(v, a);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return normalize(std::cos(phi) * a + std::sin(phi) * b);
}

Vec3
tilt(const Vec3& v, double angle, Rng& rng)
{
    return normalize(rotate(v, random_perpendicular(v, rng), angle));
}

}  // namespace

SceneDraw
draw_scene(std::uint64_t seed, const DatasetConfig& config)
{
    Rng rng(seed);
    SceneDraw s;
    s.face.radii = {0.9 * rng.uniform(0.9, 1.1), 1.1 * rng.uniform(0.9, 1.1),
                    0.8 * rng.uniform(0.9, 1.1)};
    s.face.nose_amplitude = rng.uniform(0.10, 0.25);
    s.face.brow_amplitude = rng.uniform(0.02, 0.08);
    s.face.resolution = config.mesh_resolution;
    s.face.seed = rng.next_u64();

    s.view_dir = tilt({0.0, 0.0, 1.0}, rng.uniform(0.0, 15.0) * kDeg, rng);
    s.smoothness = rng.uniform();

    const double tone = rng.uniform(0.55, 0.9);
    s.albedo.base = {tone, tone * rng.uniform(0.7, 0.8),
                     tone * rng.uniform(0.55, 0.65)};
    s.albedo.contrast = rng.uniform(0.2, 0.4);
    s.albedo.grain = 0.02 + 0.08 * (1.0 - s.smoothness);
    s.albedo.seed = rng.next_u64();

    s.phong.view_dir = s.view_dir;
    std::vector<Vec3> lights;
    for (const Vec3& g : make_icosphere(kLightGridSubdivisions).vertices) {
        const Vec3 l = normalize(g);
        if (dot(l, s.view_dir) >= std::cos(kMaxLightTilt * kDeg))
            lights.push_back(l);
    }
    s.phong.light_dir = lights[std::size_t(rng.below(lights.size()))];
    s.phong.exponent
        = 8.0 * std::exp2(std::min(std::floor(4.0 * s.smoothness), 3.0));
    const double a = rng.uniform(0.10, 0.20);
    const double d = rng.uniform(0.30, 0.40);
    for (int c = 0; c < 3; ++c) {
        s.phong.ambient[c] = a * rng.uniform(0.95, 1.05);
        s.phong.direct[c] = d * rng.uniform(0.95, 1.05);
    }
    return s;
}

std::vector<SampleManifest>
plan_dataset(const DatasetConfig& config)
{
    config.validate();
    std::vector<SampleManifest> plan;
    auto paths = [](SampleManifest& m) {
        const std::string base = "samples/" + m.id + "/";
        m.image_path = base + "image.png";
        m.albedo_path = base + "albedo.png";
        m.decomposition_dir = base + "decomposition";
    };
    char id[32];
    for (int i = 0; i < config.n_real; ++i) {
        SampleManifest m;
        std::snprintf(id, sizeof id, "real_%05d", i);
        m.id = id;
        m.seed = Rng::mix(config.seed, kRealStream + std::uint64_t(i));
        m.scene = draw_scene(m.seed, config);
        paths(m);
        plan.push_back(std::move(m));
    }
    double total = 0.0;
    for (double w : config.mode_weights)
        total += w;
    for (int j = 0; j < config.n_fake; ++j) {
        SampleManifest m;
        std::snprintf(id, sizeof id, "fake_%05d", j);
        m.id = id;
        m.label = 1;
        m.seed = Rng::mix(config.seed, kFakeStream + std::uint64_t(j));
        m.twin = j % config.n_real;
        m.scene = plan[std::size_t(m.twin)].scene;
        Rng rng(m.seed);

        double pick = rng.uniform() * total;
        m.mode = kFakeModes.back();
        for (std::size_t k = 0; k < kFakeModes.size(); ++k) {
            if (config.mode_weights[k] <= 0.0)
                continue;
            m.mode = kFakeModes[k];
            if (pick < config.mode_weights[k])
                break;
            pick -= config.mode_weights[k];
        }

        const PhongParams& p = m.scene.phong;
        switch (m.mode) {
        case FakeMode::WrongExponent: {
            const double ratio = rng.uniform(2.0, 4.0);
            m.fake_exponent = rng.uniform() < 0.5 ? p.exponent * ratio
                                                  : p.exponent / ratio;
            break;
        }
        case FakeMode::WrongSpecularLight: {
            Vec3 l = p.light_dir;
            for (int attempt = 0; attempt < 256; ++attempt) {
                l = tilt(p.light_dir, rng.uniform(20.0, 40.0) * kDeg, rng);
                if (dot(l, m.scene.view_dir) > 0.3)
                    break;
            }
            require(dot(l, m.scene.view_dir) > 0.3,
                    "could not draw a visible wrong light");
            m.fake_light = l;
            break;
        }
        case FakeMode::TransplantedSpecular:
            if (config.n_real > 1) {
                m.donor = int(rng.below(std::uint64_t(config.n_real - 1)));
                if (m.donor >= m.twin)
                    ++m.donor;
            }
            break;
        case FakeMode::ScaledSpecular:
            m.fake_scale = rng.uniform() < 0.5 ? rng.uniform(0.3, 0.7)
                                               : rng.uniform(1.5, 2.5);
            break;
        case FakeMode::None: break;
        }
        paths(m);
        plan.push_back(std::move(m));
    }
    return plan;
}

Raster
quantize8(const Raster& image)
{
    Raster out = image;
    for (double& v : out.data())
        v = std::floor(255.0 * std::clamp(v, 0.0, 1.0) + 0.5) / 255.0;
    return out;
}

GeometryBuffers
scene_buffers(const SceneDraw& scene, const DatasetConfig& config)
{
    const Mesh mesh = make_synthetic_face(scene.face);
    double radius = 0.0;
    for (const Vec3& v : mesh.vertices)
        radius = std::max(radius, length(v));
    const Camera cam = Camera::framing(scene.view_dir, radius,
                                       config.image_size, config.image_size,
                                       2.0);
    return rasterize(mesh, cam, config.image_size, config.image_size);
}

namespace {

SceneDraw
donor_scene(const std::vector<SampleManifest>& plan, const SampleManifest& m,
            const DatasetConfig& config)
{
    if (m.donor >= 0)
        return plan.at(std::size_t(m.donor)).scene;
    return draw_scene(Rng::mix(m.seed, kDonorStream), config);
}

}  // namespace

GeneratedSample
render_sample(const std::vector<SampleManifest>& plan, std::size_t index,
              const DatasetConfig& config)
{
    const SampleManifest& m = plan.at(index);
    const SceneDraw& scene = m.scene;
    GeneratedSample out;
    out.buffers = scene_buffers(scene, config);
    const Raster texture
        = make_procedural_albedo(config.texture_resolution, scene.albedo);
    PhongParams p = scene.phong;
    p.view_dir = scene.view_dir;

    out.ambient = shade_buffers(out.buffers, texture, p, kAmbient);
    out.diffuse = shade_buffers(out.buffers, texture, p, kDiffuse);
    switch (m.mode) {
    case FakeMode::None:
        out.specular = shade_buffers(out.buffers, texture, p, kSpecular);
        break;
    case FakeMode::WrongExponent: {
        PhongParams q = p;
        q.exponent = m.fake_exponent;
        out.specular = shade_buffers(out.buffers, texture, q, kSpecular);
        break;
    }
    case FakeMode::WrongSpecularLight: {
        PhongParams q = p;
        q.light_dir = m.fake_light;
        out.specular = shade_buffers(out.buffers, texture, q, kSpecular);
        break;
    }
    case FakeMode::ScaledSpecular: {
        out.specular = shade_buffers(out.buffers, texture, p, kSpecular);
        for (double& v : out.specular.data())
            v *= m.fake_scale;
        break;
    }
    case FakeMode::TransplantedSpecular: {
        const SceneDraw donor = donor_scene(plan, m, config);
        PhongParams q = donor.phong;
        q.view_dir = donor.view_dir;
        const GeometryBuffers db = scene_buffers(donor, config);
        const Raster s = specular_factor_map(db, q);
        out.specular = Raster(config.image_size, config.image_size, 3, 0.0);
        for (std::size_t px = 0; px < out.buffers.pixel_count(); ++px) {
            if (!out.buffers.mask[px])
                continue;
            const Rgb t = sample_texture(texture, out.buffers.uv[px]);
            for (int c = 0; c < 3; ++c)
                out.specular.at(px, c) = s.at(px, 0) * q.direct[c] * t[c];
        }
        break;
    }
    }
    out.image = quantize8(out.ambient + out.diffuse + out.specular);
    out.albedo = quantize8(sample_texture_image(texture, out.buffers, 1.0));
    return out;
}

namespace {

void
write_json_file(const json& j, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out)
        fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace

std::vector<SampleManifest>
generate_dataset(const DatasetConfig& config, const std::filesystem::path& dir)
{
    const std::vector<SampleManifest> plan = plan_dataset(config);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const SampleManifest& m = plan[i];
        const GeneratedSample s = render_sample(plan, i, config);
        std::error_code ec;
        std::filesystem::create_directories(dir / m.decomposition_dir, ec);
        if (ec)
            fail(ErrorKind::Io, "cannot create sample directory for " + m.id);
        save_raster(s.image, dir / m.image_path, true);
        save_raster(s.albedo, dir / m.albedo_path, true);
        const Decomposition dec
            = decompose(s.image, s.buffers, config.decompose, &s.albedo);
        export_decomposition(dec, config.decompose, dir / m.decomposition_dir);
    }
    json manifest = {{"version", kManifestVersion},
                     {"config", config},
                     {"samples", plan}};
    write_json_file(manifest, dir / "manifest.json");
    return plan;
}

LoadedManifest
load_manifest(const std::filesystem::path& dir)
{
    const std::filesystem::path path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, "malformed " + path.string() + ": " + e.what());
    }
    const int version = j.at("version").get<int>();
    if (version != kManifestVersion)
        fail(ErrorKind::Io, "unsupported manifest version "
                                + std::to_string(version));
    LoadedManifest out;
    out.config = j.at("config").get<DatasetConfig>();
    out.samples = j.at("samples").get<std::vector<SampleManifest>>();
    return out;
}

}  // namespace specsep
