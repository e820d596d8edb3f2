// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/decompose.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "specsep/config.hpp"
#include "specsep/error.hpp"
#include "specsep/image_io.hpp"

namespace specsep {

using nlohmann::json;

std::string
to_string(TextureSource s)
{
    return s == TextureSource::Msr ? "msr" : "provided";
}

TextureSource
texture_source_from_string(const std::string& s)
{
    if (s == "msr")
        return TextureSource::Msr;
    if (s == "provided")
        return TextureSource::Provided;
    fail(ErrorKind::InvalidArgument, "unknown texture source '" + s + "'");
}

void
DecomposeConfig::validate() const
{
    retinex.validate();
    fit.validate();
    require(uv_resolution > 0, "uv resolution must be positive");
    require(epsilon_div > 0.0, "division epsilon must be positive");
}

Raster
extract_specular(const Raster& image, const Raster& albedo,
                 const SHCoefficients& coeffs, const GeometryBuffers& buffers,
                 double epsilon_div)
{
    require(image.same_shape(albedo), "image and albedo differ in shape");
    require(image.width() == buffers.width && image.height() == buffers.height,
            "image and geometry buffers differ in size");
    if (buffers.covered_count() == 0)
        fail(ErrorKind::Geometry, "mask is empty");
    Raster out(image.width(), image.height(), image.channels(), 0.0);
    for (std::size_t p = 0; p < buffers.pixel_count(); ++p) {
        if (!buffers.mask[p])
            continue;
        const SHBasis h = sh_basis_unchecked(buffers.normal[p]);
        for (int c = 0; c < image.channels(); ++c) {
            const double t = albedo.at(p, c);
            const double residual = image.at(p, c) - coeffs.shading(h, c) * t;
            out.at(p, c) = residual / std::max(t, epsilon_div);
        }
    }
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
auto
run_stage(const char* stage, Decomposition& dec, F&& body)
{
    const auto start = Clock::now();
    try {
        body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.kind(), e.what());
    } catch (const std::exception& e) {
        throw StageError(stage, ErrorKind::Internal, e.what());
    }
    dec.timings.emplace_back(
        stage, std::chrono::duration<double>(Clock::now() - start).count());
}

}  // namespace

Decomposition
decompose(const Raster& image, const GeometryBuffers& buffers,
          const DecomposeConfig& config, const Raster* provided_albedo)
{
    Decomposition dec;
    dec.texture_source = config.texture_source;
    run_stage("input", dec, [&] {
        config.validate();
        require(image.channels() == 3, "decomposition needs an RGB image");
        require(image.width() == buffers.width
                    && image.height() == buffers.height,
                "image is " + std::to_string(image.width()) + "x"
                    + std::to_string(image.height()) + " but geometry is "
                    + std::to_string(buffers.width) + "x"
                    + std::to_string(buffers.height));
        require(image.all_finite(), "image has non-finite samples");
        if (buffers.covered_count() == 0)
            fail(ErrorKind::Geometry, "geometry covers no pixels");
        dec.mask = buffers.mask;
    });

    run_stage("texture", dec, [&] {
        if (config.texture_source == TextureSource::Msr) {
            dec.texture.log_albedo
                = multi_scale_retinex(image, {config.retinex.sigmas,
                                              config.retinex.epsilon,
                                              TextureNormalization::None})
                      .log_albedo;
            dec.texture.albedo = normalize_texture(
                dec.texture.log_albedo, config.retinex.normalization,
                buffers.mask);
            return;
        }
        if (provided_albedo == nullptr)
            fail(ErrorKind::InvalidArgument,
                 "texture source is 'provided' but no albedo was given");
        require(provided_albedo->same_shape(image),
                "provided albedo differs in shape from the image");
        Raster albedo(image.width(), image.height(), 3, 1.0);
        for (std::size_t p = 0; p < buffers.pixel_count(); ++p) {
            if (!buffers.mask[p])
                continue;
            for (int c = 0; c < 3; ++c) {
                const double t = provided_albedo->at(p, c);
                if (!(t >= kTextureFloor) || !std::isfinite(t))
                    fail(ErrorKind::InvalidArgument,
                         "provided albedo falls below the texture floor");
                albedo.at(p, c) = t;
            }
        }
        dec.texture.log_albedo = log_map(albedo, kTextureFloor);
        dec.texture.albedo = std::move(albedo);
    });

    run_stage("fit", dec, [&] {
        dec.coeffs = fit_sh_coefficients(image, dec.texture.albedo, buffers,
                                         config.fit);
    });

    run_stage("split", dec, [&] {
        AmbientDirect split = split_ambient_direct(dec.coeffs, buffers);
        dec.ambient = std::move(split.ambient);
        dec.direct = std::move(split.direct);
        dec.direct_unclamped = std::move(split.direct_unclamped);
        dec.clamped_direct_samples = split.clamped_samples;
    });

    run_stage("extract", dec, [&] {
        dec.specular = extract_specular(image, dec.texture.albedo, dec.coeffs,
                                        buffers, config.epsilon_div);
        if (!dec.specular.all_finite())
            fail(ErrorKind::Numerical, "specular map is not finite");
    });

    run_stage("flatten", dec, [&] {
        FlattenResult t = uv_flatten_with_coverage(dec.texture.albedo, buffers,
                                                   config.uv_resolution);
        dec.uv_texture = std::move(t.image);
        dec.uv_coverage = std::move(t.coverage);
        dec.uv_direct = uv_flatten(dec.direct, buffers, config.uv_resolution);
        dec.uv_specular
            = uv_flatten(dec.specular, buffers, config.uv_resolution);
    });
    return dec;
}

namespace {

struct Range {
    double lo = 0.0, hi = 0.0;
};

Range
save_scaled(const Raster& map, const std::filesystem::path& path)
{
    Range r{std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};
    for (double v : map.data()) {
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
    }
    Raster scaled(map.width(), map.height(), map.channels(), 0.0);
    if (r.hi > r.lo) {
        const double k = 1.0 / (r.hi - r.lo);
        auto dst = scaled.data();
        auto src = map.data();
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = std::clamp((src[i] - r.lo) * k, 0.0, 1.0);
    }
    save_raster(scaled, path, ImageFormat::Png);
    return r;
}

void
write_json(const json& j, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out)
        fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace

void
export_decomposition(const Decomposition& dec, const DecomposeConfig& config,
                     const std::filesystem::path& dir,
                     const ExportOptions& options)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        fail(ErrorKind::Io, "cannot create " + dir.string() + ": "
                                + ec.message());

    const std::pair<const char*, const Raster*> maps[] = {
        {"texture", &dec.texture.albedo}, {"direct", &dec.direct},
        {"specular", &dec.specular},      {"uv_texture", &dec.uv_texture},
        {"uv_direct", &dec.uv_direct},    {"uv_specular", &dec.uv_specular},
    };
    json meta;
    meta["texture_source"] = to_string(dec.texture_source);
    meta["config"] = config;
    meta["mask_pixels"] = std::count(dec.mask.begin(), dec.mask.end(), 1);
    meta["clamped_direct_samples"] = dec.clamped_direct_samples;
    json& entries = meta["maps"];
    for (const auto& [name, raster] : maps) {
        const std::string file = std::string(name) + ".png";
        const Range r = save_scaled(*raster, dir / file);
        entries[name] = {{"file", file}, {"lo", r.lo}, {"hi", r.hi}};
    }
    if (options.include_timings) {
        json t = json::object();
        for (const auto& [stage, seconds] : dec.timings)
            t[stage] = seconds;
        meta["timings"] = t;
    }
    write_json(dec.coeffs, dir / "coeffs.json");
    write_json(meta, dir / "meta.json");
}

Raster
load_exported_map(const std::filesystem::path& dir, const std::string& name)
{
    std::ifstream in(dir / "meta.json");
    if (!in)
        fail(ErrorKind::Io, "missing meta.json in " + dir.string());
    json meta;
    try {
        in >> meta;
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, std::string("malformed meta.json: ") + e.what());
    }
    if (!meta.contains("maps") || !meta["maps"].contains(name))
        fail(ErrorKind::Io, "map '" + name + "' not listed in meta.json");
    const json& entry = meta["maps"][name];
    const double lo = entry.at("lo").get<double>();
    const double hi = entry.at("hi").get<double>();
    Raster r = load_raster(dir / entry.at("file").get<std::string>());
    for (double& v : r.data())
        v = lo + v * (hi - lo);
    return r;
}

}  // namespace specsep
