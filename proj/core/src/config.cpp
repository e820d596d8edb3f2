// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "specsep/error.hpp"

namespace specsep {

using nlohmann::json;

namespace {

[[noreturn]] void
unknown_key(const char* section, const std::string& key)
{
    fail(ErrorKind::InvalidArgument,
         std::string("unknown ") + section + " key '" + key + "'");
}

}  // namespace

void
to_json(json& j, const RetinexConfig& c)
{
    j = {{"sigmas", c.sigmas},
         {"epsilon", c.epsilon},
         {"normalization", to_string(c.normalization)}};
}

void
from_json(const json& j, RetinexConfig& c)
{
    RetinexConfig d;
    for (const auto& [key, value] : j.items()) {
        if (key == "sigmas")
            d.sigmas = value.get<std::vector<double>>();
        else if (key == "epsilon")
            d.epsilon = value.get<double>();
        else if (key == "normalization")
            d.normalization
                = texture_normalization_from_string(value.get<std::string>());
        else
            unknown_key("retinex", key);
    }
    c = d;
}

void
to_json(json& j, const FitOptions& o)
{
    j = {{"robust", o.robust},
         {"trim_fraction", o.trim_fraction},
         {"refit_passes", o.refit_passes}};
}

void
from_json(const json& j, FitOptions& o)
{
    FitOptions d;
    for (const auto& [key, value] : j.items()) {
        if (key == "robust")
            d.robust = value.get<bool>();
        else if (key == "trim_fraction")
            d.trim_fraction = value.get<double>();
        else if (key == "refit_passes")
            d.refit_passes = value.get<int>();
        else
            unknown_key("fit", key);
    }
    o = d;
}

void
to_json(json& j, const DecomposeConfig& c)
{
    j = {{"retinex", c.retinex},
         {"fit", c.fit},
         {"uv_resolution", c.uv_resolution},
         {"texture_source", to_string(c.texture_source)},
         {"epsilon_div", c.epsilon_div}};
}

void
from_json(const json& j, DecomposeConfig& c)
{
    DecomposeConfig d;
    for (const auto& [key, value] : j.items()) {
        if (key == "retinex")
            d.retinex = value.get<RetinexConfig>();
        else if (key == "fit")
            d.fit = value.get<FitOptions>();
        else if (key == "uv_resolution")
            d.uv_resolution = value.get<int>();
        else if (key == "texture_source")
            d.texture_source
                = texture_source_from_string(value.get<std::string>());
        else if (key == "epsilon_div")
            d.epsilon_div = value.get<double>();
        else
            unknown_key("decompose", key);
    }
    c = d;
}

void
to_json(json& j, const PhysicsScoreOptions& o)
{
    j = {{"mode", to_string(o.mode)},
         {"exponents", o.exponents},
         {"light_subdivisions", o.light_subdivisions}};
}

void
from_json(const json& j, PhysicsScoreOptions& o)
{
    PhysicsScoreOptions d;
    for (const auto& [key, value] : j.items()) {
        if (key == "mode")
            d.mode = score_mode_from_string(value.get<std::string>());
        else if (key == "exponents")
            d.exponents = value.get<std::vector<double>>();
        else if (key == "light_subdivisions")
            d.light_subdivisions = value.get<int>();
        else
            unknown_key("score", key);
    }
    o = d;
}

void
PipelineConfig::validate() const
{
    decompose.retinex.validate();
    decompose.fit.validate();
    require(decompose.uv_resolution > 0, "uv_resolution must be positive");
    dataset.validate();
    train.validate();
    model.validate();
    require(!score.exponents.empty(), "score.exponents must not be empty");
    for (double e : score.exponents)
        require(e > 0.0, "score exponents must be positive");
    require(score.light_subdivisions >= 0 && score.light_subdivisions <= 5,
            "score.light_subdivisions must lie in [0, 5]");
    require(!out_dir.empty(), "out_dir must not be empty");
}

void
to_json(json& j, const PipelineConfig& c)
{
    j = {{"decompose", c.decompose},
         {"scene", c.scene},
         {"dataset", c.dataset},
         {"train", c.train},
         {"model", c.model},
         {"score", c.score},
         {"seed", c.seed},
         {"out_dir", c.out_dir}};
}

void
from_json(const json& j, PipelineConfig& c)
{
    if (!j.is_object())
        fail(ErrorKind::InvalidArgument, "config must be a JSON object");
    PipelineConfig d;
    for (const auto& [key, value] : j.items()) {
        if (key == "decompose")
            d.decompose = value.get<DecomposeConfig>();
        else if (key == "scene")
            d.scene = value.get<SceneSpec>();
        else if (key == "dataset")
            d.dataset = value.get<DatasetConfig>();
        else if (key == "train")
            d.train = value.get<TrainConfig>();
        else if (key == "model")
            d.model = value.get<SrinetConfig>();
        else if (key == "score")
            d.score = value.get<PhysicsScoreOptions>();
        else if (key == "seed")
            d.seed = value.get<std::uint64_t>();
        else if (key == "out_dir")
            d.out_dir = value.get<std::string>();
        else
            unknown_key("pipeline", key);
    }
    c = d;
}

PipelineConfig
load_pipeline_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument,
             "malformed config " + path.string() + ": " + e.what());
    }
    PipelineConfig c;
    try {
        c = j.get<PipelineConfig>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument,
             "bad config " + path.string() + ": " + e.what());
    }
    c.validate();
    return c;
}

void
save_pipeline_config(const PipelineConfig& c, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << json(c).dump(2) << '\n';
    if (!out)
        fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace specsep
