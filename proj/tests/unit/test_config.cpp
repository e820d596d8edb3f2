// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "specsep/config.hpp"
#include "specsep/error.hpp"

using namespace specsep;
using nlohmann::json;

namespace {

PipelineConfig
non_default()
{
    PipelineConfig c;
    c.decompose.retinex.sigmas = {10.0, 40.0};
    c.decompose.fit.trim_fraction = 0.2;
    c.decompose.uv_resolution = 64;
    c.decompose.texture_source = TextureSource::Provided;
    c.scene.mesh.kind = MeshSpec::Kind::Sphere;
    c.scene.phong.exponent = 48.0;
    c.dataset.n_real = 12;
    c.dataset.mode_weights = {1.0, 0.0, 2.0, 0.5};
    c.train.lr = 3e-4;
    c.model.fusion = Fusion::Concat;
    c.score.mode = ScoreMode::Coupled;
    c.score.exponents = {8.0, 32.0};
    c.seed = 77;
    c.out_dir = "elsewhere";
    return c;
}

void
expect_invalid(const json& j)
{
    try {
        j.get<PipelineConfig>().validate();
        FAIL() << j.dump();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

}  // namespace

TEST(Config, JsonRoundTrip)
{
    const json a = non_default();
    const json b = a.get<PipelineConfig>();
    EXPECT_EQ(a, b);
    EXPECT_EQ(b["seed"], 77);
    EXPECT_EQ(b["score"]["mode"], "coupled");
}

TEST(Config, DefaultsFillMissingKeys)
{
    const PipelineConfig c = json::object().get<PipelineConfig>();
    EXPECT_EQ(json(c), json(PipelineConfig{}));
}

TEST(Config, UnknownKeysAreRejected)
{
    expect_invalid({{"sed", 1}});
    json j = non_default();
    j["decompose"]["fit"]["trim"] = 0.1;
    expect_invalid(j);
    j = non_default();
    j["score"]["bogus"] = true;
    expect_invalid(j);
    j = non_default();
    j["model"]["width"] = 3;
    expect_invalid(j);
}

TEST(Config, InvalidValuesAreRejected)
{
    json j = non_default();
    j["decompose"]["retinex"]["sigmas"] = json::array({80.0, 15.0});
    expect_invalid(j);
    j = non_default();
    j["score"]["mode"] = "loose";
    expect_invalid(j);
}

TEST(Config, FileRoundTripAndErrors)
{
    auto dir = specsep::testing::scratch_dir("config");
    save_pipeline_config(non_default(), dir / "c.json");
    EXPECT_EQ(json(load_pipeline_config(dir / "c.json")), json(non_default()));
    try {
        load_pipeline_config(dir / "none.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    std::ofstream(dir / "bad.json") << "{ \"seed\": ";
    try {
        load_pipeline_config(dir / "bad.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}
