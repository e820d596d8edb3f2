// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "specsep/dataset.hpp"
#include "specsep/decompose.hpp"
#include "specsep/retinex.hpp"
#include "specsep/scene.hpp"
#include "specsep/score.hpp"
#include "specsep/sh.hpp"
#include "specsep/srinet.hpp"
#include "specsep/train.hpp"

namespace specsep {

void to_json(nlohmann::json& j, const RetinexConfig& c);
void from_json(const nlohmann::json& j, RetinexConfig& c);
void to_json(nlohmann::json& j, const FitOptions& o);
void from_json(const nlohmann::json& j, FitOptions& o);
void to_json(nlohmann::json& j, const DecomposeConfig& c);
void from_json(const nlohmann::json& j, DecomposeConfig& c);
void to_json(nlohmann::json& j, const PhysicsScoreOptions& o);
void from_json(const nlohmann::json& j, PhysicsScoreOptions& o);

/// Everything a command-line run depends on. Commands copy seed into the
/// dataset and training sections before use, and write the effective
/// config next to their outputs.
struct PipelineConfig {
    DecomposeConfig decompose;
    SceneSpec scene;
    DatasetConfig dataset;
    TrainConfig train;
    SrinetConfig model;
    PhysicsScoreOptions score;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    void validate() const;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
/// Missing sections keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, PipelineConfig& c);

PipelineConfig load_pipeline_config(const std::filesystem::path& path);
/// Pretty-printed JSON with a trailing newline.
void save_pipeline_config(const PipelineConfig& c,
                          const std::filesystem::path& path);

}  // namespace specsep
