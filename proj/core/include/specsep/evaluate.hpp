// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "specsep/dataset.hpp"
#include "specsep/metrics.hpp"
#include "specsep/perturb.hpp"
#include "specsep/score.hpp"
#include "specsep/train.hpp"

namespace specsep {

/// Inputs of one sample as the pipeline sees them.
struct PreparedSample {
    Raster image;
    Raster albedo;
    GeometryBuffers buffers;
};

/// Renders sample `index` of the plan in memory.
PreparedSample prepare_sample(const std::vector<SampleManifest>& plan,
                              std::size_t index, const DatasetConfig& config);

/// Loads image.png and albedo.png from disk and rebuilds the geometry from
/// the manifest. Throws an Io error if the sample's decomposition bundle is
/// missing.
PreparedSample load_prepared_sample(const std::filesystem::path& dataset_dir,
                                    const SampleManifest& manifest,
                                    const DatasetConfig& config);

/// Applies the perturbation to the image (seeded per sample), then
/// decomposes with the sample's albedo when the config asks for it.
Decomposition decompose_prepared(const PreparedSample& sample,
                                 const DecomposeConfig& config,
                                 Perturbation perturbation,
                                 std::uint64_t seed);

enum class MapSpace { Uv, Image };

std::string to_string(MapSpace s);

/// Mean over non-overlapping factor x factor blocks; the size must divide.
Raster box_downsample(const Raster& image, int size);

/// [C, H, W] tensor with the raster's samples.
Tensor raster_to_tensor(const Raster& image);

/// Network inputs for one sample: the image downsampled to input_size and
/// the specular, texture and direct maps from UV space or image space.
NetSample make_net_sample(const SampleManifest& manifest, const Raster& image,
                          const Decomposition& dec, int input_size,
                          MapSpace space);

struct EvalRow {
    std::string id;
    int label = 0;
    FakeMode mode = FakeMode::None;
    double score = 0.0;
};

struct EvalReport {
    std::string detector;
    Perturbation perturbation = Perturbation::None;
    double auc = 0.5;
    /// AUC of each fake mode's samples against all real samples.
    std::vector<std::pair<FakeMode, double>> per_mode_auc;
    std::vector<RocPoint> roc;
    std::vector<HistogramBin> histogram;
    std::vector<EvalRow> rows;
};

EvalReport make_report(const std::string& detector,
                       const std::vector<SampleManifest>& samples,
                       const std::vector<double>& scores,
                       Perturbation perturbation, int histogram_bins = 20);

/// scores.csv, roc.csv, histogram.csv and summary.json.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

/// Scores equal to the labels.
std::vector<double> oracle_scores(const std::vector<SampleManifest>& samples);
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per-class seeded permutation; the first round(test_fraction * n_class)
/// of each class go to test. Both lists are returned in ascending order.
Split stratified_split(const std::vector<SampleManifest>& samples,
                       double test_fraction, std::uint64_t seed);

/// Seeded uniform scores.
std::vector<double> random_scores(std::size_t n, std::uint64_t seed);

}  // namespace specsep
