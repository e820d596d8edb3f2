// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>

#include <nlohmann/json.hpp>

#include "specsep/error.hpp"
#include "specsep/image_io.hpp"
#include "specsep/random.hpp"

namespace specsep {

PreparedSample
prepare_sample(const std::vector<SampleManifest>& plan, std::size_t index,
               const DatasetConfig& config)
{
    GeneratedSample g = render_sample(plan, index, config);
    return {std::move(g.image), std::move(g.albedo), std::move(g.buffers)};
}

PreparedSample
load_prepared_sample(const std::filesystem::path& dataset_dir,
                     const SampleManifest& manifest,
                     const DatasetConfig& config)
{
    const auto bundle = dataset_dir / manifest.decomposition_dir;
    if (!std::filesystem::exists(bundle / "meta.json"))
        fail(ErrorKind::Io, "missing decomposition for " + manifest.id + " ("
                                + bundle.string() + ")");
    PreparedSample s;
    s.image = load_raster(dataset_dir / manifest.image_path);
    s.albedo = load_raster(dataset_dir / manifest.albedo_path);
    s.buffers = scene_buffers(manifest.scene, config);
    require(s.image.width() == s.buffers.width
                && s.image.height() == s.buffers.height,
            "image of " + manifest.id + " does not match its geometry");
    return s;
}

Decomposition
decompose_prepared(const PreparedSample& sample, const DecomposeConfig& config,
                   Perturbation perturbation, std::uint64_t seed)
{
    const Raster image = apply_perturbation(sample.image, perturbation, seed);
    return decompose(image, sample.buffers, config, &sample.albedo);
}

std::string
to_string(MapSpace s)
{
    return s == MapSpace::Uv ? "uv" : "image";
}

Raster
box_downsample(const Raster& image, int size)
{
    require(size > 0 && image.width() % size == 0 && image.height() == image.width(),
            "box_downsample needs a square image whose side is a multiple of "
                + std::to_string(size));
    const int f = image.width() / size;
    if (f == 1)
        return image;
    Raster out(size, size, image.channels());
    const double k = 1.0 / (double(f) * f);
    for (int c = 0; c < image.channels(); ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                double s = 0.0;
                for (int a = 0; a < f; ++a)
                    for (int b = 0; b < f; ++b)
                        s += image.at(x * f + b, y * f + a, c);
                out.at(x, y, c) = s * k;
            }
    return out;
}

Tensor
raster_to_tensor(const Raster& image)
{
    const auto d = image.data();
    return Tensor({image.channels(), image.height(), image.width()},
                  std::vector<double>(d.begin(), d.end()));
}

NetSample
make_net_sample(const SampleManifest& manifest, const Raster& image,
                const Decomposition& dec, int input_size, MapSpace space)
{
    NetSample s;
    s.id = manifest.id;
    s.label = manifest.label;
    s.img = raster_to_tensor(box_downsample(image, input_size));
    const bool uv = space == MapSpace::Uv;
    s.spr = raster_to_tensor(
        box_downsample(uv ? dec.uv_specular : dec.specular, input_size));
    s.tex = raster_to_tensor(
        box_downsample(uv ? dec.uv_texture : dec.texture.albedo, input_size));
    s.dir = raster_to_tensor(
        box_downsample(uv ? dec.uv_direct : dec.direct, input_size));
    return s;
}

EvalReport
make_report(const std::string& detector,
            const std::vector<SampleManifest>& samples,
            const std::vector<double>& scores, Perturbation perturbation,
            int histogram_bins)
{
    require(samples.size() == scores.size(), "score count differs from samples");
    EvalReport r;
    r.detector = detector;
    r.perturbation = perturbation;
    std::vector<int> labels;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        labels.push_back(samples[i].label);
        r.rows.push_back({samples[i].id, samples[i].label, samples[i].mode,
                          scores[i]});
    }
    r.auc = compute_auc(scores, labels);
    r.roc = roc_curve(scores, labels);
    r.histogram = score_histogram(scores, labels, histogram_bins);
    for (FakeMode m : kFakeModes) {
        std::vector<double> s;
        std::vector<int> l;
        bool any = false;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i].label == 0 || samples[i].mode == m) {
                s.push_back(scores[i]);
                l.push_back(samples[i].label);
                any = any || samples[i].mode == m;
            }
        }
        if (any)
            r.per_mode_auc.emplace_back(m, compute_auc(s, l));
    }
    return r;
}

namespace {

std::ofstream
open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << std::setprecision(17);
    return out;
}

}  // namespace

void
write_report(const EvalReport& report, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        fail(ErrorKind::Io, "cannot create " + dir.string());
    const std::string pert = to_string(report.perturbation);
    {
        auto out = open_out(dir / "scores.csv");
        out << "sample_id,label,fake_mode,score,perturbation\n";
        for (const EvalRow& row : report.rows)
            out << row.id << ',' << (row.label ? "fake" : "real") << ','
                << to_string(row.mode) << ',' << row.score << ',' << pert
                << '\n';
    }
    {
        auto out = open_out(dir / "roc.csv");
        out << "threshold,tpr,fpr\n";
        for (const RocPoint& p : report.roc)
            out << p.threshold << ',' << p.tpr << ',' << p.fpr << '\n';
    }
    {
        auto out = open_out(dir / "histogram.csv");
        out << "bin_lo,bin_hi,real_count,fake_count\n";
        for (const HistogramBin& b : report.histogram)
            out << b.lo << ',' << b.hi << ',' << b.real_count << ','
                << b.fake_count << '\n';
    }
    nlohmann::json summary = {{"detector", report.detector},
                              {"perturbation", pert},
                              {"auc", report.auc},
                              {"samples", report.rows.size()}};
    for (const auto& [mode, auc] : report.per_mode_auc)
        summary["per_mode_auc"][to_string(mode)] = auc;
    auto out = open_out(dir / "summary.json");
    out << summary.dump(2) << '\n';
    if (!out)
        fail(ErrorKind::Io, "failed writing report in " + dir.string());
}

std::vector<double>
oracle_scores(const std::vector<SampleManifest>& samples)
{
    std::vector<double> out;
    for (const auto& s : samples)
        out.push_back(double(s.label));
    return out;
}

Split
stratified_split(const std::vector<SampleManifest>& samples,
                 double test_fraction, std::uint64_t seed)
{
    require(test_fraction > 0.0 && test_fraction < 1.0,
            "test_fraction must lie in (0, 1)");
    Split out;
    for (int label = 0; label < 2; ++label) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (samples[i].label == label)
                idx.push_back(i);
        Rng rng(Rng::mix(seed, 0x53504c54ull + std::uint64_t(label)));
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.below(i)]);
        const auto n_test = std::size_t(
            std::llround(test_fraction * double(idx.size())));
        out.test.insert(out.test.end(), idx.begin(),
                        idx.begin() + std::ptrdiff_t(n_test));
        out.train.insert(out.train.end(), idx.begin() + std::ptrdiff_t(n_test),
                         idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::vector<double>
random_scores(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out)
        v = rng.uniform();
    return out;
}

}  // namespace specsep
