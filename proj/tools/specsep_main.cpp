// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specsep/checkpoint.hpp"
#include "specsep/config.hpp"
#include "specsep/dataset.hpp"
#include "specsep/decompose.hpp"
#include "specsep/error.hpp"
#include "specsep/evaluate.hpp"
#include "specsep/fit_timing.hpp"
#include "specsep/gradcheck.hpp"
#include "specsep/image_io.hpp"
#include "specsep/metrics.hpp"
#include "specsep/random.hpp"
#include "specsep/scene.hpp"
#include "specsep/score.hpp"
#include "specsep/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace specsep;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitGeometry = 2;
constexpr int kExitFit = 3;
constexpr int kExitInternal = 4;

int
exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Io: return kExitIo;
    case ErrorKind::Geometry: return kExitGeometry;
    case ErrorKind::Fit: return kExitFit;
    default: return kExitInternal;
    }
}

struct Common {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
};

void
add_common(CLI::App* cmd, Common& c, bool needs_seed)
{
    cmd->add_option("--config", c.config_path,
                    "Pipeline config JSON (defaults apply when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", c.out_dir,
                    "Output directory (overrides the config's out_dir)");
    auto* seed = cmd->add_option("--seed", c.seed, "Seed for every random draw");
    if (needs_seed)
        seed->required();
}

PipelineConfig
load_config(const Common& c)
{
    PipelineConfig cfg;
    if (!c.config_path.empty())
        cfg = load_pipeline_config(c.config_path);
    if (c.out_dir)
        cfg.out_dir = *c.out_dir;
    if (c.seed)
        cfg.seed = *c.seed;
    return cfg;
}

fs::path
prepare_out(const PipelineConfig& cfg)
{
    const fs::path out(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec)
        fail(ErrorKind::Io, "cannot create " + out.string() + ": " + ec.message());
    return out;
}

void
write_effective(const PipelineConfig& cfg, const fs::path& out)
{
    cfg.validate();
    save_pipeline_config(cfg, out / "effective_config.json");
}

void
write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        fail(ErrorKind::Io, "cannot write " + path.string());
    f << text;
    if (!f)
        fail(ErrorKind::Io, "failed writing " + path.string());
}

json
read_json(const fs::path& path)
{
    std::ifstream f(path);
    if (!f)
        fail(ErrorKind::Io, "cannot open " + path.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, "malformed " + path.string() + ": " + e.what());
    }
}

template <typename F>
auto
stage(const char* name, F&& body)
{
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e.kind(), e.what());
    } catch (const json::exception& e) {
        throw StageError(name, ErrorKind::InvalidArgument, e.what());
    }
}

// render ------------------------------------------------------------------

struct RenderArgs {
    Common common;
    std::string scene_path;
    std::optional<int> size;
};

int
run_render(const RenderArgs& a)
{
    PipelineConfig cfg = load_config(a.common);
    if (!a.scene_path.empty())
        cfg.scene = stage("config", [&] { return load_scene_spec(a.scene_path); });
    if (a.size)
        cfg.scene.width = cfg.scene.height = *a.size;
    const fs::path out = prepare_out(cfg);
    const RenderedScene r
        = stage("render", [&] { return render_scene_spec(cfg.scene, "."); });
    stage("export", [&] {
        save_raster(r.image, out / "image.png", true);
        save_raster(r.albedo, out / "albedo.png", true);
        save_raster(r.ambient, out / "ambient.png", true);
        save_raster(r.diffuse, out / "diffuse.png", true);
        save_raster(r.specular, out / "specular.png", true);
        save_obj(r.mesh, out / "mesh.obj");
        write_effective(cfg, out);
        return 0;
    });
    std::printf("rendered %dx%d scene, %zu covered pixels -> %s\n",
                r.buffers.width, r.buffers.height, r.buffers.covered_count(),
                out.string().c_str());
    return 0;
}

// decompose ---------------------------------------------------------------

struct DecomposeArgs {
    Common common;
    std::string image;
    std::string obj;
    std::string scene_path;
    std::string albedo;
    std::optional<std::string> texture_source;
    std::optional<int> uv_resolution;
    bool timings = false;
};

int
run_decompose(const DecomposeArgs& a)
{
    PipelineConfig cfg = load_config(a.common);
    if (!a.scene_path.empty())
        cfg.scene = stage("config", [&] { return load_scene_spec(a.scene_path); });
    if (!a.obj.empty()) {
        cfg.scene.mesh.kind = MeshSpec::Kind::Obj;
        cfg.scene.mesh.path = a.obj;
    }
    if (a.texture_source)
        cfg.decompose.texture_source = texture_source_from_string(*a.texture_source);
    if (a.uv_resolution)
        cfg.decompose.uv_resolution = *a.uv_resolution;

    const Raster image = stage("input", [&] { return load_raster(a.image); });
    if (image.channels() != 3)
        throw StageError("input", ErrorKind::InvalidArgument,
                         "expected an RGB image: " + a.image);
    cfg.scene.width = image.width();
    cfg.scene.height = image.height();

    std::optional<Raster> albedo;
    if (!a.albedo.empty())
        albedo = stage("input", [&] { return load_raster(a.albedo); });
    if (cfg.decompose.texture_source == TextureSource::Provided && !albedo)
        throw StageError("input", ErrorKind::InvalidArgument,
                         "--texture-source provided needs --albedo");

    const GeometryBuffers buffers = stage("geometry", [&] {
        const Mesh mesh = build_mesh(cfg.scene.mesh, ".");
        return rasterize(mesh, scene_camera(cfg.scene, mesh), image.width(),
                         image.height());
    });
    const fs::path out = prepare_out(cfg);
    const Decomposition dec = decompose(image, buffers, cfg.decompose,
                                        albedo ? &*albedo : nullptr);
    stage("export", [&] {
        export_decomposition(dec, cfg.decompose, out / "decomposition",
                             {a.timings});
        write_effective(cfg, out);
        return 0;
    });
    std::printf("decomposed %s (%s texture, %zu masked pixels) -> %s\n",
                a.image.c_str(), to_string(dec.texture_source).c_str(),
                buffers.covered_count(), (out / "decomposition").string().c_str());
    return 0;
}

// gen-dataset -------------------------------------------------------------

struct GenArgs {
    Common common;
    std::optional<int> n_real, n_fake, image_size;
};

int
run_gen_dataset(const GenArgs& a)
{
    PipelineConfig cfg = load_config(a.common);
    cfg.dataset.seed = cfg.seed;
    if (a.n_real)
        cfg.dataset.n_real = *a.n_real;
    if (a.n_fake)
        cfg.dataset.n_fake = *a.n_fake;
    if (a.image_size)
        cfg.dataset.image_size = *a.image_size;
    cfg.validate();
    const fs::path out = prepare_out(cfg);
    const auto samples
        = stage("generate", [&] { return generate_dataset(cfg.dataset, out); });
    write_effective(cfg, out);
    std::printf("generated %zu samples (%d real, %d fake) -> %s\n",
                samples.size(), cfg.dataset.n_real, cfg.dataset.n_fake,
                out.string().c_str());
    return 0;
}

// shared dataset loading --------------------------------------------------

std::vector<NetSample>
load_net_samples(const fs::path& dataset, const LoadedManifest& lm,
                 const std::vector<std::size_t>& indices, int input_size,
                 MapSpace space, Perturbation perturbation, std::uint64_t seed)
{
    std::vector<NetSample> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        const SampleManifest& m = lm.samples[i];
        const PreparedSample ps = load_prepared_sample(dataset, m, lm.config);
        const Decomposition dec = decompose_prepared(
            ps, lm.config.decompose, perturbation, Rng::mix(seed, i));
        out.push_back(make_net_sample(m, ps.image, dec, input_size, space));
    }
    return out;
}

MapSpace
map_space_from_string(const std::string& s)
{
    if (s == "uv")
        return MapSpace::Uv;
    if (s == "image")
        return MapSpace::Image;
    fail(ErrorKind::InvalidArgument, "unknown map space '" + s + "'");
}

// train -------------------------------------------------------------------

struct TrainArgs {
    Common common;
    std::string dataset;
    std::optional<int> epochs, batch, channels;
    std::optional<double> lr;
    bool image_only = false;
    bool learned_projections = false;
    std::string fusion = "attention";
    std::string map_space = "uv";
    double test_fraction = 0.5;
};

int
run_train(const TrainArgs& a)
{
    PipelineConfig cfg = load_config(a.common);
    cfg.train.seed = cfg.seed;
    if (a.epochs)
        cfg.train.epochs = *a.epochs;
    if (a.batch)
        cfg.train.batch = *a.batch;
    if (a.lr)
        cfg.train.lr = *a.lr;
    if (a.channels)
        cfg.model.channels = *a.channels;
    if (a.image_only)
        cfg.model.image_only = true;
    if (a.learned_projections)
        cfg.model.learned_projections = true;
    cfg.model.fusion = a.fusion == "concat" ? Fusion::Concat : Fusion::Attention;
    const MapSpace space = map_space_from_string(a.map_space);
    cfg.validate();

    const fs::path dataset(a.dataset);
    const LoadedManifest lm = stage("load", [&] { return load_manifest(dataset); });
    const Split split = stratified_split(lm.samples, a.test_fraction, cfg.seed);
    const auto samples = stage("load", [&] {
        return load_net_samples(dataset, lm, split.train, cfg.model.input_size,
                                space, Perturbation::None, cfg.seed);
    });
    const fs::path out = prepare_out(cfg);
    const TrainResult result = stage("train", [&] {
        return train_srinet(samples, cfg.model, cfg.train,
                            init_srinet_params(cfg.model, cfg.seed),
                            [](int epoch, double loss) {
                                std::printf("epoch %3d  loss %.6f\n", epoch + 1, loss);
                                std::fflush(stdout);
                            });
    });
    stage("export", [&] {
        save_checkpoint(result.params, out / "params.bin");
        std::string csv = "epoch,loss\n";
        char line[64];
        for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
            std::snprintf(line, sizeof line, "%zu,%.17g\n", e + 1,
                          result.epoch_loss[e]);
            csv += line;
        }
        write_text(out / "loss.csv", csv);
        const json model = {{"model", cfg.model},
                            {"train", cfg.train},
                            {"map_space", to_string(space)},
                            {"test_fraction", a.test_fraction},
                            {"split_seed", cfg.seed},
                            {"train_samples", split.train.size()},
                            {"test_samples", split.test.size()}};
        write_text(out / "model.json", model.dump(2) + "\n");
        write_effective(cfg, out);
        return 0;
    });
    std::printf("trained on %zu samples -> %s\n", samples.size(),
                out.string().c_str());
    return 0;
}

// eval --------------------------------------------------------------------

struct EvalArgs {
    Common common;
    std::string dataset;
    std::string detector = "baseline";
    std::string perturbation = "none";
    std::optional<std::string> score_mode;
    std::string model_dir;
    std::string split = "all";
    double test_fraction = 0.5;
};

int
run_eval(const EvalArgs& a)
{
    PipelineConfig cfg = load_config(a.common);
    if (a.score_mode)
        cfg.score.mode = score_mode_from_string(*a.score_mode);
    cfg.validate();
    const Perturbation pert = perturbation_from_string(a.perturbation);
    const fs::path dataset(a.dataset);
    const LoadedManifest lm = stage("load", [&] { return load_manifest(dataset); });

    std::vector<std::size_t> indices;
    json model_meta;
    if (a.detector == "srinet") {
        if (a.model_dir.empty())
            throw StageError("load", ErrorKind::InvalidArgument,
                             "--detector srinet needs --model");
        model_meta = read_json(fs::path(a.model_dir) / "model.json");
        indices = stratified_split(lm.samples,
                                   model_meta.at("test_fraction").get<double>(),
                                   model_meta.at("split_seed").get<std::uint64_t>())
                      .test;
    } else if (a.split == "test") {
        indices = stratified_split(lm.samples, a.test_fraction, cfg.seed).test;
    } else if (a.split == "all") {
        for (std::size_t i = 0; i < lm.samples.size(); ++i)
            indices.push_back(i);
    } else {
        throw StageError("load", ErrorKind::InvalidArgument,
                         "unknown split '" + a.split + "'");
    }
    std::vector<SampleManifest> chosen;
    for (std::size_t i : indices)
        chosen.push_back(lm.samples[i]);

    std::vector<double> scores;
    if (a.detector == "baseline") {
        scores = stage("score", [&] {
            std::vector<double> s;
            for (std::size_t i : indices) {
                const PreparedSample ps
                    = load_prepared_sample(dataset, lm.samples[i], lm.config);
                const Decomposition dec = decompose_prepared(
                    ps, lm.config.decompose, pert, Rng::mix(cfg.seed, i));
                s.push_back(physics_residual_score(dec, ps.buffers, cfg.score).score);
            }
            return s;
        });
    } else if (a.detector == "srinet") {
        scores = stage("score", [&] {
            const SrinetConfig model = model_meta.at("model").get<SrinetConfig>();
            const MapSpace space
                = map_space_from_string(model_meta.at("map_space").get<std::string>());
            const ModelParams params
                = load_checkpoint(fs::path(a.model_dir) / "params.bin");
            const auto samples = load_net_samples(
                dataset, lm, indices, model.input_size, space, pert, cfg.seed);
            return score_samples(samples, params, model);
        });
    } else if (a.detector == "oracle") {
        scores = oracle_scores(chosen);
    } else if (a.detector == "random") {
        scores = random_scores(chosen.size(), cfg.seed);
    } else {
        throw StageError("score", ErrorKind::InvalidArgument,
                         "unknown detector '" + a.detector + "'");
    }

    const fs::path out = prepare_out(cfg);
    const EvalReport report = make_report(a.detector, chosen, scores, pert);
    stage("export", [&] {
        write_report(report, out);
        write_effective(cfg, out);
        return 0;
    });
    std::printf("%s detector, perturbation %s, %zu samples: AUC %.4f\n",
                a.detector.c_str(), to_string(pert).c_str(), chosen.size(),
                report.auc);
    for (const auto& [mode, auc] : report.per_mode_auc)
        std::printf("  %-24s %.4f\n", to_string(mode).c_str(), auc);
    return 0;
}

// grad-check --------------------------------------------------------------

struct GradArgs {
    Common common;
    int input_size = 16;
    int batch = 2;
    double step = 1e-5;
    double threshold = 1e-4;
    std::size_t per_tensor = 0;
    bool learned_projections = false;
    std::string fusion = "attention";
};

int
run_grad_check(const GradArgs& a)
{
    PipelineConfig cfg = load_config(a.common);
    cfg.model.input_size = a.input_size;
    if (a.learned_projections)
        cfg.model.learned_projections = true;
    cfg.model.fusion = a.fusion == "concat" ? Fusion::Concat : Fusion::Attention;
    cfg.validate();

    GradCheckOptions opt;
    opt.model = cfg.model;
    opt.batch = a.batch;
    opt.step = a.step;
    opt.per_tensor = a.per_tensor;
    opt.seed = cfg.seed;
    const GradCheckResult r = stage("grad-check", [&] { return grad_check_srinet(opt); });

    const fs::path out = prepare_out(cfg);
    json params = json::array();
    for (const GradCheckEntry& e : r.params)
        params.push_back({{"name", e.name},
                          {"checked", e.checked},
                          {"skipped", e.skipped},
                          {"max_rel", e.max_rel},
                          {"max_abs", e.max_abs}});
    const json report = {{"max_rel", r.max_rel},
                         {"threshold", a.threshold},
                         {"checked", r.checked},
                         {"skipped", r.skipped},
                         {"step", a.step},
                         {"batch", a.batch},
                         {"params", params}};
    stage("export", [&] {
        write_text(out / "grad_check.json", report.dump(2) + "\n");
        write_effective(cfg, out);
        return 0;
    });
    for (const GradCheckEntry& e : r.params)
        std::printf("  %-22s %6zu checked  max rel %.3e\n", e.name.c_str(),
                    e.checked, e.max_rel);
    std::printf("max relative error %.3e over %zu entries (%zu skipped at "
                "relu kinks), threshold %.1e\n",
                r.max_rel, r.checked, r.skipped, a.threshold);
    if (r.max_rel > a.threshold) {
        std::fprintf(stderr, "grad-check: threshold exceeded\n");
        return kExitInternal;
    }
    return 0;
}

// bench -------------------------------------------------------------------

struct BenchArgs {
    Common common;
    int size = 256;
    int repeats = 3;
    int pca_rank = 16;
    int pca_iterations = 10;
    int pca_resolution = 128;
};

int
run_bench(const BenchArgs& a)
{
    PipelineConfig cfg = load_config(a.common);
    cfg.scene.width = cfg.scene.height = a.size;
    cfg.validate();
    const RenderedScene r
        = stage("render", [&] { return render_scene_spec(cfg.scene, "."); });
    FitTimingOptions opt;
    opt.retinex = cfg.decompose.retinex;
    opt.fit = cfg.decompose.fit;
    opt.pca_rank = a.pca_rank;
    opt.pca_iterations = a.pca_iterations;
    opt.pca_resolution = a.pca_resolution;
    opt.repeats = a.repeats;
    opt.seed = cfg.seed;
    const FitTiming t
        = stage("bench", [&] { return time_fit_paths(r.image, r.buffers, opt); });
    const fs::path out = prepare_out(cfg);
    write_effective(cfg, out);
    std::printf("input %dx%d, median of %d runs\n", a.size, a.size, a.repeats);
    std::printf("msr-constrained fit  %.4f s\n", t.msr_s);
    std::printf("pca-texture fit      %.4f s (K=%d, %d iterations)\n", t.pca_s,
                a.pca_rank, t.pca_iterations);
    std::printf("ratio pca/msr        %.3f\n", t.ratio());
    return 0;
}

}  // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Specular-reflection decomposition, synthetic forgery "
                 "benchmark and detector tooling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "specsep 0.1.0");

    RenderArgs render;
    auto* c_render = app.add_subcommand("render", "Render a Phong scene and its components");
    add_common(c_render, render.common, false);
    c_render->add_option("--scene", render.scene_path, "Scene JSON (replaces the config's scene)")
        ->check(CLI::ExistingFile);
    c_render->add_option("--size", render.size, "Square output size in pixels");

    DecomposeArgs dec;
    auto* c_dec = app.add_subcommand("decompose", "Decompose an image into texture, light and specular maps");
    add_common(c_dec, dec.common, false);
    c_dec->add_option("--image", dec.image, "Input image (PNG or PPM)")->required();
    c_dec->add_option("--obj", dec.obj, "Mesh OBJ aligned with the image");
    c_dec->add_option("--scene", dec.scene_path,
                      "Scene JSON giving the mesh and view (synthetic meshes)")
        ->check(CLI::ExistingFile);
    c_dec->add_option("--albedo", dec.albedo, "Albedo image for --texture-source provided");
    c_dec->add_option("--texture-source", dec.texture_source, "msr or provided")
        ->check(CLI::IsMember({"msr", "provided"}));
    c_dec->add_option("--uv-resolution", dec.uv_resolution, "UV map resolution");
    c_dec->add_flag("--timings", dec.timings, "Record per-stage wall times in meta.json");

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen-dataset", "Generate the synthetic real/fake corpus");
    add_common(c_gen, gen.common, true);
    c_gen->add_option("--n-real", gen.n_real, "Number of real samples");
    c_gen->add_option("--n-fake", gen.n_fake, "Number of fake samples");
    c_gen->add_option("--image-size", gen.image_size, "Square image size");

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Train the detector on the train split of a corpus");
    add_common(c_train, train.common, true);
    c_train->add_option("--dataset", train.dataset, "Corpus directory")->required();
    c_train->add_option("--epochs", train.epochs, "Training epochs");
    c_train->add_option("--batch", train.batch, "Mini-batch size");
    c_train->add_option("--lr", train.lr, "Adam learning rate");
    c_train->add_option("--channels", train.channels, "Feature width of every conv block");
    c_train->add_flag("--image-only", train.image_only, "Use the image branch alone");
    c_train->add_flag("--learned-projections", train.learned_projections,
                      "Learned query and key/value projections in attention");
    c_train->add_option("--fusion", train.fusion, "attention or concat")
        ->check(CLI::IsMember({"attention", "concat"}));
    c_train->add_option("--map-space", train.map_space, "uv or image")
        ->check(CLI::IsMember({"uv", "image"}));
    c_train->add_option("--test-fraction", train.test_fraction, "Held-out fraction per class")
        ->check(CLI::Range(0.01, 0.99));

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "Score a corpus and write ROC, histogram and AUC reports");
    add_common(c_eval, ev.common, true);
    c_eval->add_option("--dataset", ev.dataset, "Corpus directory")->required();
    c_eval->add_option("--detector", ev.detector, "baseline, srinet, oracle or random")
        ->check(CLI::IsMember({"baseline", "srinet", "oracle", "random"}));
    c_eval->add_option("--perturbation", ev.perturbation,
                       "none, gaussian_blur, jpeg_like or gaussian_noise")
        ->check(CLI::IsMember({"none", "gaussian_blur", "jpeg_like", "gaussian_noise"}));
    c_eval->add_option("--score-mode", ev.score_mode, "Baseline scorer: free or coupled")
        ->check(CLI::IsMember({"free", "coupled"}));
    c_eval->add_option("--model", ev.model_dir, "Output directory of a train run");
    c_eval->add_option("--split", ev.split, "all or test (srinet always uses its test split)")
        ->check(CLI::IsMember({"all", "test"}));
    c_eval->add_option("--test-fraction", ev.test_fraction, "Held-out fraction for --split test")
        ->check(CLI::Range(0.01, 0.99));

    GradArgs grad;
    auto* c_grad = app.add_subcommand("grad-check", "Compare taped gradients with central differences");
    add_common(c_grad, grad.common, true);
    c_grad->add_option("--input-size", grad.input_size, "Spatial size of the random inputs");
    c_grad->add_option("--batch", grad.batch, "Batch size");
    c_grad->add_option("--step", grad.step, "Finite-difference step");
    c_grad->add_option("--threshold", grad.threshold, "Maximum allowed relative error");
    c_grad->add_option("--per-tensor", grad.per_tensor,
                       "Entries checked per parameter tensor (0 = all)");
    c_grad->add_flag("--learned-projections", grad.learned_projections,
                     "Check the learned-projection variant");
    c_grad->add_option("--fusion", grad.fusion, "attention or concat")
        ->check(CLI::IsMember({"attention", "concat"}));

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "Time the MSR-constrained fit against the PCA texture fit");
    add_common(c_bench, bench.common, true);
    c_bench->add_option("--size", bench.size, "Square input size");
    c_bench->add_option("--repeats", bench.repeats, "Timed repetitions (median reported)");
    c_bench->add_option("--pca-rank", bench.pca_rank, "PCA basis size K");
    c_bench->add_option("--pca-iterations", bench.pca_iterations, "Alternating iterations");
    c_bench->add_option("--pca-resolution", bench.pca_resolution, "PCA texel grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*c_render)
            return run_render(render);
        if (*c_dec)
            return run_decompose(dec);
        if (*c_gen)
            return run_gen_dataset(gen);
        if (*c_train)
            return run_train(train);
        if (*c_eval)
            return run_eval(ev);
        if (*c_grad)
            return run_grad_check(grad);
        if (*c_bench)
            return run_bench(bench);
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitInternal;
}
