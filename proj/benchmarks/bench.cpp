// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "specsep/decompose.hpp"
#include "specsep/raster.hpp"
#include "specsep/retinex.hpp"
#include "specsep/scene.hpp"
#include "specsep/sh.hpp"
#include "specsep/srinet.hpp"

using namespace specsep;

namespace {

Raster
noise_image(int size)
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> d(0.05, 1.0);
    Raster r(size, size, 3);
    for (double& v : r.data())
        v = d(gen);
    return r;
}

const RenderedScene&
face_scene()
{
    static const RenderedScene scene = [] {
        SceneSpec s;
        s.phong.exponent = 16.0;
        return render_scene_spec(s);
    }();
    return scene;
}

}  // namespace

static void
BM_GaussianBlur(benchmark::State& state)
{
    const Raster img = noise_image(256);
    const double sigma = double(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(gaussian_blur(img, GaussianSpec{sigma}));
}
BENCHMARK(BM_GaussianBlur)->Arg(15)->Arg(80)->Arg(120)->Unit(benchmark::kMillisecond);

static void
BM_MsrConstrainedFit(benchmark::State& state)
{
    const RenderedScene& r = face_scene();
    for (auto _ : state) {
        const TextureMap t = multi_scale_retinex(r.image, RetinexConfig{});
        benchmark::DoNotOptimize(fit_sh_coefficients(r.image, t.albedo, r.buffers));
    }
}
BENCHMARK(BM_MsrConstrainedFit)->Unit(benchmark::kMillisecond);

static void
BM_PcaTextureFit(benchmark::State& state)
{
    const RenderedScene& r = face_scene();
    const PCATextureBasis basis = make_synthetic_pca_basis(128, 16, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            fit_pca_texture_baseline(r.image, r.buffers, basis, 10, 0.0));
}
BENCHMARK(BM_PcaTextureFit)->Unit(benchmark::kMillisecond);

static void
BM_Decompose(benchmark::State& state)
{
    const RenderedScene& r = face_scene();
    DecomposeConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(decompose(r.image, r.buffers, cfg));
}
BENCHMARK(BM_Decompose)->Unit(benchmark::kMillisecond);

static void
BM_SrinetForward(benchmark::State& state)
{
    SrinetConfig cfg;
    const ModelParams params = init_srinet_params(cfg, 3);
    const int n = int(state.range(0));
    std::mt19937_64 gen(4);
    std::normal_distribution<double> d;
    auto input = [&] {
        Tensor t({n, 3, cfg.input_size, cfg.input_size});
        for (double& v : t.data())
            v = d(gen);
        return t;
    };
    const SrinetInputs in{input(), input(), input(), input()};
    for (auto _ : state)
        benchmark::DoNotOptimize(srinet_logits(in, params, cfg));
}
BENCHMARK(BM_SrinetForward)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
