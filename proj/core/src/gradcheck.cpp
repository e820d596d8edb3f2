// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "specsep/error.hpp"
#include "specsep/random.hpp"
#include "specsep/train.hpp"

namespace specsep {

double
relative_error(double analytic, double numeric, double floor)
{
    const double scale
        = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / scale;
}

GradCheckResult
grad_check_srinet(const GradCheckOptions& options)
{
    options.model.validate();
    require(options.batch > 0, "batch must be positive");
    require(options.step > 0.0, "step must be positive");
    require(options.floor > 0.0, "floor must be positive");
    require(options.kink_tolerance > 0.0, "kink_tolerance must be positive");

    const int s = options.model.input_size;
    Rng rng(Rng::mix(options.seed, 0x4743484bull));
    auto random_input = [&] {
        Tensor t({options.batch, 3, s, s});
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = rng.uniform();
        return t;
    };
    SrinetInputs inputs;
    inputs.img = random_input();
    inputs.spr = random_input();
    inputs.tex = random_input();
    inputs.dir = random_input();
    std::vector<int> labels(std::size_t(options.batch));
    for (std::size_t i = 0; i < labels.size(); ++i)
        labels[i] = int(i % 2);

    ModelParams params = init_srinet_params(
        options.model, Rng::mix(options.seed, 0x494e4954ull));
    std::vector<Tensor> grads;
    loss_and_grads(inputs, labels, params, options.model, &grads);

    GradCheckResult result;
    for (std::size_t k = 0; k < params.count(); ++k) {
        Tensor& w = params.at(k);
        GradCheckEntry entry;
        entry.name = params.name(k);
        const std::size_t n = w.size();
        const std::size_t stride
            = options.per_tensor == 0 || options.per_tensor >= n
                  ? 1
                  : n / options.per_tensor;
        for (std::size_t i = 0; i < n; i += stride) {
            const double saved = w[i];
            auto central = [&](double h) {
                w[i] = saved + h;
                const double up = loss_and_grads(inputs, labels, params,
                                                 options.model, nullptr);
                w[i] = saved - h;
                const double down = loss_and_grads(inputs, labels, params,
                                                   options.model, nullptr);
                w[i] = saved;
                return (up - down) / (2.0 * h);
            };
            // Smooth points give matching estimates at h and h / 2; a relu
            // kink crossed by the wider probe does not.
            auto consistent = [&](double h, double& numeric) {
                numeric = central(h);
                return std::abs(numeric - central(0.5 * h)) <= options.kink_tolerance;
            };
            double numeric = 0.0;
            if (!consistent(options.step, numeric)
                && !consistent(0.1 * options.step, numeric)) {
                ++entry.skipped;
                continue;
            }
            const double analytic = grads[k][i];
            entry.max_rel = std::max(
                entry.max_rel, relative_error(analytic, numeric, options.floor));
            entry.max_abs = std::max(entry.max_abs, std::abs(analytic - numeric));
            ++entry.checked;
        }
        result.max_rel = std::max(result.max_rel, entry.max_rel);
        result.checked += entry.checked;
        result.skipped += entry.skipped;
        result.params.push_back(entry);
    }
    return result;
}

}  // namespace specsep
