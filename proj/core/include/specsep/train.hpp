// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specsep/srinet.hpp"

namespace specsep {

/// One training example; every map is [3, S, S].
struct NetSample {
    std::string id;
    int label = 0;  // 1 = fake
    Tensor img, spr, tex, dir;
};

/// Stacks the listed samples into [N, 3, S, S] inputs.
SrinetInputs make_batch(const std::vector<NetSample>& samples,
                        const std::vector<std::size_t>& indices);
std::vector<int> batch_labels(const std::vector<NetSample>& samples,
                              const std::vector<std::size_t>& indices);

struct TrainConfig {
    double lr = 1e-3;
    int epochs = 30;
    int batch = 16;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

class Adam {
public:
    Adam(const ModelParams& params, const TrainConfig& config);

    /// Applies one update given gradients in parameter order.
    void step(ModelParams& params, const std::vector<const Tensor*>& grads);

private:
    TrainConfig m_config;
    std::vector<Tensor> m_m, m_v;
    long m_t = 0;
};

struct TrainResult {
    ModelParams params;
    std::vector<double> epoch_loss;  // mean batch loss per epoch
    std::vector<double> step_loss;
};

/// Mini-batch training with per-epoch seeded shuffling. A non-finite loss
/// raises a Numerical error naming the epoch and step.
TrainResult train_srinet(const std::vector<NetSample>& samples,
                         const SrinetConfig& model, const TrainConfig& config,
                         ModelParams initial,
                         const std::function<void(int, double)>& on_epoch = {});

/// Loss and parameter gradients for one batch.
double loss_and_grads(const SrinetInputs& inputs,
                      const std::vector<int>& labels,
                      const ModelParams& params, const SrinetConfig& config,
                      std::vector<Tensor>* grads);

/// logit_fake - logit_real for every sample, evaluated in chunks.
std::vector<double> score_samples(const std::vector<NetSample>& samples,
                                  const ModelParams& params,
                                  const SrinetConfig& config,
                                  std::size_t chunk = 64);

}  // namespace specsep
