// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specsep/autograd.hpp"
#include "specsep/tensor.hpp"

namespace specsep {

/// Named parameter tensors in a fixed order.
class ModelParams {
public:
    void add(const std::string& name, Tensor value);
    bool contains(const std::string& name) const;
    Tensor& get(const std::string& name);
    const Tensor& get(const std::string& name) const;

    std::size_t count() const noexcept { return m_names.size(); }
    const std::string& name(std::size_t i) const { return m_names.at(i); }
    Tensor& at(std::size_t i) { return m_values.at(i); }
    const Tensor& at(std::size_t i) const { return m_values.at(i); }
    std::size_t scalar_count() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    std::vector<std::string> m_names;
    std::vector<Tensor> m_values;
};

enum class Fusion {
    /// Two-stage cross attention over texture, direct light and specular
    /// tokens, concatenated with the pooled image branch.
    Attention,
    /// Pooled texture, direct, specular and image features concatenated
    /// without attention.
    Concat,
};

struct SrinetConfig {
    int input_size = 32;   // spatial size of every input map
    int channels = 8;      // feature width of every conv block
    int token_grid = 8;    // tokens form a token_grid x token_grid grid
    bool image_only = false;
    Fusion fusion = Fusion::Attention;
    bool learned_projections = false;

    /// Throws unless the entry block output (input_size / 2) is a positive
    /// multiple of token_grid.
    void validate() const;
};

void to_json(nlohmann::json& j, const SrinetConfig& c);
void from_json(const nlohmann::json& j, SrinetConfig& c);

/// Every tensor uniform in [-sqrt(1/fan_in), sqrt(1/fan_in)].
ModelParams init_srinet_params(const SrinetConfig& config, std::uint64_t seed);

/// Batched network inputs, each [N, 3, S, S]. img is image-space; spr, tex
/// and dir are normally UV-space.
struct SrinetInputs {
    Tensor img, spr, tex, dir;

    int batch() const { return img.dim(0); }
};

/// Parameters placed on a tape as differentiable leaves.
struct BoundParams {
    std::vector<Tape::Id> ids;  // same order as ModelParams

    Tape::Id operator()(const ModelParams& params,
                        const std::string& name) const;
};

BoundParams bind_params(Tape& tape, const ModelParams& params,
                        bool requires_grad = true);

enum class BlockStage { Entry, Middle };

/// Two 3x3 conv + relu layers named prefix.conv1 / prefix.conv2; the entry
/// stage ends with a 2x2 average pool.
Tape::Id conv_block_forward(Tape& tape, Tape::Id x, const ModelParams& params,
                            const BoundParams& bound, const std::string& prefix,
                            BlockStage stage);

/// Records the network on the tape and returns the logits [N, 2].
Tape::Id srinet_forward(Tape& tape, const SrinetInputs& inputs,
                        const ModelParams& params, const BoundParams& bound,
                        const SrinetConfig& config);

/// Logits without gradient bookkeeping.
Tensor srinet_logits(const SrinetInputs& inputs, const ModelParams& params,
                     const SrinetConfig& config);

/// logit_fake - logit_real for each sample.
std::vector<double> srinet_scores(const SrinetInputs& inputs,
                                  const ModelParams& params,
                                  const SrinetConfig& config);

}  // namespace specsep
