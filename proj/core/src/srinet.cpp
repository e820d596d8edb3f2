// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/srinet.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "specsep/error.hpp"
#include "specsep/random.hpp"

namespace specsep {

void
ModelParams::add(const std::string& name, Tensor value)
{
    require(!contains(name), "duplicate parameter '" + name + "'");
    m_names.push_back(name);
    m_values.push_back(std::move(value));
}

bool
ModelParams::contains(const std::string& name) const
{
    for (const auto& n : m_names)
        if (n == name)
            return true;
    return false;
}

Tensor&
ModelParams::get(const std::string& name)
{
    for (std::size_t i = 0; i < m_names.size(); ++i)
        if (m_names[i] == name)
            return m_values[i];
    fail(ErrorKind::InvalidArgument, "unknown parameter '" + name + "'");
}

const Tensor&
ModelParams::get(const std::string& name) const
{
    return const_cast<ModelParams*>(this)->get(name);
}

std::size_t
ModelParams::scalar_count() const
{
    std::size_t n = 0;
    for (const Tensor& t : m_values)
        n += t.size();
    return n;
}

void
SrinetConfig::validate() const
{
    require(input_size >= 2 && input_size % 2 == 0,
            "input size must be even and positive");
    require(channels >= 1, "channel count must be positive");
    require(token_grid >= 1 && (input_size / 2) % token_grid == 0,
            "token grid must divide half the input size");
}

void
to_json(nlohmann::json& j, const SrinetConfig& c)
{
    j = {{"input_size", c.input_size},
         {"channels", c.channels},
         {"token_grid", c.token_grid},
         {"image_only", c.image_only},
         {"fusion", c.fusion == Fusion::Attention ? "attention" : "concat"},
         {"learned_projections", c.learned_projections}};
}

void
from_json(const nlohmann::json& j, SrinetConfig& c)
{
    SrinetConfig d;
    for (const auto& [key, value] : j.items()) {
        if (key == "input_size")
            d.input_size = value.get<int>();
        else if (key == "channels")
            d.channels = value.get<int>();
        else if (key == "token_grid")
            d.token_grid = value.get<int>();
        else if (key == "image_only")
            d.image_only = value.get<bool>();
        else if (key == "fusion") {
            const auto f = value.get<std::string>();
            if (f == "attention")
                d.fusion = Fusion::Attention;
            else if (f == "concat")
                d.fusion = Fusion::Concat;
            else
                fail(ErrorKind::InvalidArgument, "unknown fusion '" + f + "'");
        } else if (key == "learned_projections")
            d.learned_projections = value.get<bool>();
        else
            fail(ErrorKind::InvalidArgument, "unknown model key '" + key + "'");
    }
    c = d;
}

namespace {

void
add_uniform(ModelParams& params, Rng& rng, const std::string& name,
            std::vector<int> shape, int fan_in)
{
    const double bound = std::sqrt(1.0 / fan_in);
    Tensor t(std::move(shape));
    for (double& v : t.data())
        v = rng.uniform(-bound, bound);
    params.add(name, std::move(t));
}

void
add_block(ModelParams& params, Rng& rng, const std::string& prefix, int in,
          int out)
{
    add_uniform(params, rng, prefix + ".conv1.w", {out, in, 3, 3}, in * 9);
    add_uniform(params, rng, prefix + ".conv1.b", {out}, in * 9);
    add_uniform(params, rng, prefix + ".conv2.w", {out, out, 3, 3}, out * 9);
    add_uniform(params, rng, prefix + ".conv2.b", {out}, out * 9);
}

}  // namespace

ModelParams
init_srinet_params(const SrinetConfig& config, std::uint64_t seed)
{
    config.validate();
    const int C = config.channels;
    Rng rng(seed);
    ModelParams p;
    add_block(p, rng, "img.entry", 3, C);
    add_block(p, rng, "img.middle", C, C);
    if (config.image_only) {
        add_uniform(p, rng, "head.w", {2, C}, C);
        add_uniform(p, rng, "head.b", {2}, C);
        return p;
    }
    add_block(p, rng, "tex.entry", 3, C);
    add_block(p, rng, "dir.entry", 3, C);
    add_block(p, rng, "spr.entry", 3, C);
    add_block(p, rng, "spr.middle", C, C);
    if (config.fusion == Fusion::Attention) {
        add_block(p, rng, "td.middle", C, C);
        if (config.learned_projections) {
            for (const char* name : {"ca1.wq", "ca1.wkv", "ca2.wq", "ca2.wkv"})
                add_uniform(p, rng, name, {C, C}, C);
        }
        add_uniform(p, rng, "head.w", {2, 2 * C}, 2 * C);
        add_uniform(p, rng, "head.b", {2}, 2 * C);
    } else {
        add_uniform(p, rng, "head.w", {2, 4 * C}, 4 * C);
        add_uniform(p, rng, "head.b", {2}, 4 * C);
    }
    return p;
}

Tape::Id
BoundParams::operator()(const ModelParams& params,
                        const std::string& name) const
{
    for (std::size_t i = 0; i < params.count(); ++i)
        if (params.name(i) == name)
            return ids.at(i);
    fail(ErrorKind::InvalidArgument, "unknown parameter '" + name + "'");
}

BoundParams
bind_params(Tape& tape, const ModelParams& params, bool requires_grad)
{
    BoundParams b;
    for (std::size_t i = 0; i < params.count(); ++i)
        b.ids.push_back(tape.leaf(params.at(i), requires_grad));
    return b;
}

Tape::Id
conv_block_forward(Tape& tape, Tape::Id x, const ModelParams& params,
                   const BoundParams& bound, const std::string& prefix,
                   BlockStage stage)
{
    Tape::Id h = tape.relu(tape.conv3x3(x, bound(params, prefix + ".conv1.w"),
                                        bound(params, prefix + ".conv1.b")));
    h = tape.relu(tape.conv3x3(h, bound(params, prefix + ".conv2.w"),
                               bound(params, prefix + ".conv2.b")));
    return stage == BlockStage::Entry ? tape.avg_pool(h, 2) : h;
}

namespace {

void
check_input(const Tensor& t, int n, const SrinetConfig& config,
            const char* name)
{
    const std::vector<int> want{n, 3, config.input_size, config.input_size};
    if (t.shape() != want)
        fail(ErrorKind::InvalidArgument,
             std::string("input '") + name + "' has shape "
                 + shape_string(t.shape()) + ", expected "
                 + shape_string(want));
}

Tape::Id
tokens(Tape& tape, Tape::Id x, const SrinetConfig& config)
{
    const int side = tape.value(x).dim(2);
    const int f = side / config.token_grid;
    return tape.to_tokens(f > 1 ? tape.avg_pool(x, f) : x);
}

Tape::Id
attend(Tape& tape, Tape::Id q, Tape::Id kv, std::vector<Tape::Id> residuals,
       const ModelParams& params, const BoundParams& bound,
       const SrinetConfig& config, const std::string& stage)
{
    if (config.learned_projections) {
        q = tape.token_linear(q, bound(params, stage + ".wq"));
        kv = tape.token_linear(kv, bound(params, stage + ".wkv"));
    }
    return cross_attention(tape, q, kv, residuals);
}

}  // namespace

Tape::Id
srinet_forward(Tape& tape, const SrinetInputs& inputs,
               const ModelParams& params, const BoundParams& bound,
               const SrinetConfig& config)
{
    config.validate();
    require(inputs.img.rank() == 4, "image input must be [N,3,S,S]");
    const int n = inputs.batch();
    check_input(inputs.img, n, config, "img");

    const Tape::Id img = tape.leaf(inputs.img);
    const Tape::Id img_feat = tape.global_avg_pool(conv_block_forward(
        tape,
        conv_block_forward(tape, img, params, bound, "img.entry",
                           BlockStage::Entry),
        params, bound, "img.middle", BlockStage::Middle));
    if (config.image_only)
        return tape.linear(img_feat, bound(params, "head.w"),
                           bound(params, "head.b"));

    check_input(inputs.tex, n, config, "tex");
    check_input(inputs.dir, n, config, "dir");
    check_input(inputs.spr, n, config, "spr");
    const Tape::Id tex_map = conv_block_forward(
        tape, tape.leaf(inputs.tex), params, bound, "tex.entry",
        BlockStage::Entry);
    const Tape::Id dir_map = conv_block_forward(
        tape, tape.leaf(inputs.dir), params, bound, "dir.entry",
        BlockStage::Entry);
    const Tape::Id spr_map = conv_block_forward(
        tape,
        conv_block_forward(tape, tape.leaf(inputs.spr), params, bound,
                           "spr.entry", BlockStage::Entry),
        params, bound, "spr.middle", BlockStage::Middle);
    const Tape::Id f_tex = tokens(tape, tex_map, config);
    const Tape::Id f_dl = tokens(tape, dir_map, config);
    const Tape::Id f_spr = tokens(tape, spr_map, config);

    Tape::Id fused;
    if (config.fusion == Fusion::Concat) {
        fused = tape.concat({tape.mean_tokens(f_tex), tape.mean_tokens(f_dl),
                             tape.mean_tokens(f_spr), img_feat});
    } else {
        const int g = config.token_grid;
        const Tape::Id f_td = attend(tape, f_tex, f_dl, {f_tex, f_dl}, params,
                                     bound, config, "ca1");
        const Tape::Id f_td2 = tape.to_tokens(conv_block_forward(
            tape, tape.from_tokens(f_td, g, g), params, bound, "td.middle",
            BlockStage::Middle));
        const Tape::Id f_std = attend(tape, f_td2, f_spr, {f_spr}, params,
                                      bound, config, "ca2");
        fused = tape.concat({tape.mean_tokens(f_std), img_feat});
    }
    return tape.linear(fused, bound(params, "head.w"), bound(params, "head.b"));
}

Tensor
srinet_logits(const SrinetInputs& inputs, const ModelParams& params,
              const SrinetConfig& config)
{
    Tape tape;
    const BoundParams bound = bind_params(tape, params, false);
    return tape.value(srinet_forward(tape, inputs, params, bound, config));
}

std::vector<double>
srinet_scores(const SrinetInputs& inputs, const ModelParams& params,
              const SrinetConfig& config)
{
    const Tensor z = srinet_logits(inputs, params, config);
    std::vector<double> out(std::size_t(z.dim(0)));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = z[i * 2 + 1] - z[i * 2];
    return out;
}

}  // namespace specsep
