// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "specsep/error.hpp"
#include "specsep/random.hpp"

namespace specsep {

SrinetInputs
make_batch(const std::vector<NetSample>& samples,
           const std::vector<std::size_t>& indices)
{
    require(!indices.empty(), "empty batch");
    const NetSample& first = samples.at(indices[0]);
    SrinetInputs in;
    auto stack = [&](Tensor NetSample::*field) {
        const Tensor& proto = first.*field;
        if (proto.size() == 0)
            return Tensor();
        std::vector<int> shape{int(indices.size())};
        shape.insert(shape.end(), proto.shape().begin(), proto.shape().end());
        Tensor out(shape);
        const std::size_t stride = proto.size();
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const Tensor& t = samples.at(indices[i]).*field;
            require(t.shape() == proto.shape(), "sample map shapes differ");
            std::copy(t.ptr(), t.ptr() + stride, out.ptr() + i * stride);
        }
        return out;
    };
    in.img = stack(&NetSample::img);
    in.spr = stack(&NetSample::spr);
    in.tex = stack(&NetSample::tex);
    in.dir = stack(&NetSample::dir);
    return in;
}

std::vector<int>
batch_labels(const std::vector<NetSample>& samples,
             const std::vector<std::size_t>& indices)
{
    std::vector<int> out;
    for (std::size_t i : indices)
        out.push_back(samples.at(i).label);
    return out;
}

void
TrainConfig::validate() const
{
    require(lr >= 0.0, "learning rate must be non-negative");
    require(epochs >= 0, "epochs must be non-negative");
    require(batch >= 1, "batch size must be positive");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
            "Adam betas must lie in [0, 1)");
    require(adam_epsilon > 0.0, "Adam epsilon must be positive");
}

void
to_json(nlohmann::json& j, const TrainConfig& c)
{
    j = {{"lr", c.lr},       {"epochs", c.epochs}, {"batch", c.batch},
         {"seed", c.seed},   {"beta1", c.beta1},   {"beta2", c.beta2},
         {"adam_epsilon", c.adam_epsilon}};
}

void
from_json(const nlohmann::json& j, TrainConfig& c)
{
    TrainConfig d;
    for (const auto& [key, value] : j.items()) {
        if (key == "lr")
            d.lr = value.get<double>();
        else if (key == "epochs")
            d.epochs = value.get<int>();
        else if (key == "batch")
            d.batch = value.get<int>();
        else if (key == "seed")
            d.seed = value.get<std::uint64_t>();
        else if (key == "beta1")
            d.beta1 = value.get<double>();
        else if (key == "beta2")
            d.beta2 = value.get<double>();
        else if (key == "adam_epsilon")
            d.adam_epsilon = value.get<double>();
        else
            fail(ErrorKind::InvalidArgument, "unknown train key '" + key + "'");
    }
    c = d;
}

Adam::Adam(const ModelParams& params, const TrainConfig& config)
    : m_config(config)
{
    for (std::size_t i = 0; i < params.count(); ++i) {
        m_m.emplace_back(params.at(i).shape(), 0.0);
        m_v.emplace_back(params.at(i).shape(), 0.0);
    }
}

void
Adam::step(ModelParams& params, const std::vector<const Tensor*>& grads)
{
    require(grads.size() == params.count(), "gradient count mismatch");
    ++m_t;
    const double b1 = m_config.beta1, b2 = m_config.beta2;
    const double c1 = 1.0 - std::pow(b1, double(m_t));
    const double c2 = 1.0 - std::pow(b2, double(m_t));
    for (std::size_t i = 0; i < params.count(); ++i) {
        if (grads[i] == nullptr || grads[i]->size() == 0)
            continue;
        Tensor& p = params.at(i);
        const Tensor& g = *grads[i];
        Tensor& m = m_m[i];
        Tensor& v = m_v[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            const double mh = m[k] / c1;
            const double vh = v[k] / c2;
            p[k] -= m_config.lr * mh / (std::sqrt(vh) + m_config.adam_epsilon);
        }
    }
}

double
loss_and_grads(const SrinetInputs& inputs, const std::vector<int>& labels,
               const ModelParams& params, const SrinetConfig& config,
               std::vector<Tensor>* grads)
{
    Tape tape;
    const BoundParams bound = bind_params(tape, params, grads != nullptr);
    const Tape::Id logits = srinet_forward(tape, inputs, params, bound, config);
    const Tape::Id loss = tape.softmax_cross_entropy(logits, labels);
    const double value = tape.value(loss)[0];
    if (grads) {
        tape.backward(loss);
        grads->clear();
        for (std::size_t i = 0; i < params.count(); ++i) {
            const Tensor& g = tape.grad(bound.ids[i]);
            grads->push_back(g.size() ? g : Tensor(params.at(i).shape(), 0.0));
        }
    }
    return value;
}

TrainResult
train_srinet(const std::vector<NetSample>& samples, const SrinetConfig& model,
             const TrainConfig& config, ModelParams initial,
             const std::function<void(int, double)>& on_epoch)
{
    config.validate();
    model.validate();
    require(!samples.empty(), "training set is empty");

    TrainResult result;
    result.params = std::move(initial);
    Adam adam(result.params, config);
    Rng rng(Rng::mix(config.seed, 0x5472));
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::vector<Tensor> grads;
    std::vector<const Tensor*> grad_ptrs;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        double total = 0.0;
        int steps = 0;
        for (std::size_t start = 0; start < order.size();
             start += std::size_t(config.batch)) {
            const std::size_t end
                = std::min(order.size(), start + std::size_t(config.batch));
            const std::vector<std::size_t> idx(order.begin() + long(start),
                                               order.begin() + long(end));
            const double loss
                = loss_and_grads(make_batch(samples, idx),
                                 batch_labels(samples, idx), result.params,
                                 model, &grads);
            if (!std::isfinite(loss))
                fail(ErrorKind::Numerical,
                     "non-finite training loss at epoch " + std::to_string(epoch)
                         + ", step " + std::to_string(steps) + " (first sample "
                         + samples[idx[0]].id + ")");
            grad_ptrs.clear();
            for (const Tensor& g : grads)
                grad_ptrs.push_back(&g);
            adam.step(result.params, grad_ptrs);
            result.step_loss.push_back(loss);
            total += loss;
            ++steps;
        }
        result.epoch_loss.push_back(total / std::max(steps, 1));
        if (on_epoch)
            on_epoch(epoch, result.epoch_loss.back());
    }
    return result;
}

std::vector<double>
score_samples(const std::vector<NetSample>& samples, const ModelParams& params,
              const SrinetConfig& config, std::size_t chunk)
{
    std::vector<double> out;
    out.reserve(samples.size());
    for (std::size_t start = 0; start < samples.size(); start += chunk) {
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < std::min(samples.size(), start + chunk);
             ++i)
            idx.push_back(i);
        const auto s = srinet_scores(make_batch(samples, idx), params, config);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

}  // namespace specsep
