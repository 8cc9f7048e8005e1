// SPDX-License-Identifier: Apache-2.0
//
// sitebeam: site-specific probing codebooks and generative beam refinement
// Copyright (C) 2026 The sitebeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "sitebeam/nn.hpp"
#include "sitebeam/errors.hpp"

#include <cmath>

namespace sitebeam::nn
{
    std::size_t ParamStore::add(std::string name, Tensor init)
    {
        if (find(name))
            throw std::invalid_argument("duplicate parameter name: " + name);
        names_.push_back(std::move(name));
        values_.push_back(std::move(init));
        return values_.size() - 1;
    }

    std::optional<std::size_t> ParamStore::find(const std::string &name) const
    {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name)
                return i;
        return std::nullopt;
    }

    std::size_t ParamStore::parameter_count() const
    {
        std::size_t n = 0;
        for (const auto &v : values_)
            n += v.size();
        return n;
    }

    bool ParamStore::all_finite() const
    {
        for (const auto &v : values_)
            if (!v.all_finite())
                return false;
        return true;
    }

    std::vector<Var> ParamStore::bind(Tape &tape, bool trainable) const
    {
        std::vector<Var> vars;
        vars.reserve(values_.size());
        for (const auto &v : values_)
            vars.push_back(trainable ? tape.variable(v) : tape.constant(v));
        return vars;
    }

    Var Linear::operator()(std::span<const Var> params, Var x) const
    {
        return ad::add(ad::matmul(x, params[weight]), params[bias]);
    }

    Linear make_linear(ParamStore &store, const std::string &name, std::size_t in, std::size_t out, Rng &rng,
                       double bias_offset)
    {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        Tensor w(Shape{in, out});
        for (auto &v : w.data())
            v = rng.uniform(-bound, bound);
        Tensor b(Shape{out});
        for (auto &v : b.data())
            v = bias_offset + rng.uniform(-bound, bound);
        Linear layer;
        layer.in = in;
        layer.out = out;
        layer.weight = store.add(name + ".weight", std::move(w));
        layer.bias = store.add(name + ".bias", std::move(b));
        return layer;
    }

    const char *to_string(OptimizerKind kind)
    {
        switch (kind)
        {
        case OptimizerKind::sgd:
            return "sgd";
        case OptimizerKind::momentum:
            return "momentum";
        case OptimizerKind::adam:
            return "adam";
        }
        return "sgd";
    }

    OptimizerKind optimizer_from_string(const std::string &name)
    {
        if (name == "sgd")
            return OptimizerKind::sgd;
        if (name == "momentum")
            return OptimizerKind::momentum;
        if (name == "adam")
            return OptimizerKind::adam;
        throw ConfigError("unknown optimizer '" + name + "' (expected sgd, momentum or adam)");
    }

    void Optimizer::step(std::span<Tensor *const> params, std::span<const Tensor> grads)
    {
        if (params.size() != grads.size())
            throw ShapeError("optimizer: parameter and gradient counts differ");
        if (first_.empty())
        {
            for (const Tensor *p : params)
            {
                first_.emplace_back(p->shape(), 0.0);
                if (config_.kind == OptimizerKind::adam)
                    second_.emplace_back(p->shape(), 0.0);
            }
        }
        ++steps_;

        double clip = 1.0;
        if (config_.clip_norm > 0.0)
        {
            double n2 = 0.0;
            for (const auto &g : grads)
                for (double v : g.data())
                    n2 += v * v;
            const double norm = std::sqrt(n2);
            if (norm > config_.clip_norm)
                clip = config_.clip_norm / norm;
        }

        const double lr = config_.learning_rate;
        for (std::size_t i = 0; i < params.size(); ++i)
        {
            Tensor &p = *params[i];
            const Tensor &g = grads[i];
            if (g.size() != p.size())
                throw ShapeError("optimizer: gradient shape mismatch for parameter " + std::to_string(i));
            switch (config_.kind)
            {
            case OptimizerKind::sgd:
                for (std::size_t j = 0; j < p.size(); ++j)
                    p[j] -= lr * clip * g[j];
                break;
            case OptimizerKind::momentum:
            {
                Tensor &m = first_[i];
                for (std::size_t j = 0; j < p.size(); ++j)
                {
                    m[j] = config_.momentum * m[j] + clip * g[j];
                    p[j] -= lr * m[j];
                }
                break;
            }
            case OptimizerKind::adam:
            {
                Tensor &m = first_[i];
                Tensor &v = second_[i];
                const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
                const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
                for (std::size_t j = 0; j < p.size(); ++j)
                {
                    const double gj = clip * g[j];
                    m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * gj;
                    v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * gj * gj;
                    p[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + config_.epsilon);
                }
                break;
            }
            }
        }
    }

    void Optimizer::step(ParamStore &store, std::span<const Tensor> grads)
    {
        std::vector<Tensor *> ptrs;
        ptrs.reserve(store.size());
        for (std::size_t i = 0; i < store.size(); ++i)
            ptrs.push_back(&store[i]);
        step(std::span<Tensor *const>(ptrs), grads);
    }
}
