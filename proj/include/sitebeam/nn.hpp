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

#ifndef SITEBEAM_NN_HPP
#define SITEBEAM_NN_HPP

#include "sitebeam/autodiff.hpp"
#include "sitebeam/random.hpp"
#include "sitebeam/tensor.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sitebeam::nn
{
    // Ordered, named parameter tensors of a network.
    class ParamStore
    {
    public:
        std::size_t add(std::string name, Tensor init);

        std::size_t size() const { return values_.size(); }
        const std::string &name(std::size_t i) const { return names_[i]; }
        Tensor &operator[](std::size_t i) { return values_[i]; }
        const Tensor &operator[](std::size_t i) const { return values_[i]; }
        std::optional<std::size_t> find(const std::string &name) const;

        std::size_t parameter_count() const;
        bool all_finite() const;

        // Puts every parameter on the tape, as variables (training) or constants (inference).
        std::vector<Var> bind(Tape &tape, bool trainable) const;

    private:
        std::vector<std::string> names_;
        std::vector<Tensor> values_;
    };

    // Affine map x W + b with W stored [in, out].
    struct Linear
    {
        std::size_t weight = 0;
        std::size_t bias = 0;
        std::size_t in = 0;
        std::size_t out = 0;

        Var operator()(std::span<const Var> params, Var x) const;
    };

    // Uniform(-1/sqrt(in), 1/sqrt(in)) weights and biases; `bias_offset` is added
    // to every bias entry (used to start FiLM scales near one).
    Linear make_linear(ParamStore &store, const std::string &name, std::size_t in, std::size_t out, Rng &rng,
                       double bias_offset = 0.0);

    enum class OptimizerKind
    {
        sgd,
        momentum,
        adam
    };

    const char *to_string(OptimizerKind kind);
    OptimizerKind optimizer_from_string(const std::string &name);

    struct OptimizerConfig
    {
        OptimizerKind kind = OptimizerKind::sgd;
        double learning_rate = 1e-2;
        double momentum = 0.9;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
        // Global gradient-norm clip; 0 disables.
        double clip_norm = 0.0;
    };

    // First-order update rules. step() descends; pass negated gradients to ascend.
    class Optimizer
    {
    public:
        explicit Optimizer(OptimizerConfig config) : config_(config) {}

        void step(std::span<Tensor *const> params, std::span<const Tensor> grads);
        void step(ParamStore &store, std::span<const Tensor> grads);

        const OptimizerConfig &config() const { return config_; }

    private:
        OptimizerConfig config_;
        std::vector<Tensor> first_;
        std::vector<Tensor> second_;
        long steps_ = 0;
    };
}

#endif
