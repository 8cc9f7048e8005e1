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

#ifndef SITEBEAM_AUTODIFF_HPP
#define SITEBEAM_AUTODIFF_HPP

#include "sitebeam/tensor.hpp"

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace sitebeam
{
    class Tape;

    // Handle to a node on a tape. Cheap to copy; only valid while its tape lives.
    class Var
    {
    public:
        Var() = default;

        Tape *tape() const { return tape_; }
        std::size_t id() const { return id_; }
        bool valid() const { return tape_ != nullptr; }

        const Tensor &value() const;
        const Shape &shape() const { return value().shape(); }

    private:
        friend class Tape;
        Var(Tape *tape, std::size_t id) : tape_(tape), id_(id) {}

        Tape *tape_ = nullptr;
        std::size_t id_ = 0;
    };

    // Define-by-run reverse-mode tape. Nodes are appended in evaluation order, so
    // parents always precede children and a single reverse sweep is a valid
    // topological traversal. Not thread-safe; use one tape per thread.
    class Tape
    {
    public:
        // Called with the gradient of the node's output; must push partials to
        // the parents through accumulate().
        using Backward = std::function<void(Tape &, const Tensor &)>;

        Tape() = default;
        Tape(const Tape &) = delete;
        Tape &operator=(const Tape &) = delete;

        Var variable(Tensor value);
        Var constant(Tensor value);

        // Appends an operation node. The backward closure is dropped when no
        // parent requires a gradient.
        Var record(Tensor value, std::initializer_list<Var> parents, Backward backward);

        const Tensor &value(Var v) const { return nodes_[v.id()].value; }
        bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
        bool owns(Var v) const { return v.tape() == this && v.id() < nodes_.size(); }
        std::size_t size() const { return nodes_.size(); }
        // Drops every node from index n on. Lets forward-only loops reuse bound
        // parameters without growing the tape; Vars past n become invalid.
        void truncate(std::size_t n);

        // Adds g into the gradient buffer of `target` (no-op for constants).
        void accumulate(Var target, const Tensor &g);
        void accumulate(Var target, Tensor &&g);

        // Reverse sweep from a scalar output. Returns one gradient per leaf, in
        // order; leaves the output does not depend on get zeros.
        std::vector<Tensor> gradients(Var output, std::span<const Var> leaves);
        std::vector<Tensor> gradients(Var output, std::initializer_list<Var> leaves)
        {
            return gradients(output, std::span<const Var>(leaves.begin(), leaves.size()));
        }

    private:
        struct Node
        {
            Tensor value;
            Backward backward;
            bool requires_grad = false;
        };

        std::vector<Node> nodes_;
        std::vector<Tensor> grads_;
        std::vector<char> has_grad_;
    };

    inline const Tensor &Var::value() const { return tape_->value(*this); }

    // Differentiable primitives. Binary elementwise operations accept a right
    // operand of identical shape, a vector broadcast over the rows of a matrix,
    // or a scalar.
    namespace ad
    {
        Var add(Var a, Var b);
        Var sub(Var a, Var b);
        Var mul(Var a, Var b);
        Var div(Var a, Var b);

        Var neg(Var x);
        Var scale(Var x, double factor);
        Var shift(Var x, double offset);
        Var exp(Var x);
        Var log(Var x);
        Var square(Var x);
        Var sqrt(Var x);
        Var sin(Var x);
        Var cos(Var x);
        Var silu(Var x);
        // max(x, floor) with zero gradient where clamped.
        Var clamp_min(Var x, double floor);

        Var sum(Var x);
        Var mean(Var x);
        // Reductions over the rows of a matrix: [B, D] -> [D].
        Var sum_rows(Var x);
        Var mean_rows(Var x);

        Var matmul(Var a, Var b);
        Var transpose(Var x);
        // [B, D1] ++ [B, D2] -> [B, D1 + D2].
        Var concat_cols(Var a, Var b);

        // Per-row normalization to zero mean and unit variance (no affine part).
        Var layer_norm(Var x, double eps = 1e-5);
        // Per-row log-sum-exp, [B, K] -> [B]; max-subtracted, so overflow-free.
        Var logsumexp(Var x);
        // log det of a symmetric positive-definite matrix via Cholesky. The
        // gradient is the inverse, formed from the same factor.
        Var logdet(Var a);
    }

    // Found by argument-dependent lookup on Var.
    inline Var operator+(Var a, Var b) { return ad::add(a, b); }
    inline Var operator-(Var a, Var b) { return ad::sub(a, b); }
    inline Var operator*(Var a, Var b) { return ad::mul(a, b); }
    inline Var operator/(Var a, Var b) { return ad::div(a, b); }
    inline Var operator-(Var x) { return ad::neg(x); }
}

#endif
