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

// Shared helpers for the unit and acceptance tests.

#ifndef SITEBEAM_TESTS_SUPPORT_HPP
#define SITEBEAM_TESTS_SUPPORT_HPP

#include "sitebeam/autodiff.hpp"
#include "sitebeam/complex.hpp"
#include "sitebeam/random.hpp"
#include "sitebeam/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace sitebeam::testing
{
    using Build = std::function<Var(Tape &, std::span<const Var>)>;

    struct GradCheck
    {
        double rel_error = 0.0; // ||g_ad - g_fd|| / max(||g_fd||, ||g_ad||, 1e-12)
        double ad_norm = 0.0;
        double fd_norm = 0.0;
    };

    // Reverse-mode gradient of build(leaves) against central differences with
    // step h * max(1, |x|) per entry.
    inline GradCheck check_gradient(const Build &build, const std::vector<Tensor> &leaves, double h = 1e-5)
    {
        std::vector<Tensor> ad;
        {
            Tape tape;
            std::vector<Var> vars;
            for (const auto &x : leaves)
                vars.push_back(tape.variable(x));
            const Var out = build(tape, vars);
            ad = tape.gradients(out, vars);
        }
        auto eval = [&](const std::vector<Tensor> &xs) {
            Tape tape;
            std::vector<Var> vars;
            for (const auto &x : xs)
                vars.push_back(tape.constant(x));
            return build(tape, vars).value().item();
        };
        std::vector<Tensor> work = leaves;
        double diff2 = 0.0, ad2 = 0.0, fd2 = 0.0;
        for (std::size_t l = 0; l < leaves.size(); ++l)
            for (std::size_t i = 0; i < leaves[l].size(); ++i)
            {
                const double x = leaves[l][i];
                const double step = h * std::max(1.0, std::abs(x));
                work[l][i] = x + step;
                const double fp = eval(work);
                work[l][i] = x - step;
                const double fm = eval(work);
                work[l][i] = x;
                const double fd = (fp - fm) / (2.0 * step);
                const double g = ad[l][i];
                diff2 += (g - fd) * (g - fd);
                ad2 += g * g;
                fd2 += fd * fd;
            }
        GradCheck r;
        r.ad_norm = std::sqrt(ad2);
        r.fd_norm = std::sqrt(fd2);
        r.rel_error = std::sqrt(diff2) / std::max({r.fd_norm, r.ad_norm, 1e-12});
        return r;
    }

    inline Tensor random_tensor(Shape shape, Rng &rng, double lo = -1.0, double hi = 1.0)
    {
        Tensor t(std::move(shape));
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = rng.uniform(lo, hi);
        return t;
    }

    inline CVec random_channel(std::size_t n, Rng &rng, double variance = 1.0)
    {
        CVec h(n);
        for (auto &x : h)
            x = rng.complex_normal(variance);
        return h;
    }

    inline CVec random_unit_modulus(std::size_t n, Rng &rng)
    {
        CVec w(n);
        for (auto &x : w)
            x = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
        return w;
    }

    struct Moments
    {
        double mean = 0.0;
        double variance = 0.0;  // unbiased
        double se_mean = 0.0;   // standard error of the mean
        double se_variance = 0.0; // from the sample fourth central moment
    };

    inline Moments sample_moments(const std::vector<double> &x)
    {
        const double n = static_cast<double>(x.size());
        Moments m;
        for (double v : x)
            m.mean += v;
        m.mean /= n;
        double m2 = 0.0, m4 = 0.0;
        for (double v : x)
        {
            const double d = (v - m.mean) * (v - m.mean);
            m2 += d;
            m4 += d * d;
        }
        m.variance = m2 / (n - 1.0);
        m4 /= n;
        const double s2 = m2 / n;
        m.se_mean = std::sqrt(m.variance / n);
        m.se_variance = std::sqrt(std::max(m4 - s2 * s2, 0.0) / n);
        return m;
    }
}

#endif
