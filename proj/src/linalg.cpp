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

#include "sitebeam/linalg.hpp"
#include "sitebeam/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <sstream>

namespace sitebeam::linalg
{
    namespace
    {
        using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        using ConstMap = Eigen::Map<const RowMatrix>;
        using MutMap = Eigen::Map<RowMatrix>;

        void require_square(const Tensor &a, const char *what)
        {
            if (a.rank() != 2 || a.rows() != a.cols())
                throw ShapeError(std::string(what) + ": expected a square matrix, got " + shape_string(a.shape()));
        }
    }

    Tensor cholesky(const Tensor &a)
    {
        require_square(a, "cholesky");
        const std::size_t n = a.rows();
        Tensor l(Shape{n, n});
        for (std::size_t j = 0; j < n; ++j)
        {
            double d = a(j, j);
            for (std::size_t k = 0; k < j; ++k)
                d -= l(j, k) * l(j, k);
            if (!(d > 0.0) || !std::isfinite(d))
            {
                std::ostringstream os;
                os << "Cholesky factorization failed: pivot " << j << " is " << d
                   << " (matrix is not positive definite)";
                throw FactorizationError(os.str(), j, d);
            }
            const double ljj = std::sqrt(d);
            l(j, j) = ljj;
            for (std::size_t i = j + 1; i < n; ++i)
            {
                double s = a(i, j);
                for (std::size_t k = 0; k < j; ++k)
                    s -= l(i, k) * l(j, k);
                l(i, j) = s / ljj;
            }
        }
        return l;
    }

    double logdet_from_cholesky(const Tensor &lower)
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < lower.rows(); ++i)
            acc += std::log(lower(i, i));
        return 2.0 * acc;
    }

    double logdet_spd(const Tensor &a) { return logdet_from_cholesky(cholesky(a)); }

    std::vector<double> forward_substitute(const Tensor &lower, std::span<const double> b)
    {
        const std::size_t n = lower.rows();
        if (b.size() != n)
            throw ShapeError("forward_substitute: length mismatch");
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            double s = b[i];
            for (std::size_t k = 0; k < i; ++k)
                s -= lower(i, k) * x[k];
            x[i] = s / lower(i, i);
        }
        return x;
    }

    std::vector<double> cholesky_solve(const Tensor &lower, std::span<const double> b)
    {
        const std::size_t n = lower.rows();
        std::vector<double> x = forward_substitute(lower, b);
        for (std::size_t ii = n; ii-- > 0;)
        {
            double s = x[ii];
            for (std::size_t k = ii + 1; k < n; ++k)
                s -= lower(k, ii) * x[k];
            x[ii] = s / lower(ii, ii);
        }
        return x;
    }

    Tensor inverse_from_cholesky(const Tensor &lower)
    {
        const std::size_t n = lower.rows();
        Tensor inv(Shape{n, n});
        std::vector<double> e(n, 0.0);
        for (std::size_t c = 0; c < n; ++c)
        {
            e[c] = 1.0;
            const auto col = cholesky_solve(lower, e);
            e[c] = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                inv(r, c) = col[r];
        }
        // Symmetrize to remove round-off asymmetry.
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c)
            {
                const double m = 0.5 * (inv(r, c) + inv(c, r));
                inv(r, c) = m;
                inv(c, r) = m;
            }
        return inv;
    }

    Tensor matmul(const Tensor &a, const Tensor &b)
    {
        if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows())
            throw ShapeError("matmul: shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()));
        Tensor out(Shape{a.rows(), b.cols()});
        MutMap(out.data().data(), a.rows(), b.cols()).noalias() =
            ConstMap(a.data().data(), a.rows(), a.cols()) * ConstMap(b.data().data(), b.rows(), b.cols());
        return out;
    }

    Tensor transpose(const Tensor &a)
    {
        const std::size_t r = a.rows(), c = a.cols();
        Tensor out(Shape{c, r});
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                out(j, i) = a(i, j);
        return out;
    }

    Tensor sample_covariance(const Tensor &x)
    {
        if (x.rank() != 2 || x.rows() < 2)
            throw ShapeError("sample_covariance: need at least two rows, got " + shape_string(x.shape()));
        const std::size_t n = x.rows(), k = x.cols();
        std::vector<double> mean(k, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j)
                mean[j] += x(i, j);
        for (auto &m : mean)
            m /= static_cast<double>(n);
        Tensor centered(Shape{n, k});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j)
                centered(i, j) = x(i, j) - mean[j];
        Tensor cov = matmul(transpose(centered), centered);
        cov *= 1.0 / static_cast<double>(n - 1);
        return cov;
    }
}
