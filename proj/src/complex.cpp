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

#include "sitebeam/complex.hpp"
#include "sitebeam/errors.hpp"

#include <cmath>
#include <string>

namespace sitebeam
{
    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows * cols)
            throw ShapeError("ComplexMatrix data length does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }

    CVec ComplexMatrix::column(std::size_t c) const
    {
        CVec out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            out[r] = (*this)(r, c);
        return out;
    }

    void ComplexMatrix::set_column(std::size_t c, std::span<const cplx> values)
    {
        if (values.size() != rows_)
            throw ShapeError("set_column: length mismatch");
        for (std::size_t r = 0; r < rows_; ++r)
            (*this)(r, c) = values[r];
    }

    bool ComplexMatrix::all_finite() const
    {
        for (const auto &v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                return false;
        return true;
    }

    ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.cols() != b.rows())
            throw ShapeError("complex matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.rows()));
        ComplexMatrix out(a.rows(), b.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t k = 0; k < a.cols(); ++k)
            {
                const cplx aik = a(i, k);
                for (std::size_t j = 0; j < b.cols(); ++j)
                    out(i, j) += aik * b(k, j);
            }
        return out;
    }

    ComplexMatrix adjoint(const ComplexMatrix &a)
    {
        ComplexMatrix out(a.cols(), a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                out(j, i) = std::conj(a(i, j));
        return out;
    }

    ComplexMatrix normalize_columns(const ComplexMatrix &a)
    {
        ComplexMatrix out = a;
        for (std::size_t c = 0; c < a.cols(); ++c)
        {
            double n2 = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r)
                n2 += std::norm(a(r, c));
            if (n2 == 0.0)
                continue;
            const double inv = 1.0 / std::sqrt(n2);
            for (std::size_t r = 0; r < a.rows(); ++r)
                out(r, c) *= inv;
        }
        return out;
    }

    cplx inner(std::span<const cplx> a, std::span<const cplx> b)
    {
        if (a.size() != b.size())
            throw ShapeError("inner: length mismatch " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
        cplx acc{};
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += std::conj(a[i]) * b[i];
        return acc;
    }

    double squared_norm(std::span<const cplx> a)
    {
        double acc = 0.0;
        for (const auto &v : a)
            acc += std::norm(v);
        return acc;
    }

    std::vector<double> phase(std::span<const cplx> v)
    {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = std::arg(v[i]);
        return out;
    }

    std::vector<double> magnitude(std::span<const cplx> v)
    {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = std::abs(v[i]);
        return out;
    }

    std::vector<double> stack_real_imag(std::span<const cplx> v)
    {
        const std::size_t n = v.size();
        std::vector<double> z(2 * n);
        for (std::size_t i = 0; i < n; ++i)
        {
            z[i] = v[i].real();
            z[n + i] = v[i].imag();
        }
        return z;
    }

    CVec unstack_real_imag(std::span<const double> z)
    {
        if (z.size() % 2 != 0)
            throw ShapeError("unstack_real_imag: odd length " + std::to_string(z.size()));
        const std::size_t n = z.size() / 2;
        CVec v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = {z[i], z[n + i]};
        return v;
    }
}
