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

#ifndef SITEBEAM_COMPLEX_HPP
#define SITEBEAM_COMPLEX_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sitebeam
{
    using cplx = std::complex<double>;
    using CVec = std::vector<cplx>;

    // Dense complex matrix, row-major.
    class ComplexMatrix
    {
    public:
        ComplexMatrix() = default;
        ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill = {});
        ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

        std::size_t rows() const { return rows_; }
        std::size_t cols() const { return cols_; }
        std::size_t size() const { return data_.size(); }

        cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::span<const cplx> data() const { return data_; }

        CVec column(std::size_t c) const;
        void set_column(std::size_t c, std::span<const cplx> values);

        bool all_finite() const;

    private:
        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        std::vector<cplx> data_;
    };

    ComplexMatrix matmul(const ComplexMatrix &a, const ComplexMatrix &b);
    ComplexMatrix adjoint(const ComplexMatrix &a);
    // Unit-norm columns; zero columns are left untouched.
    ComplexMatrix normalize_columns(const ComplexMatrix &a);

    // a^H b.
    cplx inner(std::span<const cplx> a, std::span<const cplx> b);
    double squared_norm(std::span<const cplx> a);

    std::vector<double> phase(std::span<const cplx> v);
    std::vector<double> magnitude(std::span<const cplx> v);

    // [Re(v); Im(v)] and its inverse.
    std::vector<double> stack_real_imag(std::span<const cplx> v);
    CVec unstack_real_imag(std::span<const double> z);
}

#endif
