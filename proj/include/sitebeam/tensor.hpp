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

#ifndef SITEBEAM_TENSOR_HPP
#define SITEBEAM_TENSOR_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sitebeam
{
    using Shape = std::vector<std::size_t>;

    std::size_t shape_size(const Shape &shape);
    std::string shape_string(const Shape &shape);

    // Dense real tensor, row-major. Rank 0 (scalar), 1 (vector) and 2 (matrix) are
    // the only ranks the library produces.
    class Tensor
    {
    public:
        Tensor() : data_(1, 0.0) {}
        explicit Tensor(Shape shape, double fill = 0.0);
        Tensor(Shape shape, std::vector<double> data);

        static Tensor scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }
        static Tensor vector(std::vector<double> values);
        static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
        static Tensor identity(std::size_t n);

        const Shape &shape() const { return shape_; }
        std::size_t rank() const { return shape_.size(); }
        std::size_t size() const { return data_.size(); }

        // Matrix view of the tensor: vectors are a single row, scalars are 1x1.
        std::size_t rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
        std::size_t cols() const { return shape_.empty() ? 1 : shape_.back(); }

        double &operator[](std::size_t i) { return data_[i]; }
        double operator[](std::size_t i) const { return data_[i]; }
        double &operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
        double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

        double item() const;

        std::span<double> data() { return data_; }
        std::span<const double> data() const { return data_; }
        const std::vector<double> &values() const { return data_; }

        bool all_finite() const;
        bool same_shape(const Tensor &other) const { return shape_ == other.shape_; }

        Tensor &operator+=(const Tensor &other);
        Tensor &operator*=(double factor);

    private:
        Shape shape_;
        std::vector<double> data_;
    };
}

#endif
