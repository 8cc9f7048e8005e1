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

#include "sitebeam/tensor.hpp"
#include "sitebeam/errors.hpp"

#include <cmath>
#include <sstream>

namespace sitebeam
{
    std::size_t shape_size(const Shape &shape)
    {
        std::size_t n = 1;
        for (auto d : shape)
            n *= d;
        return n;
    }

    std::string shape_string(const Shape &shape)
    {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < shape.size(); ++i)
            os << (i ? ", " : "") << shape[i];
        os << ']';
        return os.str();
    }

    Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill)
    {
        if (shape_.size() > 2)
            throw ShapeError("Tensor rank above 2 is not supported: " + shape_string(shape_));
    }

    Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data))
    {
        if (shape_.size() > 2)
            throw ShapeError("Tensor rank above 2 is not supported: " + shape_string(shape_));
        if (shape_size(shape_) != data_.size())
            throw ShapeError("Tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                             shape_string(shape_));
    }

    Tensor Tensor::vector(std::vector<double> values)
    {
        const std::size_t n = values.size();
        return Tensor(Shape{n}, std::move(values));
    }

    Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    {
        return Tensor(Shape{rows, cols}, std::move(values));
    }

    Tensor Tensor::identity(std::size_t n)
    {
        Tensor t(Shape{n, n});
        for (std::size_t i = 0; i < n; ++i)
            t(i, i) = 1.0;
        return t;
    }

    double Tensor::item() const
    {
        if (data_.size() != 1)
            throw ShapeError("item() on tensor of shape " + shape_string(shape_));
        return data_[0];
    }

    bool Tensor::all_finite() const
    {
        for (double v : data_)
            if (!std::isfinite(v))
                return false;
        return true;
    }

    Tensor &Tensor::operator+=(const Tensor &other)
    {
        if (other.data_.size() != data_.size())
            throw ShapeError("Tensor += with shapes " + shape_string(shape_) + " and " + shape_string(other.shape_));
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] += other.data_[i];
        return *this;
    }

    Tensor &Tensor::operator*=(double factor)
    {
        for (double &v : data_)
            v *= factor;
        return *this;
    }
}
