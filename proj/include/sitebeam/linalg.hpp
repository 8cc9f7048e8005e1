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

#ifndef SITEBEAM_LINALG_HPP
#define SITEBEAM_LINALG_HPP

#include "sitebeam/tensor.hpp"

#include <span>
#include <vector>

namespace sitebeam::linalg
{
    // Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
    // Only the lower triangle of the input is read. Throws FactorizationError
    // naming the first non-positive pivot.
    Tensor cholesky(const Tensor &a);

    // 2 * sum(log diag(L)).
    double logdet_from_cholesky(const Tensor &lower);
    double logdet_spd(const Tensor &a);

    // A^{-1} from the Cholesky factor of A.
    Tensor inverse_from_cholesky(const Tensor &lower);

    // Solves L L^T x = b.
    std::vector<double> cholesky_solve(const Tensor &lower, std::span<const double> b);

    // Solves L x = b (forward substitution).
    std::vector<double> forward_substitute(const Tensor &lower, std::span<const double> b);

    // Plain products used outside the tape.
    Tensor matmul(const Tensor &a, const Tensor &b);
    Tensor transpose(const Tensor &a);

    // Unbiased sample covariance of the rows of x ([N, K] -> [K, K]).
    Tensor sample_covariance(const Tensor &x);
}

#endif
