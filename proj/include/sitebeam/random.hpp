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

#ifndef SITEBEAM_RANDOM_HPP
#define SITEBEAM_RANDOM_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace sitebeam
{
    // SplitMix64 finalizer; used to derive independent stream seeds from (seed, index).
    std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

    // Seeded generator with portable distributions. The standard library
    // distributions are implementation-defined, so uniform and normal draws are
    // computed here directly from the 64-bit engine output to keep files bit-exact
    // across toolchains.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        // Independent stream for a sub-task (UE index, iteration, ...).
        static Rng derive(std::uint64_t seed, std::uint64_t stream) { return Rng(mix_seed(seed, stream)); }

        std::uint64_t next_u64() { return engine_(); }

        // Uniform on [0, 1) with 53 random bits.
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // Uniform integer on [0, n).
        std::uint64_t index(std::uint64_t n);

        // Standard normal (Box-Muller, second variate cached).
        double normal();

        // Circularly-symmetric complex Gaussian with E|x|^2 = variance.
        std::complex<double> complex_normal(double variance = 1.0);

    private:
        std::mt19937_64 engine_;
        double cached_ = 0.0;
        bool has_cached_ = false;
    };
}

#endif
