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

#ifndef SITEBEAM_MEASUREMENT_HPP
#define SITEBEAM_MEASUREMENT_HPP

#include "sitebeam/autodiff.hpp"
#include "sitebeam/complex.hpp"
#include "sitebeam/random.hpp"
#include "sitebeam/tensor.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sitebeam
{
    // Gains below this (linear) are clamped and flagged: -300 dB.
    inline constexpr double kGainFloor = 1e-30;
    inline constexpr double kGainFloorDb = -300.0;

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    double linear_to_db(double linear);

    struct NoiseConfig
    {
        double transmit_power_dbm = 40.0;
        double noise_psd_dbm_hz = -170.0; // -inf gives a noiseless receiver
        double bandwidth_hz = 100e6;
        std::size_t ssb_length = 5;
        double shadow_log_variance_db2 = 1.0;
        // Keep the first-order dB bias term in gaussian mode.
        bool include_bias = true;
        // L_s -> infinity: exact mode returns the mean power, gaussian mode drops
        // the SSB averaging noise.
        bool infinite_ssb = false;

        double noise_power_dbm() const { return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz); }
        double noise_power_mw() const { return db_to_linear(noise_power_dbm()); }
        double transmit_power_mw() const { return db_to_linear(transmit_power_dbm); }
        void validate() const;
    };

    enum class MeasurementMode
    {
        exact,
        gaussian
    };

    const char *to_string(MeasurementMode mode);
    MeasurementMode measurement_mode_from_string(const std::string &name);

    // |h^H w|^2.
    double array_gain(std::span<const cplx> h, std::span<const cplx> w);
    // Gain with the common shadowing factor removed.
    double shadow_free_gain(std::span<const cplx> h, std::span<const cplx> w, double shadow);

    struct RsrpMoments
    {
        double mean_mw = 0.0;
        double variance_mw2 = 0.0;
    };

    // Mean and variance of the L_s-symbol power average for array gain g.
    RsrpMoments rsrp_moments(double gain, const NoiseConfig &cfg);
    RsrpMoments rsrp_moments(std::span<const cplx> h, std::span<const cplx> w, const NoiseConfig &cfg);

    // Gaussian dB model of one beam measurement.
    struct DbMoments
    {
        double y0_db = 0.0;    // P_t^dB + G^dB
        double bias_db = 0.0;  // first-order bias of the dB estimate
        double variance_db2 = 0.0;
        bool clamped = false;  // gain fell below the -300 dB floor
    };

    DbMoments rsrp_db_moments(double gain, const NoiseConfig &cfg);

    // (1/L_s) sum_t |h^H w s_t + n_t|^2 with s_t ~ CN(0, P_t), n_t ~ CN(0, sigma_n^2).
    // `unit_symbols` replaces the random symbols by the constant sqrt(P_t).
    double rsrp_exact(std::span<const cplx> h, std::span<const cplx> w, const NoiseConfig &cfg, Rng &rng,
                      bool unit_symbols = false);

    struct RsrpVector
    {
        std::vector<double> y;  // dBm
        std::vector<double> y0; // noiseless component, dBm
        MeasurementMode mode = MeasurementMode::exact;
        std::string codebook_id;
        bool clamped = false;

        std::size_t size() const { return y.size(); }
    };

    // Probes every column of `beams` (N_t x K).
    RsrpVector measure_rsrp_vector(const ComplexMatrix &beams, std::span<const cplx> h, const NoiseConfig &cfg,
                                   Rng &rng, MeasurementMode mode);

    // Measures a list of channels; channel i draws from stream (seed, i), so the
    // result does not depend on `threads`. Returns the y matrix [N, K].
    Tensor measure_batch(const ComplexMatrix &beams, const std::vector<CVec> &channels, const NoiseConfig &cfg,
                         std::uint64_t seed, MeasurementMode mode, std::size_t threads = 1);

    // Gaussian-mode measurement on a tape, differentiable in the phase matrix
    // `phase` [N_t, K]. `channels` are the batch channels, `noise` holds fixed
    // standard-normal draws [B, K]. Returns y [B, K] in dBm.
    Var measure_gaussian_on_tape(Var phase, const std::vector<CVec> &channels, const Tensor &noise,
                                 const NoiseConfig &cfg);

    // CSV with columns ue_index, beam_index, y_db, y0_db, mode.
    std::string rsrp_csv(const std::vector<RsrpVector> &batch);
}

#endif
