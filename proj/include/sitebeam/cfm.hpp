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

#ifndef SITEBEAM_CFM_HPP
#define SITEBEAM_CFM_HPP

#include "sitebeam/autodiff.hpp"
#include "sitebeam/channel.hpp"
#include "sitebeam/codebook.hpp"
#include "sitebeam/complex.hpp"
#include "sitebeam/measurement.hpp"
#include "sitebeam/nn.hpp"
#include "sitebeam/random.hpp"
#include "sitebeam/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sitebeam
{
    inline constexpr double kStdFloorDb = 1e-6;

    // RSRP split into a zero-mean unit-std shape and its [mean, std] in dB.
    struct ConditionFeatures
    {
        std::vector<double> y_norm;
        double mean_db = 0.0;
        double std_db = 0.0;
    };

    // Population statistics (1/K); the std is floored before dividing.
    ConditionFeatures normalize_rsrp(std::span<const double> y);

    // Fixed affine standardization of the [mean, std] pair, fitted once on the
    // training measurements and stored with the model.
    struct StatsScaler
    {
        double mean_center = 0.0;
        double mean_scale = 1.0;
        double std_center = 0.0;
        double std_scale = 1.0;

        static StatsScaler fit(const std::vector<ConditionFeatures> &features);
        std::pair<double, double> apply(const ConditionFeatures &f) const;
    };

    // Row-stacked network inputs for a batch of RSRP vectors.
    struct ConditionBatch
    {
        Tensor y_norm; // [B, K]
        Tensor stats;  // [B, 2], standardized
    };

    ConditionBatch condition_batch(const Tensor &y, const StatsScaler &scaler);

    struct CfmArch
    {
        std::size_t n_antennas = 16;
        std::size_t n_beams = 8;
        std::size_t cond_width = 128;
        std::size_t hidden_width = 256;
        std::size_t n_blocks = 3;

        std::size_t state_dim() const { return 2 * n_antennas; }
        void validate() const;
    };

    class CfmModel
    {
    public:
        struct Block
        {
            nn::Linear linear; // previous width (or 2 N_t + 1) -> hidden
            nn::Linear gamma;  // cond -> hidden
            nn::Linear beta;   // cond -> hidden
        };

        CfmArch arch;
        StatsScaler scaler;
        nn::ParamStore params;
        std::uint64_t seed = 0;
        std::string train_config_hash;

        nn::Linear shape1, shape2, scale1, scale2, fuse_gamma, fuse_beta, output;
        std::vector<Block> blocks;

        // FiLM scale layers start with bias 1, so every modulation begins near identity.
        static CfmModel create(const CfmArch &arch, std::uint64_t seed);

        // c_f = gamma_f(e_sc) * e_sh + beta_f(e_sc); inputs [B, K] and [B, 2].
        Var encode(std::span<const Var> p, Var y_norm, Var stats) const;
        // v(z, t; c_f) for z [B, 2 N_t], t [B, 1], c_f [B, cond].
        Var velocity(std::span<const Var> p, Var z, Var t, Var cond) const;
    };

    // Forward-only helpers (one condition vector, one state).
    std::vector<double> encode_condition(const CfmModel &model, const ConditionFeatures &features);
    std::vector<double> velocity(const CfmModel &model, std::span<const double> z, double t,
                                 std::span<const double> cond);

    // Mean over the batch of ||v(z_t, t; y) - (z1 - z0)||^2 with
    // z_t = (1 - t) z0 + t z1. z1, z0 are [B, 2 N_t], t is [B, 1].
    Var cfm_loss_on_tape(const CfmModel &model, std::span<const Var> p, const ConditionBatch &cond, const Tensor &z1,
                         const Tensor &z0, const Tensor &t);

    // (1 - t) z0 + t z1, row by row.
    Tensor interpolate(const Tensor &z0, const Tensor &z1, const Tensor &t);

    // Stacked MRT targets [B, 2 N_t].
    Tensor mrt_targets(const std::vector<CVec> &channels);

    struct CfmTrainConfig
    {
        std::size_t batch_size = 64;
        double sigma0 = 1.0;
        std::size_t iterations = 2000;
        std::uint64_t seed = 0;
        nn::OptimizerConfig optimizer{nn::OptimizerKind::sgd, 1e-2};
        MeasurementMode measurement = MeasurementMode::exact;
        // Transmit power drawn uniformly in [lo, hi] dBm per training sample;
        // equal bounds (the default NaN pair) keep the configured power.
        double power_lo_dbm = std::numeric_limits<double>::quiet_NaN();
        double power_hi_dbm = std::numeric_limits<double>::quiet_NaN();
        std::size_t val_every = 100;
        std::size_t val_size = 256;
        // Candidates and Euler steps used for the validation gap column.
        std::size_t val_candidates = 1;
        std::size_t val_steps = 40;
        double val_temperature = 0.5;
        bool record_wall_time = false;

        void validate() const;
        std::string to_json() const;
        std::string hash() const;
    };

    struct TrainTraceRow
    {
        std::size_t iter = 0;
        double train_loss = 0.0;
        double val_loss = std::numeric_limits<double>::quiet_NaN();
        double val_gap_db = std::numeric_limits<double>::quiet_NaN();
        double wall_ms = 0.0;
    };

    std::string train_trace_csv(const std::vector<TrainTraceRow> &trace);

    struct CfmTrainResult
    {
        CfmModel model;
        std::vector<TrainTraceRow> trace;
    };

    // Measurement with a per-sample transmit power; row i uses stream (seed, i).
    Tensor measure_with_powers(const Codebook &cb, const std::vector<CVec> &channels, const NoiseConfig &noise,
                               std::span<const double> powers_dbm, std::uint64_t seed, MeasurementMode mode);

    CfmTrainResult train_cfm(CfmModel model, const SiteDataset &dataset, const Codebook &codebook,
                             const NoiseConfig &noise, const CfmTrainConfig &cfg);

    struct SamplerConfig
    {
        std::size_t n_steps = 40;
        double temperature = 0.5;
        std::size_t n_candidates = 8;
        double sigma0 = 1.0;

        void validate() const;
    };

    // Euler integration of dz/dt = field(z, t) from t = 0 to 1 in n_steps steps
    // with t_s = s / n_steps. Throws NumericalError naming the step when the
    // state stops being finite.
    using VelocityField = std::function<Tensor(const Tensor &z, double t)>;
    Tensor integrate_flow(const VelocityField &field, Tensor z, std::size_t n_steps);

    // w_n = exp(j angle(z_re,n + j z_im,n)); exact zeros map to phase 0.
    CVec project_unit_modulus(std::span<const double> z);

    // Raw end states [M, 2 N_t] for one RSRP vector.
    Tensor sample_states(const CfmModel &model, std::span<const double> y, const SamplerConfig &cfg, Rng &rng);
    std::vector<CVec> sample_candidates(const CfmModel &model, std::span<const double> y, const SamplerConfig &cfg,
                                        Rng &rng);
    // Candidates for every row of y [U, K]; row u uses stream (seed, u).
    std::vector<std::vector<CVec>> sample_candidates_batch(const CfmModel &model, const Tensor &y,
                                                           const SamplerConfig &cfg, std::uint64_t seed,
                                                           std::size_t threads = 1);

    struct Selection
    {
        std::size_t index = 0;
        CVec beam;
        double gain = 0.0;
    };

    // argmax_m |h^H w_m|^2 over the first `limit` candidates (all when 0);
    // ties go to the lowest index.
    Selection select_beam(const std::vector<CVec> &candidates, std::span<const cplx> h, std::size_t limit = 0);
    // Same, ranking by one exact RSRP measurement per candidate.
    Selection select_beam_noisy(const std::vector<CVec> &candidates, std::span<const cplx> h, const NoiseConfig &noise,
                                Rng &rng, std::size_t limit = 0);

    std::string cfm_to_json(const CfmModel &model);
    CfmModel cfm_from_json(const std::string &text);
    void save_cfm(const CfmModel &model, const std::filesystem::path &path);
    CfmModel load_cfm(const std::filesystem::path &path);
}

#endif
