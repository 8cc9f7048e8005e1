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

#ifndef SITEBEAM_BASELINES_HPP
#define SITEBEAM_BASELINES_HPP

#include "sitebeam/cfm.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sitebeam
{
    // Discriminative regressor from the normalized RSRP features to the stacked
    // MRT beam: [y_norm, stats] -> hidden x n_hidden (LN + SiLU) -> 2 N_t.
    struct MlpArch
    {
        std::size_t n_antennas = 16;
        std::size_t n_beams = 8;
        std::size_t hidden_width = 256;
        std::size_t n_hidden = 3;

        void validate() const;
    };

    class MlpModel
    {
    public:
        MlpArch arch;
        StatsScaler scaler;
        nn::ParamStore params;
        std::uint64_t seed = 0;
        std::string train_config_hash;

        std::vector<nn::Linear> hidden;
        nn::Linear output;

        static MlpModel create(const MlpArch &arch, std::uint64_t seed);
        Var forward(std::span<const Var> p, Var y_norm, Var stats) const;
    };

    // Mean over the batch of ||f(y) - z1||^2.
    Var mlp_loss_on_tape(const MlpModel &model, std::span<const Var> p, const ConditionBatch &cond, const Tensor &z1);

    // Training options mirror the CFM ones (the sampler fields are unused).
    using MlpTrainConfig = CfmTrainConfig;

    struct MlpTrainResult
    {
        MlpModel model;
        std::vector<TrainTraceRow> trace;
    };

    MlpTrainResult train_mlp(MlpModel model, const SiteDataset &dataset, const Codebook &codebook,
                             const NoiseConfig &noise, const MlpTrainConfig &cfg);

    // Unit-modulus projected predictions for every row of y [U, K].
    std::vector<CVec> mlp_beams(const MlpModel &model, const Tensor &y);

    std::string mlp_to_json(const MlpModel &model);
    MlpModel mlp_from_json(const std::string &text);
    void save_mlp(const MlpModel &model, const std::filesystem::path &path);
    MlpModel load_mlp(const std::filesystem::path &path);

    // Beam with element phase 2 pi n u (u: spatial frequency in cycles per element).
    CVec dft_beam(std::size_t n_antennas, double u);

    struct PmiConfig
    {
        std::size_t tier1_k = 32;
        std::size_t tier2_m = 16;
        // Size of the fine codebook (spatial frequencies j / size); 0 picks
        // tier1_k * tier2_m, which puts exactly tier2_m fine beams in each bin.
        std::size_t fine_size = 0;

        std::size_t resolved_fine_size() const { return fine_size == 0 ? tier1_k * tier2_m : fine_size; }
        void validate() const;
    };

    struct PmiResult
    {
        CVec beam;
        std::size_t tier1_index = 0;
        std::size_t fine_index = 0;
        std::size_t measured_beams = 0;
    };

    // Two-tier sweep with exact-mode RSRP: coarse DFT grid u_k = k / tier1_k,
    // then the tier2_m fine beams nearest the winner inside its bin
    // [u_k - 1/(2 tier1_k), u_k + 1/(2 tier1_k)).
    PmiResult pmi_search(std::span<const cplx> h, const PmiConfig &cfg, const NoiseConfig &noise, Rng &rng);

    // Noiseless argmax of |h^H w|^2 over the fine codebook.
    PmiResult exhaustive_fine_search(std::span<const cplx> h, const PmiConfig &cfg);

    enum class SrsSnrKind
    {
        per_antenna, // P_t ||h||^2 / (N_t sigma_n^2)
        total        // P_t ||h||^2 / sigma_n^2
    };

    const char *to_string(SrsSnrKind kind);
    SrsSnrKind srs_snr_from_string(const std::string &name);

    struct SrsResult
    {
        CVec beam;
        double snr = 0.0;
        double nmse = 0.0;
        CVec estimate;
    };

    double srs_snr(std::span<const cplx> h, const NoiseConfig &noise, SrsSnrKind kind = SrsSnrKind::per_antenna);
    inline double srs_nmse(double snr, std::size_t ssb_length) { return 1.0 / (1.0 + static_cast<double>(ssb_length) * snr); }

    // MRT on h + e, e ~ CN(0, NMSE ||h||^2 / N_t I).
    SrsResult srs_lmmse_beam(std::span<const cplx> h, const NoiseConfig &noise, Rng &rng,
                             SrsSnrKind kind = SrsSnrKind::per_antenna);
}

#endif
