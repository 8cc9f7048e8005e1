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

#ifndef SITEBEAM_CODEBOOK_HPP
#define SITEBEAM_CODEBOOK_HPP

#include "sitebeam/autodiff.hpp"
#include "sitebeam/channel.hpp"
#include "sitebeam/complex.hpp"
#include "sitebeam/measurement.hpp"
#include "sitebeam/nn.hpp"
#include "sitebeam/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sitebeam
{
    // K probing beams C = exp(j Phi); Phi is [N_t, K], radians in [0, 2 pi).
    struct Codebook
    {
        Tensor phase;
        std::string kind = "learned"; // "learned", "dft" or "random"
        std::uint64_t seed = 0;
        std::string config_hash;

        std::size_t antennas() const { return phase.rows(); }
        std::size_t size() const { return phase.cols(); }
        ComplexMatrix beams() const;
        CVec beam(std::size_t k) const;
        // First `k` beams.
        Codebook prefix(std::size_t k) const;
    };

    Codebook codebook_from_phase(Tensor phase);
    // Column k, element n: phase 2 pi n k / max(K, N_t).
    Codebook dft_codebook(std::size_t n_antennas, std::size_t k);
    Codebook random_codebook(std::size_t n_antennas, std::size_t k, Rng &rng);

    // ||C^H C - I||_F^2 with unit-norm columns.
    double orthogonality_penalty(const ComplexMatrix &beams);
    double orthogonality_penalty(const Codebook &cb);

    // (1/beta) log sum_k exp(beta y_k), evaluated with the max subtracted.
    double lse_max(std::span<const double> y, double beta);

    enum class CoverageKind
    {
        margin, // mean of -lse_max
        hinge   // mean of [y_th - lse_max]_+
    };

    const char *to_string(CoverageKind kind);
    CoverageKind coverage_from_string(const std::string &name);

    // `y_batch` is [B, K] in dB.
    double coverage_surrogate(const Tensor &y_batch, double beta, CoverageKind kind = CoverageKind::margin,
                              double threshold_db = 0.0);

    struct CodebookDesignConfig
    {
        std::size_t n_beams = 8; // K
        double lambda_orth = 0.1;
        double lambda_cov = 0.01;
        double beta = 5.0;
        std::size_t batch_size = 64;
        std::size_t iterations = 500;
        double diag_loading = 1e-6;
        std::uint64_t seed = 0;
        CoverageKind coverage = CoverageKind::margin;
        // Hinge threshold in dBm; NaN means 10 dB above the noise floor.
        double coverage_threshold_dbm = std::numeric_limits<double>::quiet_NaN();
        nn::OptimizerConfig optimizer{nn::OptimizerKind::sgd, 0.05};
        // Validation objective every this many iterations (0 disables; the last
        // iteration is always evaluated when enabled).
        std::size_t val_every = 1;
        bool record_wall_time = false;

        void validate() const;
        double threshold_dbm(const NoiseConfig &noise) const;
        std::string to_json() const;
        std::string hash() const;
    };

    struct ObjectiveTerms
    {
        double objective = 0.0;
        double logdet = 0.0;
        double l_orth = 0.0;
        double coverage = 0.0;
    };

    // Objective logdet(R_y + eps I) - lambda_orth L_orth - lambda_cov L_cov as
    // a tape expression of `phase`, with the gaussian measurement model and
    // fixed standard-normal `noise` [B, K]. `terms` receives the forward values.
    Var codebook_objective_on_tape(Var phase, const std::vector<CVec> &channels, const Tensor &noise,
                                   const NoiseConfig &noise_cfg, const CodebookDesignConfig &cfg,
                                   ObjectiveTerms *terms = nullptr);

    struct ObjectiveResult
    {
        ObjectiveTerms terms;
        Tensor gradient; // d objective / d Phi
    };

    // Needs B >= 2. Throws FactorizationError when the loaded covariance is not PD.
    ObjectiveResult batch_objective(const Tensor &phase, const std::vector<CVec> &channels, const Tensor &noise,
                                    const NoiseConfig &noise_cfg, const CodebookDesignConfig &cfg,
                                    bool with_gradient = true);

    struct CodebookTraceRow
    {
        std::size_t iter = 0;
        ObjectiveTerms batch;
        double val_objective = std::numeric_limits<double>::quiet_NaN();
        double val_logdet = std::numeric_limits<double>::quiet_NaN();
        double wall_ms = 0.0;
    };

    struct CodebookDesignResult
    {
        Codebook codebook;
        std::vector<CodebookTraceRow> trace; // iterations 0..I; row I is the final codebook
    };

    std::string codebook_trace_csv(const std::vector<CodebookTraceRow> &trace);

    // Mini-batch stochastic gradient ascent on the training split.
    CodebookDesignResult design_codebook(const SiteDataset &dataset, const NoiseConfig &noise_cfg,
                                         const CodebookDesignConfig &cfg);

    // logdet of the eps-loaded sample covariance of exact-mode RSRP vectors over
    // `channels`, pooling `n_noise_draws` independent measurement rounds.
    double logdet_metric(const Codebook &cb, const std::vector<CVec> &channels, const NoiseConfig &noise_cfg,
                         std::uint64_t seed, std::size_t n_noise_draws = 1, double diag_loading = 1e-6);

    std::string codebook_to_json(const Codebook &cb);
    Codebook codebook_from_json(const std::string &text);
    void save_codebook(const Codebook &cb, const std::filesystem::path &path);
    Codebook load_codebook(const std::filesystem::path &path);
}

#endif
