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

#ifndef SITEBEAM_EVAL_HPP
#define SITEBEAM_EVAL_HPP

#include "sitebeam/baselines.hpp"
#include "sitebeam/cfm.hpp"
#include "sitebeam/channel.hpp"
#include "sitebeam/codebook.hpp"
#include "sitebeam/measurement.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sitebeam
{
    inline constexpr double kGapClampDb = 100.0;

    // 10 log10(|h^H w_MRT|^2 / |h^H w|^2), clamped at 100 dB (`clamped` set).
    double gap_db(std::span<const cplx> h, std::span<const cplx> w, bool *clamped = nullptr);

    // Linear-interpolation quantile of unsorted values, q in [0, 1].
    double quantile(std::vector<double> values, double q);

    struct GapReport
    {
        std::vector<double> gaps_db;
        std::vector<char> degenerate; // 1 where the clamp was hit
        double mean = 0.0;
        double median = 0.0;
        double p95 = 0.0;
        std::size_t n_degenerate = 0;
    };

    GapReport gain_gap(const std::vector<CVec> &channels, const std::vector<CVec> &beams);
    GapReport summarize_gaps(std::vector<double> gaps_db, std::vector<char> degenerate);

    struct DistanceReport
    {
        std::vector<double> euclidean;   // all pairs i < j, row-major pair order
        std::vector<double> mahalanobis; // same order
        std::vector<double> levels;      // CDF levels 0, 1/(G-1), ..., 1
        std::vector<double> euclidean_quantiles;
        std::vector<double> mahalanobis_quantiles;
    };

    // `cov` must be SPD (load it first); rows of y are the RSRP vectors.
    DistanceReport distance_cdfs(const Tensor &y, const Tensor &cov, std::size_t grid_points = 101);
    Tensor loaded_sample_covariance(const Tensor &y, double diag_loading = 1e-6);

    struct BeamPatterns
    {
        std::vector<double> angles; // radians
        Tensor gain_db;             // [G, K], each column peaks at 0 dB
        std::vector<double> peak_linear;
    };

    std::vector<double> angle_grid(std::size_t n, double lo = -1.5707963267948966, double hi = 1.5707963267948966);
    BeamPatterns beam_patterns(const Codebook &cb, std::span<const double> angles, double spacing_ratio = 0.5);
    std::string patterns_csv(const BeamPatterns &p);

    struct PipelineConfig
    {
        NoiseConfig noise;
        SamplerConfig sampler;
        PmiConfig pmi;
        SrsSnrKind srs_snr = SrsSnrKind::per_antenna;
        std::vector<std::size_t> m_sweep{1, 2, 4, 8, 16};
        // Transmit powers (dBm) to evaluate; empty means just noise.transmit_power_dbm.
        std::vector<double> power_sweep_dbm;
        bool run_cfm = true;
        bool run_mlp = true;
        bool run_pmi = true;
        bool run_srs = true;
        bool noisy_selection = false;
        std::size_t logdet_noise_draws = 1;
        std::size_t pattern_points = 361;
        std::uint64_t seed = 0;
        std::size_t threads = 1;
    };

    struct PipelineInputs
    {
        const SiteDataset *dataset = nullptr;
        const Codebook *codebook = nullptr;
        const CfmModel *cfm = nullptr;
        const MlpModel *mlp = nullptr;
        // Where each artifact came from, quoted in errors and the manifest.
        std::map<std::string, std::string> provenance;
    };

    struct GapEntry
    {
        double power_dbm = 0.0;
        std::string method; // cfm, mlp, pmi, srs
        std::size_t m = 0;  // candidate count for cfm, 0 otherwise
        GapReport report;
    };

    struct LogdetEntry
    {
        std::string codebook; // learned or dft
        std::size_t k = 0;
        double logdet = 0.0;
    };

    struct ResultBundle
    {
        std::vector<GapEntry> gaps;
        std::vector<LogdetEntry> logdet;
        DistanceReport distances_learned;
        DistanceReport distances_dft;
        BeamPatterns patterns;
        std::string manifest_json;

        const GapEntry *find(const std::string &method, double power_dbm, std::size_t m = 0) const;
    };

    // Probe -> candidates -> select -> lock for every test UE, at every power of
    // the sweep, plus the codebook diagnostics.
    ResultBundle run_pipeline(const PipelineInputs &inputs, const PipelineConfig &cfg);

    // gaps.csv, summary.csv, logdet.csv, distances.csv, patterns.csv, manifest.json.
    void write_bundle(const ResultBundle &bundle, const std::filesystem::path &dir);
}

#endif
