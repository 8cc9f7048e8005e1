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

#ifndef SITEBEAM_TOOLS_EXPERIMENT_HPP
#define SITEBEAM_TOOLS_EXPERIMENT_HPP

#include "sitebeam/baselines.hpp"
#include "sitebeam/cfm.hpp"
#include "sitebeam/channel.hpp"
#include "sitebeam/codebook.hpp"
#include "sitebeam/eval.hpp"
#include "sitebeam/measurement.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sitebeam::cli
{
    using json = nlohmann::ordered_json;

    // Everything one experiment needs. Loaded from a JSON document, then the
    // command-line flags are written over it (flags win).
    struct ExperimentConfig
    {
        struct Inputs
        {
            std::string scenario = "los_park"; // preset name or scenario file
            std::string dataset;
            std::string codebook;
            std::string cfm;
            std::string mlp;
        } inputs;

        struct DatasetSection
        {
            std::size_t n_ues = 2000;
            std::uint64_t seed = 0;
            bool grid = false;
            std::size_t n_train = 0;
            std::size_t n_val = 0;
            std::size_t n_test = 0;
        } dataset;

        struct System
        {
            std::size_t n_antennas = 0; // 0 follows the scenario
            std::size_t n_beams = 8;
            std::size_t n_candidates = 8;
            NoiseConfig noise;
            // dB^2; unset follows the scenario.
            std::optional<double> shadow_log_variance_db2;
        } system;

        CodebookDesignConfig codebook;
        // "learned" runs the design loop, "dft" emits the DFT codebook.
        std::string codebook_baseline = "learned";
        CfmArch cfm_arch;
        CfmTrainConfig cfm;
        MlpArch mlp_arch;
        MlpTrainConfig mlp;
        SamplerConfig sampler;

        struct Evaluate
        {
            std::vector<std::size_t> m_sweep{1, 2, 4, 8, 16};
            std::vector<double> power_sweep_dbm;
            bool run_cfm = true;
            bool run_mlp = true;
            bool run_pmi = true;
            bool run_srs = true;
            bool noisy_selection = false;
            PmiConfig pmi;
            SrsSnrKind srs_snr = SrsSnrKind::per_antenna;
            std::size_t logdet_noise_draws = 1;
            std::uint64_t seed = 0;
        } evaluate;

        struct Patterns
        {
            std::size_t points = 361;
            double lo_rad = -1.5707963267948966;
            double hi_rad = 1.5707963267948966;
            double spacing_ratio = 0.5; // d / lambda
            bool dft = false;           // plot the DFT codebook instead of inputs.codebook
        } patterns;

        std::size_t threads = 1;
        std::string output_dir = "runs";

        // Range checks; throws ConfigError naming the key.
        void validate() const;
        // Measurement settings for a dataset (shadowing follows the scenario unless set).
        NoiseConfig noise_for(const Scenario &scenario) const;
        PipelineConfig pipeline() const;
    };

    // Strict parse: unknown keys are rejected with their full path.
    ExperimentConfig config_from_json(const json &doc);
    // Round-trips through config_from_json. output_dir is left out so the
    // document (and any hash of it) does not depend on where results go.
    json config_to_json(const ExperimentConfig &cfg);

    // Writes `value` at a dotted key path ("codebook.iterations"), creating
    // intermediate objects.
    void set_key(json &doc, const std::string &dotted, json value);
    // "key=value"; the value is read as JSON when it parses, as a string otherwise.
    void apply_assignment(json &doc, const std::string &assignment);

    json load_config_document(const std::filesystem::path &path);

    // Relative output directories are placed under $SITEBEAM_OUTPUT_ROOT when set.
    std::filesystem::path resolve_output_dir(const std::string &dir);
}

#endif
