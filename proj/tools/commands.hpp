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

#ifndef SITEBEAM_TOOLS_COMMANDS_HPP
#define SITEBEAM_TOOLS_COMMANDS_HPP

#include "experiment.hpp"

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace sitebeam::cli
{
    enum ExitCode : int
    {
        kExitOk = 0,
        kExitOther = 1,
        kExitConfig = 2,
        kExitData = 3,
        kExitNumerical = 4
    };

    int exit_code_for(const std::exception &e);

    // Every command writes its outputs, config.json and manifest.json into
    // resolve_output_dir(cfg.output_dir) and prints a short summary to `log`.
    void cmd_gen_scenario(const ExperimentConfig &cfg, std::ostream &log);
    void cmd_design_codebook(const ExperimentConfig &cfg, std::ostream &log);
    void cmd_train_cfm(const ExperimentConfig &cfg, std::ostream &log);
    void cmd_train_mlp(const ExperimentConfig &cfg, std::ostream &log);
    void cmd_evaluate(const ExperimentConfig &cfg, std::ostream &log);
    void cmd_export_patterns(const ExperimentConfig &cfg, std::ostream &log);

    const std::vector<std::string> &command_names();
    void run_command(const std::string &name, const ExperimentConfig &cfg, std::ostream &log);
}

#endif
