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

#ifndef SITEBEAM_TESTS_CLI_RUNNER_HPP
#define SITEBEAM_TESTS_CLI_RUNNER_HPP

#include "sitebeam/io.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

namespace sitebeam::testing
{
    // Runs the sitebeam executable with `args`, output discarded; returns the exit code.
    inline int run_cli(const std::string &args, const std::filesystem::path &log = "/dev/null")
    {
        const std::string cmd = "env -u SITEBEAM_OUTPUT_ROOT '" SITEBEAM_CLI_PATH "' " + args + " > '" +
                                log.string() + "' 2>&1";
        const int status = std::system(cmd.c_str());
        if (status == -1 || !WIFEXITED(status))
            return -1;
        return WEXITSTATUS(status);
    }

    // Content hash of every file in a directory, keyed by file name.
    inline std::map<std::string, std::string> hash_dir(const std::filesystem::path &dir)
    {
        std::map<std::string, std::string> out;
        for (const auto &e : std::filesystem::directory_iterator(dir))
            if (e.is_regular_file())
                out[e.path().filename().string()] = io::content_hash(io::read_text_file(e.path()));
        return out;
    }

    inline std::filesystem::path fresh_dir(const std::string &name)
    {
        const auto p = std::filesystem::temp_directory_path() / name;
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }
}

#endif
