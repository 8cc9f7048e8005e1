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

#ifndef SITEBEAM_IO_HPP
#define SITEBEAM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sitebeam::io
{
    std::string read_text_file(const std::filesystem::path &path);
    // Creates parent directories as needed.
    void write_text_file(const std::filesystem::path &path, std::string_view content);

    std::uint64_t fnv1a64(std::string_view bytes);
    std::string hex64(std::uint64_t value);
    std::string content_hash(std::string_view bytes);

    // Shortest text that parses back to the same double.
    std::string format_double(double value);

    // Comma-separated rows with a fixed header.
    class CsvBuilder
    {
    public:
        explicit CsvBuilder(std::vector<std::string> header);
        CsvBuilder &row(const std::vector<std::string> &cells);
        std::size_t rows() const { return rows_; }
        const std::string &str() const { return text_; }

    private:
        std::size_t columns_;
        std::size_t rows_ = 0;
        std::string text_;
    };
}

#endif
