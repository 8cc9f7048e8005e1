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

#include "sitebeam/io.hpp"
#include "sitebeam/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sitebeam::io
{
    std::string read_text_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw DataError("cannot open file: " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_text_file(const std::filesystem::path &path, std::string_view content)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write file: " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw DataError("write failed: " + path.string());
    }

    std::uint64_t fnv1a64(std::string_view bytes)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::string hex64(std::uint64_t value)
    {
        static const char *digits = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 15; i >= 0; --i)
        {
            s[static_cast<std::size_t>(i)] = digits[value & 0xF];
            value >>= 4;
        }
        return s;
    }

    std::string content_hash(std::string_view bytes) { return hex64(fnv1a64(bytes)); }

    std::string format_double(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
        (void)ec;
        return std::string(buf, ptr);
    }

    CsvBuilder::CsvBuilder(std::vector<std::string> header) : columns_(header.size())
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            text_ += (i ? "," : "") + header[i];
        text_ += '\n';
    }

    CsvBuilder &CsvBuilder::row(const std::vector<std::string> &cells)
    {
        if (cells.size() != columns_)
            throw ShapeError("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(columns_));
        for (std::size_t i = 0; i < cells.size(); ++i)
            text_ += (i ? "," : "") + cells[i];
        text_ += '\n';
        ++rows_;
        return *this;
    }
}
