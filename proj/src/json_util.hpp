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

// Helpers shared by the JSON readers. Not installed.

#ifndef SITEBEAM_JSON_UTIL_HPP
#define SITEBEAM_JSON_UTIL_HPP

#include "sitebeam/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

namespace sitebeam::detail
{
    using json = nlohmann::ordered_json;

    // Rejects keys outside `allowed`, reporting the full key path.
    inline void reject_unknown_keys(const json &obj, const std::string &where, std::initializer_list<const char *> allowed)
    {
        if (!obj.is_object())
            throw ConfigError(where + ": expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it)
        {
            bool ok = false;
            for (const char *k : allowed)
                if (it.key() == k)
                    ok = true;
            if (!ok)
                throw ConfigError(where + "." + it.key() + ": unknown key");
        }
    }

    inline const json &require(const json &obj, const std::string &where, const char *key)
    {
        auto it = obj.find(key);
        if (it == obj.end())
            throw ConfigError(where + "." + key + ": missing key");
        return *it;
    }

    // Numbers may be written as JSON numbers or as the strings "inf", "-inf".
    inline double as_double(const json &v, const std::string &where)
    {
        if (v.is_number())
            return v.get<double>();
        if (v.is_string())
        {
            const auto s = v.get<std::string>();
            if (s == "inf")
                return std::numeric_limits<double>::infinity();
            if (s == "-inf")
                return -std::numeric_limits<double>::infinity();
        }
        throw ConfigError(where + ": expected a number");
    }

    inline json from_double(double x)
    {
        if (std::isinf(x))
            return x > 0 ? json("inf") : json("-inf");
        return json(x);
    }

    template <typename T> T as_count(const json &v, const std::string &where)
    {
        if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
            throw ConfigError(where + ": expected a non-negative integer");
        return static_cast<T>(v.get<unsigned long long>());
    }

    inline std::string as_string(const json &v, const std::string &where)
    {
        if (!v.is_string())
            throw ConfigError(where + ": expected a string");
        return v.get<std::string>();
    }

    inline bool as_bool(const json &v, const std::string &where)
    {
        if (!v.is_boolean())
            throw ConfigError(where + ": expected true or false");
        return v.get<bool>();
    }

    inline json parse_json(const std::string &text, const std::string &what)
    {
        try
        {
            return json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(what + ": malformed JSON (" + e.what() + ")");
        }
    }
}

#endif
