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

// Checkpoint helpers shared by the CFM and MLP readers. Not installed.

#ifndef SITEBEAM_MODEL_IO_HPP
#define SITEBEAM_MODEL_IO_HPP

#include "json_util.hpp"
#include "sitebeam/cfm.hpp"
#include "sitebeam/nn.hpp"

namespace sitebeam::detail
{
    inline json params_json(const nn::ParamStore &params)
    {
        json out = json::object();
        for (std::size_t i = 0; i < params.size(); ++i)
            out[params.name(i)] = {{"shape", params[i].shape()}, {"values", params[i].values()}};
        return out;
    }

    // Overwrites every parameter of `params` (created with the right
    // architecture) from the stored arrays; names and shapes must match.
    inline void load_params(const json &j, nn::ParamStore &params, const std::string &where)
    {
        if (!j.is_object() || j.size() != params.size())
            throw ConfigError(where + ": expected " + std::to_string(params.size()) + " named arrays");
        for (std::size_t i = 0; i < params.size(); ++i)
        {
            const std::string w = where + "." + params.name(i);
            const auto it = j.find(params.name(i));
            if (it == j.end())
                throw ConfigError(w + ": missing");
            reject_unknown_keys(*it, w, {"shape", "values"});
            const Shape shape = require(*it, w, "shape").get<Shape>();
            if (shape != params[i].shape())
                throw ConfigError(w + ": shape " + shape_string(shape) + " does not match the architecture " +
                                  shape_string(params[i].shape()));
            const json &values = require(*it, w, "values");
            if (!values.is_array() || values.size() != params[i].size())
                throw ConfigError(w + ".values: wrong length");
            for (std::size_t k = 0; k < values.size(); ++k)
                params[i][k] = as_double(values[k], w + ".values");
        }
        if (!params.all_finite())
            throw ConfigError(where + ": non-finite weights");
    }

    inline json scaler_json(const StatsScaler &s)
    {
        return {{"mean_center", s.mean_center},
                {"mean_scale", s.mean_scale},
                {"std_center", s.std_center},
                {"std_scale", s.std_scale}};
    }

    inline StatsScaler scaler_from(const json &j, const std::string &w)
    {
        reject_unknown_keys(j, w, {"mean_center", "mean_scale", "std_center", "std_scale"});
        StatsScaler s;
        s.mean_center = as_double(require(j, w, "mean_center"), w + ".mean_center");
        s.mean_scale = as_double(require(j, w, "mean_scale"), w + ".mean_scale");
        s.std_center = as_double(require(j, w, "std_center"), w + ".std_center");
        s.std_scale = as_double(require(j, w, "std_scale"), w + ".std_scale");
        return s;
    }
}

#endif
