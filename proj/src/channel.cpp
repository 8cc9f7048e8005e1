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

#include "sitebeam/channel.hpp"
#include "sitebeam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sitebeam
{
    namespace
    {
        constexpr double kPowerFloor = 1e-30;
        constexpr int kMaxResamples = 100;

        double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

        double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

        bool on_segment(Point2 p, Point2 a, Point2 b)
        {
            return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
                   p.y <= std::max(a.y, b.y);
        }

        // Closed-segment intersection test (touching counts as crossing).
        bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2)
        {
            const double d1 = cross(q1, q2, p1);
            const double d2 = cross(q1, q2, p2);
            const double d3 = cross(p1, p2, q1);
            const double d4 = cross(p1, p2, q2);
            if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
                return true;
            if (d1 == 0 && on_segment(p1, q1, q2))
                return true;
            if (d2 == 0 && on_segment(p2, q1, q2))
                return true;
            if (d3 == 0 && on_segment(q1, p1, p2))
                return true;
            if (d4 == 0 && on_segment(q2, p1, p2))
                return true;
            return false;
        }

        // Total blocker loss (dB) along a segment; +inf when any crossed blocker is opaque.
        double blockage_loss_db(const Scenario &s, Point2 from, Point2 to, bool &crossed)
        {
            double loss = 0.0;
            for (const auto &b : s.blockers)
                if (segments_intersect(from, to, b.a, b.b))
                {
                    crossed = true;
                    loss += b.penetration_loss_db;
                }
            return loss;
        }

        double departure_angle(Point2 bs, Point2 target) { return std::atan2(target.y - bs.y, target.x - bs.x); }

        Scenario base_preset()
        {
            Scenario s;
            s.wavelength_m = 299792458.0 / 28e9;
            s.antenna_spacing_m = 0.5 * s.wavelength_m;
            const double r = s.wavelength_m / (4.0 * std::numbers::pi);
            s.reference_gain = r * r;
            s.antenna_count = 16;
            s.pathloss_exponent = 2.0;
            s.shadow_log_variance_db2 = 1.0;
            s.max_paths = 8;
            s.bs_position = {0.0, 0.0};
            s.ue_region = {20.0, 100.0, -60.0, 60.0};
            return s;
        }
    }

    void Scenario::validate() const
    {
        if (antenna_count < 2)
            throw ConfigError("scenario.antenna_count must be at least 2");
        if (!(pathloss_exponent >= 2.0 && pathloss_exponent <= 4.0))
            throw ConfigError("scenario.pathloss_exponent must lie in [2, 4]");
        if (!(shadow_log_variance_db2 >= 0.0))
            throw ConfigError("scenario.shadow_log_variance_db2 must be non-negative");
        if (!(ue_region.x_max > ue_region.x_min) || !(ue_region.y_max > ue_region.y_min))
            throw ConfigError("scenario.ue_region is degenerate");
        if (!(wavelength_m > 0.0) || !(antenna_spacing_m > 0.0))
            throw ConfigError("scenario.wavelength_m and antenna_spacing_m must be positive");
        if (!(reference_gain > 0.0))
            throw ConfigError("scenario.reference_gain must be positive");
        if (max_paths < 1)
            throw ConfigError("scenario.max_paths must be at least 1");
        for (std::size_t i = 0; i < blockers.size(); ++i)
            if (!(blockers[i].penetration_loss_db >= 0.0))
                throw ConfigError("scenario.blockers[" + std::to_string(i) + "].penetration_loss_db must be >= 0");
        for (std::size_t i = 0; i < scatterers.size(); ++i)
            if (!(scatterers[i].reflection_loss_db >= 0.0) || !std::isfinite(scatterers[i].reflection_loss_db))
                throw ConfigError("scenario.scatterers[" + std::to_string(i) +
                                  "].reflection_loss_db must be finite and >= 0");
    }

    Scenario scenario_preset(const std::string &name)
    {
        if (name == "los_park")
        {
            Scenario s = base_preset();
            s.name = "los_park";
            s.scatterers = {{{50.0, 70.0}, 15.0}, {{90.0, -75.0}, 15.0}, {{130.0, 10.0}, 18.0}};
            return s;
        }
        if (name == "blocked_street")
        {
            Scenario s = base_preset();
            s.name = "blocked_street";
            s.blockers = {{{20.0, 8.0}, {20.0, 24.0}, std::numeric_limits<double>::infinity()},
                          {{40.0, -30.0}, {55.0, -20.0}, 12.0}};
            s.scatterers = {{{30.0, 80.0}, 6.0},  {{80.0, 75.0}, 8.0},   {{120.0, 20.0}, 6.0},
                            {{90.0, -75.0}, 8.0}, {{30.0, -70.0}, 10.0}, {{130.0, -30.0}, 8.0}};
            return s;
        }
        throw ConfigError("unknown scenario preset '" + name + "' (expected los_park or blocked_street)");
    }

    std::vector<std::string> scenario_preset_names() { return {"los_park", "blocked_street"}; }

    bool PathSet::has_line_of_sight() const
    {
        return std::any_of(paths.begin(), paths.end(),
                           [](const Path &p) { return p.kind == PathKind::line_of_sight; });
    }

    const char *to_string(Split split)
    {
        switch (split)
        {
        case Split::train:
            return "train";
        case Split::val:
            return "val";
        case Split::test:
            return "test";
        }
        return "train";
    }

    std::vector<std::size_t> SiteDataset::indices(Split split) const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < splits.size(); ++i)
            if (splits[i] == split)
                out.push_back(i);
        return out;
    }

    std::vector<CVec> SiteDataset::channels(Split split) const
    {
        std::vector<CVec> out;
        for (std::size_t i : indices(split))
            out.push_back(entries[i].h);
        return out;
    }

    double SiteDataset::line_of_sight_fraction() const
    {
        if (entries.empty())
            return 0.0;
        const auto n = std::count_if(entries.begin(), entries.end(),
                                     [](const ChannelRealization &c) { return c.paths.has_line_of_sight(); });
        return static_cast<double>(n) / static_cast<double>(entries.size());
    }

    double SiteDataset::mean_path_count() const
    {
        if (entries.empty())
            return 0.0;
        double acc = 0.0;
        for (const auto &e : entries)
            acc += static_cast<double>(e.paths.size());
        return acc / static_cast<double>(entries.size());
    }

    CVec steering_vector(double aod, std::size_t n_antennas, double spacing_ratio)
    {
        CVec a(n_antennas);
        const double k = 2.0 * std::numbers::pi * spacing_ratio * std::sin(aod);
        for (std::size_t n = 0; n < n_antennas; ++n)
            a[n] = std::polar(1.0, k * static_cast<double>(n));
        return a;
    }

    PathSet trace_paths(const Scenario &scenario, Point2 ue, Rng &rng)
    {
        if (!scenario.ue_region.contains(ue))
            throw std::invalid_argument("trace_paths: UE position outside the scenario region");

        auto path_power = [&](double d, double loss_db) {
            return scenario.reference_gain * std::pow(d, -scenario.pathloss_exponent) * std::pow(10.0, -loss_db / 10.0);
        };

        PathSet set;
        {
            bool crossed = false;
            const double loss = blockage_loss_db(scenario, scenario.bs_position, ue, crossed);
            const double phase = rng.uniform(-std::numbers::pi, std::numbers::pi);
            if (std::isfinite(loss))
            {
                const double d = distance(scenario.bs_position, ue);
                const double beta = path_power(d, loss);
                if (beta > kPowerFloor)
                    set.paths.push_back({PathKind::line_of_sight, departure_angle(scenario.bs_position, ue),
                                         std::sqrt(beta), phase, d, crossed});
            }
        }
        for (const auto &s : scenario.scatterers)
        {
            bool crossed = false;
            const double loss = s.reflection_loss_db + blockage_loss_db(scenario, scenario.bs_position, s.position, crossed) +
                                blockage_loss_db(scenario, s.position, ue, crossed);
            const double phase = rng.uniform(-std::numbers::pi, std::numbers::pi);
            if (!std::isfinite(loss))
                continue;
            const double d = distance(scenario.bs_position, s.position) + distance(s.position, ue);
            const double beta = path_power(d, loss);
            if (beta > kPowerFloor)
                set.paths.push_back({PathKind::reflection, departure_angle(scenario.bs_position, s.position),
                                     std::sqrt(beta), phase, d, crossed});
        }
        if (set.paths.empty())
            throw EmptyChannelError("no unblocked propagation path reaches the UE");

        if (set.paths.size() > scenario.max_paths)
        {
            std::stable_sort(set.paths.begin(), set.paths.end(),
                             [](const Path &a, const Path &b) { return a.amplitude > b.amplitude; });
            set.paths.resize(scenario.max_paths);
        }
        return set;
    }

    double draw_shadow(const Scenario &scenario, Rng &rng)
    {
        const double sigma = std::sqrt(scenario.shadow_log_variance_db2);
        const double db = sigma * rng.normal();
        return std::pow(10.0, db / 10.0);
    }

    ChannelRealization synthesize_channel(const PathSet &paths, double shadow, const Scenario &scenario, Point2 ue)
    {
        const std::size_t n = scenario.antenna_count;
        ChannelRealization out;
        out.h.assign(n, cplx{});
        out.paths = paths;
        out.shadow = shadow;
        out.ue_position = ue;
        const double ratio = scenario.spacing_ratio();
        double coherent_bound = 0.0;
        for (const auto &p : paths.paths)
        {
            const cplx alpha = std::polar(std::sqrt(shadow) * p.amplitude, p.phase);
            const CVec a = steering_vector(p.aod, n, ratio);
            for (std::size_t i = 0; i < n; ++i)
                out.h[i] += alpha * a[i];
            coherent_bound += std::sqrt(shadow) * p.amplitude;
        }
        const double energy = squared_norm(out.h);
        // Cancellation down to round-off level counts as an empty channel.
        if (!(energy > 1e-20 * coherent_bound * coherent_bound * static_cast<double>(n)))
            throw EmptyChannelError("propagation paths cancel to a zero channel");
        return out;
    }

    SiteDataset generate_dataset(const Scenario &scenario, std::size_t n_ues, std::uint64_t seed,
                                 const DatasetOptions &options)
    {
        if (n_ues < 1)
            throw ConfigError("dataset needs at least one UE");
        scenario.validate();

        SiteDataset ds;
        ds.scenario = scenario;
        ds.seed = seed;
        ds.entries.reserve(n_ues);

        const Rect &r = scenario.ue_region;
        const auto grid_side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_ues))));
        const double cell_w = (r.x_max - r.x_min) / static_cast<double>(grid_side);
        const double cell_h = (r.y_max - r.y_min) / static_cast<double>(grid_side);

        for (std::size_t i = 0; i < n_ues; ++i)
        {
            Rng rng = Rng::derive(seed, i);
            bool done = false;
            for (int attempt = 0; attempt < kMaxResamples && !done; ++attempt)
            {
                Point2 ue;
                if (options.grid)
                {
                    const double gx = static_cast<double>(i % grid_side);
                    const double gy = static_cast<double>(i / grid_side);
                    const double jx = attempt == 0 ? 0.5 : rng.uniform();
                    const double jy = attempt == 0 ? 0.5 : rng.uniform();
                    ue = {r.x_min + (gx + jx) * cell_w, r.y_min + (gy + jy) * cell_h};
                }
                else
                    ue = {rng.uniform(r.x_min, r.x_max), rng.uniform(r.y_min, r.y_max)};
                try
                {
                    PathSet paths = trace_paths(scenario, ue, rng);
                    const double shadow = draw_shadow(scenario, rng);
                    ds.entries.push_back(synthesize_channel(paths, shadow, scenario, ue));
                    done = true;
                }
                catch (const EmptyChannelError &)
                {
                }
            }
            if (!done)
                throw EmptyChannelError("UE " + std::to_string(i) + ": no usable channel after " +
                                        std::to_string(kMaxResamples) + " draws");
        }

        std::size_t n_train = options.n_train, n_val = options.n_val, n_test = options.n_test;
        if (n_train + n_val + n_test == 0)
        {
            n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n_ues)));
            n_test = n_val;
            n_train = n_ues - n_val - n_test;
        }
        else if (n_train + n_val + n_test != n_ues)
            throw ConfigError("split sizes do not add up to the UE count");
        ds.splits.assign(n_ues, Split::train);
        for (std::size_t i = n_train; i < n_train + n_val; ++i)
            ds.splits[i] = Split::val;
        for (std::size_t i = n_train + n_val; i < n_ues; ++i)
            ds.splits[i] = Split::test;
        return ds;
    }

    CVec mrt_beamformer(const CVec &h)
    {
        if (!(squared_norm(h) > 0.0))
            throw std::invalid_argument("mrt_beamformer: zero channel");
        CVec w(h.size());
        for (std::size_t i = 0; i < h.size(); ++i)
            w[i] = h[i] == cplx{} ? cplx{1.0, 0.0} : std::polar(1.0, std::arg(h[i]));
        return w;
    }
}

// ---------------------------------------------------------------------------------------------------------------------
// Scenario / dataset files

#include "json_util.hpp"
#include "sitebeam/io.hpp"

namespace sitebeam
{
    using detail::json;

    namespace
    {
        json point_json(Point2 p) { return json::array({p.x, p.y}); }

        Point2 point_from(const json &v, const std::string &where)
        {
            if (!v.is_array() || v.size() != 2)
                throw ConfigError(where + ": expected [x, y]");
            return {detail::as_double(v[0], where + "[0]"), detail::as_double(v[1], where + "[1]")};
        }

        json scenario_json(const Scenario &s)
        {
            json j;
            j["name"] = s.name;
            j["bs_position"] = point_json(s.bs_position);
            j["ue_region"] = {{"x_min", s.ue_region.x_min},
                              {"x_max", s.ue_region.x_max},
                              {"y_min", s.ue_region.y_min},
                              {"y_max", s.ue_region.y_max}};
            j["scatterers"] = json::array();
            for (const auto &sc : s.scatterers)
                j["scatterers"].push_back(
                    {{"position", point_json(sc.position)}, {"reflection_loss_db", sc.reflection_loss_db}});
            j["blockers"] = json::array();
            for (const auto &b : s.blockers)
                j["blockers"].push_back({{"a", point_json(b.a)},
                                         {"b", point_json(b.b)},
                                         {"penetration_loss_db", detail::from_double(b.penetration_loss_db)}});
            j["wavelength_m"] = s.wavelength_m;
            j["antenna_count"] = s.antenna_count;
            j["antenna_spacing_m"] = s.antenna_spacing_m;
            j["pathloss_exponent"] = s.pathloss_exponent;
            j["reference_gain"] = s.reference_gain;
            j["shadow_log_variance_db2"] = s.shadow_log_variance_db2;
            j["max_paths"] = s.max_paths;
            return j;
        }

        Scenario scenario_from(const json &j, const std::string &where)
        {
            detail::reject_unknown_keys(j, where,
                                        {"name", "preset", "bs_position", "ue_region", "scatterers", "blockers",
                                         "wavelength_m", "antenna_count", "antenna_spacing_m", "pathloss_exponent",
                                         "reference_gain", "shadow_log_variance_db2", "max_paths"});
            // A file may start from a preset and override individual fields.
            Scenario s;
            if (j.contains("preset"))
                s = scenario_preset(detail::as_string(j["preset"], where + ".preset"));
            if (j.contains("name"))
                s.name = detail::as_string(j["name"], where + ".name");
            if (j.contains("bs_position"))
                s.bs_position = point_from(j["bs_position"], where + ".bs_position");
            if (j.contains("ue_region"))
            {
                const json &r = j["ue_region"];
                const std::string w = where + ".ue_region";
                detail::reject_unknown_keys(r, w, {"x_min", "x_max", "y_min", "y_max"});
                s.ue_region.x_min = detail::as_double(detail::require(r, w, "x_min"), w + ".x_min");
                s.ue_region.x_max = detail::as_double(detail::require(r, w, "x_max"), w + ".x_max");
                s.ue_region.y_min = detail::as_double(detail::require(r, w, "y_min"), w + ".y_min");
                s.ue_region.y_max = detail::as_double(detail::require(r, w, "y_max"), w + ".y_max");
            }
            if (j.contains("scatterers"))
            {
                const json &arr = j["scatterers"];
                if (!arr.is_array())
                    throw ConfigError(where + ".scatterers: expected an array");
                s.scatterers.clear();
                for (std::size_t i = 0; i < arr.size(); ++i)
                {
                    const std::string w = where + ".scatterers[" + std::to_string(i) + "]";
                    detail::reject_unknown_keys(arr[i], w, {"position", "reflection_loss_db"});
                    s.scatterers.push_back(
                        {point_from(detail::require(arr[i], w, "position"), w + ".position"),
                         detail::as_double(detail::require(arr[i], w, "reflection_loss_db"), w + ".reflection_loss_db")});
                }
            }
            if (j.contains("blockers"))
            {
                const json &arr = j["blockers"];
                if (!arr.is_array())
                    throw ConfigError(where + ".blockers: expected an array");
                s.blockers.clear();
                for (std::size_t i = 0; i < arr.size(); ++i)
                {
                    const std::string w = where + ".blockers[" + std::to_string(i) + "]";
                    detail::reject_unknown_keys(arr[i], w, {"a", "b", "penetration_loss_db"});
                    s.blockers.push_back({point_from(detail::require(arr[i], w, "a"), w + ".a"),
                                          point_from(detail::require(arr[i], w, "b"), w + ".b"),
                                          detail::as_double(detail::require(arr[i], w, "penetration_loss_db"),
                                                            w + ".penetration_loss_db")});
                }
            }
            auto num = [&](const char *key, double &dst) {
                if (j.contains(key))
                    dst = detail::as_double(j[key], where + "." + key);
            };
            num("wavelength_m", s.wavelength_m);
            num("antenna_spacing_m", s.antenna_spacing_m);
            num("pathloss_exponent", s.pathloss_exponent);
            num("reference_gain", s.reference_gain);
            num("shadow_log_variance_db2", s.shadow_log_variance_db2);
            if (j.contains("antenna_count"))
                s.antenna_count = detail::as_count<std::size_t>(j["antenna_count"], where + ".antenna_count");
            if (j.contains("max_paths"))
                s.max_paths = detail::as_count<std::size_t>(j["max_paths"], where + ".max_paths");
            s.validate();
            return s;
        }

        json path_json(const Path &p)
        {
            return {{"kind", p.kind == PathKind::line_of_sight ? "los" : "reflection"},
                    {"aod", p.aod},
                    {"amplitude", p.amplitude},
                    {"phase", p.phase},
                    {"distance", p.distance},
                    {"blocked", p.blocked}};
        }

        Path path_from(const json &j, const std::string &w)
        {
            detail::reject_unknown_keys(j, w, {"kind", "aod", "amplitude", "phase", "distance", "blocked"});
            Path p;
            const auto kind = detail::as_string(detail::require(j, w, "kind"), w + ".kind");
            if (kind == "los")
                p.kind = PathKind::line_of_sight;
            else if (kind == "reflection")
                p.kind = PathKind::reflection;
            else
                throw ConfigError(w + ".kind: expected los or reflection");
            p.aod = detail::as_double(detail::require(j, w, "aod"), w + ".aod");
            p.amplitude = detail::as_double(detail::require(j, w, "amplitude"), w + ".amplitude");
            p.phase = detail::as_double(detail::require(j, w, "phase"), w + ".phase");
            p.distance = detail::as_double(detail::require(j, w, "distance"), w + ".distance");
            p.blocked = detail::as_bool(detail::require(j, w, "blocked"), w + ".blocked");
            return p;
        }
    }

    std::string scenario_to_json(const Scenario &scenario) { return scenario_json(scenario).dump(2) + "\n"; }

    Scenario scenario_from_json(const std::string &text)
    {
        return scenario_from(detail::parse_json(text, "scenario"), "scenario");
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::string text;
        try
        {
            text = io::read_text_file(path);
        }
        catch (const DataError &e)
        {
            throw ConfigError(e.what());
        }
        return scenario_from_json(text);
    }

    std::string scenario_hash(const Scenario &scenario) { return io::content_hash(scenario_json(scenario).dump()); }

    std::string dataset_to_json(const SiteDataset &dataset)
    {
        json j;
        j["format"] = "sitebeam-dataset-1";
        j["scenario_hash"] = scenario_hash(dataset.scenario);
        j["seed"] = dataset.seed;
        j["n_ues"] = dataset.entries.size();
        j["scenario"] = scenario_json(dataset.scenario);
        json entries = json::array();
        for (std::size_t i = 0; i < dataset.entries.size(); ++i)
        {
            const auto &e = dataset.entries[i];
            json paths = json::array();
            for (const auto &p : e.paths.paths)
                paths.push_back(path_json(p));
            entries.push_back({{"split", to_string(dataset.splits[i])},
                               {"ue_position", point_json(e.ue_position)},
                               {"shadow", e.shadow},
                               {"paths", std::move(paths)}});
        }
        j["entries"] = std::move(entries);
        return j.dump(1) + "\n";
    }

    SiteDataset dataset_from_json(const std::string &text)
    {
        try
        {
            const json j = detail::parse_json(text, "dataset");
            detail::reject_unknown_keys(j, "dataset", {"format", "scenario_hash", "seed", "n_ues", "scenario", "entries"});
            if (detail::as_string(detail::require(j, "dataset", "format"), "dataset.format") != "sitebeam-dataset-1")
                throw ConfigError("dataset.format: unsupported version");
            SiteDataset ds;
            ds.scenario = scenario_from(detail::require(j, "dataset", "scenario"), "dataset.scenario");
            if (scenario_hash(ds.scenario) != detail::as_string(detail::require(j, "dataset", "scenario_hash"), "dataset.scenario_hash"))
                throw ConfigError("dataset.scenario_hash: does not match the embedded scenario");
            ds.seed = detail::as_count<std::uint64_t>(detail::require(j, "dataset", "seed"), "dataset.seed");
            const auto n = detail::as_count<std::size_t>(detail::require(j, "dataset", "n_ues"), "dataset.n_ues");
            const json &entries = detail::require(j, "dataset", "entries");
            if (!entries.is_array() || entries.size() != n)
                throw ConfigError("dataset.entries: expected n_ues entries");
            for (std::size_t i = 0; i < n; ++i)
            {
                const std::string w = "dataset.entries[" + std::to_string(i) + "]";
                const json &e = entries[i];
                detail::reject_unknown_keys(e, w, {"split", "ue_position", "shadow", "paths"});
                const auto split = detail::as_string(detail::require(e, w, "split"), w + ".split");
                if (split == "train")
                    ds.splits.push_back(Split::train);
                else if (split == "val")
                    ds.splits.push_back(Split::val);
                else if (split == "test")
                    ds.splits.push_back(Split::test);
                else
                    throw ConfigError(w + ".split: expected train, val or test");
                PathSet paths;
                const json &arr = detail::require(e, w, "paths");
                if (!arr.is_array())
                    throw ConfigError(w + ".paths: expected an array");
                for (std::size_t l = 0; l < arr.size(); ++l)
                    paths.paths.push_back(path_from(arr[l], w + ".paths[" + std::to_string(l) + "]"));
                const double shadow = detail::as_double(detail::require(e, w, "shadow"), w + ".shadow");
                const Point2 ue = point_from(detail::require(e, w, "ue_position"), w + ".ue_position");
                ds.entries.push_back(synthesize_channel(paths, shadow, ds.scenario, ue));
            }
            return ds;
        }
        catch (const ConfigError &e)
        {
            throw DataError(e.what());
        }
    }

    void save_dataset(const SiteDataset &dataset, const std::filesystem::path &path)
    {
        io::write_text_file(path, dataset_to_json(dataset));
    }

    SiteDataset load_dataset(const std::filesystem::path &path) { return dataset_from_json(io::read_text_file(path)); }
}
