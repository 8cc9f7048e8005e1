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

#ifndef SITEBEAM_CHANNEL_HPP
#define SITEBEAM_CHANNEL_HPP

#include "sitebeam/complex.hpp"
#include "sitebeam/random.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sitebeam
{
    struct Point2
    {
        double x = 0.0;
        double y = 0.0;
    };

    // Axis-aligned rectangle (meters).
    struct Rect
    {
        double x_min = 0.0;
        double x_max = 0.0;
        double y_min = 0.0;
        double y_max = 0.0;

        bool contains(Point2 p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
        Point2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
    };

    // Point reflector producing one first-order bounce.
    struct Scatterer
    {
        Point2 position;
        double reflection_loss_db = 0.0;
    };

    // Line segment attenuating every path crossing it. An infinite loss removes the path.
    struct Blocker
    {
        Point2 a;
        Point2 b;
        double penetration_loss_db = 0.0;
    };

    // 2-D site description. The BS array is a ULA whose broadside points along +x;
    // departure angles are measured from broadside.
    struct Scenario
    {
        std::string name = "custom";
        Point2 bs_position;
        Rect ue_region;
        std::vector<Scatterer> scatterers;
        std::vector<Blocker> blockers;
        double wavelength_m = 299792458.0 / 28e9;
        std::size_t antenna_count = 16;
        double antenna_spacing_m = 0.5 * 299792458.0 / 28e9;
        double pathloss_exponent = 2.0;
        // Linear gain at 1 m; free space (lambda / 4 pi)^2 at 28 GHz by default.
        double reference_gain = (299792458.0 / 28e9 / (4.0 * 3.14159265358979324)) *
                                (299792458.0 / 28e9 / (4.0 * 3.14159265358979324));
        double shadow_log_variance_db2 = 1.0;
        std::size_t max_paths = 8;

        double spacing_ratio() const { return antenna_spacing_m / wavelength_m; }

        // Throws ConfigError describing the first violated invariant.
        void validate() const;
    };

    // Shipped presets: "los_park" (open area, three weak reflectors) and
    // "blocked_street" (wall next to the BS, six reflectors).
    Scenario scenario_preset(const std::string &name);
    std::vector<std::string> scenario_preset_names();

    enum class PathKind
    {
        line_of_sight,
        reflection
    };

    struct Path
    {
        PathKind kind = PathKind::line_of_sight;
        double aod = 0.0;       // radians from broadside
        double amplitude = 0.0; // sqrt(beta), linear
        double phase = 0.0;     // radians in [-pi, pi)
        double distance = 0.0;  // meters
        bool blocked = false;   // crossed a finite-loss blocker
    };

    struct PathSet
    {
        std::vector<Path> paths;

        bool has_line_of_sight() const;
        std::size_t size() const { return paths.size(); }
    };

    struct ChannelRealization
    {
        CVec h;
        PathSet paths;
        double shadow = 1.0; // linear, common to every path
        Point2 ue_position;
    };

    enum class Split
    {
        train,
        val,
        test
    };

    const char *to_string(Split split);

    struct SiteDataset
    {
        Scenario scenario;
        std::uint64_t seed = 0;
        std::vector<ChannelRealization> entries;
        std::vector<Split> splits;

        std::vector<std::size_t> indices(Split split) const;
        std::vector<CVec> channels(Split split) const;
        double line_of_sight_fraction() const;
        double mean_path_count() const;
    };

    struct DatasetOptions
    {
        bool grid = false;
        // Explicit split sizes; when all zero the default 80/10/10 split applies.
        std::size_t n_train = 0;
        std::size_t n_val = 0;
        std::size_t n_test = 0;
    };

    // Element n: exp(j 2 pi (d/lambda) n sin(phi)).
    CVec steering_vector(double aod, std::size_t n_antennas, double spacing_ratio);

    // First-order geometric tracing: LoS plus one bounce per scatterer, with
    // blocker losses, path loss C0 d^-alpha and uniform phases. Keeps the
    // strongest max_paths paths. Throws EmptyChannelError when nothing survives.
    PathSet trace_paths(const Scenario &scenario, Point2 ue, Rng &rng);

    // Linear shadowing factor S with 10 log10 S ~ N(0, sigma_sh^2).
    double draw_shadow(const Scenario &scenario, Rng &rng);

    // h = sum_l sqrt(S) amplitude_l e^{j phase_l} a(aod_l). Pure function of its
    // inputs; throws EmptyChannelError when the paths cancel.
    ChannelRealization synthesize_channel(const PathSet &paths, double shadow, const Scenario &scenario,
                                          Point2 ue = {});

    // Deterministic under seed; UE i draws from stream (seed, i) so generation
    // order does not matter. Unusable draws are resampled up to 100 times.
    SiteDataset generate_dataset(const Scenario &scenario, std::size_t n_ues, std::uint64_t seed,
                                 const DatasetOptions &options = {});

    // w_n = exp(j arg h_n); the maximizer of |h^H w| under unit modulus.
    CVec mrt_beamformer(const CVec &h);

    // Scenario and dataset files (JSON). Loading a dataset regenerates every
    // channel vector from the stored paths.
    std::string scenario_to_json(const Scenario &scenario);
    Scenario scenario_from_json(const std::string &text);
    Scenario load_scenario(const std::filesystem::path &path);
    std::string scenario_hash(const Scenario &scenario);

    std::string dataset_to_json(const SiteDataset &dataset);
    SiteDataset dataset_from_json(const std::string &text);
    void save_dataset(const SiteDataset &dataset, const std::filesystem::path &path);
    SiteDataset load_dataset(const std::filesystem::path &path);
}

#endif
