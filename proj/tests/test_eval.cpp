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

#include <doctest.h>

#include "support.hpp"

#include "sitebeam/baselines.hpp"
#include "sitebeam/cfm.hpp"
#include "sitebeam/channel.hpp"
#include "sitebeam/codebook.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/eval.hpp"
#include "sitebeam/linalg.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sitebeam;
using namespace sitebeam::testing;

TEST_CASE("gain gap: MRT is zero, orthogonal beams clamp")
{
    Rng rng(1);
    for (int i = 0; i < 20; ++i)
    {
        const CVec h = random_channel(8, rng, 1e-10);
        CHECK(std::fabs(gap_db(h, mrt_beamformer(h))) < 1e-12);
        CHECK(gap_db(h, random_unit_modulus(8, rng)) >= 0.0);
    }
    const CVec h{cplx(1, 0), cplx(1, 0)};
    const CVec w{cplx(1, 0), cplx(-1, 0)};
    bool clamped = false;
    CHECK(gap_db(h, w, &clamped) == kGapClampDb);
    CHECK(clamped);
    const GapReport r = gain_gap({h, h}, {w, mrt_beamformer(h)});
    CHECK(r.n_degenerate == 1);
    CHECK(r.degenerate[0] == 1);
    CHECK(r.degenerate[1] == 0);
    CHECK(r.mean == doctest::Approx(50.0));
}

TEST_CASE("gain gap: half-power beam is 3 dB, global phase does not matter")
{
    const CVec h{cplx(1, 0), cplx(1, 0)};
    const CVec w{cplx(1, 0), cplx(0, 1)}; // |1 + j|^2 = 2 against MRT 4
    CHECK(gap_db(h, w) == doctest::Approx(10 * std::log10(2.0)));
    Rng rng(2);
    const CVec g = random_channel(6, rng, 1.0);
    CVec v = random_unit_modulus(6, rng);
    const double base = gap_db(g, v);
    for (auto &x : v)
        x *= std::polar(1.0, 1.234);
    CHECK(gap_db(g, v) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("random beams lose about 10 log10(N_t) dB on a single-path channel")
{
    // for a steering vector, |a^H w|^2 of a random unit-modulus w has mean N_t
    Rng rng(3);
    const std::size_t nt = 16;
    const CVec a = steering_vector(0.4, nt, 0.5);
    std::vector<double> ratio;
    double mean_gap = 0;
    for (int i = 0; i < 10000; ++i)
    {
        const CVec w = random_unit_modulus(nt, rng);
        ratio.push_back(array_gain(a, w));
        mean_gap += gap_db(a, w) / 10000;
    }
    const Moments m = sample_moments(ratio);
    CHECK(std::fabs(m.mean - double(nt)) < 3 * m.se_mean);
    // E[-10 log10 Exp(1)] = 10 gamma / ln 10 dB on top of 10 log10 N_t
    const double expect = 10 * std::log10(double(nt)) + 10 * std::numbers::egamma / std::numbers::ln10;
    CHECK(mean_gap == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("quantile interpolation")
{
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.0) == 1.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 1.0) == 4.0);
    CHECK(quantile({0.0, 10.0}, 0.95) == doctest::Approx(9.5));
    const GapReport r = summarize_gaps({0.0, 1.0, 2.0, 3.0, 4.0}, std::vector<char>(5, 0));
    CHECK(r.median == 2.0);
    CHECK(r.mean == 2.0);
    CHECK(r.p95 == doctest::Approx(3.8));
}

TEST_CASE("distances: identity covariance makes Mahalanobis Euclidean")
{
    Rng rng(4);
    const Tensor y = random_tensor({12, 3}, rng, -5, 5);
    const Tensor eye = Tensor::identity(3);
    const DistanceReport d = distance_cdfs(y, eye, 11);
    REQUIRE(d.euclidean.size() == 66);
    for (std::size_t i = 0; i < d.euclidean.size(); ++i)
        CHECK(d.mahalanobis[i] == doctest::Approx(d.euclidean[i]).epsilon(1e-12));
    CHECK(d.levels.size() == 11);
    CHECK(d.levels.back() == 1.0);
    CHECK(d.euclidean_quantiles.front() == doctest::Approx(*std::min_element(d.euclidean.begin(), d.euclidean.end())));
    // first pair is (0, 1)
    double e = 0;
    for (std::size_t c = 0; c < 3; ++c)
        e += (y(0, c) - y(1, c)) * (y(0, c) - y(1, c));
    CHECK(d.euclidean[0] == doctest::Approx(std::sqrt(e)));

    const Tensor same = Tensor::matrix(2, 2, {1.0, 2.0, 1.0, 2.0});
    const DistanceReport z = distance_cdfs(same, Tensor::identity(2), 3);
    CHECK(z.euclidean[0] == 0.0);
    CHECK(z.mahalanobis[0] == 0.0);
}

TEST_CASE("distances: a diagonal covariance rescales each coordinate")
{
    const Tensor y = Tensor::matrix(2, 2, {0.0, 0.0, 3.0, 4.0});
    const Tensor cov = Tensor::matrix(2, 2, {9.0, 0.0, 0.0, 4.0});
    const DistanceReport d = distance_cdfs(y, cov, 2);
    CHECK(d.euclidean[0] == doctest::Approx(5.0));
    CHECK(d.mahalanobis[0] == doctest::Approx(std::sqrt(1.0 + 4.0)));
    const Tensor c = loaded_sample_covariance(y, 0.5);
    CHECK(c(0, 0) == doctest::Approx(4.5 + 0.5));
    CHECK(c(0, 1) == doctest::Approx(6.0));
}

TEST_CASE("beam patterns: all-ones beam peaks broadside with N_t^2")
{
    const Codebook cb = dft_codebook(8, 8);
    const auto grid = angle_grid(361);
    CHECK(grid.front() == doctest::Approx(-std::numbers::pi / 2));
    CHECK(grid[180] == doctest::Approx(0.0).epsilon(1e-15));
    const BeamPatterns p = beam_patterns(cb, grid);
    CHECK(p.peak_linear[0] == doctest::Approx(64.0));
    CHECK(p.gain_db(180, 0) == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t k = 0; k < 8; ++k)
    {
        double mx = -1e300;
        for (std::size_t g = 0; g < grid.size(); ++g)
            mx = std::max(mx, p.gain_db(g, k));
        CHECK(mx == doctest::Approx(0.0).epsilon(1e-12));
    }
    // beam 1 of the 8-point DFT points where sin(phi) = 2/8
    std::size_t arg = 0;
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (p.gain_db(g, 1) > p.gain_db(arg, 1))
            arg = g;
    CHECK(std::sin(grid[arg]) == doctest::Approx(0.25).epsilon(0.02));
    const std::string csv = patterns_csv(p);
    CHECK(csv.rfind("angle_rad,beam_0_db,beam_1_db", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 362);
}

TEST_CASE("beam patterns ignore a common phase rotation")
{
    Rng rng(5);
    Tensor phase = random_tensor({6, 2}, rng, 0, 6.0);
    const auto grid = angle_grid(91);
    const BeamPatterns a = beam_patterns(codebook_from_phase(phase), grid);
    for (double &v : phase.data())
        v += 0.7;
    const BeamPatterns b = beam_patterns(codebook_from_phase(phase), grid);
    for (std::size_t i = 0; i < a.gain_db.size(); ++i)
        CHECK(b.gain_db[i] == doctest::Approx(a.gain_db[i]).epsilon(1e-9));
}

namespace
{
    struct Fixture
    {
        SiteDataset ds;
        Codebook cb;
        CfmModel cfm;
        MlpModel mlp;

        Fixture()
        {
            Scenario s = scenario_preset("los_park");
            s.antenna_count = 4;
            ds = generate_dataset(s, 200, 3);
            cb = dft_codebook(4, 4);
            CfmArch a;
            a.n_antennas = 4;
            a.n_beams = 4;
            a.cond_width = 8;
            a.hidden_width = 16;
            a.n_blocks = 2;
            CfmTrainConfig tc;
            tc.batch_size = 16;
            tc.iterations = 40;
            tc.val_every = 0;
            tc.val_candidates = 0;
            cfm = train_cfm(CfmModel::create(a, 1), ds, cb, NoiseConfig{}, tc).model;
            MlpArch m;
            m.n_antennas = 4;
            m.n_beams = 4;
            m.hidden_width = 8;
            m.n_hidden = 1;
            mlp = train_mlp(MlpModel::create(m, 1), ds, cb, NoiseConfig{}, tc).model;
        }

        PipelineInputs inputs() const
        {
            PipelineInputs in;
            in.dataset = &ds;
            in.codebook = &cb;
            in.cfm = &cfm;
            in.mlp = &mlp;
            in.provenance = {{"dataset", "mem"}, {"codebook", "mem"}, {"cfm", "mem"}, {"mlp", "mem"}};
            return in;
        }
    };

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

TEST_CASE("pipeline: nested candidate sweep is monotone, results are thread invariant")
{
    const Fixture f;
    PipelineConfig cfg;
    cfg.m_sweep = {1, 2, 4, 8};
    cfg.power_sweep_dbm = {40.0, 0.0};
    cfg.pmi.tier1_k = 8;
    cfg.pmi.tier2_m = 4;
    cfg.seed = 5;
    const ResultBundle a = run_pipeline(f.inputs(), cfg);
    for (double p : cfg.power_sweep_dbm)
    {
        for (std::size_t i = 1; i < cfg.m_sweep.size(); ++i)
        {
            const GapEntry *lo = a.find("cfm", p, cfg.m_sweep[i - 1]);
            const GapEntry *hi = a.find("cfm", p, cfg.m_sweep[i]);
            REQUIRE(lo);
            REQUIRE(hi);
            for (std::size_t u = 0; u < lo->report.gaps_db.size(); ++u)
                CHECK(hi->report.gaps_db[u] <= lo->report.gaps_db[u] + 1e-12);
        }
        for (const char *m : {"mlp", "pmi", "srs"})
            CHECK(a.find(m, p) != nullptr);
    }
    CHECK(a.find("cfm", 40.0, 8)->report.gaps_db.size() == f.ds.indices(Split::test).size());
    CHECK(a.find("srs", 0.0)->report.mean > a.find("srs", 40.0)->report.mean);
    REQUIRE(a.logdet.size() == 2);
    CHECK(a.patterns.angles.size() == cfg.pattern_points);

    cfg.threads = 3;
    const ResultBundle b = run_pipeline(f.inputs(), cfg);
    REQUIRE(a.gaps.size() == b.gaps.size());
    for (std::size_t i = 0; i < a.gaps.size(); ++i)
        CHECK(a.gaps[i].report.gaps_db == b.gaps[i].report.gaps_db);
    CHECK(a.manifest_json == b.manifest_json);

    const auto dir = std::filesystem::temp_directory_path() / "sitebeam_test_bundle";
    std::filesystem::remove_all(dir);
    write_bundle(a, dir);
    for (const char *name : {"gaps.csv", "summary.csv", "logdet.csv", "distances.csv", "patterns.csv", "manifest.json"})
        CHECK(std::filesystem::exists(dir / name));
    CHECK(slurp(dir / "gaps.csv").find("cfm") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("pipeline: methods can be switched off, missing artifacts are named")
{
    const Fixture f;
    PipelineConfig cfg;
    cfg.m_sweep = {1};
    cfg.run_mlp = false;
    cfg.run_pmi = false;
    cfg.run_srs = false;
    const ResultBundle r = run_pipeline(f.inputs(), cfg);
    CHECK(r.find("mlp", cfg.noise.transmit_power_dbm) == nullptr);
    CHECK(r.find("cfm", cfg.noise.transmit_power_dbm, 1) != nullptr);

    PipelineInputs in = f.inputs();
    in.cfm = nullptr;
    in.provenance["cfm"] = "/some/where/cfm.json";
    try
    {
        run_pipeline(in, cfg);
        FAIL("expected DataError");
    }
    catch (const DataError &e)
    {
        CHECK(std::string(e.what()).find("cfm") != std::string::npos);
    }
}
