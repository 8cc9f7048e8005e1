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

#include "sitebeam/cfm.hpp"
#include "sitebeam/channel.hpp"
#include "sitebeam/codebook.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/eval.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>

using namespace sitebeam;
using namespace sitebeam::testing;

namespace
{
    CfmArch tiny_arch()
    {
        CfmArch a;
        a.n_antennas = 4;
        a.n_beams = 4;
        a.cond_width = 8;
        a.hidden_width = 16;
        a.n_blocks = 2;
        return a;
    }

    CfmTrainConfig short_run()
    {
        CfmTrainConfig c;
        c.batch_size = 16;
        c.iterations = 30;
        c.val_every = 10;
        c.val_size = 16;
        c.val_steps = 5;
        c.seed = 3;
        return c;
    }

    SiteDataset small_site(std::size_t n_antennas = 4)
    {
        Scenario s = scenario_preset("los_park");
        s.antenna_count = n_antennas;
        return generate_dataset(s, 120, 8);
    }
}

TEST_CASE("Euler integration of a constant field telescopes exactly")
{
    Tensor z0 = Tensor::matrix(2, 3, {0.5, -1.0, 2.0, 0.0, 0.25, -0.75});
    const Tensor c = Tensor::matrix(2, 3, {1.0, 2.0, -3.0, 0.5, 0.5, 0.5});
    for (std::size_t steps : {1, 7, 40})
    {
        const Tensor z1 = integrate_flow([&](const Tensor &, double) { return c; }, z0, steps);
        for (std::size_t i = 0; i < z1.size(); ++i)
            CHECK(z1[i] == doctest::Approx(z0[i] + c[i]).epsilon(1e-14));
    }
    // v = t: Euler gives sum_s (s/n)(1/n) = (n-1)/(2n), evaluated at t_s = s/n
    const Tensor one = Tensor::matrix(1, 1, {0.0});
    const Tensor r = integrate_flow([](const Tensor &z, double t) {
        Tensor v(z.shape());
        v[0] = t;
        return v;
    }, one, 10);
    CHECK(r[0] == doctest::Approx(9.0 / 20.0).epsilon(1e-14));
}

TEST_CASE("Euler integration reports the step where the state blows up")
{
    const Tensor z = Tensor::matrix(1, 1, {1.0});
    try
    {
        integrate_flow([](const Tensor &s, double t) {
            Tensor v(s.shape());
            v[0] = t >= 0.5 ? std::numeric_limits<double>::infinity() : 0.0;
            return v;
        }, z, 4);
        FAIL("expected NumericalError");
    }
    catch (const NumericalError &e)
    {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("unit-modulus projection")
{
    const std::vector<double> z{3.0, 0.0, -1.0, 0.0, 4.0, 0.0, 0.0, 0.0};
    const CVec w = project_unit_modulus(z);
    REQUIRE(w.size() == 4);
    CHECK(std::abs(w[0] - std::polar(1.0, std::atan2(4.0, 3.0))) < 1e-15);
    CHECK(std::abs(w[1] - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(w[2] - cplx(-1, 0)) < 1e-15);
    CHECK(w[3] == cplx(1, 0)); // exact zero maps to phase 0
    Rng rng(1);
    const Tensor s = random_tensor({1, 16}, rng, -3, 3);
    for (const auto &x : project_unit_modulus(s.data()))
        CHECK(std::abs(x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(project_unit_modulus(std::vector<double>{1.0, 2.0, 3.0}), ShapeError);
}

TEST_CASE("RSRP normalization: shift only moves the mean, constant vector floors the std")
{
    const std::vector<double> y{-80.0, -70.0, -75.0, -90.0};
    const ConditionFeatures f = normalize_rsrp(y);
    double m = 0, v = 0;
    for (double x : f.y_norm)
        m += x / 4;
    for (double x : f.y_norm)
        v += x * x / 4;
    CHECK(std::abs(m) < 1e-14);
    CHECK(v == doctest::Approx(1.0));
    CHECK(f.mean_db == doctest::Approx(-78.75));
    std::vector<double> up = y;
    for (double &x : up)
        x += 12.0;
    const ConditionFeatures g = normalize_rsrp(up);
    CHECK(g.mean_db == doctest::Approx(f.mean_db + 12.0));
    CHECK(g.std_db == doctest::Approx(f.std_db));
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(g.y_norm[i] == doctest::Approx(f.y_norm[i]).epsilon(1e-12));
    const ConditionFeatures c = normalize_rsrp(std::vector<double>(4, -70.0));
    CHECK(c.std_db == 0.0);
    for (double x : c.y_norm)
        CHECK(x == 0.0);
}

TEST_CASE("stats scaler standardizes the fitted set")
{
    std::vector<ConditionFeatures> fs;
    Rng rng(2);
    for (int i = 0; i < 50; ++i)
    {
        std::vector<double> y(4);
        for (double &x : y)
            x = rng.uniform(-110, -60);
        fs.push_back(normalize_rsrp(y));
    }
    const StatsScaler s = StatsScaler::fit(fs);
    double mm = 0, ms = 0, vm = 0;
    for (const auto &f : fs)
    {
        const auto [a, b] = s.apply(f);
        mm += a / 50;
        ms += b / 50;
        vm += a * a / 50;
    }
    CHECK(std::abs(mm) < 1e-10);
    CHECK(std::abs(ms) < 1e-10);
    CHECK(vm == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("interpolation path endpoints")
{
    Rng rng(3);
    const Tensor z0 = random_tensor({3, 4}, rng, -1, 1);
    const Tensor z1 = random_tensor({3, 4}, rng, -1, 1);
    const Tensor t = Tensor::matrix(3, 1, {0.0, 1.0, 0.25});
    const Tensor zt = interpolate(z0, z1, t);
    for (std::size_t c = 0; c < 4; ++c)
    {
        CHECK(zt(0, c) == z0(0, c));
        CHECK(zt(1, c) == z1(1, c));
        CHECK(zt(2, c) == doctest::Approx(0.75 * z0(2, c) + 0.25 * z1(2, c)));
    }
}

TEST_CASE("MRT targets stack real then imaginary parts")
{
    const CVec h{cplx(1, 1), cplx(0, -2)};
    const Tensor z = mrt_targets({h});
    REQUIRE(z.cols() == 4);
    const CVec w = project_unit_modulus(z.data());
    CHECK(gap_db(h, w) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(z(0, 0) * z(0, 0) + z(0, 2) * z(0, 2) - 1.0) < 1e-15);
}

TEST_CASE("selection: nested prefixes are monotone and ties go to the lowest index")
{
    Rng rng(4);
    const CVec h = random_channel(8, rng, 1.0);
    std::vector<CVec> cands;
    for (int m = 0; m < 16; ++m)
        cands.push_back(random_unit_modulus(8, rng));
    double prev = 0.0;
    for (std::size_t m = 1; m <= 16; ++m)
    {
        const Selection s = select_beam(cands, h, m);
        CHECK(s.index < m);
        CHECK(s.gain >= prev);
        prev = s.gain;
    }
    std::vector<CVec> same(5, cands[0]);
    CHECK(select_beam(same, h).index == 0);
    std::vector<CVec> twin{cands[1], cands[2], cands[2]};
    const Selection t = select_beam(twin, h);
    CHECK(t.index != 2);
    NoiseConfig noise;
    const Selection ns = select_beam_noisy(cands, h, noise, rng, 4);
    CHECK(ns.index < 4);
}

TEST_CASE("sampler: batch rows match single draws and are thread invariant")
{
    CfmModel model = CfmModel::create(tiny_arch(), 11);
    Rng rng(5);
    const Tensor y = random_tensor({70, 4}, rng, -110, -70);
    SamplerConfig sc;
    sc.n_candidates = 3;
    sc.n_steps = 6;
    const auto one = sample_candidates_batch(model, y, sc, 99, 1);
    const auto four = sample_candidates_batch(model, y, sc, 99, 4);
    REQUIRE(one.size() == 70);
    for (std::size_t u = 0; u < 70; ++u)
        for (std::size_t m = 0; m < 3; ++m)
            CHECK(one[u][m] == four[u][m]);
    for (std::size_t u : {0, 33, 69})
    {
        Rng r = Rng::derive(99, u);
        const auto s = sample_candidates(model, y.data().subspan(u * 4, 4), sc, r);
        for (std::size_t m = 0; m < 3; ++m)
            for (std::size_t n = 0; n < 4; ++n)
                CHECK(std::abs(s[m][n] - one[u][m][n]) < 1e-9);
    }
}

TEST_CASE("training: deterministic, full trace, loss drops")
{
    const SiteDataset ds = small_site();
    const Codebook cb = dft_codebook(4, 4);
    CfmTrainConfig cfg = short_run();
    cfg.iterations = 200;
    cfg.optimizer = {nn::OptimizerKind::adam, 3e-3};
    const auto a = train_cfm(CfmModel::create(tiny_arch(), 1), ds, cb, NoiseConfig{}, cfg);
    const auto b = train_cfm(CfmModel::create(tiny_arch(), 1), ds, cb, NoiseConfig{}, cfg);
    CHECK(cfm_to_json(a.model) == cfm_to_json(b.model));
    CHECK(train_trace_csv(a.trace) == train_trace_csv(b.trace));
    REQUIRE(!a.trace.empty());
    CHECK(a.trace.front().iter == 0);
    CHECK(a.trace.back().iter == 200);
    CHECK(std::isfinite(a.trace.back().val_loss));
    CHECK(std::isfinite(a.trace.back().val_gap_db));
    CHECK(a.trace.back().val_loss < a.trace.front().val_loss);
    CHECK(train_trace_csv(a.trace).rfind("iter,train_loss,val_loss,val_gap_db,wall_ms\n", 0) == 0);
}

TEST_CASE("training with power augmentation stays finite and differs from fixed power")
{
    const SiteDataset ds = small_site();
    const Codebook cb = dft_codebook(4, 4);
    CfmTrainConfig cfg = short_run();
    const auto fixed = train_cfm(CfmModel::create(tiny_arch(), 1), ds, cb, NoiseConfig{}, cfg);
    cfg.power_lo_dbm = -10;
    cfg.power_hi_dbm = 40;
    const auto aug = train_cfm(CfmModel::create(tiny_arch(), 1), ds, cb, NoiseConfig{}, cfg);
    CHECK(aug.model.params.all_finite());
    CHECK(cfm_to_json(aug.model) != cfm_to_json(fixed.model));
}

TEST_CASE("per-sample powers: row i depends only on its own power and stream")
{
    const SiteDataset ds = small_site();
    const Codebook cb = dft_codebook(4, 4);
    const auto hs = ds.channels(Split::train);
    const std::vector<CVec> two(hs.begin(), hs.begin() + 2);
    const std::vector<double> p1{40.0, 10.0};
    const std::vector<double> p2{40.0, 20.0};
    const Tensor a = measure_with_powers(cb, two, NoiseConfig{}, p1, 7, MeasurementMode::exact);
    const Tensor b = measure_with_powers(cb, two, NoiseConfig{}, p2, 7, MeasurementMode::exact);
    for (std::size_t c = 0; c < 4; ++c)
    {
        CHECK(a(0, c) == b(0, c));
        CHECK(a(1, c) != b(1, c));
    }
}

TEST_CASE("training rejects mismatched shapes, empty splits and divergence")
{
    const SiteDataset ds = small_site();
    CfmTrainConfig cfg = short_run();
    CHECK_THROWS_AS(train_cfm(CfmModel::create(tiny_arch(), 1), ds, dft_codebook(4, 6), NoiseConfig{}, cfg),
                    ConfigError);
    SiteDataset empty = ds;
    for (auto &s : empty.splits)
        s = Split::test;
    CHECK_THROWS_AS(train_cfm(CfmModel::create(tiny_arch(), 1), empty, dft_codebook(4, 4), NoiseConfig{}, cfg),
                    DataError);
    cfg = short_run();
    cfg.optimizer.learning_rate = 1e9;
    cfg.iterations = 50;
    CHECK_THROWS_AS(train_cfm(CfmModel::create(tiny_arch(), 1), ds, dft_codebook(4, 4), NoiseConfig{}, cfg),
                    AbortedRun);
}

TEST_CASE("checkpoint round trip reproduces velocities and samples")
{
    const SiteDataset ds = small_site();
    CfmTrainConfig cfg = short_run();
    const auto r = train_cfm(CfmModel::create(tiny_arch(), 2), ds, dft_codebook(4, 4), NoiseConfig{}, cfg);
    const auto dir = std::filesystem::temp_directory_path() / "sitebeam_test_cfm";
    save_cfm(r.model, dir / "cfm.json");
    const CfmModel back = load_cfm(dir / "cfm.json");
    std::filesystem::remove_all(dir);
    CHECK(cfm_to_json(back) == cfm_to_json(r.model));
    const std::vector<double> y{-80, -85, -90, -95};
    const auto c1 = encode_condition(r.model, normalize_rsrp(y));
    const auto c2 = encode_condition(back, normalize_rsrp(y));
    CHECK(c1 == c2);
    const std::vector<double> z{0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8};
    CHECK(velocity(r.model, z, 0.3, c1) == velocity(back, z, 0.3, c2));
    SamplerConfig sc;
    sc.n_steps = 8;
    Rng a(9), b(9);
    CHECK(sample_candidates(r.model, y, sc, a) == sample_candidates(back, y, sc, b));
    CHECK(back.seed == 2);
    CHECK(back.train_config_hash == cfg.hash());
    CHECK_THROWS_AS(cfm_from_json("{\"format\": \"sitebeam-cfm-1\"}"), DataError);
    CHECK_THROWS_AS(load_cfm("/nonexistent/cfm.json"), DataError);
}

TEST_CASE("architecture and sampler validation")
{
    CfmArch a = tiny_arch();
    a.n_blocks = 0;
    CHECK_THROWS_AS(a.validate(), ConfigError);
    SamplerConfig s;
    s.n_steps = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = SamplerConfig{};
    s.temperature = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CfmTrainConfig t;
    t.power_lo_dbm = 10;
    t.power_hi_dbm = 0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
}
