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

#include "sitebeam/channel.hpp"
#include "sitebeam/codebook.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/measurement.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace sitebeam;
using namespace sitebeam::testing;

namespace
{
    // P_t = 1 mW, sigma_n^2 = 0.1 mW
    NoiseConfig unit_config(std::size_t ls)
    {
        NoiseConfig c;
        c.transmit_power_dbm = 0.0;
        c.bandwidth_hz = 1e8;
        c.noise_psd_dbm_hz = -10.0 - 80.0;
        c.ssb_length = ls;
        c.shadow_log_variance_db2 = 0.0;
        return c;
    }

    ComplexMatrix one_beam(const CVec &w)
    {
        ComplexMatrix m(w.size(), 1);
        m.set_column(0, w);
        return m;
    }
}

TEST_CASE("array gain examples")
{
    const CVec a = steering_vector(0.0, 4, 0.5);
    CHECK(array_gain(a, a) == doctest::Approx(16.0));
    const CVec h{{1, 0}, {1, 0}};
    const CVec w{{1, 0}, {-1, 0}};
    CHECK(array_gain(h, w) == 0.0);
    CHECK(shadow_free_gain(a, a, 4.0) == doctest::Approx(4.0));
}

TEST_CASE("linear moments: worked example")
{
    const NoiseConfig c = unit_config(5);
    CHECK(c.noise_power_mw() == doctest::Approx(0.1).epsilon(1e-12));
    const RsrpMoments m = rsrp_moments(4.0, c);
    CHECK(m.mean_mw == doctest::Approx(4.1).epsilon(1e-12));
    CHECK(m.variance_mw2 == doctest::Approx((0.01 + 0.8) / 25.0).epsilon(1e-12));
    NoiseConfig quiet = c;
    quiet.noise_psd_dbm_hz = -std::numeric_limits<double>::infinity();
    CHECK(rsrp_moments(4.0, quiet).variance_mw2 == 0.0);
    CHECK(rsrp_moments(4.0, quiet).mean_mw == doctest::Approx(4.0));
}

TEST_CASE("default noise floor is -90 dBm")
{
    NoiseConfig c;
    CHECK(c.noise_power_dbm() == doctest::Approx(-90.0).epsilon(1e-12));
    CHECK(c.transmit_power_mw() == doctest::Approx(1e4));
}

TEST_CASE("noiseless exact measurement with unit symbols returns P_t g")
{
    NoiseConfig c = unit_config(5);
    c.noise_psd_dbm_hz = -std::numeric_limits<double>::infinity();
    Rng rng(1);
    const CVec h = random_channel(8, rng);
    const CVec w = random_unit_modulus(8, rng);
    CHECK(rsrp_exact(h, w, c, rng, true) == doctest::Approx(array_gain(h, w)).epsilon(1e-13));
}

TEST_CASE("exact measurement mean matches the analytic mean within 1%")
{
    const NoiseConfig c = unit_config(5);
    Rng rng(2);
    const CVec h = random_channel(8, rng, 0.25);
    const CVec w = random_unit_modulus(8, rng);
    std::vector<double> p(100000);
    for (auto &v : p)
        v = rsrp_exact(h, w, c, rng);
    const double mu = rsrp_moments(h, w, c).mean_mw;
    CHECK(std::abs(sample_moments(p).mean - mu) / mu < 0.01);
}

TEST_CASE("exact measurement variance follows the simulated estimator")
{
    // Oracle for the estimator as simulated: with CN(0, P_t) symbols each
    // |g s + n|^2 is exponential with mean P_t g + sigma^2, so the L_s-average
    // has variance (P_t g + sigma^2)^2 / L_s. Constant-modulus symbols give
    // (sigma^4 + 2 sigma^2 P_t g) / L_s.
    const NoiseConfig c = unit_config(5);
    Rng rng(3);
    const CVec h = random_channel(8, rng, 0.25);
    const CVec w = random_unit_modulus(8, rng);
    const double g = array_gain(h, w), s2 = c.noise_power_mw();
    std::vector<double> gauss(100000), unit(100000);
    for (std::size_t i = 0; i < gauss.size(); ++i)
    {
        gauss[i] = rsrp_exact(h, w, c, rng);
        unit[i] = rsrp_exact(h, w, c, rng, true);
    }
    const Moments mg = sample_moments(gauss), mu = sample_moments(unit);
    CHECK(std::abs(mg.variance - (g + s2) * (g + s2) / 5.0) < 3.0 * mg.se_variance);
    CHECK(std::abs(mu.variance - (s2 * s2 + 2.0 * s2 * g) / 5.0) < 3.0 * mu.se_variance);
    CHECK(std::abs(mu.mean - (g + s2)) < 3.0 * mu.se_mean);
}

TEST_CASE("gaussian mode matches the dB moments")
{
    NoiseConfig c; // defaults
    c.shadow_log_variance_db2 = 1.0;
    Rng rng(4);
    // receive SNR around 5 dB so the noise terms matter
    const CVec h = random_channel(16, rng, std::pow(10.0, -13.5));
    const CVec w = random_unit_modulus(16, rng);
    const DbMoments dm = rsrp_db_moments(array_gain(h, w), c);
    std::vector<double> y(10000);
    for (auto &v : y)
        v = measure_rsrp_vector(one_beam(w), h, c, rng, MeasurementMode::gaussian).y[0];
    const Moments m = sample_moments(y);
    CHECK(std::abs(m.mean - (dm.y0_db + dm.bias_db)) < 3.0 * m.se_mean);
    CHECK(std::abs(m.variance - dm.variance_db2) < 3.0 * m.se_variance);
    CHECK(dm.variance_db2 > c.shadow_log_variance_db2);
}

TEST_CASE("dB moment formula")
{
    const NoiseConfig c = unit_config(5);
    const double g = 4.0, q = 0.1 / 4.0, k = 10.0 / std::log(10.0);
    const DbMoments m = rsrp_db_moments(g, c);
    CHECK(m.y0_db == doctest::Approx(10.0 * std::log10(4.0)));
    CHECK(m.bias_db == doctest::Approx(k * q));
    CHECK(m.variance_db2 == doctest::Approx(k * k * (q * q + 2 * q) / 25.0));
    NoiseConfig nb = c;
    nb.include_bias = false;
    CHECK(rsrp_db_moments(g, nb).bias_db == 0.0);
}

TEST_CASE("monotonicity of the analytic moments in the gain")
{
    const NoiseConfig c = unit_config(5);
    double last_mu = -1, last_var = std::numeric_limits<double>::infinity();
    for (double g = 0.01; g < 100; g *= 1.7)
    {
        const double mu = rsrp_moments(g, c).mean_mw;
        const double var = rsrp_db_moments(g, c).variance_db2;
        CHECK(mu > last_mu);
        CHECK(var < last_var);
        last_mu = mu;
        last_var = var;
    }
}

TEST_CASE("noiseless limit: both modes return y0")
{
    NoiseConfig c;
    c.noise_psd_dbm_hz = -std::numeric_limits<double>::infinity();
    c.shadow_log_variance_db2 = 0.0;
    c.infinite_ssb = true;
    Rng rng(5);
    const CVec h = random_channel(8, rng, 1e-11);
    const Codebook cb = dft_codebook(8, 4);
    const RsrpVector g = measure_rsrp_vector(cb.beams(), h, c, rng, MeasurementMode::gaussian);
    const RsrpVector e = measure_rsrp_vector(cb.beams(), h, c, rng, MeasurementMode::exact);
    for (std::size_t k = 0; k < 4; ++k)
    {
        CHECK(g.y[k] == g.y0[k]);
        CHECK(e.y[k] == doctest::Approx(e.y0[k]).epsilon(1e-12));
    }
}

TEST_CASE("gaussian-mode noise vanishes with long SSBs and no shadowing")
{
    NoiseConfig c;
    c.shadow_log_variance_db2 = 0.0;
    double last = std::numeric_limits<double>::infinity();
    for (std::size_t ls : {1, 5, 50, 500, 5000})
    {
        c.ssb_length = ls;
        const double v = rsrp_db_moments(1e-12, c).variance_db2;
        CHECK(v < last);
        last = v;
    }
    CHECK(last < 1e-5);
}

TEST_CASE("dB/linear round trip")
{
    for (double db : {-250.0, -93.2, 0.0, 17.5, 40.0})
        CHECK(std::abs(linear_to_db(db_to_linear(db)) - db) <= 1e-12 * std::max(1.0, std::abs(db)));
    for (double x : {1e-25, 3.3e-9, 1.0, 12345.0})
        CHECK(std::abs(db_to_linear(linear_to_db(x)) - x) <= 1e-12 * x);
}

TEST_CASE("fully blocked beam is clamped at -300 dB and flagged")
{
    NoiseConfig c;
    c.noise_psd_dbm_hz = -std::numeric_limits<double>::infinity();
    c.shadow_log_variance_db2 = 0.0;
    const CVec h{{1e-6, 0}, {1e-6, 0}};
    const CVec w{{1, 0}, {-1, 0}};
    Rng rng(6);
    for (auto mode : {MeasurementMode::gaussian, MeasurementMode::exact})
    {
        const RsrpVector v = measure_rsrp_vector(one_beam(w), h, c, rng, mode);
        CHECK(v.clamped);
        CHECK(std::isfinite(v.y[0]));
        CHECK(v.y[0] <= kGainFloorDb + c.transmit_power_dbm);
    }
}

TEST_CASE("batch measurement does not depend on the thread count")
{
    Rng rng(7);
    std::vector<CVec> hs;
    for (int i = 0; i < 37; ++i)
        hs.push_back(random_channel(8, rng, 1e-11));
    const Codebook cb = dft_codebook(8, 4);
    NoiseConfig c;
    for (auto mode : {MeasurementMode::gaussian, MeasurementMode::exact})
    {
        const Tensor a = measure_batch(cb.beams(), hs, c, 99, mode, 1);
        const Tensor b = measure_batch(cb.beams(), hs, c, 99, mode, 4);
        CHECK(a.values() == b.values());
    }
}

TEST_CASE("tape measurement equals the gaussian model with the same draws")
{
    NoiseConfig c;
    Rng rng(8);
    std::vector<CVec> hs;
    for (int i = 0; i < 5; ++i)
        hs.push_back(random_channel(6, rng, 1e-12));
    Tensor phase = random_tensor({6, 3}, rng, 0.0, 6.28);
    Tensor noise = random_tensor({5, 3}, rng, -2.0, 2.0);
    Tape t;
    const Tensor y = measure_gaussian_on_tape(t.constant(phase), hs, noise, c).value();
    const Codebook cb = codebook_from_phase(phase);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = 0; k < 3; ++k)
        {
            const DbMoments m = rsrp_db_moments(array_gain(hs[i], cb.beam(k)), c);
            CHECK(y(i, k) == doctest::Approx(m.y0_db + m.bias_db + std::sqrt(m.variance_db2) * noise(i, k)).epsilon(1e-10));
        }
}

TEST_CASE("RSRP CSV layout")
{
    NoiseConfig c;
    Rng rng(9);
    const Codebook cb = dft_codebook(4, 2);
    std::vector<RsrpVector> batch{measure_rsrp_vector(cb.beams(), random_channel(4, rng, 1e-11), c, rng,
                                                      MeasurementMode::exact)};
    const std::string csv = rsrp_csv(batch);
    CHECK(csv.rfind("ue_index,beam_index,y_db,y0_db,mode\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("noise config validation")
{
    NoiseConfig c;
    c.ssb_length = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = NoiseConfig{};
    c.bandwidth_hz = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(measurement_mode_from_string("approx"), ConfigError);
}
