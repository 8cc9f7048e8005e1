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

#include "sitebeam/measurement.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"
#include "sitebeam/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sitebeam
{
    namespace
    {
        // 10 / ln 10: slope of 10 log10 at 1.
        constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;
    }

    double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

    void NoiseConfig::validate() const
    {
        if (ssb_length < 1)
            throw ConfigError("noise.ssb_length must be at least 1");
        if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
            throw ConfigError("noise.bandwidth_hz must be positive");
        if (!std::isfinite(transmit_power_dbm))
            throw ConfigError("noise.transmit_power_dbm must be finite");
        if (std::isnan(noise_psd_dbm_hz) || noise_psd_dbm_hz == std::numeric_limits<double>::infinity())
            throw ConfigError("noise.noise_psd_dbm_hz must be finite or -inf");
        if (!(shadow_log_variance_db2 >= 0.0))
            throw ConfigError("noise.shadow_log_variance_db2 must be non-negative");
    }

    const char *to_string(MeasurementMode mode) { return mode == MeasurementMode::exact ? "exact" : "gaussian"; }

    MeasurementMode measurement_mode_from_string(const std::string &name)
    {
        if (name == "exact")
            return MeasurementMode::exact;
        if (name == "gaussian")
            return MeasurementMode::gaussian;
        throw ConfigError("unknown measurement mode '" + name + "' (expected exact or gaussian)");
    }

    double array_gain(std::span<const cplx> h, std::span<const cplx> w) { return std::norm(inner(h, w)); }

    double shadow_free_gain(std::span<const cplx> h, std::span<const cplx> w, double shadow)
    {
        if (!(shadow > 0.0))
            throw std::invalid_argument("shadow_free_gain: shadow must be positive");
        return array_gain(h, w) / shadow;
    }

    RsrpMoments rsrp_moments(double gain, const NoiseConfig &cfg)
    {
        const double pt = cfg.transmit_power_mw();
        const double n0 = cfg.noise_power_mw();
        const double ls = static_cast<double>(cfg.ssb_length);
        RsrpMoments m;
        m.mean_mw = pt * gain + n0;
        m.variance_mw2 = cfg.infinite_ssb ? 0.0 : (n0 * n0 + 2.0 * n0 * pt * gain) / (ls * ls);
        return m;
    }

    RsrpMoments rsrp_moments(std::span<const cplx> h, std::span<const cplx> w, const NoiseConfig &cfg)
    {
        return rsrp_moments(array_gain(h, w), cfg);
    }

    DbMoments rsrp_db_moments(double gain, const NoiseConfig &cfg)
    {
        DbMoments m;
        if (!(gain >= kGainFloor))
        {
            gain = kGainFloor;
            m.clamped = true;
        }
        const double pt = cfg.transmit_power_mw();
        const double n0 = cfg.noise_power_mw();
        const double ls = cfg.infinite_ssb ? std::numeric_limits<double>::infinity() : static_cast<double>(cfg.ssb_length);
        const double q = n0 / (pt * gain);
        m.y0_db = cfg.transmit_power_dbm + linear_to_db(gain);
        m.bias_db = cfg.include_bias ? kDbPerNeper * q : 0.0;
        const double rel_var = cfg.infinite_ssb ? 0.0 : (q * q + 2.0 * q) / (ls * ls);
        m.variance_db2 = cfg.shadow_log_variance_db2 + kDbPerNeper * kDbPerNeper * rel_var;
        return m;
    }

    double rsrp_exact(std::span<const cplx> h, std::span<const cplx> w, const NoiseConfig &cfg, Rng &rng,
                      bool unit_symbols)
    {
        const cplx gain = std::conj(inner(h, w));
        if (cfg.infinite_ssb)
            return rsrp_moments(std::norm(gain), cfg).mean_mw;
        const double pt = cfg.transmit_power_mw();
        const double n0 = cfg.noise_power_mw();
        double acc = 0.0;
        for (std::size_t t = 0; t < cfg.ssb_length; ++t)
        {
            const cplx s = unit_symbols ? cplx{std::sqrt(pt), 0.0} : rng.complex_normal(pt);
            const cplx n = n0 > 0.0 ? rng.complex_normal(n0) : cplx{};
            acc += std::norm(gain * s + n);
        }
        return acc / static_cast<double>(cfg.ssb_length);
    }

    RsrpVector measure_rsrp_vector(const ComplexMatrix &beams, std::span<const cplx> h, const NoiseConfig &cfg,
                                   Rng &rng, MeasurementMode mode)
    {
        if (beams.rows() != h.size())
            throw ShapeError("measure_rsrp_vector: codebook has " + std::to_string(beams.rows()) +
                             " rows but the channel has " + std::to_string(h.size()) + " antennas");
        RsrpVector out;
        out.mode = mode;
        const std::size_t k = beams.cols();
        out.y.resize(k);
        out.y0.resize(k);
        for (std::size_t b = 0; b < k; ++b)
        {
            const CVec w = beams.column(b);
            const double g = array_gain(h, w);
            const DbMoments m = rsrp_db_moments(g, cfg);
            out.y0[b] = m.y0_db;
            out.clamped = out.clamped || m.clamped;
            if (mode == MeasurementMode::gaussian)
            {
                const double noise = m.variance_db2 > 0.0 ? std::sqrt(m.variance_db2) * rng.normal() : 0.0;
                out.y[b] = m.y0_db + m.bias_db + noise;
            }
            else
            {
                const double p = rsrp_exact(h, w, cfg, rng);
                if (p >= kGainFloor)
                    out.y[b] = linear_to_db(p);
                else
                {
                    out.y[b] = kGainFloorDb;
                    out.clamped = true;
                }
            }
        }
        return out;
    }

    Tensor measure_batch(const ComplexMatrix &beams, const std::vector<CVec> &channels, const NoiseConfig &cfg,
                         std::uint64_t seed, MeasurementMode mode, std::size_t threads)
    {
        const std::size_t k = beams.cols();
        Tensor y({channels.size(), k});
        parallel_for(channels.size(), threads, [&](std::size_t i) {
            Rng rng = Rng::derive(seed, i);
            const RsrpVector v = measure_rsrp_vector(beams, channels[i], cfg, rng, mode);
            for (std::size_t b = 0; b < k; ++b)
                y(i, b) = v.y[b];
        });
        return y;
    }

    Var measure_gaussian_on_tape(Var phase, const std::vector<CVec> &channels, const Tensor &noise,
                                 const NoiseConfig &cfg)
    {
        Tape &tape = *phase.tape();
        const std::size_t nt = phase.value().rows();
        const std::size_t k = phase.value().cols();
        const std::size_t b = channels.size();
        if (noise.rows() != b || noise.cols() != k)
            throw ShapeError("measure_gaussian_on_tape: noise must be [B, K]");

        Tensor hr({b, nt}), hi({b, nt});
        for (std::size_t i = 0; i < b; ++i)
        {
            if (channels[i].size() != nt)
                throw ShapeError("measure_gaussian_on_tape: channel length differs from N_t");
            for (std::size_t n = 0; n < nt; ++n)
            {
                hr(i, n) = channels[i][n].real();
                hi(i, n) = channels[i][n].imag();
            }
        }
        using namespace ad;
        const Var Hr = tape.constant(std::move(hr));
        const Var Hi = tape.constant(std::move(hi));
        const Var c = cos(phase);
        const Var s = sin(phase);
        // h^H c = (hr - j hi)^T (cos + j sin)
        const Var re = matmul(Hr, c) + matmul(Hi, s);
        const Var im = matmul(Hr, s) - matmul(Hi, c);
        const Var g = clamp_min(square(re) + square(im), kGainFloor);
        const Var log_g = log(g);
        const Var y0 = shift(scale(log_g, kDbPerNeper), cfg.transmit_power_dbm);

        const double ratio = cfg.noise_power_mw() / cfg.transmit_power_mw();
        const Var q = scale(exp(neg(log_g)), ratio);
        Var y = y0;
        if (cfg.include_bias)
            y = y + scale(q, kDbPerNeper);
        Var variance;
        if (cfg.infinite_ssb)
            variance = tape.constant(Tensor({b, k}, cfg.shadow_log_variance_db2));
        else
        {
            const double ls = static_cast<double>(cfg.ssb_length);
            variance = shift(scale(square(q) + scale(q, 2.0), kDbPerNeper * kDbPerNeper / (ls * ls)),
                             cfg.shadow_log_variance_db2);
        }
        // sqrt has an infinite slope at 0; only reachable in a fully noiseless setup.
        const Var sigma = sqrt(clamp_min(variance, 1e-300));
        return y + sigma * tape.constant(noise);
    }

    std::string rsrp_csv(const std::vector<RsrpVector> &batch)
    {
        io::CsvBuilder csv({"ue_index", "beam_index", "y_db", "y0_db", "mode"});
        for (std::size_t u = 0; u < batch.size(); ++u)
            for (std::size_t b = 0; b < batch[u].size(); ++b)
                csv.row({std::to_string(u), std::to_string(b), io::format_double(batch[u].y[b]),
                         io::format_double(batch[u].y0[b]), to_string(batch[u].mode)});
        return csv.str();
    }
}
