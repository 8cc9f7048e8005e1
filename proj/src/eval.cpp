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

#include "sitebeam/eval.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"
#include "sitebeam/linalg.hpp"
#include "sitebeam/parallel.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>

namespace sitebeam
{
    using detail::json;

    double gap_db(std::span<const cplx> h, std::span<const cplx> w, bool *clamped)
    {
        const double opt = array_gain(h, mrt_beamformer(CVec(h.begin(), h.end())));
        const double g = array_gain(h, w);
        double gap = g > 0.0 ? 10.0 * std::log10(opt / g) : kGapClampDb;
        // MRT is optimal; tiny negative values are round-off.
        gap = std::max(gap, 0.0);
        const bool hit = gap >= kGapClampDb;
        if (clamped)
            *clamped = hit;
        return hit ? kGapClampDb : gap;
    }

    double quantile(std::vector<double> values, double q)
    {
        if (values.empty())
            throw std::invalid_argument("quantile of an empty set");
        std::sort(values.begin(), values.end());
        const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    }

    GapReport summarize_gaps(std::vector<double> gaps_db, std::vector<char> degenerate)
    {
        GapReport r;
        r.gaps_db = std::move(gaps_db);
        r.degenerate = std::move(degenerate);
        if (r.gaps_db.empty())
            return r;
        double acc = 0.0;
        for (double g : r.gaps_db)
            acc += g;
        r.mean = acc / static_cast<double>(r.gaps_db.size());
        r.median = quantile(r.gaps_db, 0.5);
        r.p95 = quantile(r.gaps_db, 0.95);
        r.n_degenerate = static_cast<std::size_t>(std::count(r.degenerate.begin(), r.degenerate.end(), 1));
        return r;
    }

    GapReport gain_gap(const std::vector<CVec> &channels, const std::vector<CVec> &beams)
    {
        if (channels.size() != beams.size())
            throw std::invalid_argument("gain_gap: one beam per channel expected");
        std::vector<double> gaps(channels.size());
        std::vector<char> flags(channels.size());
        for (std::size_t i = 0; i < channels.size(); ++i)
        {
            bool c = false;
            gaps[i] = gap_db(channels[i], beams[i], &c);
            flags[i] = c ? 1 : 0;
        }
        return summarize_gaps(std::move(gaps), std::move(flags));
    }

    Tensor loaded_sample_covariance(const Tensor &y, double diag_loading)
    {
        Tensor cov = linalg::sample_covariance(y);
        for (std::size_t i = 0; i < cov.rows(); ++i)
            cov(i, i) += diag_loading;
        return cov;
    }

    DistanceReport distance_cdfs(const Tensor &y, const Tensor &cov, std::size_t grid_points)
    {
        const std::size_t n = y.rows();
        const std::size_t k = y.cols();
        if (n < 2)
            throw std::invalid_argument("distance_cdfs needs at least two vectors");
        if (cov.rows() != k || cov.cols() != k)
            throw ShapeError("distance_cdfs: covariance must be [K, K]");
        if (grid_points < 2)
            throw std::invalid_argument("distance_cdfs: grid needs at least two points");
        const Tensor lower = linalg::cholesky(cov);
        DistanceReport r;
        std::vector<double> diff(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
            {
                double e2 = 0.0;
                for (std::size_t c = 0; c < k; ++c)
                {
                    diff[c] = y(i, c) - y(j, c);
                    e2 += diff[c] * diff[c];
                }
                // (y_i - y_j)^T R^{-1} (y_i - y_j) = ||L^{-1} (y_i - y_j)||^2
                const auto white = linalg::forward_substitute(lower, diff);
                double m2 = 0.0;
                for (double v : white)
                    m2 += v * v;
                r.euclidean.push_back(std::sqrt(e2));
                r.mahalanobis.push_back(std::sqrt(m2));
            }
        for (std::size_t g = 0; g < grid_points; ++g)
        {
            const double q = static_cast<double>(g) / static_cast<double>(grid_points - 1);
            r.levels.push_back(q);
            r.euclidean_quantiles.push_back(quantile(r.euclidean, q));
            r.mahalanobis_quantiles.push_back(quantile(r.mahalanobis, q));
        }
        return r;
    }

    std::vector<double> angle_grid(std::size_t n, double lo, double hi)
    {
        if (n < 1)
            throw std::invalid_argument("angle_grid: empty grid");
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        return g;
    }

    BeamPatterns beam_patterns(const Codebook &cb, std::span<const double> angles, double spacing_ratio)
    {
        if (angles.empty())
            throw std::invalid_argument("beam_patterns: empty angle grid");
        BeamPatterns p;
        p.angles.assign(angles.begin(), angles.end());
        const std::size_t k = cb.size();
        Tensor lin({angles.size(), k});
        for (std::size_t g = 0; g < angles.size(); ++g)
        {
            const CVec a = steering_vector(angles[g], cb.antennas(), spacing_ratio);
            for (std::size_t b = 0; b < k; ++b)
                lin(g, b) = array_gain(a, cb.beam(b));
        }
        p.peak_linear.assign(k, 0.0);
        for (std::size_t g = 0; g < angles.size(); ++g)
            for (std::size_t b = 0; b < k; ++b)
                p.peak_linear[b] = std::max(p.peak_linear[b], lin(g, b));
        p.gain_db = Tensor({angles.size(), k});
        for (std::size_t g = 0; g < angles.size(); ++g)
            for (std::size_t b = 0; b < k; ++b)
            {
                const double ratio = p.peak_linear[b] > 0.0 ? lin(g, b) / p.peak_linear[b] : 0.0;
                p.gain_db(g, b) = ratio >= kGainFloor ? linear_to_db(ratio) : kGainFloorDb;
            }
        return p;
    }

    std::string patterns_csv(const BeamPatterns &p)
    {
        std::vector<std::string> header{"angle_rad"};
        for (std::size_t b = 0; b < p.gain_db.cols(); ++b)
            header.push_back("beam_" + std::to_string(b) + "_db");
        io::CsvBuilder csv(header);
        for (std::size_t g = 0; g < p.angles.size(); ++g)
        {
            std::vector<std::string> row{io::format_double(p.angles[g])};
            for (std::size_t b = 0; b < p.gain_db.cols(); ++b)
                row.push_back(io::format_double(p.gain_db(g, b)));
            csv.row(row);
        }
        return csv.str();
    }

    const GapEntry *ResultBundle::find(const std::string &method, double power_dbm, std::size_t m) const
    {
        for (const auto &g : gaps)
            if (g.method == method && g.power_dbm == power_dbm && g.m == m)
                return &g;
        return nullptr;
    }

    namespace
    {
        // Stream tags keep the per-method draws independent of which methods run.
        enum : std::uint64_t
        {
            kTagProbe = 1,
            kTagCfm = 2,
            kTagPmi = 3,
            kTagSrs = 4,
            kTagSelect = 5,
            kTagLogdet = 6
        };

        std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag, std::size_t power_index)
        {
            return mix_seed(mix_seed(seed, tag), power_index);
        }

        json noise_json(const NoiseConfig &n)
        {
            return {{"transmit_power_dbm", n.transmit_power_dbm},
                    {"noise_psd_dbm_hz", detail::from_double(n.noise_psd_dbm_hz)},
                    {"bandwidth_hz", n.bandwidth_hz},
                    {"ssb_length", n.ssb_length},
                    {"shadow_log_variance_db2", n.shadow_log_variance_db2},
                    {"include_bias", n.include_bias},
                    {"infinite_ssb", n.infinite_ssb}};
        }

        json gap_summary_json(const GapReport &r)
        {
            return {{"mean_db", r.mean}, {"median_db", r.median}, {"p95_db", r.p95}, {"n_degenerate", r.n_degenerate}};
        }
    }

    ResultBundle run_pipeline(const PipelineInputs &in, const PipelineConfig &cfg)
    {
        auto missing = [&](const std::string &what) {
            const auto it = in.provenance.find(what);
            const std::string where = it == in.provenance.end() ? std::string("(not provided)") : it->second;
            return DataError("missing artifact: " + what + " " + where);
        };
        if (!in.dataset)
            throw missing("dataset");
        if (!in.codebook)
            throw missing("codebook");
        if (cfg.run_cfm && !in.cfm)
            throw missing("cfm");
        if (cfg.run_mlp && !in.mlp)
            throw missing("mlp");
        cfg.noise.validate();
        cfg.sampler.validate();
        cfg.pmi.validate();
        if (cfg.run_cfm && cfg.m_sweep.empty())
            throw ConfigError("evaluate.m_sweep must not be empty");

        const SiteDataset &ds = *in.dataset;
        const Codebook &cb = *in.codebook;
        const std::vector<CVec> test = ds.channels(Split::test);
        if (test.size() < 2)
            throw DataError("dataset test split needs at least two UEs");
        if (cb.antennas() != ds.scenario.antenna_count)
            throw ConfigError("codebook N_t does not match the scenario");
        if (in.cfm && (in.cfm->arch.n_beams != cb.size() || in.cfm->arch.n_antennas != cb.antennas()))
            throw ConfigError("cfm model shape does not match the codebook");
        if (in.mlp && (in.mlp->arch.n_beams != cb.size() || in.mlp->arch.n_antennas != cb.antennas()))
            throw ConfigError("mlp model shape does not match the codebook");

        std::vector<double> powers = cfg.power_sweep_dbm;
        if (powers.empty())
            powers.push_back(cfg.noise.transmit_power_dbm);
        const std::size_t max_m = cfg.m_sweep.empty() ? 1 : *std::max_element(cfg.m_sweep.begin(), cfg.m_sweep.end());
        const ComplexMatrix beams = cb.beams();
        const std::size_t n = test.size();

        ResultBundle out;
        json summary = json::array();
        for (std::size_t pi = 0; pi < powers.size(); ++pi)
        {
            NoiseConfig noise = cfg.noise;
            noise.transmit_power_dbm = powers[pi];
            const Tensor y =
                measure_batch(beams, test, noise, stream_seed(cfg.seed, kTagProbe, pi), MeasurementMode::exact, cfg.threads);

            auto record = [&](const std::string &method, std::size_t m, GapReport r) {
                json s = gap_summary_json(r);
                s["power_dbm"] = powers[pi];
                s["method"] = method;
                s["m"] = m;
                summary.push_back(std::move(s));
                out.gaps.push_back({powers[pi], method, m, std::move(r)});
            };

            if (cfg.run_cfm)
            {
                SamplerConfig sc = cfg.sampler;
                sc.n_candidates = max_m;
                const auto cands =
                    sample_candidates_batch(*in.cfm, y, sc, stream_seed(cfg.seed, kTagCfm, pi), cfg.threads);
                for (std::size_t m : cfg.m_sweep)
                {
                    std::vector<CVec> chosen(n);
                    parallel_for(n, cfg.threads, [&](std::size_t i) {
                        if (cfg.noisy_selection)
                        {
                            Rng rng = Rng::derive(stream_seed(cfg.seed, kTagSelect, pi), i);
                            chosen[i] = select_beam_noisy(cands[i], test[i], noise, rng, m).beam;
                        }
                        else
                            chosen[i] = select_beam(cands[i], test[i], m).beam;
                    });
                    record("cfm", m, gain_gap(test, chosen));
                }
            }
            if (cfg.run_mlp)
                record("mlp", 0, gain_gap(test, mlp_beams(*in.mlp, y)));
            if (cfg.run_pmi)
            {
                std::vector<CVec> chosen(n);
                parallel_for(n, cfg.threads, [&](std::size_t i) {
                    Rng rng = Rng::derive(stream_seed(cfg.seed, kTagPmi, pi), i);
                    chosen[i] = pmi_search(test[i], cfg.pmi, noise, rng).beam;
                });
                record("pmi", 0, gain_gap(test, chosen));
            }
            if (cfg.run_srs)
            {
                std::vector<CVec> chosen(n);
                parallel_for(n, cfg.threads, [&](std::size_t i) {
                    Rng rng = Rng::derive(stream_seed(cfg.seed, kTagSrs, pi), i);
                    chosen[i] = srs_lmmse_beam(test[i], noise, rng, cfg.srs_snr).beam;
                });
                record("srs", 0, gain_gap(test, chosen));
            }
        }

        // Codebook diagnostics at the configured power.
        const Codebook dft = dft_codebook(cb.antennas(), cb.size());
        const std::uint64_t ld_seed = mix_seed(cfg.seed, kTagLogdet);
        if (test.size() >= cb.size() + 1)
        {
            out.logdet.push_back({"learned", cb.size(), logdet_metric(cb, test, cfg.noise, ld_seed, cfg.logdet_noise_draws)});
            out.logdet.push_back({"dft", cb.size(), logdet_metric(dft, test, cfg.noise, ld_seed, cfg.logdet_noise_draws)});
        }
        const Tensor y_learned = measure_batch(beams, test, cfg.noise, ld_seed, MeasurementMode::exact, cfg.threads);
        const Tensor y_dft = measure_batch(dft.beams(), test, cfg.noise, ld_seed, MeasurementMode::exact, cfg.threads);
        out.distances_learned = distance_cdfs(y_learned, loaded_sample_covariance(y_learned));
        out.distances_dft = distance_cdfs(y_dft, loaded_sample_covariance(y_dft));
        const auto grid = angle_grid(std::max<std::size_t>(cfg.pattern_points, 1));
        out.patterns = beam_patterns(cb, grid, ds.scenario.spacing_ratio());

        json cfg_json;
        cfg_json["noise"] = noise_json(cfg.noise);
        cfg_json["sampler"] = {{"n_steps", cfg.sampler.n_steps},
                               {"temperature", cfg.sampler.temperature},
                               {"sigma0", cfg.sampler.sigma0}};
        cfg_json["pmi"] = {{"tier1_k", cfg.pmi.tier1_k}, {"tier2_m", cfg.pmi.tier2_m}, {"fine_size", cfg.pmi.resolved_fine_size()}};
        cfg_json["srs_snr"] = to_string(cfg.srs_snr);
        cfg_json["m_sweep"] = cfg.m_sweep;
        cfg_json["power_sweep_dbm"] = powers;
        cfg_json["methods"] = {{"cfm", cfg.run_cfm}, {"mlp", cfg.run_mlp}, {"pmi", cfg.run_pmi}, {"srs", cfg.run_srs}};
        cfg_json["noisy_selection"] = cfg.noisy_selection;
        cfg_json["logdet_noise_draws"] = cfg.logdet_noise_draws;
        cfg_json["seed"] = cfg.seed;

        json manifest;
        manifest["format"] = "sitebeam-results-1";
        manifest["config"] = cfg_json;
        manifest["config_hash"] = io::content_hash(cfg_json.dump());
        manifest["scenario"] = ds.scenario.name;
        manifest["scenario_hash"] = scenario_hash(ds.scenario);
        manifest["dataset_seed"] = ds.seed;
        manifest["n_test"] = test.size();
        manifest["codebook"] = {{"kind", cb.kind}, {"seed", cb.seed}, {"config_hash", cb.config_hash}};
        if (in.cfm)
            manifest["cfm"] = {{"seed", in.cfm->seed}, {"train_config_hash", in.cfm->train_config_hash}};
        if (in.mlp)
            manifest["mlp"] = {{"seed", in.mlp->seed}, {"train_config_hash", in.mlp->train_config_hash}};
        json prov = json::object();
        for (const auto &[k, v] : in.provenance)
            prov[k] = v;
        manifest["artifacts"] = prov;
        manifest["summary"] = summary;
        json ld = json::array();
        for (const auto &e : out.logdet)
            ld.push_back({{"codebook", e.codebook}, {"k", e.k}, {"logdet", e.logdet}});
        manifest["logdet"] = ld;
        manifest["median_mahalanobis"] = {{"learned", quantile(out.distances_learned.mahalanobis, 0.5)},
                                          {"dft", quantile(out.distances_dft.mahalanobis, 0.5)}};
        out.manifest_json = manifest.dump(2) + "\n";
        return out;
    }

    void write_bundle(const ResultBundle &b, const std::filesystem::path &dir)
    {
        io::CsvBuilder gaps({"power_dbm", "method", "m", "ue_index", "gap_db", "degenerate"});
        io::CsvBuilder summary({"power_dbm", "method", "m", "mean_db", "median_db", "p95_db", "n_degenerate"});
        for (const auto &e : b.gaps)
        {
            const std::string p = io::format_double(e.power_dbm);
            for (std::size_t i = 0; i < e.report.gaps_db.size(); ++i)
                gaps.row({p, e.method, std::to_string(e.m), std::to_string(i), io::format_double(e.report.gaps_db[i]),
                          std::to_string(static_cast<int>(e.report.degenerate[i]))});
            summary.row({p, e.method, std::to_string(e.m), io::format_double(e.report.mean),
                         io::format_double(e.report.median), io::format_double(e.report.p95),
                         std::to_string(e.report.n_degenerate)});
        }
        io::CsvBuilder logdet({"codebook", "k", "logdet"});
        for (const auto &e : b.logdet)
            logdet.row({e.codebook, std::to_string(e.k), io::format_double(e.logdet)});
        io::CsvBuilder dist({"codebook", "level", "euclidean", "mahalanobis"});
        auto add = [&](const std::string &name, const DistanceReport &r) {
            for (std::size_t g = 0; g < r.levels.size(); ++g)
                dist.row({name, io::format_double(r.levels[g]), io::format_double(r.euclidean_quantiles[g]),
                          io::format_double(r.mahalanobis_quantiles[g])});
        };
        add("learned", b.distances_learned);
        add("dft", b.distances_dft);

        io::write_text_file(dir / "gaps.csv", gaps.str());
        io::write_text_file(dir / "summary.csv", summary.str());
        io::write_text_file(dir / "logdet.csv", logdet.str());
        io::write_text_file(dir / "distances.csv", dist.str());
        io::write_text_file(dir / "patterns.csv", patterns_csv(b.patterns));
        io::write_text_file(dir / "manifest.json", b.manifest_json);
    }
}
