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

#include "sitebeam/cfm.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"
#include "sitebeam/parallel.hpp"

#include "model_io.hpp"
#include "training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sitebeam
{
    using detail::json;

    namespace
    {
        // UEs per forward pass in batched sampling. Fixed so that results do not
        // depend on the thread count (GEMM blocking depends on matrix sizes).
        constexpr std::size_t kSampleChunk = 32;

        Tensor rows_of(const Tensor &m, std::span<const std::size_t> rows)
        {
            Tensor out({rows.size(), m.cols()});
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t c = 0; c < m.cols(); ++c)
                    out(i, c) = m(rows[i], c);
            return out;
        }

        Tensor repeat_rows(std::span<const double> row, std::size_t n)
        {
            Tensor out({n, row.size()});
            for (std::size_t i = 0; i < n; ++i)
                std::copy(row.begin(), row.end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * row.size()));
            return out;
        }
    }

    ConditionFeatures normalize_rsrp(std::span<const double> y)
    {
        if (y.size() < 2)
            throw std::invalid_argument("normalize_rsrp needs at least two beams");
        const double k = static_cast<double>(y.size());
        double mean = 0.0;
        for (double v : y)
            mean += v;
        mean /= k;
        double var = 0.0;
        for (double v : y)
            var += (v - mean) * (v - mean);
        var /= k;
        ConditionFeatures f;
        f.mean_db = mean;
        f.std_db = std::sqrt(var);
        const double denom = std::max(f.std_db, kStdFloorDb);
        f.y_norm.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            f.y_norm[i] = (y[i] - mean) / denom;
        return f;
    }

    StatsScaler StatsScaler::fit(const std::vector<ConditionFeatures> &features)
    {
        StatsScaler s;
        if (features.empty())
            return s;
        const double n = static_cast<double>(features.size());
        double m1 = 0.0, s1 = 0.0;
        for (const auto &f : features)
        {
            m1 += f.mean_db;
            s1 += f.std_db;
        }
        m1 /= n;
        s1 /= n;
        double m2 = 0.0, s2 = 0.0;
        for (const auto &f : features)
        {
            m2 += (f.mean_db - m1) * (f.mean_db - m1);
            s2 += (f.std_db - s1) * (f.std_db - s1);
        }
        s.mean_center = m1;
        s.std_center = s1;
        s.mean_scale = std::max(std::sqrt(m2 / n), 1.0);
        s.std_scale = std::max(std::sqrt(s2 / n), 1.0);
        return s;
    }

    std::pair<double, double> StatsScaler::apply(const ConditionFeatures &f) const
    {
        return {(f.mean_db - mean_center) / mean_scale, (f.std_db - std_center) / std_scale};
    }

    ConditionBatch condition_batch(const Tensor &y, const StatsScaler &scaler)
    {
        const std::size_t b = y.rows();
        const std::size_t k = y.cols();
        ConditionBatch c{Tensor({b, k}), Tensor({b, 2})};
        for (std::size_t i = 0; i < b; ++i)
        {
            const ConditionFeatures f = normalize_rsrp(y.data().subspan(i * k, k));
            for (std::size_t j = 0; j < k; ++j)
                c.y_norm(i, j) = f.y_norm[j];
            const auto [m, s] = scaler.apply(f);
            c.stats(i, 0) = m;
            c.stats(i, 1) = s;
        }
        return c;
    }

    void CfmArch::validate() const
    {
        if (n_antennas < 1 || n_beams < 2)
            throw ConfigError("cfm architecture needs N_t >= 1 and K >= 2");
        if (cond_width < 1 || hidden_width < 1 || n_blocks < 1)
            throw ConfigError("cfm architecture widths and block count must be positive");
    }

    CfmModel CfmModel::create(const CfmArch &arch, std::uint64_t seed)
    {
        arch.validate();
        CfmModel m;
        m.arch = arch;
        m.seed = seed;
        Rng rng = Rng::derive(seed, 0x63666dULL);
        const std::size_t c = arch.cond_width;
        const std::size_t h = arch.hidden_width;
        m.shape1 = nn::make_linear(m.params, "shape.0", arch.n_beams, c, rng);
        m.shape2 = nn::make_linear(m.params, "shape.1", c, c, rng);
        m.scale1 = nn::make_linear(m.params, "scale.0", 2, c, rng);
        m.scale2 = nn::make_linear(m.params, "scale.1", c, c, rng);
        m.fuse_gamma = nn::make_linear(m.params, "fuse.gamma", c, c, rng, 1.0);
        m.fuse_beta = nn::make_linear(m.params, "fuse.beta", c, c, rng);
        std::size_t in = arch.state_dim() + 1;
        for (std::size_t l = 0; l < arch.n_blocks; ++l)
        {
            const std::string name = "block." + std::to_string(l);
            Block b;
            b.linear = nn::make_linear(m.params, name + ".linear", in, h, rng);
            b.gamma = nn::make_linear(m.params, name + ".gamma", c, h, rng, 1.0);
            b.beta = nn::make_linear(m.params, name + ".beta", c, h, rng);
            m.blocks.push_back(b);
            in = h;
        }
        m.output = nn::make_linear(m.params, "output", h, arch.state_dim(), rng);
        return m;
    }

    Var CfmModel::encode(std::span<const Var> p, Var y_norm, Var stats) const
    {
        using namespace ad;
        const Var e_sh = silu(layer_norm(shape2(p, silu(layer_norm(shape1(p, y_norm))))));
        const Var e_sc = silu(scale2(p, silu(scale1(p, stats))));
        return fuse_gamma(p, e_sc) * e_sh + fuse_beta(p, e_sc);
    }

    Var CfmModel::velocity(std::span<const Var> p, Var z, Var t, Var cond) const
    {
        using namespace ad;
        Var x = concat_cols(z, t);
        for (const Block &b : blocks)
            x = silu(b.gamma(p, cond) * layer_norm(b.linear(p, x)) + b.beta(p, cond));
        return output(p, x);
    }

    std::vector<double> encode_condition(const CfmModel &model, const ConditionFeatures &features)
    {
        Tape tape;
        const auto p = model.params.bind(tape, false);
        const auto [m, s] = model.scaler.apply(features);
        const Var y = tape.constant(Tensor::matrix(1, features.y_norm.size(), features.y_norm));
        const Var st = tape.constant(Tensor::matrix(1, 2, {m, s}));
        return model.encode(p, y, st).value().values();
    }

    std::vector<double> velocity(const CfmModel &model, std::span<const double> z, double t,
                                 std::span<const double> cond)
    {
        Tape tape;
        const auto p = model.params.bind(tape, false);
        const Var zv = tape.constant(Tensor::matrix(1, z.size(), {z.begin(), z.end()}));
        const Var tv = tape.constant(Tensor::matrix(1, 1, {t}));
        const Var cv = tape.constant(Tensor::matrix(1, cond.size(), {cond.begin(), cond.end()}));
        return model.velocity(p, zv, tv, cv).value().values();
    }

    Tensor interpolate(const Tensor &z0, const Tensor &z1, const Tensor &t)
    {
        if (!z0.same_shape(z1) || t.rows() != z0.rows() || t.cols() != 1)
            throw ShapeError("interpolate: z0, z1 must match and t must be [B, 1]");
        Tensor out(z0.shape());
        const std::size_t d = z0.cols();
        for (std::size_t i = 0; i < z0.rows(); ++i)
        {
            const double ti = t(i, 0);
            for (std::size_t j = 0; j < d; ++j)
                out(i, j) = (1.0 - ti) * z0(i, j) + ti * z1(i, j);
        }
        return out;
    }

    Var cfm_loss_on_tape(const CfmModel &model, std::span<const Var> p, const ConditionBatch &cond, const Tensor &z1,
                         const Tensor &z0, const Tensor &t)
    {
        Tape &tape = *p[0].tape();
        const std::size_t b = z1.rows();
        Tensor target(z1.shape());
        for (std::size_t i = 0; i < z1.size(); ++i)
            target[i] = z1[i] - z0[i];
        const Var cf = model.encode(p, tape.constant(cond.y_norm), tape.constant(cond.stats));
        const Var v = model.velocity(p, tape.constant(interpolate(z0, z1, t)), tape.constant(t), cf);
        const Var err = ad::sub(v, tape.constant(std::move(target)));
        return ad::scale(ad::sum(ad::square(err)), 1.0 / static_cast<double>(b));
    }

    Tensor mrt_targets(const std::vector<CVec> &channels)
    {
        if (channels.empty())
            throw std::invalid_argument("mrt_targets: no channels");
        const std::size_t d = 2 * channels[0].size();
        Tensor out({channels.size(), d});
        for (std::size_t i = 0; i < channels.size(); ++i)
        {
            const auto z = stack_real_imag(mrt_beamformer(channels[i]));
            std::copy(z.begin(), z.end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * d));
        }
        return out;
    }

    void CfmTrainConfig::validate() const
    {
        if (batch_size < 1)
            throw ConfigError("cfm.batch_size must be at least 1");
        if (!(sigma0 > 0.0))
            throw ConfigError("cfm.sigma0 must be positive");
        if (!(optimizer.learning_rate > 0.0))
            throw ConfigError("cfm.learning_rate must be positive");
        if (std::isnan(power_lo_dbm) != std::isnan(power_hi_dbm) || power_lo_dbm > power_hi_dbm)
            throw ConfigError("cfm.power_range_dbm must be an ordered pair");
    }

    std::string CfmTrainConfig::to_json() const
    {
        json j;
        j["batch_size"] = batch_size;
        j["sigma0"] = sigma0;
        j["iterations"] = iterations;
        j["seed"] = seed;
        j["optimizer"] = nn::to_string(optimizer.kind);
        j["learning_rate"] = optimizer.learning_rate;
        j["clip_norm"] = optimizer.clip_norm;
        j["measurement"] = to_string(measurement);
        j["power_range_dbm"] =
            std::isnan(power_lo_dbm) ? json(nullptr) : json::array({power_lo_dbm, power_hi_dbm});
        j["val_every"] = val_every;
        j["val_size"] = val_size;
        return j.dump();
    }

    std::string CfmTrainConfig::hash() const { return io::content_hash(to_json()); }

    std::string train_trace_csv(const std::vector<TrainTraceRow> &trace)
    {
        io::CsvBuilder csv({"iter", "train_loss", "val_loss", "val_gap_db", "wall_ms"});
        auto opt = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
        for (const auto &r : trace)
            csv.row({std::to_string(r.iter), opt(r.train_loss), opt(r.val_loss), opt(r.val_gap_db),
                     io::format_double(r.wall_ms)});
        return csv.str();
    }

    Tensor measure_with_powers(const Codebook &cb, const std::vector<CVec> &channels, const NoiseConfig &noise,
                               std::span<const double> powers_dbm, std::uint64_t seed, MeasurementMode mode)
    {
        const ComplexMatrix beams = cb.beams();
        const std::size_t k = cb.size();
        Tensor y({channels.size(), k});
        for (std::size_t i = 0; i < channels.size(); ++i)
        {
            NoiseConfig n = noise;
            if (!powers_dbm.empty())
                n.transmit_power_dbm = powers_dbm[i];
            Rng rng = Rng::derive(seed, i);
            const RsrpVector v = measure_rsrp_vector(beams, channels[i], n, rng, mode);
            std::copy(v.y.begin(), v.y.end(), y.data().begin() + static_cast<std::ptrdiff_t>(i * k));
        }
        return y;
    }

    void SamplerConfig::validate() const
    {
        if (n_steps < 1)
            throw ConfigError("sampler.n_steps must be at least 1");
        if (!(temperature > 0.0))
            throw ConfigError("sampler.temperature must be positive");
        if (n_candidates < 1)
            throw ConfigError("sampler.n_candidates must be at least 1");
        if (!(sigma0 > 0.0))
            throw ConfigError("sampler.sigma0 must be positive");
    }

    Tensor integrate_flow(const VelocityField &field, Tensor z, std::size_t n_steps)
    {
        if (n_steps < 1)
            throw std::invalid_argument("integrate_flow: n_steps must be at least 1");
        const double dt = 1.0 / static_cast<double>(n_steps);
        for (std::size_t s = 0; s < n_steps; ++s)
        {
            const double t = static_cast<double>(s) / static_cast<double>(n_steps);
            const Tensor v = field(z, t);
            if (!v.same_shape(z))
                throw ShapeError("integrate_flow: velocity shape differs from the state");
            for (std::size_t i = 0; i < z.size(); ++i)
                z[i] += dt * v[i];
            if (!z.all_finite())
                throw NumericalError("flow integration produced a non-finite state at step " + std::to_string(s));
        }
        return z;
    }

    CVec project_unit_modulus(std::span<const double> z)
    {
        if (z.size() % 2 != 0)
            throw ShapeError("project_unit_modulus: state length must be even");
        const std::size_t n = z.size() / 2;
        CVec w(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double re = z[i];
            const double im = z[n + i];
            w[i] = (re == 0.0 && im == 0.0) ? cplx{1.0, 0.0} : std::polar(1.0, std::atan2(im, re));
        }
        return w;
    }

    namespace
    {
        // Integrates the flow for a block of conditions; cond_rows [R, cond] and
        // initial states [R, 2 N_t] share row order.
        Tensor run_sampler(const CfmModel &model, const Tensor &cond_rows, Tensor z, std::size_t n_steps)
        {
            Tape tape;
            const auto p = model.params.bind(tape, false);
            const Var cf = tape.constant(cond_rows);
            const std::size_t mark = tape.size();
            const std::size_t rows = z.rows();
            const VelocityField field = [&](const Tensor &state, double t) {
                tape.truncate(mark);
                const Var v = model.velocity(p, tape.constant(state), tape.constant(Tensor({rows, 1}, t)), cf);
                return v.value();
            };
            return integrate_flow(field, std::move(z), n_steps);
        }

        Tensor encode_rows(const CfmModel &model, const ConditionBatch &cond)
        {
            Tape tape;
            const auto p = model.params.bind(tape, false);
            return model.encode(p, tape.constant(cond.y_norm), tape.constant(cond.stats)).value();
        }

        Tensor initial_states(std::size_t m, std::size_t d, const SamplerConfig &cfg, Rng &rng)
        {
            Tensor z({m, d});
            const double s = cfg.temperature * cfg.sigma0;
            for (double &v : z.data())
                v = s * rng.normal();
            return z;
        }
    }

    Tensor sample_states(const CfmModel &model, std::span<const double> y, const SamplerConfig &cfg, Rng &rng)
    {
        cfg.validate();
        if (y.size() != model.arch.n_beams)
            throw ShapeError("sample_states: RSRP length differs from the model's K");
        const ConditionBatch cond = condition_batch(Tensor::matrix(1, y.size(), {y.begin(), y.end()}), model.scaler);
        const Tensor cf = encode_rows(model, cond);
        Tensor z = initial_states(cfg.n_candidates, model.arch.state_dim(), cfg, rng);
        return run_sampler(model, repeat_rows(cf.data(), cfg.n_candidates), std::move(z), cfg.n_steps);
    }

    std::vector<CVec> sample_candidates(const CfmModel &model, std::span<const double> y, const SamplerConfig &cfg,
                                        Rng &rng)
    {
        const Tensor z = sample_states(model, y, cfg, rng);
        std::vector<CVec> out;
        for (std::size_t m = 0; m < z.rows(); ++m)
            out.push_back(project_unit_modulus(z.data().subspan(m * z.cols(), z.cols())));
        return out;
    }

    std::vector<std::vector<CVec>> sample_candidates_batch(const CfmModel &model, const Tensor &y,
                                                           const SamplerConfig &cfg, std::uint64_t seed,
                                                           std::size_t threads)
    {
        cfg.validate();
        if (y.cols() != model.arch.n_beams)
            throw ShapeError("sample_candidates_batch: RSRP length differs from the model's K");
        const std::size_t u = y.rows();
        const std::size_t m = cfg.n_candidates;
        const std::size_t d = model.arch.state_dim();
        std::vector<std::vector<CVec>> out(u);
        const std::size_t n_chunks = (u + kSampleChunk - 1) / kSampleChunk;
        parallel_for(n_chunks, threads, [&](std::size_t c) {
            const std::size_t lo = c * kSampleChunk;
            const std::size_t hi = std::min(u, lo + kSampleChunk);
            std::vector<std::size_t> idx(hi - lo);
            for (std::size_t i = lo; i < hi; ++i)
                idx[i - lo] = i;
            const Tensor cf = encode_rows(model, condition_batch(rows_of(y, idx), model.scaler));
            Tensor cond_rows({idx.size() * m, cf.cols()});
            Tensor z({idx.size() * m, d});
            for (std::size_t i = 0; i < idx.size(); ++i)
            {
                Rng rng = Rng::derive(seed, idx[i]);
                const Tensor zi = initial_states(m, d, cfg, rng);
                for (std::size_t r = 0; r < m; ++r)
                {
                    for (std::size_t j = 0; j < cf.cols(); ++j)
                        cond_rows(i * m + r, j) = cf(i, j);
                    for (std::size_t j = 0; j < d; ++j)
                        z(i * m + r, j) = zi(r, j);
                }
            }
            const Tensor end = run_sampler(model, cond_rows, std::move(z), cfg.n_steps);
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t r = 0; r < m; ++r)
                    out[idx[i]].push_back(project_unit_modulus(end.data().subspan((i * m + r) * d, d)));
        });
        return out;
    }

    Selection select_beam(const std::vector<CVec> &candidates, std::span<const cplx> h, std::size_t limit)
    {
        if (candidates.empty())
            throw std::invalid_argument("select_beam: no candidates");
        const std::size_t n = limit == 0 ? candidates.size() : std::min(limit, candidates.size());
        Selection best;
        best.gain = -1.0;
        for (std::size_t m = 0; m < n; ++m)
        {
            const double g = array_gain(h, candidates[m]);
            if (g > best.gain)
            {
                best.gain = g;
                best.index = m;
            }
        }
        best.beam = candidates[best.index];
        return best;
    }

    Selection select_beam_noisy(const std::vector<CVec> &candidates, std::span<const cplx> h, const NoiseConfig &noise,
                                Rng &rng, std::size_t limit)
    {
        if (candidates.empty())
            throw std::invalid_argument("select_beam_noisy: no candidates");
        const std::size_t n = limit == 0 ? candidates.size() : std::min(limit, candidates.size());
        Selection best;
        double best_p = -1.0;
        for (std::size_t m = 0; m < n; ++m)
        {
            const double p = rsrp_exact(h, candidates[m], noise, rng);
            if (p > best_p)
            {
                best_p = p;
                best.index = m;
            }
        }
        best.beam = candidates[best.index];
        best.gain = array_gain(h, best.beam);
        return best;
    }

    CfmTrainResult train_cfm(CfmModel model, const SiteDataset &dataset, const Codebook &codebook,
                             const NoiseConfig &noise, const CfmTrainConfig &cfg)
    {
        cfg.validate();
        noise.validate();
        if (codebook.size() != model.arch.n_beams || codebook.antennas() != model.arch.n_antennas)
            throw ConfigError("codebook shape does not match the model architecture");
        const auto train = dataset.indices(Split::train);
        if (train.empty())
            throw DataError("dataset has no training UEs");
        const std::size_t d = model.arch.state_dim();
        model.scaler = detail::fit_training_scaler(dataset, codebook, noise, cfg);
        model.train_config_hash = cfg.hash();
        const detail::ValidationSet val = detail::make_validation(dataset, codebook, noise, cfg, model.scaler);

        auto validation = [&](TrainTraceRow &row) {
            Tape tape;
            const auto p = model.params.bind(tape, false);
            row.val_loss = cfm_loss_on_tape(model, p, val.cond, val.z1, val.z0, val.t).value().item();
            if (cfg.val_candidates > 0)
            {
                SamplerConfig sc{cfg.val_steps, cfg.val_temperature, cfg.val_candidates, cfg.sigma0};
                const auto cands = sample_candidates_batch(model, val.y, sc, val.sample_seed);
                std::vector<CVec> chosen;
                for (std::size_t i = 0; i < val.channels.size(); ++i)
                    chosen.push_back(select_beam(cands[i], val.channels[i]).beam);
                row.val_gap_db = detail::mean_gap_db(val.channels, chosen);
            }
        };

        nn::Optimizer opt(cfg.optimizer);
        CfmTrainResult result;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t it = 0; it <= cfg.iterations; ++it)
        {
            Rng rng = Rng::derive(cfg.seed, it + 1);
            const detail::TrainingBatch batch =
                detail::draw_batch(dataset, train, codebook, noise, cfg, model.scaler, rng);
            Tensor t({cfg.batch_size, 1});
            for (double &v : t.data())
                v = rng.uniform();
            Tensor z0({cfg.batch_size, d});
            for (double &v : z0.data())
                v = cfg.sigma0 * rng.normal();

            const bool last = it == cfg.iterations;
            Tape tape;
            const auto p = model.params.bind(tape, !last);
            const Var loss = cfm_loss_on_tape(model, p, batch.cond, batch.z1, z0, t);

            TrainTraceRow row;
            row.iter = it;
            row.train_loss = loss.value().item();
            if (last || (cfg.val_every > 0 && it % cfg.val_every == 0))
                validation(row);
            if (cfg.record_wall_time)
                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            result.trace.push_back(row);
            if (!std::isfinite(row.train_loss))
                throw AbortedRun("cfm training, iteration " + std::to_string(it) + ": non-finite loss",
                                 train_trace_csv(result.trace));
            if (last)
                break;
            const auto grads = tape.gradients(loss, p);
            opt.step(model.params, grads);
            if (!model.params.all_finite())
                throw AbortedRun("cfm training, iteration " + std::to_string(it) + ": non-finite weights",
                                 train_trace_csv(result.trace));
        }
        result.model = std::move(model);
        return result;
    }

    std::string cfm_to_json(const CfmModel &model)
    {
        json j;
        j["format"] = "sitebeam-cfm-1";
        j["arch"] = {{"n_t", model.arch.n_antennas},
                     {"k", model.arch.n_beams},
                     {"cond_width", model.arch.cond_width},
                     {"hidden_width", model.arch.hidden_width},
                     {"n_blocks", model.arch.n_blocks}};
        j["seed"] = model.seed;
        j["train_config_hash"] = model.train_config_hash;
        j["scaler"] = detail::scaler_json(model.scaler);
        j["params"] = detail::params_json(model.params);
        return j.dump() + "\n";
    }

    CfmModel cfm_from_json(const std::string &text)
    {
        try
        {
            const json j = detail::parse_json(text, "checkpoint");
            const std::string w = "checkpoint";
            detail::reject_unknown_keys(j, w, {"format", "arch", "seed", "train_config_hash", "scaler", "params"});
            if (detail::as_string(detail::require(j, w, "format"), w + ".format") != "sitebeam-cfm-1")
                throw ConfigError(w + ".format: not a CFM checkpoint");
            const json &a = detail::require(j, w, "arch");
            detail::reject_unknown_keys(a, w + ".arch", {"n_t", "k", "cond_width", "hidden_width", "n_blocks"});
            CfmArch arch;
            arch.n_antennas = detail::as_count<std::size_t>(detail::require(a, w, "n_t"), w + ".arch.n_t");
            arch.n_beams = detail::as_count<std::size_t>(detail::require(a, w, "k"), w + ".arch.k");
            arch.cond_width = detail::as_count<std::size_t>(detail::require(a, w, "cond_width"), w + ".arch.cond_width");
            arch.hidden_width =
                detail::as_count<std::size_t>(detail::require(a, w, "hidden_width"), w + ".arch.hidden_width");
            arch.n_blocks = detail::as_count<std::size_t>(detail::require(a, w, "n_blocks"), w + ".arch.n_blocks");
            CfmModel m = CfmModel::create(arch, detail::as_count<std::uint64_t>(detail::require(j, w, "seed"), w + ".seed"));
            m.train_config_hash =
                detail::as_string(detail::require(j, w, "train_config_hash"), w + ".train_config_hash");
            m.scaler = detail::scaler_from(detail::require(j, w, "scaler"), w + ".scaler");
            detail::load_params(detail::require(j, w, "params"), m.params, w + ".params");
            return m;
        }
        catch (const ConfigError &e)
        {
            throw DataError(e.what());
        }
    }

    void save_cfm(const CfmModel &model, const std::filesystem::path &path)
    {
        io::write_text_file(path, cfm_to_json(model));
    }

    CfmModel load_cfm(const std::filesystem::path &path) { return cfm_from_json(io::read_text_file(path)); }
}
