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

#include "sitebeam/baselines.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"

#include "model_io.hpp"
#include "training.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace sitebeam
{
    using detail::json;

    void MlpArch::validate() const
    {
        if (n_antennas < 1 || n_beams < 2)
            throw ConfigError("mlp architecture needs N_t >= 1 and K >= 2");
        if (hidden_width < 1 || n_hidden < 1)
            throw ConfigError("mlp widths and depth must be positive");
    }

    MlpModel MlpModel::create(const MlpArch &arch, std::uint64_t seed)
    {
        arch.validate();
        MlpModel m;
        m.arch = arch;
        m.seed = seed;
        Rng rng = Rng::derive(seed, 0x6d6c70ULL);
        std::size_t in = arch.n_beams + 2;
        for (std::size_t l = 0; l < arch.n_hidden; ++l)
        {
            m.hidden.push_back(nn::make_linear(m.params, "hidden." + std::to_string(l), in, arch.hidden_width, rng));
            in = arch.hidden_width;
        }
        m.output = nn::make_linear(m.params, "output", in, 2 * arch.n_antennas, rng);
        return m;
    }

    Var MlpModel::forward(std::span<const Var> p, Var y_norm, Var stats) const
    {
        Var x = ad::concat_cols(y_norm, stats);
        for (const auto &layer : hidden)
            x = ad::silu(ad::layer_norm(layer(p, x)));
        return output(p, x);
    }

    Var mlp_loss_on_tape(const MlpModel &model, std::span<const Var> p, const ConditionBatch &cond, const Tensor &z1)
    {
        Tape &tape = *p[0].tape();
        const Var f = model.forward(p, tape.constant(cond.y_norm), tape.constant(cond.stats));
        const Var err = ad::sub(f, tape.constant(z1));
        return ad::scale(ad::sum(ad::square(err)), 1.0 / static_cast<double>(z1.rows()));
    }

    std::vector<CVec> mlp_beams(const MlpModel &model, const Tensor &y)
    {
        if (y.cols() != model.arch.n_beams)
            throw ShapeError("mlp_beams: RSRP length differs from the model's K");
        const ConditionBatch cond = condition_batch(y, model.scaler);
        Tape tape;
        const auto p = model.params.bind(tape, false);
        const Tensor out = model.forward(p, tape.constant(cond.y_norm), tape.constant(cond.stats)).value();
        std::vector<CVec> beams;
        for (std::size_t i = 0; i < out.rows(); ++i)
            beams.push_back(project_unit_modulus(out.data().subspan(i * out.cols(), out.cols())));
        return beams;
    }

    MlpTrainResult train_mlp(MlpModel model, const SiteDataset &dataset, const Codebook &codebook,
                             const NoiseConfig &noise, const MlpTrainConfig &cfg)
    {
        cfg.validate();
        noise.validate();
        if (codebook.size() != model.arch.n_beams || codebook.antennas() != model.arch.n_antennas)
            throw ConfigError("codebook shape does not match the model architecture");
        const auto train = dataset.indices(Split::train);
        if (train.empty())
            throw DataError("dataset has no training UEs");
        model.scaler = detail::fit_training_scaler(dataset, codebook, noise, cfg);
        model.train_config_hash = cfg.hash();
        const detail::ValidationSet val = detail::make_validation(dataset, codebook, noise, cfg, model.scaler);

        nn::Optimizer opt(cfg.optimizer);
        MlpTrainResult result;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t it = 0; it <= cfg.iterations; ++it)
        {
            Rng rng = Rng::derive(cfg.seed, it + 1);
            const detail::TrainingBatch batch =
                detail::draw_batch(dataset, train, codebook, noise, cfg, model.scaler, rng);
            const bool last = it == cfg.iterations;
            Tape tape;
            const auto p = model.params.bind(tape, !last);
            const Var loss = mlp_loss_on_tape(model, p, batch.cond, batch.z1);

            TrainTraceRow row;
            row.iter = it;
            row.train_loss = loss.value().item();
            if (last || (cfg.val_every > 0 && it % cfg.val_every == 0))
            {
                Tape vt;
                const auto vp = model.params.bind(vt, false);
                row.val_loss = mlp_loss_on_tape(model, vp, val.cond, val.z1).value().item();
                row.val_gap_db = detail::mean_gap_db(val.channels, mlp_beams(model, val.y));
            }
            if (cfg.record_wall_time)
                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            result.trace.push_back(row);
            if (!std::isfinite(row.train_loss))
                throw AbortedRun("mlp training, iteration " + std::to_string(it) + ": non-finite loss",
                                 train_trace_csv(result.trace));
            if (last)
                break;
            opt.step(model.params, tape.gradients(loss, p));
            if (!model.params.all_finite())
                throw AbortedRun("mlp training, iteration " + std::to_string(it) + ": non-finite weights",
                                 train_trace_csv(result.trace));
        }
        result.model = std::move(model);
        return result;
    }

    std::string mlp_to_json(const MlpModel &model)
    {
        json j;
        j["format"] = "sitebeam-mlp-1";
        j["arch"] = {{"n_t", model.arch.n_antennas},
                     {"k", model.arch.n_beams},
                     {"hidden_width", model.arch.hidden_width},
                     {"n_hidden", model.arch.n_hidden}};
        j["seed"] = model.seed;
        j["train_config_hash"] = model.train_config_hash;
        j["scaler"] = detail::scaler_json(model.scaler);
        j["params"] = detail::params_json(model.params);
        return j.dump() + "\n";
    }

    MlpModel mlp_from_json(const std::string &text)
    {
        try
        {
            const json j = detail::parse_json(text, "checkpoint");
            const std::string w = "checkpoint";
            detail::reject_unknown_keys(j, w, {"format", "arch", "seed", "train_config_hash", "scaler", "params"});
            if (detail::as_string(detail::require(j, w, "format"), w + ".format") != "sitebeam-mlp-1")
                throw ConfigError(w + ".format: not an MLP checkpoint");
            const json &a = detail::require(j, w, "arch");
            detail::reject_unknown_keys(a, w + ".arch", {"n_t", "k", "hidden_width", "n_hidden"});
            MlpArch arch;
            arch.n_antennas = detail::as_count<std::size_t>(detail::require(a, w, "n_t"), w + ".arch.n_t");
            arch.n_beams = detail::as_count<std::size_t>(detail::require(a, w, "k"), w + ".arch.k");
            arch.hidden_width =
                detail::as_count<std::size_t>(detail::require(a, w, "hidden_width"), w + ".arch.hidden_width");
            arch.n_hidden = detail::as_count<std::size_t>(detail::require(a, w, "n_hidden"), w + ".arch.n_hidden");
            MlpModel m = MlpModel::create(arch, detail::as_count<std::uint64_t>(detail::require(j, w, "seed"), w + ".seed"));
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

    void save_mlp(const MlpModel &model, const std::filesystem::path &path)
    {
        io::write_text_file(path, mlp_to_json(model));
    }

    MlpModel load_mlp(const std::filesystem::path &path) { return mlp_from_json(io::read_text_file(path)); }

    // ---------------------------------------------------------------------------------------------------------------
    // Hierarchical PMI search

    CVec dft_beam(std::size_t n_antennas, double u)
    {
        CVec w(n_antennas);
        for (std::size_t n = 0; n < n_antennas; ++n)
        {
            // Reduce n u modulo 1 before scaling so large n stays exact on grid points.
            const double x = std::fmod(static_cast<double>(n) * u, 1.0);
            w[n] = std::polar(1.0, 2.0 * std::numbers::pi * x);
        }
        return w;
    }

    void PmiConfig::validate() const
    {
        if (tier1_k < 1 || tier2_m < 1)
            throw ConfigError("pmi tier sizes must be at least 1");
        if (resolved_fine_size() < 1)
            throw ConfigError("pmi fine codebook size must be at least 1");
    }

    namespace
    {
        // Circular distance between spatial frequencies (cycles).
        double cyclic_distance(double a, double b)
        {
            double d = std::fmod(std::abs(a - b), 1.0);
            return std::min(d, 1.0 - d);
        }

        // Fine beams inside the bin of coarse beam k, nearest first (ties: lower index).
        std::vector<std::size_t> tier2_candidates(std::size_t k, const PmiConfig &cfg)
        {
            const std::size_t fine = cfg.resolved_fine_size();
            const double center = static_cast<double>(k) / static_cast<double>(cfg.tier1_k);
            const double half = 0.5 / static_cast<double>(cfg.tier1_k);
            std::vector<std::pair<double, std::size_t>> inside;
            for (std::size_t j = 0; j < fine; ++j)
            {
                const double u = static_cast<double>(j) / static_cast<double>(fine);
                // Signed offset in [-1/2, 1/2); the bin is half-open on the right.
                double off = u - center;
                off -= std::floor(off + 0.5);
                if (off >= -half && off < half)
                    inside.emplace_back(cyclic_distance(u, center), j);
            }
            std::stable_sort(inside.begin(), inside.end(),
                             [](const auto &a, const auto &b) { return a.first < b.first; });
            std::vector<std::size_t> out;
            for (std::size_t i = 0; i < inside.size() && i < cfg.tier2_m; ++i)
                out.push_back(inside[i].second);
            return out;
        }
    }

    PmiResult pmi_search(std::span<const cplx> h, const PmiConfig &cfg, const NoiseConfig &noise, Rng &rng)
    {
        cfg.validate();
        const std::size_t nt = h.size();
        PmiResult r;
        double best = -1.0;
        for (std::size_t k = 0; k < cfg.tier1_k; ++k)
        {
            const double p = rsrp_exact(h, dft_beam(nt, static_cast<double>(k) / static_cast<double>(cfg.tier1_k)),
                                        noise, rng);
            ++r.measured_beams;
            if (p > best)
            {
                best = p;
                r.tier1_index = k;
            }
        }
        const std::size_t fine = cfg.resolved_fine_size();
        best = -1.0;
        for (std::size_t j : tier2_candidates(r.tier1_index, cfg))
        {
            const double p = rsrp_exact(h, dft_beam(nt, static_cast<double>(j) / static_cast<double>(fine)), noise, rng);
            ++r.measured_beams;
            if (p > best)
            {
                best = p;
                r.fine_index = j;
            }
        }
        r.beam = dft_beam(nt, static_cast<double>(r.fine_index) / static_cast<double>(fine));
        return r;
    }

    PmiResult exhaustive_fine_search(std::span<const cplx> h, const PmiConfig &cfg)
    {
        cfg.validate();
        const std::size_t fine = cfg.resolved_fine_size();
        PmiResult r;
        double best = -1.0;
        for (std::size_t j = 0; j < fine; ++j)
        {
            const double g = array_gain(h, dft_beam(h.size(), static_cast<double>(j) / static_cast<double>(fine)));
            ++r.measured_beams;
            if (g > best)
            {
                best = g;
                r.fine_index = j;
            }
        }
        r.beam = dft_beam(h.size(), static_cast<double>(r.fine_index) / static_cast<double>(fine));
        return r;
    }

    // ---------------------------------------------------------------------------------------------------------------
    // Idealized SRS

    const char *to_string(SrsSnrKind kind) { return kind == SrsSnrKind::per_antenna ? "per_antenna" : "total"; }

    SrsSnrKind srs_snr_from_string(const std::string &name)
    {
        if (name == "per_antenna")
            return SrsSnrKind::per_antenna;
        if (name == "total")
            return SrsSnrKind::total;
        throw ConfigError("unknown SRS SNR definition '" + name + "' (expected per_antenna or total)");
    }

    double srs_snr(std::span<const cplx> h, const NoiseConfig &noise, SrsSnrKind kind)
    {
        const double n0 = noise.noise_power_mw();
        const double energy = noise.transmit_power_mw() * squared_norm(h);
        if (n0 == 0.0)
            return std::numeric_limits<double>::infinity();
        const double per = kind == SrsSnrKind::per_antenna ? static_cast<double>(h.size()) : 1.0;
        return energy / (per * n0);
    }

    SrsResult srs_lmmse_beam(std::span<const cplx> h, const NoiseConfig &noise, Rng &rng, SrsSnrKind kind)
    {
        SrsResult r;
        r.snr = srs_snr(h, noise, kind);
        r.nmse = std::isinf(r.snr) ? 0.0 : srs_nmse(r.snr, noise.ssb_length);
        const double var = r.nmse * squared_norm(h) / static_cast<double>(h.size());
        r.estimate.assign(h.begin(), h.end());
        for (auto &x : r.estimate)
            x += rng.complex_normal(var);
        r.beam = mrt_beamformer(r.estimate);
        return r;
    }
}
