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

#include "sitebeam/codebook.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"
#include "sitebeam/linalg.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace sitebeam
{
    using detail::json;

    namespace
    {
        constexpr double kTwoPi = 2.0 * std::numbers::pi;

        double wrap_phase(double x)
        {
            double r = std::fmod(x, kTwoPi);
            if (r < 0.0)
                r += kTwoPi;
            return r >= kTwoPi ? 0.0 : r;
        }

        Tensor identity_scaled(std::size_t n, double value)
        {
            Tensor t({n, n});
            for (std::size_t i = 0; i < n; ++i)
                t(i, i) = value;
            return t;
        }

        // Loaded sample covariance of the rows of y, on the tape.
        Var loaded_covariance(Var y, double eps)
        {
            Tape &tape = *y.tape();
            const std::size_t b = y.value().rows();
            const std::size_t k = y.value().cols();
            const Var centered = ad::sub(y, ad::mean_rows(y));
            const Var cov = ad::scale(ad::matmul(ad::transpose(centered), centered), 1.0 / static_cast<double>(b - 1));
            return ad::add(cov, tape.constant(identity_scaled(k, eps)));
        }

        Var orthogonality_on_tape(Var phase)
        {
            const double nt = static_cast<double>(phase.value().rows());
            const std::size_t k = phase.value().cols();
            const Var c = ad::cos(phase);
            const Var s = ad::sin(phase);
            const Var ct = ad::transpose(c);
            const Var st = ad::transpose(s);
            // Gram of the normalized columns: (C^H C) / N_t.
            const Var re = ad::scale(ad::matmul(ct, c) + ad::matmul(st, s), 1.0 / nt);
            const Var im = ad::scale(ad::matmul(ct, s) - ad::matmul(st, c), 1.0 / nt);
            const Var dev = ad::sub(re, phase.tape()->constant(Tensor::identity(k)));
            return ad::sum(ad::square(dev)) + ad::sum(ad::square(im));
        }

        Var coverage_on_tape(Var y, double beta, CoverageKind kind, double threshold)
        {
            const Var lse = ad::scale(ad::logsumexp(ad::scale(y, beta)), 1.0 / beta);
            if (kind == CoverageKind::margin)
                return ad::mean(ad::neg(lse));
            return ad::mean(ad::clamp_min(ad::shift(ad::neg(lse), threshold), 0.0));
        }

        std::vector<CVec> gather(const SiteDataset &ds, const std::vector<std::size_t> &idx)
        {
            std::vector<CVec> out;
            out.reserve(idx.size());
            for (std::size_t i : idx)
                out.push_back(ds.entries[i].h);
            return out;
        }

        Tensor normal_matrix(std::size_t rows, std::size_t cols, Rng &rng)
        {
            Tensor t({rows, cols});
            for (double &v : t.data())
                v = rng.normal();
            return t;
        }
    }

    ComplexMatrix Codebook::beams() const
    {
        ComplexMatrix m(antennas(), size());
        for (std::size_t n = 0; n < antennas(); ++n)
            for (std::size_t k = 0; k < size(); ++k)
                m(n, k) = std::polar(1.0, phase(n, k));
        return m;
    }

    CVec Codebook::beam(std::size_t k) const
    {
        CVec w(antennas());
        for (std::size_t n = 0; n < antennas(); ++n)
            w[n] = std::polar(1.0, phase(n, k));
        return w;
    }

    Codebook Codebook::prefix(std::size_t k) const
    {
        if (k < 1 || k > size())
            throw std::invalid_argument("Codebook::prefix: bad beam count");
        Codebook out = *this;
        out.phase = Tensor({antennas(), k});
        for (std::size_t n = 0; n < antennas(); ++n)
            for (std::size_t j = 0; j < k; ++j)
                out.phase(n, j) = phase(n, j);
        return out;
    }

    Codebook codebook_from_phase(Tensor phase)
    {
        if (phase.rank() != 2 || phase.rows() < 1 || phase.cols() < 1)
            throw ShapeError("codebook phase must be a non-empty [N_t, K] matrix");
        if (!phase.all_finite())
            throw DataError("codebook phase contains non-finite values");
        Codebook cb;
        cb.phase = std::move(phase);
        return cb;
    }

    Codebook dft_codebook(std::size_t n_antennas, std::size_t k)
    {
        if (n_antennas < 1 || k < 1)
            throw ConfigError("dft_codebook needs N_t >= 1 and K >= 1");
        const double denom = static_cast<double>(std::max(k, n_antennas));
        Tensor phase({n_antennas, k});
        for (std::size_t n = 0; n < n_antennas; ++n)
            for (std::size_t j = 0; j < k; ++j)
            {
                // Reduce the integer product first so the phase is exact for large n k.
                const std::size_t m = (n * j) % static_cast<std::size_t>(denom);
                phase(n, j) = kTwoPi * static_cast<double>(m) / denom;
            }
        Codebook cb = codebook_from_phase(std::move(phase));
        cb.kind = "dft";
        return cb;
    }

    Codebook random_codebook(std::size_t n_antennas, std::size_t k, Rng &rng)
    {
        Tensor phase({n_antennas, k});
        for (double &v : phase.data())
            v = rng.uniform(0.0, kTwoPi);
        Codebook cb = codebook_from_phase(std::move(phase));
        cb.kind = "random";
        return cb;
    }

    double orthogonality_penalty(const ComplexMatrix &beams)
    {
        const ComplexMatrix c = normalize_columns(beams);
        const ComplexMatrix g = matmul(adjoint(c), c);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j)
                acc += std::norm(g(i, j) - (i == j ? cplx{1.0, 0.0} : cplx{}));
        return acc;
    }

    double orthogonality_penalty(const Codebook &cb) { return orthogonality_penalty(cb.beams()); }

    double lse_max(std::span<const double> y, double beta)
    {
        if (!(beta > 0.0))
            throw std::invalid_argument("lse_max: beta must be positive");
        if (y.empty())
            throw std::invalid_argument("lse_max: empty vector");
        const double m = *std::max_element(y.begin(), y.end());
        double acc = 0.0;
        for (double v : y)
            acc += std::exp(beta * (v - m));
        return m + std::log(acc) / beta;
    }

    const char *to_string(CoverageKind kind) { return kind == CoverageKind::margin ? "margin" : "hinge"; }

    CoverageKind coverage_from_string(const std::string &name)
    {
        if (name == "margin")
            return CoverageKind::margin;
        if (name == "hinge")
            return CoverageKind::hinge;
        throw ConfigError("unknown coverage surrogate '" + name + "' (expected margin or hinge)");
    }

    double coverage_surrogate(const Tensor &y_batch, double beta, CoverageKind kind, double threshold_db)
    {
        const std::size_t b = y_batch.rows();
        const std::size_t k = y_batch.cols();
        double acc = 0.0;
        for (std::size_t i = 0; i < b; ++i)
        {
            const double lse = lse_max(y_batch.data().subspan(i * k, k), beta);
            acc += kind == CoverageKind::margin ? -lse : std::max(threshold_db - lse, 0.0);
        }
        return acc / static_cast<double>(b);
    }

    void CodebookDesignConfig::validate() const
    {
        if (!(lambda_orth >= 0.0) || !(lambda_cov >= 0.0))
            throw ConfigError("codebook.lambda_orth and codebook.lambda_cov must be non-negative");
        if (!(beta > 0.0))
            throw ConfigError("codebook.beta must be positive");
        if (!(diag_loading > 0.0))
            throw ConfigError("codebook.diag_loading must be positive");
        if (batch_size < 2)
            throw ConfigError("codebook.batch_size must be at least 2");
        if (!(optimizer.learning_rate > 0.0))
            throw ConfigError("codebook.learning_rate must be positive");
    }

    double CodebookDesignConfig::threshold_dbm(const NoiseConfig &noise) const
    {
        return std::isnan(coverage_threshold_dbm) ? noise.noise_power_dbm() + 10.0 : coverage_threshold_dbm;
    }

    std::string CodebookDesignConfig::to_json() const
    {
        json j;
        j["n_beams"] = n_beams;
        j["lambda_orth"] = lambda_orth;
        j["lambda_cov"] = lambda_cov;
        j["beta"] = beta;
        j["batch_size"] = batch_size;
        j["iterations"] = iterations;
        j["diag_loading"] = diag_loading;
        j["seed"] = seed;
        j["coverage"] = to_string(coverage);
        j["coverage_threshold_dbm"] = std::isnan(coverage_threshold_dbm) ? json(nullptr) : json(coverage_threshold_dbm);
        j["optimizer"] = nn::to_string(optimizer.kind);
        j["learning_rate"] = optimizer.learning_rate;
        j["momentum"] = optimizer.momentum;
        j["clip_norm"] = optimizer.clip_norm;
        j["val_every"] = val_every;
        return j.dump();
    }

    std::string CodebookDesignConfig::hash() const { return io::content_hash(to_json()); }

    Var codebook_objective_on_tape(Var phase, const std::vector<CVec> &channels, const Tensor &noise,
                                   const NoiseConfig &noise_cfg, const CodebookDesignConfig &cfg, ObjectiveTerms *terms)
    {
        if (channels.size() < 2)
            throw std::invalid_argument("codebook objective needs at least two channels");
        const Var y = measure_gaussian_on_tape(phase, channels, noise, noise_cfg);
        const Var logdet = ad::logdet(loaded_covariance(y, cfg.diag_loading));
        const Var orth = orthogonality_on_tape(phase);
        const Var cov = coverage_on_tape(y, cfg.beta, cfg.coverage, cfg.threshold_dbm(noise_cfg));
        const Var objective = ad::sub(ad::sub(logdet, ad::scale(orth, cfg.lambda_orth)), ad::scale(cov, cfg.lambda_cov));
        if (terms)
        {
            terms->objective = objective.value().item();
            terms->logdet = logdet.value().item();
            terms->l_orth = orth.value().item();
            terms->coverage = cov.value().item();
        }
        return objective;
    }

    ObjectiveResult batch_objective(const Tensor &phase, const std::vector<CVec> &channels, const Tensor &noise,
                                    const NoiseConfig &noise_cfg, const CodebookDesignConfig &cfg, bool with_gradient)
    {
        Tape tape;
        const Var p = with_gradient ? tape.variable(phase) : tape.constant(phase);
        ObjectiveResult r;
        const Var obj = codebook_objective_on_tape(p, channels, noise, noise_cfg, cfg, &r.terms);
        if (with_gradient)
            r.gradient = tape.gradients(obj, {p})[0];
        return r;
    }

    std::string codebook_trace_csv(const std::vector<CodebookTraceRow> &trace)
    {
        io::CsvBuilder csv({"iter", "objective", "logdet", "l_orth", "coverage", "val_objective", "val_logdet", "wall_ms"});
        auto opt = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
        for (const auto &r : trace)
            csv.row({std::to_string(r.iter), io::format_double(r.batch.objective), io::format_double(r.batch.logdet),
                     io::format_double(r.batch.l_orth), io::format_double(r.batch.coverage), opt(r.val_objective),
                     opt(r.val_logdet), io::format_double(r.wall_ms)});
        return csv.str();
    }

    CodebookDesignResult design_codebook(const SiteDataset &dataset, const NoiseConfig &noise_cfg,
                                         const CodebookDesignConfig &cfg)
    {
        cfg.validate();
        noise_cfg.validate();
        const auto train = dataset.indices(Split::train);
        if (train.size() < cfg.batch_size)
            throw DataError("training split has " + std::to_string(train.size()) + " UEs, fewer than the batch size " +
                            std::to_string(cfg.batch_size));
        const std::size_t nt = dataset.scenario.antenna_count;
        const std::size_t k = cfg.n_beams;

        // Fixed validation set and noise, so the validation curve is a smooth function of Phi.
        const auto val_idx = dataset.indices(Split::val);
        const std::vector<CVec> val_channels = gather(dataset, val_idx);
        Rng val_rng = Rng::derive(cfg.seed, 0x7661'6c00ULL);
        const Tensor val_noise = normal_matrix(val_channels.size(), k, val_rng);
        const bool do_val = cfg.val_every > 0 && val_channels.size() >= 2;

        Rng init = Rng::derive(cfg.seed, 0);
        Codebook cb = random_codebook(nt, k, init);
        cb.kind = "learned";
        cb.seed = cfg.seed;
        cb.config_hash = cfg.hash();

        nn::Optimizer opt(cfg.optimizer);
        CodebookDesignResult result;
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<std::size_t> pool = train;

        for (std::size_t it = 0; it <= cfg.iterations; ++it)
        {
            // Partial Fisher-Yates draw of B distinct training UEs.
            Rng rng = Rng::derive(cfg.seed, it + 1);
            std::vector<std::size_t> batch_idx(cfg.batch_size);
            for (std::size_t i = 0; i < cfg.batch_size; ++i)
            {
                const std::size_t j = i + static_cast<std::size_t>(rng.index(pool.size() - i));
                std::swap(pool[i], pool[j]);
                batch_idx[i] = pool[i];
            }
            const std::vector<CVec> batch = gather(dataset, batch_idx);
            const Tensor noise = normal_matrix(cfg.batch_size, k, rng);

            CodebookTraceRow row;
            row.iter = it;
            const bool last = it == cfg.iterations;
            ObjectiveResult r;
            try
            {
                r = batch_objective(cb.phase, batch, noise, noise_cfg, cfg, !last);
                if (do_val && (last || it % cfg.val_every == 0))
                {
                    ObjectiveResult v = batch_objective(cb.phase, val_channels, val_noise, noise_cfg, cfg, false);
                    row.val_objective = v.terms.objective;
                    row.val_logdet = v.terms.logdet;
                }
            }
            catch (const FactorizationError &e)
            {
                throw AbortedRun("codebook design, iteration " + std::to_string(it) + ": " + e.what(),
                                 codebook_trace_csv(result.trace));
            }
            row.batch = r.terms;
            if (cfg.record_wall_time)
                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            result.trace.push_back(row);

            const bool finite = std::isfinite(r.terms.objective) && (last || r.gradient.all_finite());
            if (!finite)
                throw AbortedRun("codebook design, iteration " + std::to_string(it) + ": non-finite objective",
                                 codebook_trace_csv(result.trace));
            if (last)
                break;

            // Ascent: the optimizer descends, so hand it the negated gradient.
            Tensor step = r.gradient;
            step *= -1.0;
            Tensor *params[] = {&cb.phase};
            const Tensor grads[] = {std::move(step)};
            opt.step(params, grads);
            for (double &v : cb.phase.data())
                v = wrap_phase(v);
        }
        result.codebook = std::move(cb);
        return result;
    }

    double logdet_metric(const Codebook &cb, const std::vector<CVec> &channels, const NoiseConfig &noise_cfg,
                         std::uint64_t seed, std::size_t n_noise_draws, double diag_loading)
    {
        const std::size_t k = cb.size();
        const std::size_t n = channels.size();
        if (n < k + 1)
            throw DataError("logdet_metric needs at least K + 1 channels");
        if (n_noise_draws < 1)
            throw ConfigError("logdet_metric needs at least one noise draw");
        const ComplexMatrix beams = cb.beams();
        Tensor pooled({n * n_noise_draws, k});
        for (std::size_t d = 0; d < n_noise_draws; ++d)
        {
            const Tensor y = measure_batch(beams, channels, noise_cfg, mix_seed(seed, d), MeasurementMode::exact);
            std::copy(y.data().begin(), y.data().end(), pooled.data().begin() + static_cast<std::ptrdiff_t>(d * n * k));
        }
        Tensor cov = linalg::sample_covariance(pooled);
        for (std::size_t i = 0; i < k; ++i)
            cov(i, i) += diag_loading;
        return linalg::logdet_spd(cov);
    }

    std::string codebook_to_json(const Codebook &cb)
    {
        json j;
        j["format"] = "sitebeam-codebook-1";
        j["n_t"] = cb.antennas();
        j["k"] = cb.size();
        j["phase_row_major"] = cb.phase.values();
        j["meta"] = {{"kind", cb.kind}, {"seed", cb.seed}, {"config_hash", cb.config_hash}};
        return j.dump(1) + "\n";
    }

    Codebook codebook_from_json(const std::string &text)
    {
        try
        {
            const json j = detail::parse_json(text, "codebook");
            detail::reject_unknown_keys(j, "codebook", {"format", "n_t", "k", "phase_row_major", "meta"});
            if (detail::as_string(detail::require(j, "codebook", "format"), "codebook.format") != "sitebeam-codebook-1")
                throw ConfigError("codebook.format: unsupported version");
            const auto nt = detail::as_count<std::size_t>(detail::require(j, "codebook", "n_t"), "codebook.n_t");
            const auto k = detail::as_count<std::size_t>(detail::require(j, "codebook", "k"), "codebook.k");
            const json &arr = detail::require(j, "codebook", "phase_row_major");
            if (!arr.is_array() || arr.size() != nt * k)
                throw ConfigError("codebook.phase_row_major: expected n_t * k values");
            std::vector<double> values;
            for (std::size_t i = 0; i < arr.size(); ++i)
                values.push_back(detail::as_double(arr[i], "codebook.phase_row_major[" + std::to_string(i) + "]"));
            Codebook cb = codebook_from_phase(Tensor::matrix(nt, k, std::move(values)));
            const json &meta = detail::require(j, "codebook", "meta");
            detail::reject_unknown_keys(meta, "codebook.meta", {"kind", "seed", "config_hash"});
            cb.kind = detail::as_string(detail::require(meta, "codebook.meta", "kind"), "codebook.meta.kind");
            cb.seed = detail::as_count<std::uint64_t>(detail::require(meta, "codebook.meta", "seed"), "codebook.meta.seed");
            cb.config_hash =
                detail::as_string(detail::require(meta, "codebook.meta", "config_hash"), "codebook.meta.config_hash");
            return cb;
        }
        catch (const ConfigError &e)
        {
            throw DataError(e.what());
        }
    }

    void save_codebook(const Codebook &cb, const std::filesystem::path &path)
    {
        io::write_text_file(path, codebook_to_json(cb));
    }

    Codebook load_codebook(const std::filesystem::path &path) { return codebook_from_json(io::read_text_file(path)); }
}
