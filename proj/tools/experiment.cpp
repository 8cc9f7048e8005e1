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

#include "experiment.hpp"

#include "json_util.hpp"
#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"

#include <cmath>
#include <cstdlib>

namespace sitebeam::cli
{
    using detail::as_bool;
    using detail::as_count;
    using detail::as_double;
    using detail::as_string;
    using detail::from_double;
    using detail::reject_unknown_keys;

    namespace
    {
        // Optional-field reader for one JSON object.
        struct Section
        {
            const json &obj;
            std::string where;

            const json *get(const char *key) const
            {
                auto it = obj.find(key);
                return it == obj.end() || it->is_null() ? nullptr : &*it;
            }
            std::string path(const char *key) const { return where + "." + key; }

            void num(const char *key, double &out) const
            {
                if (auto v = get(key))
                    out = as_double(*v, path(key));
            }
            template <typename T> void count(const char *key, T &out) const
            {
                if (auto v = get(key))
                    out = as_count<T>(*v, path(key));
            }
            void flag(const char *key, bool &out) const
            {
                if (auto v = get(key))
                    out = as_bool(*v, path(key));
            }
            void str(const char *key, std::string &out) const
            {
                if (auto v = get(key))
                    out = as_string(*v, path(key));
            }
            Section sub(const char *key) const
            {
                static const json empty = json::object();
                auto v = get(key);
                return {v ? *v : empty, path(key)};
            }
        };

        void read_optimizer(const Section &s, nn::OptimizerConfig &opt)
        {
            if (auto v = s.get("optimizer"))
                opt.kind = nn::optimizer_from_string(as_string(*v, s.path("optimizer")));
            s.num("learning_rate", opt.learning_rate);
            s.num("momentum", opt.momentum);
            s.num("clip_norm", opt.clip_norm);
        }

        json optimizer_json(const nn::OptimizerConfig &opt)
        {
            return {{"optimizer", nn::to_string(opt.kind)},
                    {"learning_rate", opt.learning_rate},
                    {"momentum", opt.momentum},
                    {"clip_norm", opt.clip_norm}};
        }

        void read_train(const Section &s, CfmTrainConfig &t)
        {
            s.count("batch_size", t.batch_size);
            s.num("sigma0", t.sigma0);
            s.count("iterations", t.iterations);
            s.count("seed", t.seed);
            read_optimizer(s, t.optimizer);
            if (auto v = s.get("measurement"))
                t.measurement = measurement_mode_from_string(as_string(*v, s.path("measurement")));
            if (auto v = s.get("power_range_dbm"))
            {
                if (!v->is_array() || v->size() != 2)
                    throw ConfigError(s.path("power_range_dbm") + ": expected [lo, hi] or null");
                t.power_lo_dbm = as_double((*v)[0], s.path("power_range_dbm"));
                t.power_hi_dbm = as_double((*v)[1], s.path("power_range_dbm"));
            }
            s.count("val_every", t.val_every);
            s.count("val_size", t.val_size);
            s.count("val_candidates", t.val_candidates);
            s.count("val_steps", t.val_steps);
            s.num("val_temperature", t.val_temperature);
            s.flag("record_wall_time", t.record_wall_time);
        }

        json train_json(const CfmTrainConfig &t)
        {
            json j{{"batch_size", t.batch_size}, {"sigma0", t.sigma0}, {"iterations", t.iterations}, {"seed", t.seed}};
            const json opt = optimizer_json(t.optimizer);
            for (auto it = opt.begin(); it != opt.end(); ++it)
                j[it.key()] = it.value();
            j["measurement"] = to_string(t.measurement);
            j["power_range_dbm"] = std::isnan(t.power_lo_dbm) ? json(nullptr) : json::array({t.power_lo_dbm, t.power_hi_dbm});
            j["val_every"] = t.val_every;
            j["val_size"] = t.val_size;
            j["val_candidates"] = t.val_candidates;
            j["val_steps"] = t.val_steps;
            j["val_temperature"] = t.val_temperature;
            j["record_wall_time"] = t.record_wall_time;
            return j;
        }

        const std::initializer_list<const char *> kTrainKeys = {
            "arch",     "batch_size",  "sigma0",          "iterations", "seed",           "optimizer",
            "learning_rate", "momentum", "clip_norm",     "measurement", "power_range_dbm", "val_every",
            "val_size", "val_candidates", "val_steps",    "val_temperature", "record_wall_time"};

        template <typename T> std::vector<T> read_list(const json &v, const std::string &where)
        {
            if (!v.is_array())
                throw ConfigError(where + ": expected a list");
            std::vector<T> out;
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                const std::string w = where + "[" + std::to_string(i) + "]";
                if constexpr (std::is_same_v<T, double>)
                    out.push_back(as_double(v[i], w));
                else
                    out.push_back(as_count<T>(v[i], w));
            }
            return out;
        }
    }

    ExperimentConfig config_from_json(const json &doc)
    {
        ExperimentConfig c;
        reject_unknown_keys(doc, "config", {"inputs", "dataset", "system", "codebook", "cfm", "mlp", "sampler", "evaluate",
                                            "patterns", "threads", "output_dir"});
        const Section root{doc, "config"};

        const Section in = root.sub("inputs");
        reject_unknown_keys(in.obj, in.where, {"scenario", "dataset", "codebook", "cfm", "mlp"});
        in.str("scenario", c.inputs.scenario);
        in.str("dataset", c.inputs.dataset);
        in.str("codebook", c.inputs.codebook);
        in.str("cfm", c.inputs.cfm);
        in.str("mlp", c.inputs.mlp);

        const Section ds = root.sub("dataset");
        reject_unknown_keys(ds.obj, ds.where, {"n_ues", "seed", "grid", "n_train", "n_val", "n_test"});
        ds.count("n_ues", c.dataset.n_ues);
        ds.count("seed", c.dataset.seed);
        ds.flag("grid", c.dataset.grid);
        ds.count("n_train", c.dataset.n_train);
        ds.count("n_val", c.dataset.n_val);
        ds.count("n_test", c.dataset.n_test);

        const Section sys = root.sub("system");
        reject_unknown_keys(sys.obj, sys.where,
                            {"n_antennas", "n_beams", "n_candidates", "transmit_power_dbm", "noise_psd_dbm_hz",
                             "bandwidth_hz", "ssb_length", "shadow_log_variance_db2", "include_bias", "infinite_ssb"});
        sys.count("n_antennas", c.system.n_antennas);
        sys.count("n_beams", c.system.n_beams);
        sys.count("n_candidates", c.system.n_candidates);
        sys.num("transmit_power_dbm", c.system.noise.transmit_power_dbm);
        sys.num("noise_psd_dbm_hz", c.system.noise.noise_psd_dbm_hz);
        sys.num("bandwidth_hz", c.system.noise.bandwidth_hz);
        sys.count("ssb_length", c.system.noise.ssb_length);
        if (auto v = sys.get("shadow_log_variance_db2"))
            c.system.shadow_log_variance_db2 = as_double(*v, sys.path("shadow_log_variance_db2"));
        sys.flag("include_bias", c.system.noise.include_bias);
        sys.flag("infinite_ssb", c.system.noise.infinite_ssb);

        const Section cb = root.sub("codebook");
        reject_unknown_keys(cb.obj, cb.where,
                            {"lambda_orth", "lambda_cov", "beta", "batch_size", "iterations", "diag_loading", "seed",
                             "coverage", "coverage_threshold_dbm", "optimizer", "learning_rate", "momentum",
                             "clip_norm", "val_every", "record_wall_time", "baseline"});
        cb.str("baseline", c.codebook_baseline);
        cb.num("lambda_orth", c.codebook.lambda_orth);
        cb.num("lambda_cov", c.codebook.lambda_cov);
        cb.num("beta", c.codebook.beta);
        cb.count("batch_size", c.codebook.batch_size);
        cb.count("iterations", c.codebook.iterations);
        cb.num("diag_loading", c.codebook.diag_loading);
        cb.count("seed", c.codebook.seed);
        if (auto v = cb.get("coverage"))
            c.codebook.coverage = coverage_from_string(as_string(*v, cb.path("coverage")));
        cb.num("coverage_threshold_dbm", c.codebook.coverage_threshold_dbm);
        read_optimizer(cb, c.codebook.optimizer);
        cb.count("val_every", c.codebook.val_every);
        cb.flag("record_wall_time", c.codebook.record_wall_time);

        const Section cf = root.sub("cfm");
        reject_unknown_keys(cf.obj, cf.where, kTrainKeys);
        read_train(cf, c.cfm);
        const Section ca = cf.sub("arch");
        reject_unknown_keys(ca.obj, ca.where, {"cond_width", "hidden_width", "n_blocks"});
        ca.count("cond_width", c.cfm_arch.cond_width);
        ca.count("hidden_width", c.cfm_arch.hidden_width);
        ca.count("n_blocks", c.cfm_arch.n_blocks);

        const Section ml = root.sub("mlp");
        reject_unknown_keys(ml.obj, ml.where, kTrainKeys);
        read_train(ml, c.mlp);
        const Section ma = ml.sub("arch");
        reject_unknown_keys(ma.obj, ma.where, {"hidden_width", "n_hidden"});
        ma.count("hidden_width", c.mlp_arch.hidden_width);
        ma.count("n_hidden", c.mlp_arch.n_hidden);

        const Section sa = root.sub("sampler");
        reject_unknown_keys(sa.obj, sa.where, {"n_steps", "temperature", "sigma0"});
        sa.count("n_steps", c.sampler.n_steps);
        sa.num("temperature", c.sampler.temperature);
        sa.num("sigma0", c.sampler.sigma0);

        const Section ev = root.sub("evaluate");
        reject_unknown_keys(ev.obj, ev.where,
                            {"m_sweep", "power_sweep_dbm", "methods", "noisy_selection", "pmi", "srs_snr",
                             "logdet_noise_draws", "seed"});
        if (auto v = ev.get("m_sweep"))
            c.evaluate.m_sweep = read_list<std::size_t>(*v, ev.path("m_sweep"));
        if (auto v = ev.get("power_sweep_dbm"))
            c.evaluate.power_sweep_dbm = read_list<double>(*v, ev.path("power_sweep_dbm"));
        const Section me = ev.sub("methods");
        reject_unknown_keys(me.obj, me.where, {"cfm", "mlp", "pmi", "srs"});
        me.flag("cfm", c.evaluate.run_cfm);
        me.flag("mlp", c.evaluate.run_mlp);
        me.flag("pmi", c.evaluate.run_pmi);
        me.flag("srs", c.evaluate.run_srs);
        ev.flag("noisy_selection", c.evaluate.noisy_selection);
        const Section pm = ev.sub("pmi");
        reject_unknown_keys(pm.obj, pm.where, {"tier1_k", "tier2_m", "fine_size"});
        pm.count("tier1_k", c.evaluate.pmi.tier1_k);
        pm.count("tier2_m", c.evaluate.pmi.tier2_m);
        pm.count("fine_size", c.evaluate.pmi.fine_size);
        if (auto v = ev.get("srs_snr"))
            c.evaluate.srs_snr = srs_snr_from_string(as_string(*v, ev.path("srs_snr")));
        ev.count("logdet_noise_draws", c.evaluate.logdet_noise_draws);
        ev.count("seed", c.evaluate.seed);

        const Section pa = root.sub("patterns");
        reject_unknown_keys(pa.obj, pa.where, {"points", "lo_rad", "hi_rad", "spacing_ratio", "dft"});
        pa.count("points", c.patterns.points);
        pa.num("lo_rad", c.patterns.lo_rad);
        pa.num("hi_rad", c.patterns.hi_rad);
        pa.num("spacing_ratio", c.patterns.spacing_ratio);
        pa.flag("dft", c.patterns.dft);

        root.count("threads", c.threads);
        root.str("output_dir", c.output_dir);
        c.validate();
        return c;
    }

    json config_to_json(const ExperimentConfig &c)
    {
        json j;
        j["inputs"] = {{"scenario", c.inputs.scenario},
                       {"dataset", c.inputs.dataset},
                       {"codebook", c.inputs.codebook},
                       {"cfm", c.inputs.cfm},
                       {"mlp", c.inputs.mlp}};
        j["dataset"] = {{"n_ues", c.dataset.n_ues}, {"seed", c.dataset.seed},       {"grid", c.dataset.grid},
                        {"n_train", c.dataset.n_train}, {"n_val", c.dataset.n_val}, {"n_test", c.dataset.n_test}};
        const NoiseConfig &n = c.system.noise;
        j["system"] = {{"n_antennas", c.system.n_antennas},
                       {"n_beams", c.system.n_beams},
                       {"n_candidates", c.system.n_candidates},
                       {"transmit_power_dbm", n.transmit_power_dbm},
                       {"noise_psd_dbm_hz", from_double(n.noise_psd_dbm_hz)},
                       {"bandwidth_hz", n.bandwidth_hz},
                       {"ssb_length", n.ssb_length},
                       {"shadow_log_variance_db2",
                        c.system.shadow_log_variance_db2 ? json(*c.system.shadow_log_variance_db2) : json(nullptr)},
                       {"include_bias", n.include_bias},
                       {"infinite_ssb", n.infinite_ssb}};
        const CodebookDesignConfig &cb = c.codebook;
        json jc{{"lambda_orth", cb.lambda_orth}, {"lambda_cov", cb.lambda_cov},   {"beta", cb.beta},
                {"batch_size", cb.batch_size},   {"iterations", cb.iterations},   {"diag_loading", cb.diag_loading},
                {"seed", cb.seed},               {"coverage", to_string(cb.coverage)}};
        jc["coverage_threshold_dbm"] =
            std::isnan(cb.coverage_threshold_dbm) ? json(nullptr) : json(cb.coverage_threshold_dbm);
        const json opt = optimizer_json(cb.optimizer);
        for (auto it = opt.begin(); it != opt.end(); ++it)
            jc[it.key()] = it.value();
        jc["val_every"] = cb.val_every;
        jc["record_wall_time"] = cb.record_wall_time;
        jc["baseline"] = c.codebook_baseline;
        j["codebook"] = jc;
        json cf = train_json(c.cfm);
        cf["arch"] = {{"cond_width", c.cfm_arch.cond_width},
                      {"hidden_width", c.cfm_arch.hidden_width},
                      {"n_blocks", c.cfm_arch.n_blocks}};
        j["cfm"] = cf;
        json ml = train_json(c.mlp);
        ml["arch"] = {{"hidden_width", c.mlp_arch.hidden_width}, {"n_hidden", c.mlp_arch.n_hidden}};
        j["mlp"] = ml;
        j["sampler"] = {{"n_steps", c.sampler.n_steps}, {"temperature", c.sampler.temperature}, {"sigma0", c.sampler.sigma0}};
        const auto &e = c.evaluate;
        json powers = json::array();
        for (double p : e.power_sweep_dbm)
            powers.push_back(p);
        j["evaluate"] = {{"m_sweep", e.m_sweep},
                         {"power_sweep_dbm", powers},
                         {"methods", {{"cfm", e.run_cfm}, {"mlp", e.run_mlp}, {"pmi", e.run_pmi}, {"srs", e.run_srs}}},
                         {"noisy_selection", e.noisy_selection},
                         {"pmi", {{"tier1_k", e.pmi.tier1_k}, {"tier2_m", e.pmi.tier2_m}, {"fine_size", e.pmi.fine_size}}},
                         {"srs_snr", to_string(e.srs_snr)},
                         {"logdet_noise_draws", e.logdet_noise_draws},
                         {"seed", e.seed}};
        j["patterns"] = {{"points", c.patterns.points}, {"lo_rad", c.patterns.lo_rad}, {"hi_rad", c.patterns.hi_rad},
                         {"spacing_ratio", c.patterns.spacing_ratio}, {"dft", c.patterns.dft}};
        j["threads"] = c.threads;
        return j;
    }

    void ExperimentConfig::validate() const
    {
        auto fail = [](const std::string &key, const std::string &why) { throw ConfigError(key + ": " + why); };
        if (inputs.scenario.empty())
            fail("inputs.scenario", "must name a preset or a scenario file");
        if (dataset.n_ues < 1)
            fail("dataset.n_ues", "must be at least 1");
        if (system.n_antennas > 1024)
            fail("system.n_antennas", "must be at most 1024");
        if (system.n_beams < 1 || system.n_beams > 1024)
            fail("system.n_beams", "must be in [1, 1024]");
        if (system.n_candidates < 1)
            fail("system.n_candidates", "must be at least 1");
        if (!std::isfinite(system.noise.transmit_power_dbm))
            fail("system.transmit_power_dbm", "must be finite");
        if (!(system.noise.bandwidth_hz > 0.0) || !std::isfinite(system.noise.bandwidth_hz))
            fail("system.bandwidth_hz", "must be positive");
        if (system.noise.ssb_length < 1)
            fail("system.ssb_length", "must be at least 1");
        if (system.shadow_log_variance_db2 && !(*system.shadow_log_variance_db2 >= 0.0))
            fail("system.shadow_log_variance_db2", "must be non-negative");
        system.noise.validate();
        CodebookDesignConfig cb = codebook;
        cb.n_beams = system.n_beams;
        cb.validate();
        cfm.validate();
        mlp.validate();
        SamplerConfig s = sampler;
        s.n_candidates = system.n_candidates;
        s.validate();
        evaluate.pmi.validate();
        for (std::size_t m : evaluate.m_sweep)
            if (m < 1)
                fail("evaluate.m_sweep", "entries must be at least 1");
        for (double p : evaluate.power_sweep_dbm)
            if (!std::isfinite(p))
                fail("evaluate.power_sweep_dbm", "entries must be finite");
        if (evaluate.logdet_noise_draws < 1)
            fail("evaluate.logdet_noise_draws", "must be at least 1");
        if (codebook_baseline != "learned" && codebook_baseline != "dft")
            fail("codebook.baseline", "expected learned or dft");
        if (patterns.points < 1)
            fail("patterns.points", "must be at least 1");
        if (!(patterns.lo_rad <= patterns.hi_rad))
            fail("patterns", "lo_rad must not exceed hi_rad");
        if (!(patterns.spacing_ratio > 0.0))
            fail("patterns.spacing_ratio", "must be positive");
        if (threads < 1 || threads > 256)
            fail("threads", "must be in [1, 256]");
    }

    NoiseConfig ExperimentConfig::noise_for(const Scenario &scenario) const
    {
        NoiseConfig n = system.noise;
        n.shadow_log_variance_db2 = system.shadow_log_variance_db2.value_or(scenario.shadow_log_variance_db2);
        return n;
    }

    PipelineConfig ExperimentConfig::pipeline() const
    {
        PipelineConfig p;
        p.noise = system.noise;
        p.sampler = sampler;
        p.sampler.n_candidates = system.n_candidates;
        p.pmi = evaluate.pmi;
        p.srs_snr = evaluate.srs_snr;
        p.m_sweep = evaluate.m_sweep;
        p.power_sweep_dbm = evaluate.power_sweep_dbm;
        p.run_cfm = evaluate.run_cfm;
        p.run_mlp = evaluate.run_mlp;
        p.run_pmi = evaluate.run_pmi;
        p.run_srs = evaluate.run_srs;
        p.noisy_selection = evaluate.noisy_selection;
        p.logdet_noise_draws = evaluate.logdet_noise_draws;
        p.pattern_points = patterns.points;
        p.seed = evaluate.seed;
        p.threads = threads;
        return p;
    }

    void set_key(json &doc, const std::string &dotted, json value)
    {
        if (dotted.empty())
            throw ConfigError("empty config key");
        json *node = &doc;
        std::size_t start = 0;
        while (true)
        {
            const std::size_t dot = dotted.find('.', start);
            const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (part.empty())
                throw ConfigError("malformed config key '" + dotted + "'");
            if (!node->is_object())
            {
                if (!node->is_null())
                    throw ConfigError("config key '" + dotted + "' descends into a non-object");
                *node = json::object();
            }
            if (dot == std::string::npos)
            {
                (*node)[part] = std::move(value);
                return;
            }
            node = &(*node)[part];
            start = dot + 1;
        }
    }

    void apply_assignment(json &doc, const std::string &assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got '" + assignment + "'");
        const std::string key = assignment.substr(0, eq);
        const std::string text = assignment.substr(eq + 1);
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded())
            value = text;
        set_key(doc, key, std::move(value));
    }

    json load_config_document(const std::filesystem::path &path)
    {
        std::string text;
        try
        {
            text = io::read_text_file(path);
        }
        catch (const std::exception &e)
        {
            throw ConfigError("cannot read config " + path.string() + ": " + e.what());
        }
        json doc = detail::parse_json(text, path.string());
        if (!doc.is_object())
            throw ConfigError(path.string() + ": config must be a JSON object");
        return doc;
    }

    std::filesystem::path resolve_output_dir(const std::string &dir)
    {
        std::filesystem::path p(dir);
        if (p.is_relative())
            if (const char *root = std::getenv("SITEBEAM_OUTPUT_ROOT"); root && *root)
                return std::filesystem::path(root) / p;
        return p;
    }
}
