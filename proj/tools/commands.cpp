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

#include "commands.hpp"

#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>

namespace fs = std::filesystem;

namespace sitebeam::cli
{
    int exit_code_for(const std::exception &e)
    {
        if (dynamic_cast<const ConfigError *>(&e))
            return kExitConfig;
        if (dynamic_cast<const DataError *>(&e))
            return kExitData;
        if (dynamic_cast<const NumericalError *>(&e))
            return kExitNumerical;
        return kExitOther;
    }

    namespace
    {
        std::string fixed(double v, int digits = 3)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", digits, v);
            return buf;
        }

        const std::string &need(const std::string &path, const char *key)
        {
            if (path.empty())
                throw ConfigError(std::string("inputs.") + key + " is required (set it in the config or by flag)");
            return path;
        }

        Scenario resolve_scenario(const ExperimentConfig &cfg)
        {
            const auto names = scenario_preset_names();
            Scenario s = std::find(names.begin(), names.end(), cfg.inputs.scenario) != names.end()
                             ? scenario_preset(cfg.inputs.scenario)
                             : load_scenario(cfg.inputs.scenario);
            if (cfg.system.n_antennas != 0)
                s.antenna_count = cfg.system.n_antennas;
            if (cfg.system.shadow_log_variance_db2)
                s.shadow_log_variance_db2 = *cfg.system.shadow_log_variance_db2;
            s.validate();
            return s;
        }

        SiteDataset load_inputs_dataset(const ExperimentConfig &cfg)
        {
            SiteDataset ds = load_dataset(need(cfg.inputs.dataset, "dataset"));
            if (cfg.system.n_antennas != 0 && cfg.system.n_antennas != ds.scenario.antenna_count)
                throw ConfigError("system.n_antennas = " + std::to_string(cfg.system.n_antennas) + " but dataset " +
                                  cfg.inputs.dataset + " has N_t = " + std::to_string(ds.scenario.antenna_count));
            return ds;
        }

        Codebook load_inputs_codebook(const ExperimentConfig &cfg, const SiteDataset &ds)
        {
            Codebook cb = load_codebook(need(cfg.inputs.codebook, "codebook"));
            if (cb.antennas() != ds.scenario.antenna_count)
                throw ConfigError("codebook " + cfg.inputs.codebook + " has N_t = " + std::to_string(cb.antennas()) +
                                  ", dataset has " + std::to_string(ds.scenario.antenna_count));
            return cb;
        }

        // config.json plus a manifest with content hashes of every input and output.
        void finish(const fs::path &dir, const std::string &command, const ExperimentConfig &cfg,
                    const std::vector<std::pair<std::string, std::string>> &inputs,
                    const std::vector<std::string> &outputs, json summary)
        {
            const json config = config_to_json(cfg);
            const std::string config_text = config.dump(2) + "\n";
            io::write_text_file(dir / "config.json", config_text);
            json m;
            m["format"] = "sitebeam-manifest-1";
            m["command"] = command;
            m["config_hash"] = io::content_hash(config.dump());
            m["config"] = config;
            json in = json::object();
            for (const auto &[role, path] : inputs)
                in[role] = {{"path", path}, {"hash", io::content_hash(io::read_text_file(path))}};
            m["inputs"] = in;
            json out = json::object();
            for (const auto &name : outputs)
                out[name] = io::content_hash(io::read_text_file(dir / name));
            m["outputs"] = out;
            m["summary"] = std::move(summary);
            io::write_text_file(dir / "manifest.json", m.dump(2) + "\n");
        }

        template <typename Fn> auto keep_trace_on_abort(const fs::path &dir, Fn &&fn)
        {
            try
            {
                return fn();
            }
            catch (const AbortedRun &e)
            {
                io::write_text_file(dir / "trace.csv", e.trace_csv());
                throw;
            }
        }

        json trace_summary(const std::vector<TrainTraceRow> &trace, std::ostream &log)
        {
            const TrainTraceRow *first = nullptr;
            const TrainTraceRow *last = nullptr;
            for (const auto &r : trace)
                if (!std::isnan(r.val_loss))
                {
                    if (!first)
                        first = &r;
                    last = &r;
                }
            json s = json::object();
            s["iterations"] = trace.empty() ? 0 : trace.back().iter;
            if (first)
            {
                s["initial_val_loss"] = first->val_loss;
                s["final_val_loss"] = last->val_loss;
                log << "val loss " << fixed(first->val_loss, 4) << " (iter " << first->iter << ") -> "
                    << fixed(last->val_loss, 4) << " (iter " << last->iter << ")\n";
                if (!std::isnan(last->val_gap_db))
                {
                    s["final_val_gap_db"] = last->val_gap_db;
                    log << "val mean gap " << fixed(last->val_gap_db) << " dB\n";
                }
            }
            return s;
        }
    }

    void cmd_gen_scenario(const ExperimentConfig &cfg, std::ostream &log)
    {
        const fs::path dir = resolve_output_dir(cfg.output_dir);
        const Scenario scenario = resolve_scenario(cfg);
        DatasetOptions opt;
        opt.grid = cfg.dataset.grid;
        opt.n_train = cfg.dataset.n_train;
        opt.n_val = cfg.dataset.n_val;
        opt.n_test = cfg.dataset.n_test;
        const SiteDataset ds = generate_dataset(scenario, cfg.dataset.n_ues, cfg.dataset.seed, opt);
        save_dataset(ds, dir / "dataset.json");

        const double los = ds.line_of_sight_fraction();
        const double paths = ds.mean_path_count();
        log << "scenario " << scenario.name << " (N_t = " << scenario.antenna_count << ")\n"
            << "UEs " << ds.entries.size() << " (train " << ds.indices(Split::train).size() << ", val "
            << ds.indices(Split::val).size() << ", test " << ds.indices(Split::test).size() << ")\n"
            << "LoS fraction " << fixed(los, 4) << "\n"
            << "mean path count " << fixed(paths, 3) << "\n";
        std::vector<std::pair<std::string, std::string>> inputs;
        if (fs::is_regular_file(cfg.inputs.scenario))
            inputs.emplace_back("scenario", cfg.inputs.scenario);
        finish(dir, "gen-scenario", cfg, inputs, {"dataset.json"},
               {{"n_ues", ds.entries.size()},
                {"line_of_sight_fraction", los},
                {"mean_path_count", paths},
                {"scenario_hash", scenario_hash(scenario)}});
    }

    void cmd_design_codebook(const ExperimentConfig &cfg, std::ostream &log)
    {
        const fs::path dir = resolve_output_dir(cfg.output_dir);
        const SiteDataset ds = load_inputs_dataset(cfg);
        const NoiseConfig noise = cfg.noise_for(ds.scenario);
        CodebookDesignConfig dc = cfg.codebook;
        dc.n_beams = cfg.system.n_beams;
        const std::size_t nt = ds.scenario.antenna_count;

        std::vector<std::string> outputs{"codebook.json"};
        Codebook cb;
        json summary = json::object();
        if (cfg.codebook_baseline == "dft")
        {
            cb = dft_codebook(nt, dc.n_beams);
            save_codebook(cb, dir / "codebook.json");
        }
        else
        {
            const auto result = keep_trace_on_abort(dir, [&] { return design_codebook(ds, noise, dc); });
            cb = result.codebook;
            save_codebook(cb, dir / "codebook.json");
            io::write_text_file(dir / "trace.csv", codebook_trace_csv(result.trace));
            outputs.push_back("trace.csv");
            const auto &first = result.trace.front();
            const auto &last = result.trace.back();
            if (!std::isnan(first.val_logdet) && !std::isnan(last.val_logdet))
            {
                summary["initial_val_logdet"] = first.val_logdet;
                summary["final_val_logdet"] = last.val_logdet;
                log << "val logdet " << fixed(first.val_logdet) << " -> " << fixed(last.val_logdet) << "\n";
            }
        }
        const double l_orth = orthogonality_penalty(cb);
        summary["l_orth"] = l_orth;
        log << "codebook " << cb.kind << ", N_t = " << nt << ", K = " << cb.size() << ", L_orth " << fixed(l_orth, 4)
            << "\n";

        const auto held_out = ds.channels(Split::test);
        if (held_out.size() >= cb.size() + 1)
        {
            const Codebook dft = dft_codebook(nt, cb.size());
            const std::uint64_t seed = mix_seed(dc.seed, 0x6c64);
            const double ld = logdet_metric(cb, held_out, noise, seed, cfg.evaluate.logdet_noise_draws);
            const double ld_dft = logdet_metric(dft, held_out, noise, seed, cfg.evaluate.logdet_noise_draws);
            summary["test_logdet"] = ld;
            summary["test_logdet_dft"] = ld_dft;
            log << "test logdet " << fixed(ld) << " vs DFT " << fixed(ld_dft) << " ("
                << (ld > ld_dft ? "above" : "not above") << " DFT)\n";
        }
        finish(dir, "design-codebook", cfg, {{"dataset", cfg.inputs.dataset}}, outputs, summary);
    }

    void cmd_train_cfm(const ExperimentConfig &cfg, std::ostream &log)
    {
        const fs::path dir = resolve_output_dir(cfg.output_dir);
        const SiteDataset ds = load_inputs_dataset(cfg);
        const Codebook cb = load_inputs_codebook(cfg, ds);
        CfmArch arch = cfg.cfm_arch;
        arch.n_antennas = cb.antennas();
        arch.n_beams = cb.size();
        const NoiseConfig noise = cfg.noise_for(ds.scenario);
        const auto result = keep_trace_on_abort(
            dir, [&] { return train_cfm(CfmModel::create(arch, cfg.cfm.seed), ds, cb, noise, cfg.cfm); });
        save_cfm(result.model, dir / "cfm.json");
        io::write_text_file(dir / "trace.csv", train_trace_csv(result.trace));
        log << "cfm N_t = " << arch.n_antennas << ", K = " << arch.n_beams << ", " << result.model.params.parameter_count()
            << " parameters\n";
        json summary = trace_summary(result.trace, log);
        finish(dir, "train-cfm", cfg, {{"dataset", cfg.inputs.dataset}, {"codebook", cfg.inputs.codebook}},
               {"cfm.json", "trace.csv"}, summary);
    }

    void cmd_train_mlp(const ExperimentConfig &cfg, std::ostream &log)
    {
        const fs::path dir = resolve_output_dir(cfg.output_dir);
        const SiteDataset ds = load_inputs_dataset(cfg);
        const Codebook cb = load_inputs_codebook(cfg, ds);
        MlpArch arch = cfg.mlp_arch;
        arch.n_antennas = cb.antennas();
        arch.n_beams = cb.size();
        const NoiseConfig noise = cfg.noise_for(ds.scenario);
        const auto result = keep_trace_on_abort(
            dir, [&] { return train_mlp(MlpModel::create(arch, cfg.mlp.seed), ds, cb, noise, cfg.mlp); });
        save_mlp(result.model, dir / "mlp.json");
        io::write_text_file(dir / "trace.csv", train_trace_csv(result.trace));
        log << "mlp N_t = " << arch.n_antennas << ", K = " << arch.n_beams << ", " << result.model.params.parameter_count()
            << " parameters\n";
        json summary = trace_summary(result.trace, log);
        finish(dir, "train-mlp", cfg, {{"dataset", cfg.inputs.dataset}, {"codebook", cfg.inputs.codebook}},
               {"mlp.json", "trace.csv"}, summary);
    }

    void cmd_evaluate(const ExperimentConfig &cfg, std::ostream &log)
    {
        const fs::path dir = resolve_output_dir(cfg.output_dir);
        const SiteDataset ds = load_inputs_dataset(cfg);
        const Codebook cb = load_inputs_codebook(cfg, ds);
        std::vector<std::pair<std::string, std::string>> inputs{{"dataset", cfg.inputs.dataset},
                                                                {"codebook", cfg.inputs.codebook}};
        std::optional<CfmModel> cfm;
        std::optional<MlpModel> mlp;
        if (cfg.evaluate.run_cfm)
        {
            cfm = load_cfm(need(cfg.inputs.cfm, "cfm"));
            inputs.emplace_back("cfm", cfg.inputs.cfm);
        }
        if (cfg.evaluate.run_mlp)
        {
            mlp = load_mlp(need(cfg.inputs.mlp, "mlp"));
            inputs.emplace_back("mlp", cfg.inputs.mlp);
        }

        PipelineInputs in;
        in.dataset = &ds;
        in.codebook = &cb;
        in.cfm = cfm ? &*cfm : nullptr;
        in.mlp = mlp ? &*mlp : nullptr;
        for (const auto &[role, path] : inputs)
            in.provenance[role] = path;
        PipelineConfig pc = cfg.pipeline();
        pc.noise = cfg.noise_for(ds.scenario);
        const ResultBundle bundle = run_pipeline(in, pc);
        write_bundle(bundle, dir);

        log << "method  power_dbm   M   mean_db  median_db   p95_db  degenerate\n";
        json table = json::array();
        for (const auto &g : bundle.gaps)
        {
            char line[160];
            std::snprintf(line, sizeof line, "%-6s %10.1f %3zu %9.3f %10.3f %8.3f %11zu\n", g.method.c_str(), g.power_dbm,
                          g.m, g.report.mean, g.report.median, g.report.p95, g.report.n_degenerate);
            log << line;
            table.push_back({{"method", g.method},
                             {"power_dbm", g.power_dbm},
                             {"m", g.m},
                             {"median_db", g.report.median}});
        }
        for (const auto &e : bundle.logdet)
            log << "logdet " << e.codebook << " " << fixed(e.logdet) << "\n";
        // The command manifest replaces the bundle's and carries it as "pipeline".
        finish(dir, "evaluate", cfg, inputs, {"gaps.csv", "summary.csv", "logdet.csv", "distances.csv", "patterns.csv"},
               {{"gaps", table}, {"pipeline", json::parse(bundle.manifest_json)}});
    }

    void cmd_export_patterns(const ExperimentConfig &cfg, std::ostream &log)
    {
        const fs::path dir = resolve_output_dir(cfg.output_dir);
        std::vector<std::pair<std::string, std::string>> inputs;
        Codebook cb;
        if (cfg.patterns.dft)
            cb = dft_codebook(cfg.system.n_antennas == 0 ? 16 : cfg.system.n_antennas, cfg.system.n_beams);
        else
        {
            cb = load_codebook(need(cfg.inputs.codebook, "codebook"));
            inputs.emplace_back("codebook", cfg.inputs.codebook);
        }
        const auto grid = angle_grid(cfg.patterns.points, cfg.patterns.lo_rad, cfg.patterns.hi_rad);
        const BeamPatterns p = beam_patterns(cb, grid, cfg.patterns.spacing_ratio);
        io::write_text_file(dir / "patterns.csv", patterns_csv(p));
        json peaks = json::array();
        for (std::size_t b = 0; b < cb.size(); ++b)
        {
            std::size_t best = 0;
            for (std::size_t g = 1; g < grid.size(); ++g)
                if (p.gain_db(g, b) > p.gain_db(best, b))
                    best = g;
            peaks.push_back(grid[best]);
            log << "beam " << b << " peak at " << fixed(grid[best], 4) << " rad\n";
        }
        finish(dir, "export-patterns", cfg, inputs, {"patterns.csv"}, {{"peak_angles_rad", peaks}});
    }

    const std::vector<std::string> &command_names()
    {
        static const std::vector<std::string> names{"gen-scenario", "design-codebook", "train-cfm",
                                                    "train-mlp",    "evaluate",        "export-patterns"};
        return names;
    }

    void run_command(const std::string &name, const ExperimentConfig &cfg, std::ostream &log)
    {
        if (name == "gen-scenario")
            cmd_gen_scenario(cfg, log);
        else if (name == "design-codebook")
            cmd_design_codebook(cfg, log);
        else if (name == "train-cfm")
            cmd_train_cfm(cfg, log);
        else if (name == "train-mlp")
            cmd_train_mlp(cfg, log);
        else if (name == "evaluate")
            cmd_evaluate(cfg, log);
        else if (name == "export-patterns")
            cmd_export_patterns(cfg, log);
        else
            throw ConfigError("unknown command '" + name + "'");
    }
}
