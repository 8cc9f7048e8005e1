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

// sitebeam command-line driver.

#include "commands.hpp"
#include "experiment.hpp"

#include "sitebeam/errors.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <memory>

using namespace sitebeam;
using namespace sitebeam::cli;

namespace
{
    // Flags collected per subcommand; each one that was given writes its value
    // at a config key after the config file has been loaded.
    class Overrides
    {
    public:
        explicit Overrides(CLI::App *app) : app_(app) {}

        template <typename T> void add(const std::string &flag, const std::string &key, const std::string &help)
        {
            auto value = std::make_shared<T>();
            CLI::Option *opt = app_->add_option(flag, *value, help);
            if constexpr (requires { value->push_back({}); })
                opt->delimiter(',');
            setters_.push_back([opt, value, key](json &doc) {
                if (opt->count() > 0)
                    set_key(doc, key, json(*value));
            });
        }

        void add_switch(const std::string &flag, const std::string &key, const std::string &help)
        {
            CLI::Option *opt = app_->add_flag(flag, help);
            setters_.push_back([opt, key](json &doc) {
                if (opt->count() > 0)
                    set_key(doc, key, true);
            });
        }

        void add_raw(std::function<void(json &)> fn) { setters_.push_back(std::move(fn)); }

        void apply(json &doc) const
        {
            for (const auto &s : setters_)
                s(doc);
        }

        CLI::App *app() const { return app_; }

    private:
        CLI::App *app_;
        std::vector<std::function<void(json &)>> setters_;
    };

    void add_common(Overrides &o, std::string &config_path, std::vector<std::string> &assignments)
    {
        o.app()->add_option("--config", config_path, "experiment config (JSON)");
        o.app()->add_option("--set", assignments, "override any config key: key.path=value (repeatable)");
        o.add<std::string>("--out", "output_dir", "output directory (relative paths go under $SITEBEAM_OUTPUT_ROOT)");
        o.add<std::size_t>("--threads", "threads", "worker threads (default 1)");
    }

    void add_system(Overrides &o)
    {
        o.add<double>("--tx-power", "system.transmit_power_dbm", "transmit power P_t [dBm]");
        o.add<double>("--noise-psd", "system.noise_psd_dbm_hz", "noise PSD [dBm/Hz]");
        o.add<double>("--bandwidth", "system.bandwidth_hz", "bandwidth [Hz]");
        o.add<std::size_t>("--ssb-length", "system.ssb_length", "SSB length L_s [symbols]");
        o.add<double>("--shadow-var", "system.shadow_log_variance_db2", "shadowing log-variance [dB^2]");
    }

    void add_training(Overrides &o, const std::string &section)
    {
        o.add<std::string>("--dataset", "inputs.dataset", "dataset file");
        o.add<std::string>("--codebook", "inputs.codebook", "codebook file");
        o.add<std::size_t>("--iterations", section + ".iterations", "training iterations");
        o.add<std::size_t>("--batch", section + ".batch_size", "batch size [UEs]");
        o.add<double>("--lr", section + ".learning_rate", "learning rate");
        o.add<std::string>("--optimizer", section + ".optimizer", "sgd, momentum or adam");
        o.add<std::uint64_t>("--seed", section + ".seed", "training seed");
        o.add<std::size_t>("--val-every", section + ".val_every", "validation period [iterations]");
        auto range = std::make_shared<std::vector<double>>();
        CLI::Option *opt = o.app()->add_option("--power-range", *range, "train over P_t drawn from [lo, hi] dBm")
                               ->expected(2)
                               ->delimiter(',');
        o.add_raw([opt, range, section](json &doc) {
            if (opt->count() > 0)
                set_key(doc, section + ".power_range_dbm", json(*range));
        });
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"sitebeam: site-specific probing codebooks and generative beam prediction"};
    app.require_subcommand(1);

    struct Entry
    {
        std::string name;
        std::unique_ptr<Overrides> flags;
        std::string config_path;
        std::vector<std::string> assignments;
    };
    std::vector<Entry> entries;
    auto make = [&](const std::string &name, const std::string &help) -> Entry & {
        CLI::App *sub = app.add_subcommand(name, help);
        entries.push_back({name, std::make_unique<Overrides>(sub), {}, {}});
        Entry &e = entries.back();
        add_common(*e.flags, e.config_path, e.assignments);
        return e;
    };
    entries.reserve(6);

    {
        Overrides &o = *make("gen-scenario", "generate a site dataset from a preset or scenario file").flags;
        o.add<std::string>("--preset", "inputs.scenario", "preset name (los_park, blocked_street)");
        o.add<std::string>("--scenario", "inputs.scenario", "scenario file (JSON)");
        o.add<std::size_t>("--n-ues", "dataset.n_ues", "number of UEs");
        o.add<std::uint64_t>("--seed", "dataset.seed", "dataset seed");
        o.add_switch("--grid", "dataset.grid", "place UEs on a jittered grid instead of uniformly");
        o.add<std::size_t>("--n-train", "dataset.n_train", "training UEs (with --n-val, --n-test)");
        o.add<std::size_t>("--n-val", "dataset.n_val", "validation UEs");
        o.add<std::size_t>("--n-test", "dataset.n_test", "test UEs");
        o.add<std::size_t>("--antennas", "system.n_antennas", "override the scenario's N_t");
        o.add<double>("--shadow-var", "system.shadow_log_variance_db2", "shadowing log-variance [dB^2]");
    }
    {
        Overrides &o = *make("design-codebook", "optimize a probing codebook on a dataset").flags;
        o.add<std::string>("--dataset", "inputs.dataset", "dataset file");
        o.add<std::string>("--baseline", "codebook.baseline", "learned (default) or dft");
        o.add<std::size_t>("--k", "system.n_beams", "codebook size K");
        o.add<std::size_t>("--iterations", "codebook.iterations", "iterations");
        o.add<std::size_t>("--batch", "codebook.batch_size", "batch size [UEs]");
        o.add<double>("--lr", "codebook.learning_rate", "step size");
        o.add<std::string>("--optimizer", "codebook.optimizer", "sgd, momentum or adam");
        o.add<std::uint64_t>("--seed", "codebook.seed", "design seed");
        o.add<double>("--lambda-orth", "codebook.lambda_orth", "orthogonality weight");
        o.add<double>("--lambda-cov", "codebook.lambda_cov", "coverage weight");
        o.add<double>("--beta", "codebook.beta", "log-sum-exp smoothing");
        o.add<std::string>("--coverage", "codebook.coverage", "margin or hinge");
        add_system(o);
    }
    {
        Overrides &o = *make("train-cfm", "train the conditional flow-matching beam generator").flags;
        add_training(o, "cfm");
        add_system(o);
    }
    {
        Overrides &o = *make("train-mlp", "train the discriminative MLP baseline").flags;
        add_training(o, "mlp");
        add_system(o);
    }
    {
        Overrides &o = *make("evaluate", "run probe, candidate generation, selection and locking on the test split").flags;
        o.add<std::string>("--dataset", "inputs.dataset", "dataset file");
        o.add<std::string>("--codebook", "inputs.codebook", "codebook file");
        o.add<std::string>("--cfm", "inputs.cfm", "CFM checkpoint");
        o.add<std::string>("--mlp", "inputs.mlp", "MLP checkpoint");
        o.add<std::uint64_t>("--seed", "evaluate.seed", "evaluation seed");
        o.add<std::vector<std::size_t>>("--m-sweep", "evaluate.m_sweep", "candidate counts, e.g. 1,2,4,8,16");
        o.add<std::vector<double>>("--powers", "evaluate.power_sweep_dbm", "transmit powers to sweep [dBm]");
        o.add_switch("--noisy-selection", "evaluate.noisy_selection", "select candidates by noisy RSRP");
        auto methods = std::make_shared<std::vector<std::string>>();
        CLI::Option *opt = o.app()->add_option("--methods", *methods, "subset of cfm,mlp,pmi,srs")->delimiter(',');
        o.add_raw([opt, methods](json &doc) {
            if (opt->count() == 0)
                return;
            for (const char *m : {"cfm", "mlp", "pmi", "srs"})
                set_key(doc, std::string("evaluate.methods.") + m, false);
            for (const auto &m : *methods)
            {
                if (m != "cfm" && m != "mlp" && m != "pmi" && m != "srs")
                    throw ConfigError("--methods: unknown method '" + m + "'");
                set_key(doc, "evaluate.methods." + m, true);
            }
        });
        add_system(o);
    }
    {
        Overrides &o = *make("export-patterns", "export beam patterns of a codebook over an angle grid").flags;
        o.add<std::string>("--codebook", "inputs.codebook", "codebook file");
        o.add_switch("--dft", "patterns.dft", "use the DFT codebook (N_t from --antennas, K from --k)");
        o.add<std::size_t>("--antennas", "system.n_antennas", "N_t for --dft");
        o.add<std::size_t>("--k", "system.n_beams", "K for --dft");
        o.add<std::size_t>("--points", "patterns.points", "grid points");
        o.add<double>("--lo", "patterns.lo_rad", "first angle [rad]");
        o.add<double>("--hi", "patterns.hi_rad", "last angle [rad]");
        o.add<double>("--spacing-ratio", "patterns.spacing_ratio", "element spacing d / lambda");
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kExitConfig;
    }

    for (auto &e : entries)
    {
        if (!e.flags->app()->parsed())
            continue;
        try
        {
            json doc = e.config_path.empty() ? json::object() : load_config_document(e.config_path);
            for (const auto &a : e.assignments)
                apply_assignment(doc, a);
            e.flags->apply(doc);
            const ExperimentConfig cfg = config_from_json(doc);
            run_command(e.name, cfg, std::cout);
            return kExitOk;
        }
        catch (const std::exception &ex)
        {
            std::cerr << "sitebeam " << e.name << ": error: " << ex.what() << "\n";
            return exit_code_for(ex);
        }
    }
    return kExitConfig;
}
