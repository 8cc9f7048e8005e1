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

#include "cli_runner.hpp"

#include "commands.hpp"
#include "experiment.hpp"

#include "sitebeam/errors.hpp"
#include "sitebeam/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sitebeam;
using namespace sitebeam::cli;
using namespace sitebeam::testing;
namespace fs = std::filesystem;

namespace
{
    // Small end-to-end setup shared by the subprocess cases; built once.
    struct Pipeline
    {
        fs::path root;
        std::string tiny_cfm = "--set cfm.arch.cond_width=8 --set cfm.arch.hidden_width=16 --set cfm.arch.n_blocks=2 "
                               "--set cfm.val_size=16 --set cfm.val_steps=4";
        std::string tiny_mlp = "--set mlp.arch.hidden_width=8 --set mlp.arch.n_hidden=1 --set mlp.val_size=16";

        std::string gen() const { return "gen-scenario --preset blocked_street --n-ues 160 --seed 4 --antennas 4"; }
        std::string design() const
        {
            return "design-codebook --dataset " + (root / "ds/dataset.json").string() +
                   " --k 4 --iterations 15 --batch 16 --set codebook.val_every=5";
        }
        std::string train_cfm() const
        {
            return "train-cfm --dataset " + (root / "ds/dataset.json").string() + " --codebook " +
                   (root / "cb/codebook.json").string() + " --iterations 20 --batch 8 --val-every 10 --set system.n_beams=4 " +
                   tiny_cfm;
        }
        std::string train_mlp() const
        {
            return "train-mlp --dataset " + (root / "ds/dataset.json").string() + " --codebook " +
                   (root / "cb/codebook.json").string() + " --iterations 20 --batch 8 --val-every 10 --set system.n_beams=4 " +
                   tiny_mlp;
        }
        std::string evaluate() const
        {
            return "evaluate --dataset " + (root / "ds/dataset.json").string() + " --codebook " +
                   (root / "cb/codebook.json").string() + " --cfm " + (root / "cfm/cfm.json").string() + " --mlp " +
                   (root / "mlp/mlp.json").string() +
                   " --m-sweep 1,2,4 --powers 40,10 --set evaluate.pmi.tier1_k=8 --set evaluate.pmi.tier2_m=4 "
                   "--set system.n_beams=4 --set system.n_candidates=4 --set patterns.points=31";
        }
        std::string patterns() const
        {
            return "export-patterns --codebook " + (root / "cb/codebook.json").string() + " --points 91";
        }

        int step(const std::string &args, const std::string &out) const
        {
            return run_cli(args + " --out " + (root / out).string(), root / (out + ".log"));
        }

        Pipeline() : root(fresh_dir("sitebeam_test_cli"))
        {
            REQUIRE(step(gen(), "ds") == 0);
            REQUIRE(step(design(), "cb") == 0);
            REQUIRE(step(train_cfm(), "cfm") == 0);
            REQUIRE(step(train_mlp(), "mlp") == 0);
            REQUIRE(step(evaluate(), "ev") == 0);
            REQUIRE(step(patterns(), "pat") == 0);
        }
    };

    const Pipeline &pipeline()
    {
        static const Pipeline p;
        return p;
    }

    json parse_file(const fs::path &p) { return json::parse(io::read_text_file(p)); }
}

TEST_CASE("config: defaults round-trip and unknown keys are named")
{
    const ExperimentConfig def;
    const json doc = config_to_json(def);
    CHECK(!doc.contains("output_dir"));
    CHECK(config_to_json(config_from_json(doc)) == doc);
    json bad = doc;
    bad["codebook"]["lamda_orth"] = 0.1;
    try
    {
        config_from_json(bad);
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()).find("codebook.lamda_orth") != std::string::npos);
    }
    json neg = doc;
    neg["codebook"]["beta"] = -1.0;
    CHECK_THROWS_AS(config_from_json(neg), ConfigError);
    json wrong = doc;
    wrong["system"]["ssb_length"] = "five";
    CHECK_THROWS_AS(config_from_json(wrong), ConfigError);
}

TEST_CASE("config: dotted assignments")
{
    json doc = json::object();
    apply_assignment(doc, "codebook.iterations=12");
    apply_assignment(doc, "inputs.scenario=blocked_street");
    apply_assignment(doc, "evaluate.m_sweep=[1,3]");
    const ExperimentConfig c = config_from_json(doc);
    CHECK(c.codebook.iterations == 12);
    CHECK(c.inputs.scenario == "blocked_street");
    CHECK(c.evaluate.m_sweep == std::vector<std::size_t>{1, 3});
    CHECK_THROWS_AS(apply_assignment(doc, "no_equals_sign"), ConfigError);
}

TEST_CASE("output root only prefixes relative directories")
{
    ::setenv("SITEBEAM_OUTPUT_ROOT", "/tmp/root", 1);
    CHECK(resolve_output_dir("runs/a") == fs::path("/tmp/root/runs/a"));
    CHECK(resolve_output_dir("/abs/b") == fs::path("/abs/b"));
    ::unsetenv("SITEBEAM_OUTPUT_ROOT");
    CHECK(resolve_output_dir("runs/a") == fs::path("runs/a"));
}

TEST_CASE("exit codes by error class")
{
    CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
    CHECK(exit_code_for(DataError("x")) == kExitData);
    CHECK(exit_code_for(NumericalError("x")) == kExitNumerical);
    CHECK(exit_code_for(AbortedRun("x", "")) == kExitNumerical);
    CHECK(exit_code_for(std::runtime_error("x")) == kExitOther);
}

TEST_CASE("cli: every command writes its outputs plus config and manifest")
{
    const Pipeline &p = pipeline();
    for (const char *f : {"dataset.json", "config.json", "manifest.json"})
        CHECK(fs::exists(p.root / "ds" / f));
    for (const char *f : {"codebook.json", "trace.csv"})
        CHECK(fs::exists(p.root / "cb" / f));
    CHECK(fs::exists(p.root / "cfm/cfm.json"));
    CHECK(fs::exists(p.root / "mlp/mlp.json"));
    for (const char *f : {"gaps.csv", "summary.csv", "logdet.csv", "distances.csv", "patterns.csv"})
        CHECK(fs::exists(p.root / "ev" / f));
    const json m = parse_file(p.root / "ev/manifest.json");
    CHECK(m["command"] == "evaluate");
    CHECK(m["summary"].contains("pipeline"));
    CHECK(m["inputs"].contains("cfm"));
    const json cm = parse_file(p.root / "cb/manifest.json");
    CHECK(cm["outputs"]["codebook.json"] == io::content_hash(io::read_text_file(p.root / "cb/codebook.json")));
}

TEST_CASE("cli: reruns are bit-identical")
{
    const Pipeline &p = pipeline();
    const std::vector<std::pair<std::string, std::string>> cmds{
        {p.gen(), "ds"},       {p.design(), "cb"},   {p.train_cfm(), "cfm"},
        {p.train_mlp(), "mlp"}, {p.evaluate(), "ev"}, {p.patterns(), "pat"}};
    for (const auto &[args, dir] : cmds)
    {
        REQUIRE(p.step(args, dir + "_again") == 0);
        INFO(dir);
        CHECK(hash_dir(p.root / dir) == hash_dir(p.root / (dir + "_again")));
    }
}

TEST_CASE("cli: config file, --set and flags compose with flags winning")
{
    const Pipeline &p = pipeline();
    const fs::path cfg = p.root / "exp.json";
    {
        std::ofstream out(cfg);
        out << R"({"dataset": {"n_ues": 50, "seed": 1}, "inputs": {"scenario": "los_park"}})";
    }
    REQUIRE(p.step("gen-scenario --config " + cfg.string() + " --set dataset.seed=2 --seed 3 --n-ues 40", "prec") == 0);
    const json c = parse_file(p.root / "prec/config.json");
    CHECK(c["dataset"]["seed"] == 3);
    CHECK(c["dataset"]["n_ues"] == 40);
    REQUIRE(p.step("gen-scenario --config " + cfg.string() + " --set dataset.seed=2", "prec2") == 0);
    CHECK(parse_file(p.root / "prec2/config.json")["dataset"]["seed"] == 2);
}

TEST_CASE("cli: exit codes")
{
    const Pipeline &p = pipeline();
    CHECK(p.step("gen-scenario --set dataset.bogus=1", "e1") == kExitConfig);
    CHECK(p.step("gen-scenario --no-such-flag", "e2") == kExitConfig);
    CHECK(p.step("gen-scenario --preset atlantis", "e3") == kExitConfig);
    CHECK(p.step("design-codebook --dataset /nonexistent/dataset.json", "e4") == kExitData);
    CHECK(p.step("design-codebook --dataset " + (p.root / "ds/dataset.json").string() + " --batch 5000", "e5") ==
          kExitData);
    CHECK(p.step(p.train_cfm() + " --lr 1e9 --optimizer sgd", "e6") == kExitNumerical);
    CHECK(fs::exists(p.root / "e6/trace.csv"));
    CHECK(p.step("evaluate --dataset " + (p.root / "ds/dataset.json").string(), "e7") == kExitConfig);
    CHECK(p.step("evaluate --dataset " + (p.root / "ds/dataset.json").string() + " --codebook /nonexistent/cb.json",
                 "e8") == kExitData);
}

TEST_CASE("cli: DFT baseline codebook and pattern export")
{
    const Pipeline &p = pipeline();
    REQUIRE(p.step("design-codebook --baseline dft --k 4 --dataset " + (p.root / "ds/dataset.json").string(), "dft") ==
            0);
    CHECK(!fs::exists(p.root / "dft/trace.csv"));
    const json cb = parse_file(p.root / "dft/codebook.json");
    CHECK(cb["meta"]["kind"] == "dft");

    REQUIRE(p.step("export-patterns --dft --antennas 8 --k 8 --points 181", "pdft") == 0);
    const std::string csv = io::read_text_file(p.root / "pdft/patterns.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("angle_rad,beam_0_db", 0) == 0);
    std::size_t rows = 0;
    double mx = -1e300;
    while (std::getline(in, line))
    {
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        std::getline(cells, cell, ',');
        mx = std::max(mx, std::stod(cell));
    }
    CHECK(rows == 181);
    CHECK(mx == doctest::Approx(0.0).epsilon(1e-9));
}
