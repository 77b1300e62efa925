// SPDX-License-Identifier: Apache-2.0
//
// eesim: energy-efficiency optimization for UAV-relayed THz NOMA links
// Copyright (C) 2026 The eesim authors
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

// ee-sim: command-line front end over the C API.
// Exit codes: 0 success, 1 other error, 2 config error, 3 infeasible, 4 partial failures.

#include "eesim/eesim.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace
{
    enum Exit
    {
        ExitOk = 0,
        ExitError = 1,
        ExitConfig = 2,
        ExitInfeasible = 3,
        ExitPartial = 4,
    };

    int exit_for(eesim_status s)
    {
        switch (s)
        {
        case EESIM_OK: return ExitOk;
        case EESIM_ERR_CONFIG:
        case EESIM_ERR_INVALID_PARAMETER: return ExitConfig;
        case EESIM_ERR_INFEASIBLE: return ExitInfeasible;
        default: return ExitError;
        }
    }

    int report(eesim_status s)
    {
        std::fprintf(stderr, "ee-sim: %s\n", eesim_last_error());
        return exit_for(s);
    }

    struct ConfigDeleter
    {
        void operator()(eesim_config *c) const { eesim_config_free(c); }
    };
    struct ResultsDeleter
    {
        void operator()(eesim_results *r) const { eesim_results_free(r); }
    };
    using ConfigPtr = std::unique_ptr<eesim_config, ConfigDeleter>;
    using ResultsPtr = std::unique_ptr<eesim_results, ResultsDeleter>;

    struct Overrides
    {
        std::string config;
        std::string sweep;
        std::size_t trials = 0;
        std::uint64_t seed = 0;
        bool seed_set = false;
        std::string methods;
        std::string out;
        std::size_t workers = 0;
    };

    eesim_status load(const Overrides &o, ConfigPtr &cfg)
    {
        eesim_config *raw = nullptr;
        eesim_status s = eesim_config_load(o.config.c_str(), &raw);
        cfg.reset(raw);
        if (s != EESIM_OK)
            return s;
        if (!o.sweep.empty() && (s = eesim_config_set_sweep(cfg.get(), o.sweep.c_str())) != EESIM_OK)
            return s;
        if (o.trials > 0 && (s = eesim_config_set_trials(cfg.get(), o.trials)) != EESIM_OK)
            return s;
        if (o.seed_set && (s = eesim_config_set_seed(cfg.get(), o.seed)) != EESIM_OK)
            return s;
        if (!o.methods.empty() && (s = eesim_config_set_methods(cfg.get(), o.methods.c_str())) != EESIM_OK)
            return s;
        if (!o.out.empty() && (s = eesim_config_set_output(cfg.get(), o.out.c_str())) != EESIM_OK)
            return s;
        if (o.workers > 0 && (s = eesim_config_set_workers(cfg.get(), o.workers)) != EESIM_OK)
            return s;
        return eesim_config_validate(cfg.get());
    }

    void progress(size_t done, size_t total, void *user)
    {
        if (*static_cast<bool *>(user))
            std::fprintf(stderr, "\r%zu/%zu runs", done, total);
        if (done == total && *static_cast<bool *>(user))
            std::fprintf(stderr, "\n");
    }

    int cmd_run(const Overrides &o, bool quiet)
    {
        ConfigPtr cfg;
        if (auto s = load(o, cfg); s != EESIM_OK)
            return report(s);

        bool show = !quiet;
        eesim_results *raw = nullptr;
        const auto s = eesim_run_sweep(cfg.get(), progress, &show, &raw);
        ResultsPtr res(raw);
        if (s != EESIM_OK)
            return report(s);

        const char *out = nullptr;
        eesim_config_get_output(cfg.get(), &out);
        if (auto w = eesim_results_write(res.get(), cfg.get(), out); w != EESIM_OK)
            return report(w);

        // Mean EE per (value, method) over successful trials
        std::map<std::pair<double, std::string>, std::pair<double, std::size_t>> mean;
        std::vector<std::pair<double, std::string>> order;
        std::size_t failures = 0, infeasible = 0;
        const std::size_t n = eesim_results_count(res.get());
        for (std::size_t i = 0; i < n; ++i)
        {
            eesim_record r;
            eesim_results_get(res.get(), i, &r);
            const auto key = std::make_pair(r.sweep_value, std::string(r.method));
            if (!mean.count(key))
                order.push_back(key);
            auto &m = mean[key];
            if (r.error[0] != '\0')
            {
                ++failures;
                infeasible += std::string(r.error).rfind("InfeasibleProblem", 0) == 0;
                if (!quiet)
                    std::fprintf(stderr, "value %g method %s trial %zu: %s\n", r.sweep_value, r.method, r.trial, r.error);
                continue;
            }
            m.first += r.final_ee;
            m.second += 1;
        }
        std::printf("%-12s %-10s %s\n", "value", "method", "mean_ee_mbits_per_joule");
        for (const auto &key : order)
        {
            const auto &m = mean[key];
            std::printf("%-12g %-10s %.6g\n", key.first, key.second.c_str(), m.second ? m.first / m.second : NAN);
        }
        std::printf("wrote %zu records to %s\n", n, out);

        if (failures > 0 && failures == n && infeasible == n)
            return ExitInfeasible;
        return failures > 0 ? ExitPartial : ExitOk;
    }

    int cmd_validate(const Overrides &o)
    {
        ConfigPtr cfg;
        if (auto s = load(o, cfg); s != EESIM_OK)
            return report(s);
        char *text = nullptr;
        const auto s = eesim_validate(cfg.get(), &text);
        if (text)
            std::fputs(text, stdout);
        eesim_string_free(text);
        if (s != EESIM_OK)
            return report(s);
        std::printf("feasible\n");
        return ExitOk;
    }

    int cmd_oracle(const Overrides &o, std::size_t resolution, double step)
    {
        ConfigPtr cfg;
        if (auto s = load(o, cfg); s != EESIM_OK)
            return report(s);
        const std::size_t trials = o.trials > 0 ? o.trials : 1;
        eesim_config_set_trials(cfg.get(), trials);
        std::vector<eesim_oracle_row> rows(trials);
        std::size_t written = 0;
        const auto s = eesim_oracle(cfg.get(), resolution, step, rows.data(), rows.size(), &written);
        if (s != EESIM_OK)
            return report(s);
        std::printf("%-6s %-10s %-14s %-14s %-8s %-6s %s\n", "trial", "search", "proposed_ee", "oracle_ee", "ratio", "exact",
                    "evaluated");
        for (std::size_t i = 0; i < written; ++i)
        {
            const auto &r = rows[i];
            std::printf("%-6zu %-10s %-14.6g %-14.6g %-8.4f %-6s %zu\n", r.trial, r.joint ? "joint" : "power", r.proposed_ee,
                        r.oracle_ee, r.oracle_ee > 0 ? r.proposed_ee / r.oracle_ee : NAN, r.oracle_exact ? "yes" : "no",
                        r.evaluated);
        }
        return ExitOk;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Energy-efficiency optimizer for UAV-relayed THz NOMA links"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(eesim_version()));

    Overrides o;
    bool quiet = false;
    std::size_t resolution = 40;
    double step = 1.0;

    auto add_config = [&](CLI::App *sub) { sub->add_option("--config", o.config, "JSON configuration")->required()->check(CLI::ExistingFile); };

    auto *run = app.add_subcommand("run", "Monte Carlo sweep; writes CSV plus the resolved config");
    add_config(run);
    run->add_option("--sweep", o.sweep, "Sweep variable")->check(CLI::IsMember({"p_sum", "time", "elements", "absorption"}));
    run->add_option("--trials", o.trials, "Random placements per sweep value")->check(CLI::PositiveNumber);
    run->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { o.seed = s; o.seed_set = true; }, "Base seed");
    run->add_option("--methods", o.methods, "Comma list of proposed,a,b,c,d,e,initial");
    run->add_option("--out", o.out, "Output CSV path");
    run->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--quiet", quiet, "No progress output");

    auto *oracle = app.add_subcommand("oracle", "Compare the proposed method with a grid search");
    add_config(oracle);
    oracle->add_option("--trials", o.trials, "Placements to test")->check(CLI::PositiveNumber);
    oracle->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { o.seed = s; o.seed_set = true; }, "Base seed");
    oracle->add_option("--resolution", resolution, "Power grid points per axis")->check(CLI::Range(2, 4000));
    oracle->add_option("--step", step, "Position lattice pitch [m]")->check(CLI::PositiveNumber);

    auto *validate = app.add_subcommand("validate", "Feasibility pre-check of the initial operating point");
    add_config(validate);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? ExitOk : ExitConfig;
    }

    if (*run)
        return cmd_run(o, quiet);
    if (*oracle)
        return cmd_oracle(o, resolution, step);
    return cmd_validate(o);
}
