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

#include "eesim/eesim.h"
#include "eesim/errors.hpp"
#include "eesim/experiments.hpp"

#include <cstdlib>
#include <cstring>
#include <sstream>

struct eesim_config
{
    eesim::ExperimentConfig cfg;
};

struct eesim_results
{
    std::vector<eesim::SweepRecord> records;
};

namespace
{
    thread_local std::string last_error;

    eesim_status fail_with(eesim_status s, const std::string &msg)
    {
        last_error = msg;
        return s;
    }

    // Runs `f`, translating exceptions to status codes
    template <class F>
    eesim_status guarded(F &&f) noexcept
    {
        try
        {
            last_error.clear();
            f();
            return EESIM_OK;
        }
        catch (const eesim::Error &e)
        {
            return fail_with(static_cast<eesim_status>(static_cast<int>(e.code())), e.what());
        }
        catch (const std::bad_alloc &)
        {
            return fail_with(EESIM_ERR_INTERNAL, "out of memory");
        }
        catch (const std::exception &e)
        {
            return fail_with(EESIM_ERR_INTERNAL, e.what());
        }
        catch (...)
        {
            return fail_with(EESIM_ERR_INTERNAL, "unknown error");
        }
    }

    char *dup(const std::string &s)
    {
        char *p = static_cast<char *>(std::malloc(s.size() + 1));
        if (!p)
            throw std::bad_alloc();
        std::memcpy(p, s.c_str(), s.size() + 1);
        return p;
    }

#define EESIM_REQUIRE(ptr)                                                          \
    do                                                                              \
    {                                                                               \
        if (!(ptr))                                                                 \
            return fail_with(EESIM_ERR_NULL_ARGUMENT, "null argument: " #ptr);      \
    } while (0)
}

extern "C" {

const char *eesim_version(void) { return "1.0.0"; }

const char *eesim_status_name(eesim_status status)
{
    switch (status)
    {
    case EESIM_OK: return "Ok";
    case EESIM_ERR_NULL_ARGUMENT: return "NullArgument";
    case EESIM_ERR_INTERNAL: return "Internal";
    default:
        if (status >= 1 && status <= 10)
            return eesim::error_code_name(static_cast<eesim::ErrorCode>(status));
        return "Unknown";
    }
}

const char *eesim_last_error(void) { return last_error.c_str(); }

void eesim_string_free(char *s) { std::free(s); }

eesim_status eesim_config_default(eesim_config **out)
{
    EESIM_REQUIRE(out);
    return guarded([&] { *out = new eesim_config{}; });
}

eesim_status eesim_config_load(const char *path, eesim_config **out)
{
    EESIM_REQUIRE(path);
    EESIM_REQUIRE(out);
    return guarded([&] { *out = new eesim_config{eesim::load_config(path)}; });
}

eesim_status eesim_config_parse(const char *json, eesim_config **out)
{
    EESIM_REQUIRE(json);
    EESIM_REQUIRE(out);
    return guarded([&] { *out = new eesim_config{eesim::parse_config(json)}; });
}

void eesim_config_free(eesim_config *cfg) { delete cfg; }

eesim_status eesim_config_save(const eesim_config *cfg, const char *path)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(path);
    return guarded([&] { eesim::save_config(cfg->cfg, path); });
}

eesim_status eesim_config_to_json(const eesim_config *cfg, char **out)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(out);
    return guarded([&] { *out = dup(eesim::config_to_json(cfg->cfg)); });
}

eesim_status eesim_config_validate(const eesim_config *cfg)
{
    EESIM_REQUIRE(cfg);
    return guarded([&] { cfg->cfg.validate(); });
}

eesim_status eesim_config_set_sweep(eesim_config *cfg, const char *name)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(name);
    return guarded([&]
    {
        const auto k = eesim::parse_sweep(name);
        cfg->cfg.sweep = k;
        cfg->cfg.sweep_values = eesim::default_sweep_values(k);
    });
}

eesim_status eesim_config_set_sweep_values(eesim_config *cfg, const double *values, size_t count)
{
    EESIM_REQUIRE(cfg);
    if (count > 0)
        EESIM_REQUIRE(values);
    return guarded([&] { cfg->cfg.sweep_values.assign(values, values + count); });
}

eesim_status eesim_config_set_trials(eesim_config *cfg, size_t trials)
{
    EESIM_REQUIRE(cfg);
    return guarded([&] {
        if (trials == 0)
            eesim::fail(eesim::ErrorCode::ConfigError, "experiment.trials: must be at least 1");
        cfg->cfg.trials = trials;
    });
}

eesim_status eesim_config_set_seed(eesim_config *cfg, uint64_t seed)
{
    EESIM_REQUIRE(cfg);
    return guarded([&] { cfg->cfg.seed = seed; });
}

eesim_status eesim_config_set_methods(eesim_config *cfg, const char *methods)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(methods);
    return guarded([&]
    {
        std::vector<eesim::Method> list;
        std::stringstream ss(methods);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos)
                eesim::fail(eesim::ErrorCode::ConfigError, "empty method name");
            list.push_back(eesim::parse_method(item.substr(b, e - b + 1)));
        }
        if (list.empty())
            eesim::fail(eesim::ErrorCode::ConfigError, "no methods given");
        cfg->cfg.methods = std::move(list);
    });
}

eesim_status eesim_config_set_output(eesim_config *cfg, const char *path)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(path);
    return guarded([&] { cfg->cfg.output_path = path; });
}

eesim_status eesim_config_set_workers(eesim_config *cfg, size_t workers)
{
    EESIM_REQUIRE(cfg);
    return guarded([&] {
        if (workers == 0)
            eesim::fail(eesim::ErrorCode::ConfigError, "experiment.workers: must be at least 1");
        cfg->cfg.workers = workers;
    });
}

eesim_status eesim_config_get_output(const eesim_config *cfg, const char **out)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(out);
    *out = cfg->cfg.output_path.c_str();
    return EESIM_OK;
}

eesim_status eesim_validate(const eesim_config *cfg, char **report)
{
    EESIM_REQUIRE(cfg);
    std::string text;
    const eesim_status st = guarded([&]
    {
        const auto &c = cfg->cfg;
        c.validate();
        std::string first_failure;
        for (double v : c.sweep_values)
            for (std::size_t t = 0; t < c.trials; ++t)
            {
                const auto sc = eesim::Scenario::build(eesim::params_at(c, v), eesim::draw_placement(c, t));
                std::string status = "ok";
                try
                {
                    const auto traj = sc.initial_trajectory();
                    if (!eesim::validate_trajectory(traj).empty())
                        eesim::fail(eesim::ErrorCode::InfeasibleProblem, "straight line exceeds the speed limit");
                    eesim::check_power_feasibility(sc, traj);
                }
                catch (const eesim::Error &e)
                {
                    if (e.code() != eesim::ErrorCode::InfeasibleProblem)
                        throw;
                    status = e.detail();
                    if (first_failure.empty())
                        first_failure = status;
                }
                std::ostringstream line;
                line << eesim::sweep_name(c.sweep) << '=' << v << " trial " << t << ": " << status << '\n';
                text += line.str();
            }
        if (!first_failure.empty())
            eesim::fail(eesim::ErrorCode::InfeasibleProblem, first_failure);
    });
    if (report)
    {
        try
        {
            *report = dup(text);
        }
        catch (...)
        {
            *report = nullptr;
        }
    }
    return st;
}

eesim_status eesim_run_sweep(const eesim_config *cfg, eesim_progress_fn progress, void *user, eesim_results **out)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(out);
    return guarded([&]
    {
        eesim::ProgressFn fn;
        if (progress)
            fn = [progress, user](std::size_t done, std::size_t total) { progress(done, total, user); };
        *out = new eesim_results{eesim::run_sweep(cfg->cfg, fn)};
    });
}

size_t eesim_results_count(const eesim_results *res) { return res ? res->records.size() : 0; }

size_t eesim_results_failures(const eesim_results *res)
{
    size_t n = 0;
    if (res)
        for (const auto &r : res->records)
            n += !r.error.empty();
    return n;
}

eesim_status eesim_results_get(const eesim_results *res, size_t index, eesim_record *out)
{
    EESIM_REQUIRE(res);
    EESIM_REQUIRE(out);
    if (index >= res->records.size())
        return fail_with(EESIM_ERR_INVALID_PARAMETER, "record index out of range");
    const auto &r = res->records[index];
    out->sweep = r.sweep.c_str();
    out->sweep_value = r.sweep_value;
    out->method = r.method.c_str();
    out->trial = r.trial;
    out->seed = r.seed;
    out->final_ee = r.final_ee;
    out->converged = r.converged ? 1 : 0;
    out->wall_time_s = r.wall_time_s;
    out->error = r.error.c_str();
    return EESIM_OK;
}

eesim_status eesim_results_write(const eesim_results *res, const eesim_config *cfg, const char *path)
{
    EESIM_REQUIRE(res);
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(path);
    return guarded([&] { eesim::write_results(res->records, path, cfg->cfg); });
}

eesim_status eesim_results_read(const char *path, eesim_results **out)
{
    EESIM_REQUIRE(path);
    EESIM_REQUIRE(out);
    return guarded([&] { *out = new eesim_results{eesim::read_results(path)}; });
}

void eesim_results_free(eesim_results *res) { delete res; }

eesim_status eesim_oracle(const eesim_config *cfg, size_t power_resolution, double step_m, eesim_oracle_row *rows,
                          size_t capacity, size_t *written)
{
    EESIM_REQUIRE(cfg);
    EESIM_REQUIRE(written);
    if (capacity > 0)
        EESIM_REQUIRE(rows);
    *written = 0;
    return guarded([&]
    {
        const auto &c = cfg->cfg;
        c.validate();
        const double v = c.sweep_values.front();
        for (std::size_t t = 0; t < c.trials && *written < capacity; ++t)
        {
            const auto sc = eesim::Scenario::build(eesim::params_at(c, v), eesim::draw_placement(c, t));
            const auto rep = eesim::run_algorithm1(sc, c.algo(eesim::Method::Proposed));
            eesim_oracle_row row{};
            row.trial = t;
            row.sweep_value = v;
            row.proposed_ee = rep.final_ee;
            eesim::OracleResult o;
            if (sc.slots <= 3)
            {
                o = eesim::brute_force_oracle(sc, power_resolution, step_m);
                row.joint = 1;
            }
            else
                o = eesim::power_grid_oracle(sc, rep.final_trajectory, power_resolution);
            row.oracle_ee = o.ee;
            row.evaluated = o.evaluated;
            row.oracle_exact = o.exact ? 1 : 0;
            rows[(*written)++] = row;
        }
    });
}

} // extern "C"
