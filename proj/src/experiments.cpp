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

#include "eesim/experiments.hpp"
#include "eesim/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

namespace eesim
{
    using nlohmann::json;

    const char *sweep_name(SweepKind k) noexcept
    {
        switch (k)
        {
        case SweepKind::PSum: return "p_sum";
        case SweepKind::MissionTime: return "time";
        case SweepKind::RhsElements: return "elements";
        case SweepKind::Absorption: return "absorption";
        }
        return "unknown";
    }

    SweepKind parse_sweep(const std::string &name)
    {
        for (SweepKind k : {SweepKind::PSum, SweepKind::MissionTime, SweepKind::RhsElements, SweepKind::Absorption})
            if (name == sweep_name(k))
                return k;
        fail(ErrorCode::ConfigError, "unknown sweep \"" + name + "\" (expected p_sum, time, elements or absorption)");
    }

    std::vector<double> default_sweep_values(SweepKind k)
    {
        switch (k)
        {
        case SweepKind::PSum: return {1, 2, 3, 4, 5, 6, 7, 8};
        case SweepKind::MissionTime: return {5, 10, 15, 20, 25, 30, 35, 40};
        case SweepKind::RhsElements: return {4, 8, 12, 16, 20};
        case SweepKind::Absorption: return {0.005, 0.01, 0.015, 0.02, 0.025};
        }
        return {};
    }

    ScenarioParams params_at(const ExperimentConfig &cfg, double v)
    {
        ScenarioParams p = cfg.scenario;
        switch (cfg.sweep)
        {
        case SweepKind::PSum:
        {
            const double budget = 0.5 * (v - p.circuit_power_w + p.eh_floor_w);
            if (!(budget > 0.0))
                fail(ErrorCode::ConfigError, "power budget " + std::to_string(v) + " W does not exceed the circuit power");
            p.peak_power_w = budget;
            p.max_avg_power_w = budget;
            break;
        }
        case SweepKind::MissionTime:
            p.mission_time_s = v;
            break;
        case SweepKind::RhsElements:
            if (!(v >= 1.0) || v != std::round(v))
                fail(ErrorCode::ConfigError, "element count must be a positive integer");
            p.rhs_elements = static_cast<std::size_t>(v);
            break;
        case SweepKind::Absorption:
            p.absorption_coeff = v;
            break;
        }
        return p;
    }

    AlgoConfig ExperimentConfig::algo(Method m) const
    {
        AlgoConfig a;
        a.eps1 = eps1;
        a.eps2 = eps2;
        a.i_max = i_max;
        a.seed = seed;
        a.method = m;
        return a;
    }

    void ExperimentConfig::validate() const
    {
        auto bad = [](const std::string &path, const std::string &why) { fail(ErrorCode::ConfigError, path + ": " + why); };
        try
        {
            scenario.validate();
        }
        catch (const Error &e)
        {
            bad("scenario", e.detail());
        }
        if (sweep_values.empty())
            bad("experiment.sweep_values", "must not be empty");
        for (std::size_t i = 0; i < sweep_values.size(); ++i)
        {
            const std::string path = "experiment.sweep_values[" + std::to_string(i) + "]";
            if (!std::isfinite(sweep_values[i]))
                bad(path, "must be finite");
            if (i > 0 && !(sweep_values[i] > sweep_values[i - 1]))
                bad(path, "values must be strictly increasing");
            try
            {
                params_at(*this, sweep_values[i]).validate();
            }
            catch (const Error &e)
            {
                bad(path, e.detail());
            }
        }
        if (trials == 0)
            bad("experiment.trials", "must be at least 1");
        if (methods.empty())
            bad("experiment.methods", "must not be empty");
        if (workers == 0)
            bad("experiment.workers", "must be at least 1");
        if (output_path.empty())
            bad("experiment.output", "must not be empty");
        if (!(eps1 > 0.0))
            bad("algorithm.eps1", "must be positive");
        if (!(eps2 > 0.0))
            bad("algorithm.eps2", "must be positive");
        if (i_max == 0)
            bad("algorithm.i_max", "must be at least 1");
    }

    // ---- JSON ---------------------------------------------------------------

    namespace
    {
        class Section
        {
        public:
            Section(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    fail(ErrorCode::ConfigError, path_ + ": expected an object");
            }

            void get(const char *key, double &out) { read(key, out, "a number", [](const json &v) { return v.is_number(); }); }
            void get(const char *key, bool &out) { read(key, out, "a boolean", [](const json &v) { return v.is_boolean(); }); }
            void get(const char *key, std::string &out) { read(key, out, "a string", [](const json &v) { return v.is_string(); }); }
            template <class U>
                requires std::is_unsigned_v<U> && (!std::is_same_v<U, bool>)
            void get(const char *key, U &out)
            {
                read(key, out, "a nonnegative integer", [](const json &v) { return v.is_number_unsigned(); });
            }

            const json *child(const char *key)
            {
                seen_.insert(key);
                auto it = j_.find(key);
                return it == j_.end() ? nullptr : &*it;
            }

            std::string path(const char *key) const { return path_.empty() ? key : path_ + "." + key; }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!seen_.count(it.key()))
                        fail(ErrorCode::ConfigError, path(it.key().c_str()) + ": unknown field");
            }

        private:
            template <class T, class Pred>
            void read(const char *key, T &out, const char *expected, Pred ok)
            {
                seen_.insert(key);
                auto it = j_.find(key);
                if (it == j_.end())
                    return;
                if (!ok(*it))
                    fail(ErrorCode::ConfigError, path(key) + ": expected " + expected);
                out = it->template get<T>();
            }

            const json &j_;
            std::string path_;
            std::set<std::string> seen_;
        };

        void read_scenario(Section &s, ScenarioParams &p)
        {
            s.get("area_side_m", p.area_side_m);
            s.get("carrier_freq_hz", p.carrier_freq_hz);
            s.get("bandwidth_hz", p.bandwidth_hz);
            s.get("absorption_coeff", p.absorption_coeff);
            s.get("rhs_absorption", p.rhs_absorption);
            s.get("rhs_phase", p.rhs_phase);
            s.get("rhs_elements", p.rhs_elements);
            s.get("rhs_layout", p.rhs_layout);
            s.get("max_speed_mps", p.max_speed_mps);
            s.get("slot_duration_s", p.slot_duration_s);
            s.get("mission_time_s", p.mission_time_s);
            s.get("slots", p.slots);
            s.get("noise_psd_dbm_hz", p.noise_psd_dbm_hz);
            s.get("noise_figure_db", p.noise_figure_db);
            s.get("source_altitude_m", p.source_altitude_m);
            s.get("uav_altitude_m", p.uav_altitude_m);
            s.get("dest_altitude_m", p.dest_altitude_m);
            s.get("peak_power_w", p.peak_power_w);
            s.get("max_avg_power_w", p.max_avg_power_w);
            s.get("circuit_power_w", p.circuit_power_w);
            s.get("eh_efficiency", p.eh_efficiency);
            s.get("split_id", p.split_id);
            s.get("split_eh", p.split_eh);
            s.get("episode1_fraction", p.episode1_fraction);
            s.get("gamma_min_db", p.gamma_min_db);
            s.get("sic_min_db", p.sic_min_db);
            s.get("eh_floor_w", p.eh_floor_w);
            s.get("eh_scaled_by_tx_power", p.eh_scaled_by_tx_power);
            s.finish();
        }

        json write_scenario(const ScenarioParams &p)
        {
            return json{
                {"area_side_m", p.area_side_m},
                {"carrier_freq_hz", p.carrier_freq_hz},
                {"bandwidth_hz", p.bandwidth_hz},
                {"absorption_coeff", p.absorption_coeff},
                {"rhs_absorption", p.rhs_absorption},
                {"rhs_phase", p.rhs_phase},
                {"rhs_elements", p.rhs_elements},
                {"rhs_layout", p.rhs_layout},
                {"max_speed_mps", p.max_speed_mps},
                {"slot_duration_s", p.slot_duration_s},
                {"mission_time_s", p.mission_time_s},
                {"slots", p.slots},
                {"noise_psd_dbm_hz", p.noise_psd_dbm_hz},
                {"noise_figure_db", p.noise_figure_db},
                {"source_altitude_m", p.source_altitude_m},
                {"uav_altitude_m", p.uav_altitude_m},
                {"dest_altitude_m", p.dest_altitude_m},
                {"peak_power_w", p.peak_power_w},
                {"max_avg_power_w", p.max_avg_power_w},
                {"circuit_power_w", p.circuit_power_w},
                {"eh_efficiency", p.eh_efficiency},
                {"split_id", p.split_id},
                {"split_eh", p.split_eh},
                {"episode1_fraction", p.episode1_fraction},
                {"gamma_min_db", p.gamma_min_db},
                {"sic_min_db", p.sic_min_db},
                {"eh_floor_w", p.eh_floor_w},
                {"eh_scaled_by_tx_power", p.eh_scaled_by_tx_power},
            };
        }

        void read_placement(Section &s, Placement &p)
        {
            s.get("source_x", p.source_x);
            s.get("source_y", p.source_y);
            s.get("dest_x", p.dest_x);
            s.get("dest_y", p.dest_y);
            s.get("uav_start_x", p.uav_start_x);
            s.get("uav_start_y", p.uav_start_y);
            s.get("uav_end_x", p.uav_end_x);
            s.get("uav_end_y", p.uav_end_y);
            s.finish();
        }

        json write_placement(const Placement &p)
        {
            return json{
                {"source_x", p.source_x}, {"source_y", p.source_y},
                {"dest_x", p.dest_x}, {"dest_y", p.dest_y},
                {"uav_start_x", p.uav_start_x}, {"uav_start_y", p.uav_start_y},
                {"uav_end_x", p.uav_end_x}, {"uav_end_y", p.uav_end_y},
            };
        }
    }

    ExperimentConfig parse_config(const std::string &text)
    {
        json root;
        try
        {
            root = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            fail(ErrorCode::ConfigError, std::string("(root): ") + e.what());
        }

        ExperimentConfig cfg;
        Section top(root, "");
        if (const json *j = top.child("scenario"))
        {
            Section s(*j, "scenario");
            read_scenario(s, cfg.scenario);
        }
        if (const json *j = top.child("placement"))
        {
            Section s(*j, "placement");
            read_placement(s, cfg.placement);
        }
        if (const json *j = top.child("experiment"))
        {
            Section s(*j, "experiment");
            std::string sweep;
            s.get("sweep", sweep);
            if (!sweep.empty())
            {
                try
                {
                    cfg.sweep = parse_sweep(sweep);
                }
                catch (const Error &e)
                {
                    fail(ErrorCode::ConfigError, "experiment.sweep: " + e.detail());
                }
                cfg.sweep_values = default_sweep_values(cfg.sweep);
            }
            if (const json *v = s.child("sweep_values"))
            {
                if (!v->is_array())
                    fail(ErrorCode::ConfigError, "experiment.sweep_values: expected an array of numbers");
                cfg.sweep_values.clear();
                for (std::size_t i = 0; i < v->size(); ++i)
                {
                    if (!(*v)[i].is_number())
                        fail(ErrorCode::ConfigError, "experiment.sweep_values[" + std::to_string(i) + "]: expected a number");
                    cfg.sweep_values.push_back((*v)[i].get<double>());
                }
            }
            s.get("trials", cfg.trials);
            if (const json *v = s.child("methods"))
            {
                if (!v->is_array())
                    fail(ErrorCode::ConfigError, "experiment.methods: expected an array of strings");
                cfg.methods.clear();
                for (std::size_t i = 0; i < v->size(); ++i)
                {
                    const std::string path = "experiment.methods[" + std::to_string(i) + "]";
                    if (!(*v)[i].is_string())
                        fail(ErrorCode::ConfigError, path + ": expected a string");
                    try
                    {
                        cfg.methods.push_back(parse_method((*v)[i].get<std::string>()));
                    }
                    catch (const Error &e)
                    {
                        fail(ErrorCode::ConfigError, path + ": " + e.detail());
                    }
                }
            }
            s.get("seed", cfg.seed);
            s.get("output", cfg.output_path);
            s.get("workers", cfg.workers);
            s.get("record_timing", cfg.record_timing);
            s.finish();
        }
        if (const json *j = top.child("algorithm"))
        {
            Section s(*j, "algorithm");
            s.get("eps1", cfg.eps1);
            s.get("eps2", cfg.eps2);
            s.get("i_max", cfg.i_max);
            s.finish();
        }
        top.finish();
        cfg.validate();
        return cfg;
    }

    namespace
    {
        std::string read_file(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                fail(ErrorCode::IoError, "cannot open " + path);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        void write_file(const std::string &path, const std::string &data)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                fail(ErrorCode::IoError, "cannot write " + path);
            out << data;
            out.flush();
            if (!out)
                fail(ErrorCode::IoError, "write failed for " + path);
        }
    }

    ExperimentConfig load_config(const std::string &path)
    {
        std::string text;
        try
        {
            text = read_file(path);
        }
        catch (const Error &e)
        {
            fail(ErrorCode::ConfigError, e.detail());
        }
        return parse_config(text);
    }

    std::string config_to_json(const ExperimentConfig &cfg)
    {
        json methods = json::array();
        for (Method m : cfg.methods)
            methods.push_back(method_name(m));
        json root{
            {"scenario", write_scenario(cfg.scenario)},
            {"placement", write_placement(cfg.placement)},
            {"experiment",
             {
                 {"sweep", sweep_name(cfg.sweep)},
                 {"sweep_values", cfg.sweep_values},
                 {"trials", cfg.trials},
                 {"methods", methods},
                 {"seed", cfg.seed},
                 {"output", cfg.output_path},
                 {"workers", cfg.workers},
                 {"record_timing", cfg.record_timing},
             }},
            {"algorithm", {{"eps1", cfg.eps1}, {"eps2", cfg.eps2}, {"i_max", cfg.i_max}}},
        };
        return root.dump(2) + "\n";
    }

    void save_config(const ExperimentConfig &cfg, const std::string &path) { write_file(path, config_to_json(cfg)); }

    // ---- seeding ------------------------------------------------------------

    std::uint64_t splitmix64(std::uint64_t &state)
    {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial)
    {
        std::uint64_t state = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial);
        return splitmix64(state);
    }

    Placement draw_placement(const ExperimentConfig &cfg, std::size_t trial)
    {
        std::mt19937_64 rng(trial_seed(cfg.seed, trial));
        std::uniform_real_distribution<double> U(0.0, cfg.scenario.area_side_m);
        Placement p = cfg.placement;
        p.source_x = U(rng);
        p.source_y = U(rng);
        do
        {
            p.dest_x = U(rng);
            p.dest_y = U(rng);
        } while (p.dest_x == p.source_x && p.dest_y == p.source_y);
        return p;
    }

    // ---- sweep --------------------------------------------------------------

    std::vector<SweepRecord> run_sweep(const ExperimentConfig &cfg, const ProgressFn &progress)
    {
        cfg.validate();
        const std::size_t V = cfg.sweep_values.size(), M = cfg.methods.size(), T = cfg.trials;
        const std::size_t total = V * M * T;
        std::vector<SweepRecord> out(total);

        std::vector<Placement> placements(T);
        for (std::size_t t = 0; t < T; ++t)
            placements[t] = draw_placement(cfg, t);

        std::atomic<std::size_t> next{0};
        std::size_t done = 0;
        std::mutex mu;

        auto job = [&](std::size_t idx)
        {
            const std::size_t v = idx / (M * T), m = (idx / T) % M, t = idx % T;
            SweepRecord &r = out[idx];
            r.sweep = sweep_name(cfg.sweep);
            r.sweep_value = cfg.sweep_values[v];
            r.method = method_name(cfg.methods[m]);
            r.trial = t;
            r.seed = trial_seed(cfg.seed, t);
            try
            {
                const Scenario sc = Scenario::build(params_at(cfg, r.sweep_value), placements[t]);
                const RunReport rep = run_baseline(sc, cfg.methods[m], cfg.algo(cfg.methods[m]));
                r.final_ee = rep.final_ee;
                r.converged = rep.converged;
                if (cfg.record_timing)
                    r.wall_time_s = rep.wall_time_s;
            }
            catch (const std::exception &e)
            {
                r.final_ee = std::numeric_limits<double>::quiet_NaN();
                r.converged = false;
                r.error = e.what();
            }
        };

        auto worker = [&]
        {
            for (std::size_t idx = next++; idx < total; idx = next++)
            {
                job(idx);
                if (progress)
                {
                    std::lock_guard<std::mutex> lock(mu);
                    progress(++done, total);
                }
            }
        };

        const std::size_t W = std::min(cfg.workers, std::max<std::size_t>(total, 1));
        if (W <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < W; ++w)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }
        return out;
    }

    // ---- CSV ----------------------------------------------------------------

    namespace
    {
        std::string number(double v)
        {
            if (std::isnan(v))
                return "nan";
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, res.ptr);
        }

        std::string quoted(const std::string &s)
        {
            if (s.find_first_of(",\"\r\n") == std::string::npos)
                return s;
            std::string q = "\"";
            for (char c : s)
            {
                if (c == '"')
                    q += '"';
                q += c;
            }
            return q + "\"";
        }

        std::vector<std::vector<std::string>> parse_csv(const std::string &text)
        {
            std::vector<std::vector<std::string>> rows;
            std::vector<std::string> row;
            std::string field;
            bool in_quotes = false, any = false;
            for (std::size_t i = 0; i < text.size(); ++i)
            {
                const char c = text[i];
                if (in_quotes)
                {
                    if (c == '"' && i + 1 < text.size() && text[i + 1] == '"')
                    {
                        field += '"';
                        ++i;
                    }
                    else if (c == '"')
                        in_quotes = false;
                    else
                        field += c;
                    continue;
                }
                any = true;
                if (c == '"')
                    in_quotes = true;
                else if (c == ',')
                {
                    row.push_back(std::move(field));
                    field.clear();
                }
                else if (c == '\n' || c == '\r')
                {
                    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                        ++i;
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                    any = false;
                }
                else
                    field += c;
            }
            if (in_quotes)
                fail(ErrorCode::IoError, "unterminated quoted CSV field");
            if (any || !field.empty())
            {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            return rows;
        }

        double parse_double(const std::string &s, const std::string &what)
        {
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                fail(ErrorCode::IoError, "bad " + what + " \"" + s + "\"");
            return v;
        }

        std::uint64_t parse_uint(const std::string &s, const std::string &what)
        {
            std::uint64_t v = 0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                fail(ErrorCode::IoError, "bad " + what + " \"" + s + "\"");
            return v;
        }
    }

    std::string records_to_csv(const std::vector<SweepRecord> &records)
    {
        std::string out = std::string(csv_header) + "\n";
        for (const auto &r : records)
        {
            out += quoted(r.sweep) + ',' + number(r.sweep_value) + ',' + quoted(r.method) + ',' + std::to_string(r.trial) + ',' +
                   std::to_string(r.seed) + ',' + number(r.final_ee) + ',' + (r.converged ? "true" : "false") + ',' +
                   number(r.wall_time_s) + "\n";
        }
        return out;
    }

    std::vector<SweepRecord> records_from_csv(const std::string &text)
    {
        const auto rows = parse_csv(text);
        if (rows.empty())
            fail(ErrorCode::IoError, "CSV has no header");
        std::string header;
        for (std::size_t i = 0; i < rows[0].size(); ++i)
            header += (i ? "," : "") + rows[0][i];
        if (header != csv_header)
            fail(ErrorCode::IoError, "unexpected CSV header \"" + header + "\"");

        std::vector<SweepRecord> out;
        for (std::size_t i = 1; i < rows.size(); ++i)
        {
            const auto &f = rows[i];
            const std::string line = "line " + std::to_string(i + 1);
            if (f.size() != 8)
                fail(ErrorCode::IoError, line + ": expected 8 fields");
            SweepRecord r;
            r.sweep = f[0];
            r.sweep_value = parse_double(f[1], line + " sweep_value");
            r.method = f[2];
            r.trial = static_cast<std::size_t>(parse_uint(f[3], line + " trial"));
            r.seed = parse_uint(f[4], line + " seed");
            r.final_ee = parse_double(f[5], line + " final_ee");
            if (f[6] != "true" && f[6] != "false")
                fail(ErrorCode::IoError, line + ": converged must be true or false");
            r.converged = f[6] == "true";
            r.wall_time_s = parse_double(f[7], line + " wall_time_s");
            out.push_back(std::move(r));
        }
        return out;
    }

    std::string sibling_config_path(const std::string &csv_path)
    {
        const auto slash = csv_path.find_last_of('/');
        const auto dot = csv_path.find_last_of('.');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
            return csv_path.substr(0, dot) + ".json";
        return csv_path + ".json";
    }

    void write_results(const std::vector<SweepRecord> &records, const std::string &path, const ExperimentConfig &cfg)
    {
        write_file(path, records_to_csv(records));
        save_config(cfg, sibling_config_path(path));
    }

    std::vector<SweepRecord> read_results(const std::string &path) { return records_from_csv(read_file(path)); }
}
