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

#ifndef EESIM_EXPERIMENTS_HPP
#define EESIM_EXPERIMENTS_HPP

#include "eesim/orchestrator.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace eesim
{
    enum class SweepKind
    {
        PSum,        // Average network power budget [W]
        MissionTime, // [s]
        RhsElements, // Surface element count
        Absorption,  // Molecular absorption [1/m]
    };

    const char *sweep_name(SweepKind k) noexcept;          // "p_sum", "time", "elements", "absorption"
    SweepKind parse_sweep(const std::string &name);          // ConfigError on unknown names
    std::vector<double> default_sweep_values(SweepKind k);

    struct ExperimentConfig
    {
        ScenarioParams scenario;
        Placement placement; // Source and destination are redrawn per trial; UAV endpoints are kept
        SweepKind sweep = SweepKind::PSum;
        std::vector<double> sweep_values = default_sweep_values(SweepKind::PSum);
        std::size_t trials = 1;
        std::vector<Method> methods{Method::Proposed};
        std::uint64_t seed = 1;
        std::string output_path = "results.csv";
        std::size_t workers = 1;
        bool record_timing = false; // Off keeps the CSV byte-identical across runs
        double eps1 = 1e-3;
        double eps2 = 1e-3;
        std::size_t i_max = 20;

        // Throws ConfigError with the offending field path
        void validate() const;
        AlgoConfig algo(Method m) const;
        bool operator==(const ExperimentConfig &) const = default;
    };

    // Missing fields keep their defaults; unknown fields are rejected
    ExperimentConfig parse_config(const std::string &json_text);
    ExperimentConfig load_config(const std::string &path);
    std::string config_to_json(const ExperimentConfig &cfg);
    void save_config(const ExperimentConfig &cfg, const std::string &path);

    // Scenario parameters at one sweep value. The power budget maps to
    // P_peak = P_max = (p_sum - P_c + P_floor) / 2.
    ScenarioParams params_at(const ExperimentConfig &cfg, double sweep_value);

    // SplitMix64 step; also used to derive per-trial seeds
    std::uint64_t splitmix64(std::uint64_t &state);
    std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

    // Source and destination uniform in the square, shared by every sweep value and method
    Placement draw_placement(const ExperimentConfig &cfg, std::size_t trial);

    struct SweepRecord
    {
        std::string sweep;
        double sweep_value = 0.0;
        std::string method;
        std::size_t trial = 0;
        std::uint64_t seed = 0;
        double final_ee = 0.0; // Mbit/J; NaN when the run failed
        bool converged = false;
        double wall_time_s = 0.0;
        std::string error; // Not serialized

        bool operator==(const SweepRecord &) const = default;
    };

    using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

    // Records ordered by (value, method, trial) regardless of cfg.workers
    std::vector<SweepRecord> run_sweep(const ExperimentConfig &cfg, const ProgressFn &progress = {});

    inline constexpr const char *csv_header =
        "sweep,sweep_value,method,trial,seed,final_ee_mbits_per_joule,converged,wall_time_s";

    std::string records_to_csv(const std::vector<SweepRecord> &records);
    std::vector<SweepRecord> records_from_csv(const std::string &text);

    // CSV at `path` plus the resolved config next to it (extension .json)
    void write_results(const std::vector<SweepRecord> &records, const std::string &path, const ExperimentConfig &cfg);
    std::vector<SweepRecord> read_results(const std::string &path);
    std::string sibling_config_path(const std::string &csv_path);
}

#endif
