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

#ifndef EESIM_ORCHESTRATOR_HPP
#define EESIM_ORCHESTRATOR_HPP

#include "eesim/power_opt.hpp"
#include "eesim/trajectory_opt.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eesim
{
    enum class Method
    {
        Proposed,
        A,       // Static powers 0.3 / 0.6 of the peak, trajectory optimized
        B,       // OMA half-slots, per-slot Dinkelbach powers, trajectory optimized
        C,       // Straight-line flight, powers optimized
        D,       // Single-element harvester, powers and trajectory optimized
        E,       // Single-element harvester, aggregate-ratio Dinkelbach on both steps
        Initial, // Straight line with the static powers
    };

    const char *method_name(Method m) noexcept;
    // Case-insensitive; throws ConfigError on unknown names
    Method parse_method(const std::string &name);

    struct AlgoConfig
    {
        double eps1 = 1e-3; // Relative EE gain of a trajectory step
        double eps2 = 1e-3; // Relative EE gain of a power step
        std::size_t i_max = 20;
        std::uint64_t seed = 0;
        Method method = Method::Proposed;
        double certify_tol = 1e-4; // Residual bound for accepting a step
        TrajectoryOptions trajectory;
        PowerOptions power;

        void validate() const;
    };

    struct RunReport
    {
        Method method = Method::Proposed;
        std::vector<double> ee_trace; // Mbit/J at the start and after each accepted or rejected half-step
        double final_ee = 0.0;        // Mbit/J
        std::vector<NomaPower> final_powers;
        TrajectoryGrid final_trajectory;
        ConstraintResiduals residuals;
        std::size_t outer_iterations = 0;
        std::size_t rejected_steps = 0;
        bool converged = false;
        double wall_time_s = 0.0;
    };

    // Applies the structural restriction of a method (OMA access, single element)
    Scenario restrict_scenario(const Scenario &sc, Method method);

    // Alternating trajectory / power optimization; a half-step is kept only
    // when it does not lower the EE and its residual stays within certify_tol.
    // Errors are rethrown with the failing stage prefixed.
    RunReport run_algorithm1(const Scenario &sc, const AlgoConfig &cfg);

    // run_algorithm1 on restrict_scenario(sc, method) with the method's steps
    RunReport run_baseline(const Scenario &sc, Method method, const AlgoConfig &cfg = {});

    struct OracleResult
    {
        double ee = 0.0; // Mbit/J; 0 when nothing feasible was found
        TrajectoryGrid traj;
        std::vector<NomaPower> powers;
        std::size_t evaluated = 0;
        bool feasible = false;
        // False when the per-slot optimum broke a slot-coupling constraint
        // (average power, harvest floor) and the search fell back to imposing
        // those per slot; ee is then a feasible lower bound.
        bool exact = true;
    };

    inline constexpr std::size_t oracle_budget = 10'000'000;

    // Per-slot (rho1, rho2) grid with `resolution` points per axis on [0, P_peak]
    OracleResult power_grid_oracle(const Scenario &sc, const TrajectoryGrid &traj, std::size_t resolution = 400);

    // Free UAV points on a square lattice of pitch `step_m`, powers fixed
    OracleResult position_grid_oracle(const Scenario &sc, const std::vector<NomaPower> &powers, double step_m = 0.5);

    // Joint search: position lattice times per-slot power grids. N <= 3.
    OracleResult brute_force_oracle(const Scenario &sc, std::size_t power_resolution = 40, double step_m = 1.0);
}

#endif
