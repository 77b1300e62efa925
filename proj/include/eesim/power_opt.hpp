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

#ifndef EESIM_POWER_OPT_HPP
#define EESIM_POWER_OPT_HPP

// Power step for a fixed trajectory: quadratic transform of sum_n P_sum / R_sum
// with the lambda surrogate of the direct-link rate, solved by an augmented
// Lagrangian loop. Threshold constraints are written in Watts, e.g.
// Gamma (rho1 + 1 / s) - rho2 <= 0, so that penalties share one scale.

#include "eesim/convex_kernel.hpp"
#include "eesim/scenario.hpp"

#include <vector>

namespace eesim
{
    struct QuadState
    {
        std::vector<double> varpi;
        std::vector<double> lambda;
    };

    struct ChiCoefficients
    {
        std::vector<double> chi; // gamma_min - relay SINR; may be negative
    };

    struct AlmState
    {
        std::vector<double> mult_sic;  // UAV decoding threshold
        std::vector<double> mult_dest; // Destination threshold
        std::vector<double> mult_peak; // Per-slot peak power
        std::vector<double> mult_avg;  // Average power, replicated per slot
        std::vector<double> mult_eh;   // Harvested power sign
        double penalty = 1.0;

        static AlmState zeros(std::size_t slots);
    };

    ChiCoefficients chi(const Scenario &sc, const TrajectoryGrid &traj);

    // 1 / (2 P_sum R_sum), which makes varpi A^2 + 1 / (4 varpi B^2) equal A / B
    std::vector<double> varpi_update(const std::vector<LinkMetrics> &metrics);

    double lambda_update(const NomaPower &p, double h_sd, const SlotRadioParams &sp);

    // Rate surrogate; equals R_sum at lambda = lambda_update(p) and never exceeds it
    double rhat_sum(const NomaPower &p, const SlotGains &gains, const SlotRadioParams &sp, double lambda,
                    const MetricsOptions &opts = {});

    // Throws SurrogateCollapse when some rate surrogate is not positive
    double alm_objective(const std::vector<NomaPower> &powers, const QuadState &quad, const AlmState &alm,
                         const Scenario &sc, const TrajectoryGrid &traj);

    struct PowerOptions
    {
        double tol = 1e-3;          // Largest per-slot relative change of P_sum / R_sum
        double violation_tol = 1e-8; // Threshold constraints in Watts
        std::size_t max_iterations = 80;
        double max_penalty = 1e8;
        SolveOptions kernel;
    };

    struct PowerSolution
    {
        std::vector<NomaPower> powers;
        double ee = 0.0; // Mean per-slot EE, Mbit/J
        ConstraintResiduals residuals;
        std::vector<double> objective_trace; // sum_n P_sum / R_sum after each outer iteration
        std::size_t iterations = 0;
        bool converged = false;
        bool damped = false; // Divergence guard fired
        bool feasible = false;
    };

    // Throws InfeasibleProblem naming the threshold that no admissible power meets
    void check_power_feasibility(const Scenario &sc, const TrajectoryGrid &traj);

    PowerSolution solve_power_alm(const TrajectoryGrid &traj, const Scenario &sc, const std::vector<NomaPower> &powers0,
                                  const PowerOptions &opts = {});

    enum class ParametricMode
    {
        PerSlot,   // q_n = R_n / P_n, maximizes sum_n (R_n - q_n P_n)
        Aggregate, // q = sum R / sum P, maximizes sum R - q sum P
    };

    // Dinkelbach-style power allocation with hard constraints in the kernel
    PowerSolution solve_power_parametric(const TrajectoryGrid &traj, const Scenario &sc,
                                         const std::vector<NomaPower> &powers0, ParametricMode mode,
                                         const PowerOptions &opts = {});

    // Nudges a near-feasible allocation onto the constraint set
    std::vector<NomaPower> restore_feasibility(const Scenario &sc, const TrajectoryGrid &traj,
                                               std::vector<NomaPower> powers);
}

#endif
