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

#ifndef EESIM_TRAJECTORY_OPT_HPP
#define EESIM_TRAJECTORY_OPT_HPP

// Trajectory step: sum-of-ratios parametric transform with an inner SCA loop
// (tangent minorants of the rate and harvest terms, exact convex gain-profile
// constraints) and an outer damped Newton update of (alpha, beta).

#include "eesim/convex_kernel.hpp"
#include "eesim/scenario.hpp"

#include <vector>

namespace eesim
{
    struct FractionalParams
    {
        std::vector<double> alpha;
        std::vector<double> beta;

        void validate() const;

        // alpha = 1 / P_sum, beta = R_sum / P_sum on the given plan
        static FractionalParams at(const Scenario &sc, const TrajectoryGrid &traj, const std::vector<NomaPower> &powers);
    };

    // Expansion point and slack values of one SCA subproblem
    struct SlackState
    {
        std::vector<double> a, b, c, d;
        std::vector<double> expansion_c, expansion_d;
        std::vector<Position3D> expansion_u;

        // Exactly feasible expansion: c = ln phi_s(u), a = e^c, same for d / b
        static SlackState expand(const Scenario &sc, const TrajectoryGrid &traj);
    };

    struct DerivedConstants
    {
        double c1 = 0.0; // eta M a^2 split_eh beta0^2
        double c2 = 0.0; // noise_uav / (split_id beta0^2)

        static DerivedConstants of(const Scenario &sc, std::size_t slot);
    };

    struct NewtonState
    {
        FractionalParams params;
        Vector theta;
        Matrix jacobian;
        double step_scale = 1.0;
        double shrink = 0.5;
        double armijo = 0.3;
        std::size_t max_backtracks = 50;
    };

    // sum_n alpha_n (R_sum[n] - beta_n P_sum[n])
    double subtractive_objective(const TrajectoryGrid &traj, const FractionalParams &fp,
                                 const std::vector<NomaPower> &powers, const Scenario &sc);

    // e^{c_k} (1 + c - c_k) <= e^c
    double taylor_exp_lower_bound(double c, double c_k);

    // Tangent plane of |u - anchor|^2 e^{xi |u - anchor|} at u_k
    double taylor_distance_lower_bound(const Position3D &u, const Position3D &u_k, const Position3D &anchor, double xi);

    struct P5Problem
    {
        ConvexProblem problem;
        Vector x0;
        std::size_t slots = 0;
        std::vector<std::size_t> free_points; // Trajectory indices that are variables
        double objective_scale = 1.0;         // Kernel objective = -surrogate / scale
        TrajectoryGrid base;

        std::size_t index_a(std::size_t n) const { return 2 * free_points.size() + n; }
        std::size_t index_b(std::size_t n) const { return 2 * free_points.size() + slots + n; }
        std::size_t index_c(std::size_t n) const { return 2 * free_points.size() + 2 * slots + n; }
        std::size_t index_d(std::size_t n) const { return 2 * free_points.size() + 3 * slots + n; }

        TrajectoryGrid decode(const Vector &x) const;
        SlackState decode_slack(const Vector &x, const SlackState &expansion) const;
        double surrogate(const Vector &x) const; // Lower bound of the subtractive objective
    };

    P5Problem build_p5(const TrajectoryGrid &traj_k, const SlackState &slack_k, const FractionalParams &fp,
                       const std::vector<NomaPower> &powers, const Scenario &sc);

    struct ScaOptions
    {
        double tol = 1e-3; // Relative to sum_n alpha_n R_sum[n]
        std::size_t max_iterations = 40;
        SolveOptions kernel;
    };

    struct ScaResult
    {
        TrajectoryGrid traj;
        SlackState slack;
        std::vector<double> objective_trace;
        std::size_t iterations = 0;
        bool converged = false;
    };

    ScaResult solve_inner_sca(const TrajectoryGrid &traj0, const FractionalParams &fp, const std::vector<NomaPower> &powers,
                              const Scenario &sc, const ScaOptions &opts = {});

    // [R_sum[n] - beta_n P_sum[n]; 1 - alpha_n P_sum[n]]
    Vector theta_residual(const TrajectoryGrid &traj, const FractionalParams &fp, const std::vector<NomaPower> &powers,
                          const Scenario &sc);

    NewtonState damped_newton_step(const NewtonState &state, const TrajectoryGrid &traj,
                                   const std::vector<NomaPower> &powers, const Scenario &sc);

    enum class RatioMode
    {
        SumOfRatios, // Per-slot (alpha, beta) with damped Newton
        Aggregate,   // alpha = 1, beta = q shared by all slots, Dinkelbach update of q
    };

    struct TrajectoryOptions
    {
        std::size_t i_max = 30;
        double theta_tol = 1e-3;
        RatioMode mode = RatioMode::SumOfRatios;
        ScaOptions sca;
    };

    struct TrajectoryResult
    {
        TrajectoryGrid traj;
        FractionalParams params;   // Used for the last inner solve
        std::vector<double> theta_trace; // Infinity norm after each inner solve
        std::size_t iterations = 0;
        std::size_t sca_iterations = 0;
        bool converged = false;
    };

    TrajectoryResult optimize_trajectory(const TrajectoryGrid &traj0, const std::vector<NomaPower> &powers,
                                         const Scenario &sc, const TrajectoryOptions &opts = {});
}

#endif
