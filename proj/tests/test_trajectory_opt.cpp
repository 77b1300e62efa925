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

#include "doctest.h"
#include "oracle/frozen_values.hpp"
#include "test_support.hpp"

#include "eesim/errors.hpp"
#include "eesim/orchestrator.hpp"
#include "eesim/trajectory_opt.hpp"

#include <random>

using namespace eesim;
using namespace testing_support;

namespace
{
    FractionalParams reference_params() { return {{0.9, 1.1}, {1e-6, 2e-6}}; }

    Scenario pinned_single_slot()
    {
        ScenarioParams p;
        p.slots = 1;
        p.mission_time_s = 1.0;
        Placement pl;
        pl.uav_start_x = pl.uav_end_x = 12.0;
        pl.uav_start_y = pl.uav_end_y = 9.0;
        return Scenario::build(p, pl);
    }
}

TEST_CASE("subtractive objective")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();

    const auto fp = FractionalParams::at(sc, t, p);
    CHECK(std::abs(subtractive_objective(t, fp, p, sc)) <= 1e-18);

    const auto pm = evaluate_plan(sc, t, p);
    FractionalParams unit{{1.0, 1.0}, {0.0, 0.0}};
    CHECK(subtractive_objective(t, unit, p, sc) == doctest::Approx(pm.slots[0].sum_rate + pm.slots[1].sum_rate).epsilon(1e-14));

    CHECK(rel_close(subtractive_objective(t, reference_params(), p, sc), frozen::ref_subtractive, 1e-9));
    CHECK_THROWS_AS(subtractive_objective(t, FractionalParams{{1.0}, {0.0}}, p, sc), Error);
}

TEST_CASE("exponential tangent")
{
    CHECK(taylor_exp_lower_bound(0.7, 0.7) == std::exp(0.7));
    CHECK(taylor_exp_lower_bound(1.0, 0.0) == 2.0);
    CHECK(taylor_exp_lower_bound(1.0, 0.0) <= std::exp(1.0));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-20.0, 20.0);
    double worst = 1.0;
    for (int i = 0; i < 10000; ++i)
    {
        const double c = U(rng), ck = U(rng);
        const double margin = (std::exp(c) - taylor_exp_lower_bound(c, ck)) / std::max(1.0, std::exp(std::max(c, ck)));
        worst = std::min(worst, margin);
    }
    CHECK(worst >= -1e-12);
}

TEST_CASE("distance-profile tangent")
{
    const Position3D s{3, 4, 2}, uk{10, -2, 3};
    const double xi = 0.005;
    CHECK(rel_close(taylor_distance_lower_bound(uk, uk, s, xi), inverse_gain_profile(uk, s, xi), 1e-15));

    // No absorption: tangent of the squared distance
    const Position3D u{11, -1.5, 3};
    const Position3D d = uk - s;
    CHECK(taylor_distance_lower_bound(u, uk, s, 0.0) == doctest::Approx(d.dot(d) + 2.0 * d.dot(u - uk)).epsilon(1e-14));

    CHECK_THROWS_AS(taylor_distance_lower_bound(u, s, s, xi), Error);

    // Lower bound inside the per-slot trust region
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> box(0.0, 30.0), unit(-1.0, 1.0), xis(0.0, 0.025);
    const double radius = 0.1; // slot duration times speed
    double worst = 1.0;
    for (int i = 0; i < 10000; ++i)
    {
        const Position3D anchor{box(rng), box(rng), 2.0};
        const Position3D k{box(rng), box(rng), 3.0};
        Position3D step{unit(rng), unit(rng), 0.0};
        step = step * (radius * std::abs(unit(rng)) / std::max(step.norm(), 1e-12));
        const double x = xis(rng);
        worst = std::min(worst, inverse_gain_profile(k + step, anchor, x) - taylor_distance_lower_bound(k + step, k, anchor, x));
    }
    CHECK(worst >= -1e-9);
}

TEST_CASE("sum-of-ratios residual")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();
    const auto pm = evaluate_plan(sc, t, p);

    const Vector zero = theta_residual(t, FractionalParams::at(sc, t, p), p, sc);
    CHECK(zero.lpNorm<Eigen::Infinity>() <= 1e-15);

    const Vector raw = theta_residual(t, FractionalParams{{0.0, 0.0}, {0.0, 0.0}}, p, sc);
    CHECK(raw[0] == pm.slots[0].sum_rate);
    CHECK(raw[1] == pm.slots[1].sum_rate);
    CHECK(raw[2] == 1.0);
    CHECK(raw[3] == 1.0);

    const Vector ref = theta_residual(t, reference_params(), p, sc);
    for (int i = 0; i < 4; ++i)
        CHECK(rel_close(ref[i], frozen::ref_theta[i], 1e-9));
}

TEST_CASE("damped Newton update")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();

    SUBCASE("fixed point")
    {
        NewtonState ns;
        ns.params = FractionalParams::at(sc, t, p);
        const auto out = damped_newton_step(ns, t, p, sc);
        CHECK(out.params.alpha == ns.params.alpha);
        CHECK(out.params.beta == ns.params.beta);
    }
    SUBCASE("one full step zeroes the affine residual")
    {
        NewtonState ns;
        ns.params = reference_params();
        const auto out = damped_newton_step(ns, t, p, sc);
        CHECK(out.step_scale == 1.0);
        CHECK(out.theta.lpNorm<Eigen::Infinity>() <= 1e-15);
    }
    SUBCASE("residual decreases, then the step is idle")
    {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> U(0.1, 3.0);
        NewtonState ns;
        ns.params = {{U(rng), U(rng)}, {U(rng) * 1e-5, U(rng) * 1e-5}};
        const double before = theta_residual(t, ns.params, p, sc).norm();
        ns = damped_newton_step(ns, t, p, sc);
        CHECK(ns.theta.norm() <= 0.7 * before);
        const auto idle = damped_newton_step(ns, t, p, sc);
        CHECK(idle.params.alpha == ns.params.alpha);
        CHECK(idle.params.beta == ns.params.beta);
    }
}

TEST_CASE("pinned single slot")
{
    const auto sc = pinned_single_slot();
    const auto t0 = sc.initial_trajectory();
    const auto p = default_powers(sc);
    const auto sca = solve_inner_sca(t0, FractionalParams::at(sc, t0, p), p, sc);
    CHECK(sca.traj.points == t0.points);

    const auto r = optimize_trajectory(t0, p, sc);
    CHECK(r.traj.points == t0.points);
    CHECK(r.iterations == 1);
    CHECK(r.converged);
}

TEST_CASE("SCA subproblem improves on its expansion point")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();
    const auto fp = FractionalParams::at(sc, t, p);

    const auto slack = SlackState::expand(sc, t);
    const auto P = build_p5(t, slack, fp, p, sc);
    REQUIRE(P.free_points.size() == 1);
    const double at_expansion = subtractive_objective(t, fp, p, sc);
    const double tol = 1e-12 * P.objective_scale;

    // Tangent at the expansion; the solver start is nudged inside
    Vector xe = P.x0;
    for (std::size_t n = 0; n < P.slots; ++n)
    {
        xe[P.index_c(n)] = slack.expansion_c[n];
        xe[P.index_d(n)] = slack.expansion_d[n];
    }
    CHECK(std::abs(P.surrogate(xe) - at_expansion) <= tol);
    CHECK(max_violation(P.problem, P.x0) == 0.0);

    const auto sr = solve(P.problem, P.x0);
    const double surrogate_opt = P.surrogate(sr.x_opt);
    CHECK(surrogate_opt >= at_expansion - tol);
    CHECK(subtractive_objective(P.decode(sr.x_opt), fp, p, sc) >= surrogate_opt - 1e-12 * std::abs(surrogate_opt));
    CHECK(validate_trajectory(P.decode(sr.x_opt)).empty());
}

TEST_CASE("SCA stationarity and ascent")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();
    const auto fp = FractionalParams::at(sc, t, p);
    ScaOptions o;
    const auto first = solve_inner_sca(t, fp, p, sc, o);
    for (std::size_t i = 1; i < first.objective_trace.size(); ++i)
        CHECK(first.objective_trace[i] >= first.objective_trace[i - 1] - 1e-9);

    // Restarting at the output barely moves the objective
    const auto again = solve_inner_sca(first.traj, fp, p, sc, o);
    const double scale = std::abs(first.objective_trace.front()) + first.objective_trace.back();
    CHECK(again.objective_trace.back() - first.objective_trace.back() <= o.tol * scale);
}

TEST_CASE("trajectory step against the position grid")
{
    const auto sc = reference_scenario();
    const auto t0 = sc.initial_trajectory();
    const auto p = default_powers(sc);

    const auto r = optimize_trajectory(t0, p, sc);
    CHECK(validate_trajectory(r.traj).empty());
    const double ee = evaluate_plan(sc, r.traj, p).ee_mbits;
    CHECK(ee >= evaluate_plan(sc, t0, p).ee_mbits);

    const auto oracle = position_grid_oracle(sc, p, 0.5);
    REQUIRE(oracle.feasible);
    CHECK(ee >= 0.95 * oracle.ee);
}

TEST_CASE("aggregate ratio mode")
{
    const auto sc = reference_scenario();
    const auto t0 = sc.initial_trajectory();
    const auto p = default_powers(sc);
    TrajectoryOptions o;
    o.mode = RatioMode::Aggregate;
    const auto r = optimize_trajectory(t0, p, sc, o);
    CHECK(r.converged);
    CHECK(validate_trajectory(r.traj).empty());
    for (double b : r.params.beta)
        CHECK(b == r.params.beta.front());
}
