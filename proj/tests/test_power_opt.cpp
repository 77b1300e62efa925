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
#include "eesim/power_opt.hpp"

#include <random>

using namespace eesim;
using namespace testing_support;

namespace
{
    Scenario single_slot(double gamma_db = -70.0)
    {
        ScenarioParams p;
        p.slots = 1;
        p.mission_time_s = 1.0;
        p.gamma_min_db = gamma_db;
        Placement pl;
        pl.uav_start_x = pl.uav_end_x = 9.0;
        pl.uav_start_y = pl.uav_end_y = 8.0;
        return Scenario::build(p, pl);
    }
}

TEST_CASE("relay SINR gap")
{
    auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto c = chi(sc, t).chi;
    REQUIRE(c.size() == 2);
    for (int n = 0; n < 2; ++n)
        CHECK(rel_close(c[n], frozen::ref_chi[n], 1e-9));

    sc.gamma_min.assign(2, 0.0);
    sc.energy.absorption = 1.0;
    sc.eh_floor_w = 0.0;
    auto far = sc;
    far.rhs = RhsLayout::point_array(1, 1e-12);
    for (double v : chi(far, t).chi)
        CHECK(v <= 0.0);
}

TEST_CASE("quadratic transform weights")
{
    LinkMetrics a;
    a.power_sum = 2.0;
    a.sum_rate = 4.0;
    LinkMetrics b;
    b.power_sum = 1.0;
    b.sum_rate = 1.0;
    const auto w = varpi_update({a, b});
    CHECK(w[0] == 1.0 / 16.0);
    CHECK(w[1] == 0.5);

    // varpi A^2 + 1 / (4 varpi B^2) equals A / B at the update
    CHECK(w[0] * 4.0 + 1.0 / (4.0 * w[0] * 16.0) == doctest::Approx(0.5).epsilon(1e-15));

    const auto sc = reference_scenario();
    const auto pm = evaluate_plan(sc, reference_trajectory(sc), reference_powers());
    const auto ref = varpi_update(pm.slots);
    for (int n = 0; n < 2; ++n)
        CHECK(rel_close(ref[n], frozen::ref_varpi[n], 1e-9));
}

TEST_CASE("direct-link auxiliary")
{
    SlotRadioParams sp;
    sp.noise_dest_ep1 = 1.0;
    CHECK(lambda_update({0.3, 0.0}, 0.5, sp) == 0.0);
    CHECK(lambda_update({0.0, 1.0}, 1.0, sp) == 1.0);

    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();
    for (int n = 0; n < 2; ++n)
    {
        const auto g = sc.gains_at(t.points[n]);
        CHECK(rel_close(lambda_update(p[n], g.h_sd, sc.radio[n]), frozen::ref_lambda[n], 1e-9));
    }
}

TEST_CASE("rate surrogate")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();
    const auto opts = sc.metrics_options();
    const auto pm = evaluate_plan(sc, t, p);

    for (int n = 0; n < 2; ++n)
    {
        const auto g = sc.gains_at(t.points[n]);
        const auto &sp = sc.radio[n];
        const double lam = lambda_update(p[n], g.h_sd, sp);
        CHECK(rel_close(rhat_sum(p[n], g, sp, lam, opts), pm.slots[n].sum_rate, 1e-12));
        CHECK(rel_close(rhat_sum(p[n], g, sp, lam / 2.0, opts), frozen::ref_rhat_half_lambda[n], 1e-9));

        // lambda = 0 keeps only the UAV message and the relay copy
        const double own = std::log2(1.0 + sinr_uav_own(p[n], g.h_su, sp));
        const double relay = std::log2(1.0 + pm.slots[n].sinr_dest_relay);
        CHECK(rel_close(rhat_sum(p[n], g, sp, 0.0, opts), own + relay, 1e-9));
    }

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto g = sc.gains_at(t.points[0]);
    int above = 0;
    for (int i = 0; i < 2000; ++i)
    {
        const NomaPower q{U(rng), U(rng)};
        const double lam = U(rng) * 3.0 * lambda_update(q, g.h_sd, sc.radio[0]);
        const double exact = slot_metrics(q, g, sc.radio[0], sc.circuit_power_w, opts).sum_rate;
        if (rhat_sum(q, g, sc.radio[0], lam, opts) > exact * (1.0 + 1e-12))
            ++above;
    }
    CHECK(above == 0);
}

TEST_CASE("augmented Lagrangian objective")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto p = reference_powers();

    QuadState quad{{1e5, 2e5}, {frozen::ref_lambda[0], frozen::ref_lambda[1]}};
    AlmState alm = AlmState::zeros(2);
    alm.mult_sic = {0.1, 0.0};
    alm.mult_dest = {0.0, 0.2};
    alm.mult_peak = {0.3, 0.05};
    alm.mult_avg = {0.0, 0.4};
    alm.mult_eh = {0.01, 0.0};
    alm.penalty = 10.0;
    CHECK(rel_close(alm_objective(p, quad, alm, sc, t), frozen::ref_alm_objective, 1e-10));

    // Inactive constraints with zero multipliers add nothing
    const AlmState zero = AlmState::zeros(2);
    const auto pm = evaluate_plan(sc, t, p);
    double plain = 0.0;
    for (int n = 0; n < 2; ++n)
    {
        const auto g = sc.gains_at(t.points[n]);
        const double R = rhat_sum(p[n], g, sc.radio[n], quad.lambda[n], sc.metrics_options());
        plain += quad.varpi[n] * pm.slots[n].power_sum * pm.slots[n].power_sum + 1.0 / (4.0 * quad.varpi[n] * R * R);
    }
    CHECK(alm_objective(p, quad, zero, sc, t) >= plain * (1.0 - 1e-14));

    // An active violation delta with zero multiplier costs penalty * delta^2 / 2
    auto over = p;
    over[0] = {0.6, 0.6};
    auto pm_over = evaluate_plan(sc, t, over);
    QuadState q2 = quad;
    double base = 0.0;
    for (int n = 0; n < 2; ++n)
    {
        const auto g = sc.gains_at(t.points[n]);
        const double R = rhat_sum(over[n], g, sc.radio[n], q2.lambda[n], sc.metrics_options());
        base += q2.varpi[n] * pm_over.slots[n].power_sum * pm_over.slots[n].power_sum + 1.0 / (4.0 * q2.varpi[n] * R * R);
    }
    AlmState pen = AlmState::zeros(2);
    pen.penalty = 4.0;
    const double delta = 0.2;
    CHECK(alm_objective(over, q2, pen, sc, t) - base == doctest::Approx(pen.penalty * delta * delta / 2.0).epsilon(1e-6));
}

TEST_CASE("single slot power step against the grid")
{
    const auto sc = single_slot();
    const auto t = sc.initial_trajectory();
    const auto sol = solve_power_alm(t, sc, default_powers(sc));
    CHECK(sol.feasible);
    CHECK(sol.residuals.max() <= 1e-4);
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
        CHECK(std::isfinite(sol.objective_trace[i]));

    const auto oracle = power_grid_oracle(sc, t, 400);
    REQUIRE(oracle.feasible);
    CHECK(oracle.exact);
    CHECK(sol.ee >= 0.98 * oracle.ee);
}

TEST_CASE("unreachable destination threshold")
{
    const auto sc = single_slot(60.0);
    const auto t = sc.initial_trajectory();
    CHECK(error_code_of([&] { check_power_feasibility(sc, t); }) == ErrorCode::InfeasibleProblem);
    CHECK(error_code_of([&] { solve_power_alm(t, sc, default_powers(sc)); }) == ErrorCode::InfeasibleProblem);
}

TEST_CASE("three slots with coupled constraints")
{
    ScenarioParams p;
    p.slots = 3;
    p.mission_time_s = 3.0;
    Placement pl;
    pl.uav_start_x = 10;
    pl.uav_start_y = 10;
    pl.uav_end_x = 11;
    pl.uav_end_y = 12;
    const auto sc = Scenario::build(p, pl);
    const auto t = sc.initial_trajectory();
    const auto sol = solve_power_alm(t, sc, default_powers(sc));
    CHECK(sol.feasible);
    CHECK(sol.residuals.max() <= 1e-4);

    const auto oracle = power_grid_oracle(sc, t, 400);
    REQUIRE(oracle.feasible);
    CHECK(sol.ee >= 0.98 * oracle.ee);
}

TEST_CASE("parametric power steps")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    for (auto mode : {ParametricMode::PerSlot, ParametricMode::Aggregate})
    {
        const auto sol = solve_power_parametric(t, sc, default_powers(sc), mode);
        CHECK(sol.feasible);
        CHECK(sol.residuals.max() <= 1e-4);
        CHECK(sol.ee >= evaluate_plan(sc, t, default_powers(sc)).ee_mbits * (1.0 - 1e-9));
    }
}

TEST_CASE("feasibility restoration")
{
    const auto sc = reference_scenario();
    const auto t = reference_trajectory(sc);
    const auto fixed = restore_feasibility(sc, t, {{0.8, 0.8}, {0.9, 0.3}});
    CHECK(constraint_residuals(sc, t, fixed).max() <= 1e-9);
}
