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
#include "test_support.hpp"

#include "eesim/orchestrator.hpp"

using namespace eesim;
using namespace testing_support;

namespace
{
    Scenario small(std::size_t slots, double mission, double gamma_db = -70.0, double sic_db = -73.0)
    {
        ScenarioParams p;
        p.slots = slots;
        p.mission_time_s = mission;
        p.gamma_min_db = gamma_db;
        p.sic_min_db = sic_db;
        Placement pl;
        pl.source_x = 4;
        pl.source_y = 7;
        pl.dest_x = 26;
        pl.dest_y = 20;
        pl.uav_start_x = 10;
        pl.uav_start_y = 10;
        pl.uav_end_x = 11;
        pl.uav_end_y = 11;
        return Scenario::build(p, pl);
    }

    void check_monotone(const RunReport &r)
    {
        for (std::size_t i = 1; i < r.ee_trace.size(); ++i)
            CHECK(r.ee_trace[i] >= r.ee_trace[i - 1]);
    }
}

TEST_CASE("method names")
{
    for (auto m : {Method::Proposed, Method::A, Method::B, Method::C, Method::D, Method::E, Method::Initial})
        CHECK(parse_method(method_name(m)) == m);
    CHECK(parse_method("PROPOSED") == Method::Proposed);
    CHECK(error_code_of([] { parse_method("f"); }) == ErrorCode::ConfigError);
}

TEST_CASE("configuration checks")
{
    AlgoConfig c;
    CHECK_NOTHROW(c.validate());
    c.eps1 = 0.0;
    CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::InvalidParameter);
    c = {};
    c.i_max = 0;
    CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("structural restrictions")
{
    const auto sc = small(2, 4.0);
    CHECK(restrict_scenario(sc, Method::B).access == AccessMode::Oma);
    CHECK(restrict_scenario(sc, Method::D).rhs.element_count() == 1);
    CHECK(restrict_scenario(sc, Method::E).rhs.element_count() == 1);
    CHECK(restrict_scenario(sc, Method::Proposed).rhs.element_count() == sc.rhs.element_count());
}

TEST_CASE("pinned trajectory reduces to the power step")
{
    ScenarioParams p;
    p.slots = 1;
    p.mission_time_s = 1.0;
    p.gamma_min_db = -300.0;
    p.sic_min_db = -300.0;
    p.eh_floor_w = 0.0;
    Placement pl;
    pl.uav_start_x = pl.uav_end_x = 12;
    pl.uav_start_y = pl.uav_end_y = 14;
    const auto sc = Scenario::build(p, pl);

    const auto r = run_algorithm1(sc, {});
    CHECK(r.converged);
    CHECK(r.outer_iterations <= 2);
    CHECK(r.final_trajectory.points == sc.initial_trajectory().points);
    check_monotone(r);

    const auto c = run_baseline(sc, Method::C);
    CHECK(c.final_ee == doctest::Approx(r.final_ee).epsilon(1e-9));
}

TEST_CASE("every method yields a certified plan")
{
    const auto sc = small(4, 8.0);
    const double start = evaluate_plan(sc, sc.initial_trajectory(), default_powers(sc)).ee_mbits;
    double proposed = 0.0;
    for (auto m : {Method::Proposed, Method::A, Method::B, Method::C, Method::D, Method::E, Method::Initial})
    {
        CAPTURE(method_name(m));
        const auto r = run_baseline(sc, m);
        CHECK(r.method == m);
        CHECK(r.residuals.max() <= 1e-4);
        CHECK(validate_trajectory(r.final_trajectory).empty());
        REQUIRE_FALSE(r.ee_trace.empty());
        check_monotone(r);
        CHECK(r.final_ee == r.ee_trace.back());
        if (m == Method::Proposed)
            proposed = r.final_ee;
        if (m == Method::Initial)
            CHECK(r.final_ee == start);
    }
    CHECK(proposed > start);
}

TEST_CASE("deterministic runs")
{
    const auto sc = small(3, 6.0);
    const auto a = run_algorithm1(sc, {});
    const auto b = run_algorithm1(sc, {});
    CHECK(a.ee_trace == b.ee_trace);
    CHECK(a.final_trajectory.points == b.final_trajectory.points);
}

TEST_CASE("joint brute-force search")
{
    const auto sc = small(2, 4.0);
    const auto bf = brute_force_oracle(sc, 40, 0.5);
    REQUIRE(bf.feasible);
    CHECK(bf.evaluated > 0);
    CHECK(validate_trajectory(bf.traj).empty());
    CHECK(constraint_residuals(sc, bf.traj, bf.powers).max() <= 1e-9);

    const auto r = run_algorithm1(sc, {});
    CHECK(r.final_ee >= 0.95 * bf.ee);
}

TEST_CASE("oracle budget")
{
    CHECK(error_code_of([] { brute_force_oracle(small(4, 8.0)); }) == ErrorCode::OracleTooLarge);
    const auto sc = small(2, 4.0);
    CHECK(error_code_of([&] { power_grid_oracle(sc, sc.initial_trajectory(), 5000); }) == ErrorCode::OracleTooLarge);
}
