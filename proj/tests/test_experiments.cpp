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

#include "eesim/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eesim;
using namespace testing_support;

namespace
{
    std::string config_error(const std::string &text)
    {
        try
        {
            parse_config(text);
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::ConfigError);
            return e.detail();
        }
        return {};
    }

    ExperimentConfig tiny()
    {
        ExperimentConfig c;
        c.scenario.slots = 2;
        c.sweep = SweepKind::Absorption;
        c.sweep_values = {0.005, 0.015};
        c.trials = 2;
        c.methods = {Method::Proposed, Method::Initial};
        c.seed = 7;
        c.i_max = 3;
        return c;
    }

    std::filesystem::path scratch(const std::string &name)
    {
        auto dir = std::filesystem::temp_directory_path() / "eesim_tests";
        std::filesystem::create_directories(dir);
        return dir / name;
    }
}

TEST_CASE("sweep names")
{
    for (auto k : {SweepKind::PSum, SweepKind::MissionTime, SweepKind::RhsElements, SweepKind::Absorption})
    {
        CHECK(parse_sweep(sweep_name(k)) == k);
        CHECK_FALSE(default_sweep_values(k).empty());
    }
    CHECK(error_code_of([] { parse_sweep("snr"); }) == ErrorCode::ConfigError);
}

TEST_CASE("config parsing")
{
    CHECK(parse_config("") == ExperimentConfig{});
    CHECK(parse_config("{}") == ExperimentConfig{});

    const auto c = parse_config(R"({"scenario": {"absorption_coeff": 0.02}, "experiment": {"methods": ["proposed", "c"]}})");
    CHECK(c.scenario.absorption_coeff == 0.02);
    CHECK(c.scenario.carrier_freq_hz == ScenarioParams{}.carrier_freq_hz);
    CHECK(c.methods == std::vector<Method>{Method::Proposed, Method::C});

    CHECK(config_error(R"({"scenario": {"absorbtion_coeff": 0.02}})").rfind("scenario.absorbtion_coeff", 0) == 0);
    CHECK(config_error(R"({"experiment": {"trials": "ten"}})").rfind("experiment.trials", 0) == 0);
    CHECK(config_error(R"({"experiment": {"methods": ["proposed", "z"]}})").rfind("experiment.methods[1]", 0) == 0);
    CHECK(config_error(R"({"experiment": {"sweep_values": [2, 1]}})").rfind("experiment.sweep_values[1]", 0) == 0);
    CHECK(config_error(R"({"scenario": {"slot_duration_s": -1}})").rfind("scenario", 0) == 0);
    CHECK(config_error(R"({"bogus": 1})").rfind("bogus", 0) == 0);
    CHECK_FALSE(config_error("{").empty());
}

TEST_CASE("config round trip")
{
    auto c = tiny();
    c.scenario.noise_figure_db = 27.5;
    c.placement.uav_end_x = 17.25;
    CHECK(parse_config(config_to_json(c)) == c);

    const auto path = scratch("roundtrip.json");
    save_config(c, path.string());
    CHECK(load_config(path.string()) == c);
    CHECK(error_code_of([] { load_config("/nonexistent/eesim.json"); }) == ErrorCode::ConfigError);
}

TEST_CASE("power budget mapping")
{
    ExperimentConfig c;
    const auto p = params_at(c, 3.0);
    const double expected = (3.0 - c.scenario.circuit_power_w + c.scenario.eh_floor_w) / 2.0;
    CHECK(p.peak_power_w == doctest::Approx(expected).epsilon(1e-15));
    CHECK(p.max_avg_power_w == p.peak_power_w);
    CHECK(error_code_of([&] { params_at(c, 0.1); }) == ErrorCode::ConfigError);

    c.sweep = SweepKind::RhsElements;
    CHECK(params_at(c, 9.0).rhs_elements == 9);
    c.sweep = SweepKind::MissionTime;
    CHECK(params_at(c, 30.0).mission_time_s == 30.0);
}

TEST_CASE("trial placements")
{
    const auto c = tiny();
    CHECK(trial_seed(c.seed, 0) != trial_seed(c.seed, 1));
    const auto a = draw_placement(c, 1);
    CHECK(a == draw_placement(c, 1));
    CHECK_FALSE(a == draw_placement(c, 0));
    CHECK(a.uav_start_x == c.placement.uav_start_x);
    CHECK(a.source_x >= 0.0);
    CHECK(a.source_x <= c.scenario.area_side_m);
}

TEST_CASE("sweep execution")
{
    auto c = tiny();
    c.trials = 1;
    c.sweep_values = {0.005};
    c.methods = {Method::Initial};
    const auto one = run_sweep(c);
    REQUIRE(one.size() == 1);
    CHECK(one[0].sweep == "absorption");
    CHECK(one[0].method == "initial");
    CHECK(std::isfinite(one[0].final_ee));
    CHECK(one[0].seed == trial_seed(c.seed, 0));

    c = tiny();
    std::size_t calls = 0, last_total = 0;
    const auto serial = run_sweep(c, [&](std::size_t, std::size_t total) {
        ++calls;
        last_total = total;
    });
    CHECK(serial.size() == 8);
    CHECK(calls == 8);
    CHECK(last_total == 8);
    CHECK(serial[0].sweep_value == 0.005);
    CHECK(serial[0].method == "proposed");
    CHECK(serial[1].trial == 1);
    CHECK(serial[2].method == "initial");

    c.workers = 4;
    const auto parallel = run_sweep(c);
    CHECK(records_to_csv(parallel) == records_to_csv(serial));
    CHECK(records_to_csv(run_sweep(c)) == records_to_csv(parallel));
}

TEST_CASE("CSV serialization")
{
    CHECK(records_to_csv({}) == std::string(csv_header) + "\n");

    SweepRecord r{"p_sum", 2.5, "proposed", 3, 12345678901234567ULL, 17.125, true, 0.0, ""};
    const auto text = records_to_csv({r});
    CHECK(text == std::string(csv_header) + "\np_sum,2.5,proposed,3,12345678901234567,17.125,true,0\n");
    CHECK(records_from_csv(text) == std::vector<SweepRecord>{r});

    SweepRecord failed = r;
    failed.final_ee = std::nan("");
    failed.converged = false;
    const auto back = records_from_csv(records_to_csv({failed}));
    REQUIRE(back.size() == 1);
    CHECK(std::isnan(back[0].final_ee));
    CHECK_FALSE(back[0].converged);

    r.final_ee = 0.1 + 0.2;
    CHECK(records_from_csv(records_to_csv({r}))[0].final_ee == r.final_ee);
    CHECK(error_code_of([] { records_from_csv("a,b\n"); }).has_value());
}

TEST_CASE("result files")
{
    const auto c = tiny();
    const auto path = scratch("results.csv");
    std::vector<SweepRecord> recs{{"absorption", 0.005, "initial", 0, 9, 1.5, false, 0.0, ""}};
    write_results(recs, path.string(), c);
    CHECK(read_results(path.string()) == recs);
    CHECK(sibling_config_path(path.string()) == scratch("results.json").string());
    CHECK(load_config(sibling_config_path(path.string())) == c);
}
