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
#include "eesim/link_model.hpp"

#include <random>

using namespace eesim;
using testing_support::rel_close;

namespace
{
    SlotRadioParams radio(double noise = 1e-13)
    {
        SlotRadioParams sp;
        sp.split_id = 0.5;
        sp.split_eh = 0.5;
        sp.noise_uav_id = noise;
        sp.noise_dest_ep1 = noise;
        sp.noise_dest_ep2 = noise;
        sp.eh_efficiency = 0.7;
        sp.episode1_fraction = 0.5;
        return sp;
    }
}

TEST_CASE("UAV decoding of the destination message")
{
    const auto sp = radio();
    const double h = 1e-6; // |h|^2 = 1e-12
    CHECK(rel_close(sinr_uav_decodes_dest({0.0, 0.4}, h, sp), 0.4 * 1e-12 * sp.split_id / sp.noise_uav_id, 1e-14));
    CHECK(sinr_uav_decodes_dest({0.3, 0.0}, h, sp) == 0.0);
    CHECK(rel_close(sinr_uav_decodes_dest({0.5, 0.5}, h, sp), frozen::sic_example, 1e-12));
    CHECK_THROWS_AS(sinr_uav_decodes_dest({NAN, 0.5}, h, sp), Error);
}

TEST_CASE("UAV own message after cancellation")
{
    auto sp = radio();
    CHECK(sinr_uav_own({0.0, 0.7}, 1e-6, sp) == 0.0);
    CHECK(rel_close(sinr_uav_own({0.5, 0.5}, 1e-6, sp), frozen::own_example, 1e-12));
    sp.split_id = 1.0;
    sp.noise_uav_id = 1e-12;
    CHECK(sinr_uav_own({1.0, 0.0}, 1e-6, sp) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("harvested energy and relay power")
{
    SlotRadioParams sp = radio();
    sp.eh_efficiency = 1.0;
    sp.split_eh = 1.0;
    CHECK(harvested_energy({0.2, 0.3}, 1.0, sp) == 0.5);

    // Boundary probe with the splitting invariant relaxed
    sp.split_eh = 0.0;
    CHECK(harvested_energy({0.2, 0.3}, 1.0, sp) == 0.0);

    sp = radio();
    sp.split_eh = 0.6;
    CHECK(rel_close(harvested_energy({0.2, 0.3}, 2e-6, sp), frozen::harvest_example, 1e-12));

    CHECK(relay_power(0.0, sp) == 0.0);
    CHECK(relay_power(0.5, sp) == 1.0);
    sp.episode1_fraction = 0.25;
    CHECK(rel_close(relay_power(8.4e-13, sp), frozen::relay_power_example, 1e-12));
}

TEST_CASE("harvest is linear in each factor and quadratic in the surface gain")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (int i = 0; i < 200; ++i)
    {
        SlotRadioParams sp = radio();
        sp.eh_efficiency = U(rng);
        sp.episode1_fraction = U(rng);
        sp.split_eh = U(rng);
        const double g = U(rng) * 1e-5, k = U(rng);
        const double base = harvested_energy({}, g, sp);
        auto scaled = sp;
        scaled.eh_efficiency *= k;
        CHECK(rel_close(harvested_energy({}, g, scaled), k * base, 1e-12));
        scaled = sp;
        scaled.episode1_fraction *= k;
        CHECK(rel_close(harvested_energy({}, g, scaled), k * base, 1e-12));
        scaled = sp;
        scaled.split_eh *= k;
        CHECK(rel_close(harvested_energy({}, g, scaled), k * base, 1e-12));
        CHECK(rel_close(harvested_energy({}, k * g, sp), k * k * base, 1e-12));
    }
}

TEST_CASE("destination SINRs")
{
    const auto sp = radio();
    CHECK(sinr_dest_direct({0.3, 0.0}, 1e-6, sp) == 0.0);
    CHECK(sinr_dest_direct({0.0, 0.1}, 1e-6, sp) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rel_close(sinr_dest_direct({0.3, 0.5}, std::sqrt(2e-12), sp), frozen::direct_example, 1e-12));

    CHECK(sinr_dest_relay(0.0, 1e-6, sp) == 0.0);
    SlotRadioParams unit = sp;
    unit.eh_efficiency = 1.0;
    unit.split_eh = 1.0;
    unit.noise_dest_ep2 = 1e-12;
    CHECK(sinr_dest_relay(1.0, 1e-6, unit) == doctest::Approx(1.0).epsilon(1e-15));
    SlotRadioParams r = sp;
    r.split_eh = 0.6;
    CHECK(rel_close(sinr_dest_relay(2e-6, 1e-6, r), frozen::relay_sinr_example, 1e-12));

    CHECK(sinr_mrc(0.0, 0.0) == 0.0);
    CHECK(sinr_mrc(1.5, 0.0) == 1.5);
    CHECK(sinr_mrc(1.42857, 0.3) == doctest::Approx(1.72857).epsilon(1e-15));
}

TEST_CASE("SIC SINR is monotone in the power split")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto sp = radio();
    for (int i = 0; i < 500; ++i)
    {
        const double r1 = U(rng), r2 = U(rng), d = 0.1 * U(rng), h = 1e-6 * (0.1 + U(rng));
        CHECK(sinr_uav_decodes_dest({r1 + d, r2}, h, sp) <= sinr_uav_decodes_dest({r1, r2}, h, sp));
        CHECK(sinr_uav_decodes_dest({r1, r2 + d}, h, sp) >= sinr_uav_decodes_dest({r1, r2}, h, sp));
    }
}

TEST_CASE("slot metrics")
{
    const auto sp = radio();
    SUBCASE("idle slot with no surface gain")
    {
        const SlotGains g{1e-6, 1e-6, 1e-6, 0.0};
        const auto m = slot_metrics({0.0, 0.0}, g, sp, 0.52);
        CHECK(m.sum_rate == 0.0);
        CHECK(m.ee == 0.0);
        CHECK(m.power_sum == 0.52);
    }
    SUBCASE("consumed power subtracts the relay power")
    {
        // Surface gain chosen so that the relay power is 0.02 W
        const double g_sum = std::sqrt(0.02 * (1.0 - sp.episode1_fraction) /
                                       (sp.eh_efficiency * sp.episode1_fraction * sp.split_eh));
        const auto m = slot_metrics({0.3, 0.5}, {1e-6, 1e-6, 1e-6, g_sum}, sp, 0.52);
        CHECK(m.relay_power == doctest::Approx(0.02).epsilon(1e-12));
        CHECK(m.power_sum == doctest::Approx(1.3).epsilon(1e-12));
        CHECK(m.sinr_mrc == m.sinr_dest_direct + m.sinr_dest_relay);
    }
    SUBCASE("non-positive consumption")
    {
        CHECK_THROWS_AS(slot_metrics({0.0, 0.0}, {1e-6, 1e-6, 1e-6, 10.0}, sp, 0.0), Error);
    }
}

TEST_CASE("reference slot against the independent oracle")
{
    const auto sc = testing_support::reference_scenario();
    CHECK(rel_close(sc.radio[0].noise_uav_id, frozen::ref_noise_w, 1e-12));
    const auto t = testing_support::reference_trajectory(sc);
    const auto p = testing_support::reference_powers();
    const auto m = slot_metrics(p[0], sc.gains_at(t.points[0]), sc.radio[0], sc.circuit_power_w, sc.metrics_options());

    CHECK(rel_close(m.sinr_uav_dest, frozen::ref_slot0_sinr_uav_dest, 1e-11));
    CHECK(rel_close(m.sinr_uav_own, frozen::ref_slot0_sinr_uav_own, 1e-11));
    CHECK(rel_close(m.sinr_dest_direct, frozen::ref_slot0_sinr_dest_direct, 1e-11));
    CHECK(rel_close(m.sinr_dest_relay, frozen::ref_slot0_sinr_dest_relay, 1e-11));
    CHECK(rel_close(m.sinr_mrc, frozen::ref_slot0_sinr_mrc, 1e-11));
    CHECK(rel_close(m.harvested_energy, frozen::ref_slot0_harvested_energy, 1e-11));
    CHECK(rel_close(m.relay_power, frozen::ref_slot0_relay_power, 1e-11));
    CHECK(rel_close(m.sum_rate, frozen::ref_slot0_sum_rate, 1e-9));
    CHECK(rel_close(m.power_sum, frozen::ref_slot0_power_sum, 1e-14));
    CHECK(rel_close(m.ee, frozen::ref_slot0_ee, 1e-9));

    CHECK(rel_close(evaluate_plan(sc, t, p).ee_mbits, frozen::ref_plan_ee_mbits, 1e-9));
}

TEST_CASE("rates grow with every SINR")
{
    const auto sp = radio(1e-12);
    const SlotGains g{2e-6, 1e-6, 1e-6, 1e-5};
    const auto base = slot_metrics({0.2, 0.4}, g, sp, 0.52);
    CHECK(base.sum_rate >= 0.0);
    auto more_own = g;
    more_own.h_su *= 1.5;
    CHECK(slot_metrics({0.2, 0.4}, more_own, sp, 0.52).sinr_uav_own > base.sinr_uav_own);
    auto more_direct = g;
    more_direct.h_sd *= 1.5;
    CHECK(slot_metrics({0.2, 0.4}, more_direct, sp, 0.52).sum_rate > base.sum_rate);
}

TEST_CASE("OMA halves the rate and the transmit power")
{
    const auto sp = radio(1e-12);
    const SlotGains g{2e-6, 1e-6, 1e-6, 1e-5};
    MetricsOptions oma;
    oma.access = AccessMode::Oma;
    const auto m = slot_metrics({0.4, 0.6}, g, sp, 0.52, oma);
    CHECK(m.tx_power == doctest::Approx(0.5));
    const double own = sinr_uav_own({0.4, 0.0}, g.h_su, sp);
    const double dest = sinr_dest_direct({0.0, 0.6}, g.h_sd, sp) + m.sinr_dest_relay;
    CHECK(m.sum_rate == doctest::Approx(0.5 * (std::log2(1 + own) + std::log2(1 + dest))).epsilon(1e-14));
}

TEST_CASE("radio parameter validation")
{
    auto sp = radio();
    CHECK_NOTHROW(sp.validate());
    sp.split_id = 1.0;
    CHECK_THROWS_AS(sp.validate(), Error);
    sp = radio();
    sp.noise_dest_ep2 = 0.0;
    CHECK_THROWS_AS(sp.validate(), Error);
}
