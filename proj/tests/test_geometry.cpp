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
#include "eesim/geometry.hpp"

#include <random>

using namespace eesim;
using testing_support::rel_close;

namespace
{
    ChannelParams thz(double xi = 0.005) { return ChannelParams::make(1.2e12, xi, 1e10); }
}

TEST_CASE("reference gain and path gain at 10 m")
{
    const auto ch = thz();
    CHECK(rel_close(ch.ref_gain, frozen::beta0_1p2thz, 1e-12));
    CHECK(rel_close(path_gain(10.0, ch), frozen::gain_10m, 1e-12));
}

TEST_CASE("absorption-free path gain is free-space")
{
    const auto ch = thz(0.0);
    CHECK(path_gain(1.0, ch) == ch.ref_gain);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.01, 100.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double d = U(rng);
        CHECK(rel_close(path_gain(d, ch), ch.ref_gain / d, 1e-12));
    }
}

TEST_CASE("path gain rejects non-positive distance")
{
    CHECK_THROWS_AS(path_gain(0.0, thz()), Error);
    try
    {
        path_gain(-1.0, thz());
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::DegenerateGeometry);
    }
}

TEST_CASE("path gain strictly decreases with distance")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.05, 60.0);
    const auto ch = thz(0.025);
    for (int i = 0; i < 1000; ++i)
    {
        double a = U(rng), b = U(rng);
        if (a == b)
            continue;
        if (a > b)
            std::swap(a, b);
        CHECK(path_gain(a, ch) > path_gain(b, ch));
    }
}

TEST_CASE("point-to-point gains")
{
    const auto free = thz(0.0);
    CHECK(gain_su({0, 0, 3}, {0, 0, 2}, free) == doctest::Approx(free.ref_gain).epsilon(1e-15));
    CHECK(rel_close(gain_su({3, 4, 2}, {0, 0, 2}, thz()), frozen::gain_su_345, 1e-12));
    CHECK_THROWS_AS(gain_su({1, 2, 3}, {1, 2, 3}, thz()), Error);

    CHECK(rel_close(gain_ud({3, 4, 2}, {0, 0, 2}, thz()), frozen::gain_su_345, 1e-12));
    CHECK(rel_close(gain_sd({0, 0, 2}, {3, 4, 2}, thz()), frozen::gain_su_345, 1e-12));
    CHECK_THROWS_AS(gain_ud({1, 2, 0}, {1, 2, 0}, thz()), Error);
    CHECK_THROWS_AS(gain_sd({1, 2, 0}, {1, 2, 0}, thz()), Error);

    // Symmetry
    const Position3D a{1.5, -2.0, 3.0}, b{-4.0, 7.5, 0.0};
    CHECK(gain_su(a, b, thz()) == gain_su(b, a, thz()));
}

TEST_CASE("surface gain sums its elements")
{
    const auto ch = thz();
    const Position3D u{5, 0, 3}, s{0, 0, 2};

    CHECK(gain_sr_sum(u, RhsLayout::point_array(1), s, ch) == gain_su(u, s, ch));
    CHECK(rel_close(gain_sr_sum(u, RhsLayout::point_array(4), s, ch), 4.0 * gain_su(u, s, ch), 1e-12));

    RhsLayout two;
    two.element_offsets = {{0.01, 0, 0}, {-0.01, 0, 0}};
    CHECK(rel_close(gain_sr_sum(u, two, s, ch), frozen::gain_sr_two_elements, 1e-12));

    RhsLayout clash;
    clash.element_offsets = {{-5, 0, -1}};
    CHECK_THROWS_AS(gain_sr_sum(u, clash, s, ch), Error);

    for (std::size_t k : {2u, 7u, 16u})
        CHECK(rel_close(gain_sr_sum(u, RhsLayout::point_array(k), s, ch), static_cast<double>(k) * gain_su(u, s, ch), 1e-12));
}

TEST_CASE("planar grid layout")
{
    const auto ch = thz();
    const auto rhs = RhsLayout::planar_grid(9, ch.wavelength());
    REQUIRE(rhs.element_count() == 9);
    for (const auto &o : rhs.element_offsets)
        CHECK(o.z == 0.0);
    // Millimetre offsets barely move the aggregate gain
    const Position3D u{8, 3, 3}, s{0, 0, 2};
    CHECK(rel_close(gain_sr_sum(u, rhs, s, ch), 9.0 * gain_su(u, s, ch), 1e-4));
    CHECK_THROWS_AS(RhsLayout::planar_grid(4, ch.wavelength(), 0.0), Error);
}

TEST_CASE("trajectory validation")
{
    const Position3D p{10, 10, 3};
    auto t = TrajectoryGrid::straight_line(5, 0.1, p, p, 1.0);
    CHECK(validate_trajectory(t).empty());

    auto fast = t;
    fast.points[2] = {10.2, 10, 3};
    fast.points[3] = {10.2, 10, 3};
    fast.points[4] = {10.1, 10, 3};
    auto v = validate_trajectory(fast);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == TrajectoryViolation::Kind::Speed);
    CHECK(v[0].slot == 1);

    auto moved = t;
    moved.points[0] = {10.05, 10, 3};
    v = validate_trajectory(moved);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == TrajectoryViolation::Kind::StartPoint);

    auto line = TrajectoryGrid::straight_line(4, 0.5, {0, 0, 3}, {2, 0, 3}, 1.0);
    CHECK(validate_trajectory(line).empty());
    CHECK(line.points.size() == 5);
    CHECK(line.points[2].x == doctest::Approx(1.0));
}

TEST_CASE("inverse gain profile matches the squared gain")
{
    const auto ch = thz(0.01);
    const Position3D u{3, 1, 3}, s{-2, 4, 2};
    const double h = gain_su(u, s, ch);
    CHECK(rel_close(inverse_gain_profile(u, s, ch.absorption_coeff), ch.ref_gain * ch.ref_gain / (h * h), 1e-12));
}
