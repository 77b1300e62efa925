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

#include "eesim/geometry.hpp"
#include "eesim/errors.hpp"

#include <numbers>
#include <sstream>

namespace eesim
{
    ChannelParams ChannelParams::make(double carrier_freq_hz, double absorption_coeff, double bandwidth_hz)
    {
        if (!(carrier_freq_hz > 0.0) || !std::isfinite(carrier_freq_hz))
            fail(ErrorCode::InvalidParameter, "carrier frequency must be positive and finite");
        if (!(absorption_coeff >= 0.0) || !std::isfinite(absorption_coeff))
            fail(ErrorCode::InvalidParameter, "absorption coefficient must be nonnegative and finite");
        if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
            fail(ErrorCode::InvalidParameter, "bandwidth must be positive and finite");

        ChannelParams p;
        p.carrier_freq_hz = carrier_freq_hz;
        p.absorption_coeff = absorption_coeff;
        p.bandwidth_hz = bandwidth_hz;
        p.ref_gain = speed_of_light / (4.0 * std::numbers::pi * carrier_freq_hz);
        return p;
    }

    RhsLayout RhsLayout::planar_grid(std::size_t elements, double wavelength, double absorption, double phase)
    {
        if (elements == 0)
            fail(ErrorCode::InvalidParameter, "surface needs at least one element");
        if (!(absorption > 0.0 && absorption <= 1.0))
            fail(ErrorCode::InvalidParameter, "element absorption must lie in (0, 1]");

        RhsLayout rhs;
        rhs.absorption = absorption;
        rhs.phase = phase;

        const double pitch = 0.5 * wavelength;
        const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(elements))));
        const std::size_t rows = (elements + cols - 1) / cols;
        const double x0 = -0.5 * pitch * static_cast<double>(cols - 1);
        const double y0 = -0.5 * pitch * static_cast<double>(rows - 1);

        rhs.element_offsets.reserve(elements);
        for (std::size_t m = 0; m < elements; ++m)
        {
            const auto r = m / cols, c = m % cols;
            rhs.element_offsets.push_back({x0 + pitch * static_cast<double>(c), y0 + pitch * static_cast<double>(r), 0.0});
        }
        return rhs;
    }

    RhsLayout RhsLayout::point_array(std::size_t elements, double absorption, double phase)
    {
        if (elements == 0)
            fail(ErrorCode::InvalidParameter, "surface needs at least one element");
        if (!(absorption > 0.0 && absorption <= 1.0))
            fail(ErrorCode::InvalidParameter, "element absorption must lie in (0, 1]");

        RhsLayout rhs;
        rhs.absorption = absorption;
        rhs.phase = phase;
        rhs.element_offsets.assign(elements, Position3D{});
        return rhs;
    }

    TrajectoryGrid TrajectoryGrid::straight_line(std::size_t slots, double slot_duration_s, const Position3D &start,
                                                 const Position3D &end, double max_speed_mps)
    {
        if (slots == 0)
            fail(ErrorCode::InvalidParameter, "trajectory needs at least one slot");

        TrajectoryGrid t;
        t.slots = slots;
        t.slot_duration_s = slot_duration_s;
        t.start = start;
        t.end = end;
        t.max_speed_mps = max_speed_mps;
        t.points.resize(slots + 1);
        for (std::size_t n = 0; n <= slots; ++n)
        {
            const double w = static_cast<double>(n) / static_cast<double>(slots);
            t.points[n] = start + (end - start) * w;
        }
        t.points.front() = start;
        t.points.back() = end;
        return t;
    }

    double path_gain(double distance_m, const ChannelParams &params)
    {
        if (!std::isfinite(distance_m))
            fail(ErrorCode::InvalidParameter, "distance is not finite");
        if (distance_m <= 0.0)
            fail(ErrorCode::DegenerateGeometry, "co-located nodes (distance <= 0)");
        return params.ref_gain / distance_m * std::exp(-0.5 * params.absorption_coeff * distance_m);
    }

    double gain_su(const Position3D &u, const Position3D &s, const ChannelParams &params)
    {
        return path_gain(distance(u, s), params);
    }

    double gain_ud(const Position3D &u, const Position3D &d, const ChannelParams &params)
    {
        return path_gain(distance(u, d), params);
    }

    double gain_sd(const Position3D &s, const Position3D &d, const ChannelParams &params)
    {
        return path_gain(distance(s, d), params);
    }

    double gain_sr_sum(const Position3D &u, const RhsLayout &rhs, const Position3D &s, const ChannelParams &params)
    {
        double sum = 0.0;
        for (const auto &offset : rhs.element_offsets)
            sum += path_gain(distance(u + offset, s), params);
        return sum;
    }

    std::vector<TrajectoryViolation> validate_trajectory(const TrajectoryGrid &t, double tolerance)
    {
        using Kind = TrajectoryViolation::Kind;
        std::vector<TrajectoryViolation> out;

        if (t.points.size() != t.slots + 1)
        {
            std::ostringstream msg;
            msg << "expected " << t.slots + 1 << " points, found " << t.points.size();
            out.push_back({Kind::PointCount, 0, msg.str()});
            return out;
        }

        for (std::size_t n = 0; n < t.points.size(); ++n)
            if (!t.points[n].finite())
                out.push_back({Kind::NonFinite, n, "point " + std::to_string(n) + " is not finite"});
        if (!out.empty())
            return out;

        auto same = [tolerance](const Position3D &a, const Position3D &b)
        { return distance(a, b) <= tolerance; };

        if (!same(t.points.front(), t.start))
            out.push_back({Kind::StartPoint, 0, "first point differs from the start position"});
        if (!same(t.points.back(), t.end))
            out.push_back({Kind::EndPoint, t.slots, "last point differs from the end position"});

        const double altitude = t.start.z;
        for (std::size_t n = 0; n < t.points.size(); ++n)
            if (std::abs(t.points[n].z - altitude) > tolerance)
                out.push_back({Kind::Altitude, n, "point " + std::to_string(n) + " leaves the flight altitude"});

        const double limit = t.step_limit() + tolerance;
        for (std::size_t n = 0; n + 1 < t.points.size(); ++n)
        {
            const double step = distance(t.points[n + 1], t.points[n]);
            if (step > limit)
            {
                std::ostringstream msg;
                msg << "slot " << n << " moves " << step << " m, limit " << t.step_limit() << " m";
                out.push_back({Kind::Speed, n, msg.str()});
            }
        }
        return out;
    }

    double inverse_gain_profile(const Position3D &u, const Position3D &anchor, double xi)
    {
        const double r = distance(u, anchor);
        return r * r * std::exp(xi * r);
    }
}
