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

#ifndef EESIM_GEOMETRY_HPP
#define EESIM_GEOMETRY_HPP

#include <cmath>
#include <string>
#include <vector>

namespace eesim
{
    inline constexpr double speed_of_light = 299792458.0; // [m/s]

    // Cartesian position in meters, z is altitude above ground
    struct Position3D
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        Position3D operator+(const Position3D &o) const { return {x + o.x, y + o.y, z + o.z}; }
        Position3D operator-(const Position3D &o) const { return {x - o.x, y - o.y, z - o.z}; }
        Position3D operator*(double s) const { return {x * s, y * s, z * s}; }
        bool operator==(const Position3D &) const = default;

        double dot(const Position3D &o) const { return x * o.x + y * o.y + z * o.z; }
        double norm() const { return std::sqrt(x * x + y * y + z * z); }
        bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    };

    inline double distance(const Position3D &a, const Position3D &b) { return (a - b).norm(); }

    // THz link constants; use make() so that ref_gain stays consistent with the carrier
    struct ChannelParams
    {
        double carrier_freq_hz = 1.2e12;
        double absorption_coeff = 0.005; // Molecular absorption [1/m]
        double ref_gain = 0.0;           // c / (4 pi f) [m]
        double bandwidth_hz = 1.0e10;

        static ChannelParams make(double carrier_freq_hz, double absorption_coeff, double bandwidth_hz);
        double wavelength() const { return speed_of_light / carrier_freq_hz; }
    };

    // Absorptive holographic surface carried by the UAV
    struct RhsLayout
    {
        std::vector<Position3D> element_offsets; // Relative to the UAV center
        double absorption = 1.0;                 // Uniform element absorption, in (0, 1]
        double phase = 0.0;                      // Uniform phase [rad]; carries no power

        std::size_t element_count() const { return element_offsets.size(); }

        // Square half-wavelength grid in the horizontal plane, centered on the UAV
        static RhsLayout planar_grid(std::size_t elements, double wavelength, double absorption = 1.0, double phase = 0.0);

        // All elements collapsed onto the UAV center
        static RhsLayout point_array(std::size_t elements, double absorption = 1.0, double phase = 0.0);
    };

    // UAV path sampled at N+1 points; slot n uses points[n]
    struct TrajectoryGrid
    {
        std::size_t slots = 0;
        double slot_duration_s = 0.1;
        Position3D start;
        Position3D end;
        double max_speed_mps = 1.0;
        std::vector<Position3D> points;

        double step_limit() const { return slot_duration_s * max_speed_mps; }

        // Feasible by construction when |end - start| <= slots * step_limit()
        static TrajectoryGrid straight_line(std::size_t slots, double slot_duration_s, const Position3D &start,
                                            const Position3D &end, double max_speed_mps);
    };

    struct TrajectoryViolation
    {
        enum class Kind
        {
            StartPoint,
            EndPoint,
            Speed,
            Altitude,
            PointCount,
            NonFinite,
        };
        Kind kind;
        std::size_t slot; // Index of the offending point (Speed: first point of the pair)
        std::string message;
    };

    // (beta0 / d) * exp(-xi d / 2); throws DegenerateGeometry for d <= 0
    double path_gain(double distance_m, const ChannelParams &params);

    double gain_su(const Position3D &u, const Position3D &s, const ChannelParams &params);
    double gain_ud(const Position3D &u, const Position3D &d, const ChannelParams &params);
    double gain_sd(const Position3D &s, const Position3D &d, const ChannelParams &params);

    // |sum_m g_sr[m]| for the surface mounted at u; all terms are real and nonnegative
    double gain_sr_sum(const Position3D &u, const RhsLayout &rhs, const Position3D &s, const ChannelParams &params);

    std::vector<TrajectoryViolation> validate_trajectory(const TrajectoryGrid &t, double tolerance = 1e-9);

    // Inverse normalized power gain |u - anchor|^2 exp(xi |u - anchor|) = beta0^2 / |h|^2
    double inverse_gain_profile(const Position3D &u, const Position3D &anchor, double xi);
}

#endif
