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

#ifndef EESIM_SCENARIO_HPP
#define EESIM_SCENARIO_HPP

#include "eesim/geometry.hpp"
#include "eesim/link_model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace eesim
{
    // Every tunable of a network instance. Defaults follow the reference
    // simulation table where one exists; the rest are centralized here.
    struct ScenarioParams
    {
        double area_side_m = 30.0;
        double carrier_freq_hz = 1.2e12;
        double bandwidth_hz = 1.0e10;
        double absorption_coeff = 0.005; // [1/m]
        double rhs_absorption = 1.0;
        double rhs_phase = 0.0;
        std::size_t rhs_elements = 4;
        std::string rhs_layout = "grid"; // "grid" | "point"
        double max_speed_mps = 1.0;
        double slot_duration_s = 0.1;
        double mission_time_s = 45.0;
        std::size_t slots = 0; // 0: mission_time / slot_duration; otherwise slot_duration = mission_time / slots
        double noise_psd_dbm_hz = -174.0;
        double noise_figure_db = 30.0; // Receiver noise figure applied to every node
        double source_altitude_m = 2.0;
        double uav_altitude_m = 3.0;
        double dest_altitude_m = 0.0;
        double peak_power_w = 1.0;
        double max_avg_power_w = 4.0;
        double circuit_power_w = 0.52;
        double eh_efficiency = 0.7;
        double split_id = 0.5;
        double split_eh = 0.5;
        double episode1_fraction = 0.5;
        double gamma_min_db = -70.0; // Destination MRC threshold
        double sic_min_db = -73.0;   // UAV threshold for decoding the destination message
        double eh_floor_w = 1e-13;   // Minimum average relay power
        bool eh_scaled_by_tx_power = false;

        std::size_t slot_count() const;
        double effective_slot_duration() const;
        double noise_power_w() const;
        void validate() const;

        bool operator==(const ScenarioParams &) const = default;
    };

    // Horizontal node placement; altitudes come from ScenarioParams
    struct Placement
    {
        double source_x = 5.0, source_y = 5.0;
        double dest_x = 25.0, dest_y = 25.0;
        double uav_start_x = 15.0, uav_start_y = 15.0;
        double uav_end_x = 15.0, uav_end_y = 15.0;

        bool operator==(const Placement &) const = default;
    };

    struct Scenario
    {
        ChannelParams channel;
        RhsLayout rhs;
        Position3D source;
        Position3D destination;

        std::size_t slots = 1;
        double slot_duration_s = 0.1;
        double max_speed_mps = 1.0;
        Position3D uav_start;
        Position3D uav_end;

        std::vector<SlotRadioParams> radio; // One entry per slot
        std::vector<double> gamma_min;      // Linear MRC SINR threshold per slot
        std::vector<double> sic_min;        // Linear SIC SINR threshold per slot

        double peak_power_w = 1.0;
        double max_avg_power_w = 4.0;
        double circuit_power_w = 0.52;
        double eh_floor_w = 0.0;
        EnergyModel energy;
        AccessMode access = AccessMode::Noma;

        static Scenario build(const ScenarioParams &params, const Placement &placement);

        void validate() const;
        TrajectoryGrid initial_trajectory() const;
        SlotGains gains_at(const Position3D &u) const;
        MetricsOptions metrics_options() const;
        double uav_altitude() const { return uav_start.z; }
    };

    struct PlanMetrics
    {
        std::vector<LinkMetrics> slots;
        double ee_sum = 0.0;     // sum_n R[n] / P[n]
        double ee_mean = 0.0;    // ee_sum / N
        double ee_mbits = 0.0;   // ee_mean in Mbit/J
        double avg_relay_power = 0.0;
    };

    PlanMetrics evaluate_plan(const Scenario &sc, const TrajectoryGrid &traj, const std::vector<NomaPower> &powers);

    // Positive parts of every constraint violation (0 when satisfied).
    // Powers in Watts; thresholds relative to the threshold itself.
    struct ConstraintResiduals
    {
        double peak_power = 0.0;   // Per-slot source power cap
        double avg_power = 0.0;    // Average source power cap
        double harvest = 0.0;      // Average relay power floor
        double sic = 0.0;          // UAV decoding of the destination message
        double mrc = 0.0;          // Destination combined SINR
        double harvest_sign = 0.0; // Harvested power nonnegative
        double trajectory = 0.0;   // Start/end/speed, in meters

        double max() const;
    };

    ConstraintResiduals constraint_residuals(const Scenario &sc, const TrajectoryGrid &traj,
                                             const std::vector<NomaPower> &powers);

    std::vector<NomaPower> default_powers(const Scenario &sc);

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}

#endif
