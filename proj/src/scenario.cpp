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

#include "eesim/scenario.hpp"
#include "eesim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace eesim
{
    std::size_t ScenarioParams::slot_count() const
    {
        if (slots > 0)
            return slots;
        const double n = std::round(mission_time_s / slot_duration_s);
        if (!(n >= 1.0))
            fail(ErrorCode::InvalidParameter, "mission time shorter than one slot");
        return static_cast<std::size_t>(n);
    }

    double ScenarioParams::effective_slot_duration() const
    {
        if (slots > 0)
            return mission_time_s / static_cast<double>(slots);
        return slot_duration_s;
    }

    double ScenarioParams::noise_power_w() const
    {
        const double dbm = noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
        return std::pow(10.0, (dbm - 30.0) / 10.0);
    }

    void ScenarioParams::validate() const
    {
        auto positive = [](double v, const char *name)
        {
            if (!(v > 0.0) || !std::isfinite(v))
                fail(ErrorCode::InvalidParameter, std::string(name) + " must be positive");
        };
        positive(area_side_m, "area_side_m");
        positive(carrier_freq_hz, "carrier_freq_hz");
        positive(bandwidth_hz, "bandwidth_hz");
        positive(mission_time_s, "mission_time_s");
        positive(slot_duration_s, "slot_duration_s");
        positive(peak_power_w, "peak_power_w");
        positive(max_avg_power_w, "max_avg_power_w");
        if (!(max_speed_mps >= 0.0))
            fail(ErrorCode::InvalidParameter, "max_speed_mps must be nonnegative");
        if (!(absorption_coeff >= 0.0))
            fail(ErrorCode::InvalidParameter, "absorption_coeff must be nonnegative");
        if (!(circuit_power_w >= 0.0))
            fail(ErrorCode::InvalidParameter, "circuit_power_w must be nonnegative");
        if (!(eh_floor_w >= 0.0))
            fail(ErrorCode::InvalidParameter, "eh_floor_w must be nonnegative");
        if (rhs_elements == 0)
            fail(ErrorCode::InvalidParameter, "rhs_elements must be at least 1");
        if (rhs_layout != "grid" && rhs_layout != "point")
            fail(ErrorCode::InvalidParameter, "rhs_layout must be \"grid\" or \"point\"");
        if (!(source_altitude_m >= 0.0 && uav_altitude_m >= 0.0 && dest_altitude_m >= 0.0))
            fail(ErrorCode::InvalidParameter, "altitudes must be nonnegative");
        slot_count();
    }

    Scenario Scenario::build(const ScenarioParams &p, const Placement &pl)
    {
        p.validate();

        Scenario sc;
        sc.channel = ChannelParams::make(p.carrier_freq_hz, p.absorption_coeff, p.bandwidth_hz);
        sc.rhs = p.rhs_layout == "grid"
                     ? RhsLayout::planar_grid(p.rhs_elements, sc.channel.wavelength(), p.rhs_absorption, p.rhs_phase)
                     : RhsLayout::point_array(p.rhs_elements, p.rhs_absorption, p.rhs_phase);
        sc.source = {pl.source_x, pl.source_y, p.source_altitude_m};
        sc.destination = {pl.dest_x, pl.dest_y, p.dest_altitude_m};

        sc.slots = p.slot_count();
        sc.slot_duration_s = p.effective_slot_duration();
        sc.max_speed_mps = p.max_speed_mps;
        sc.uav_start = {pl.uav_start_x, pl.uav_start_y, p.uav_altitude_m};
        sc.uav_end = {pl.uav_end_x, pl.uav_end_y, p.uav_altitude_m};

        const double noise = p.noise_power_w();
        SlotRadioParams sp;
        sp.split_id = p.split_id;
        sp.split_eh = p.split_eh;
        sp.noise_uav_id = noise;
        sp.noise_dest_ep1 = noise;
        sp.noise_dest_ep2 = noise;
        sp.eh_efficiency = p.eh_efficiency;
        sp.episode1_fraction = p.episode1_fraction;
        sc.radio.assign(sc.slots, sp);
        sc.gamma_min.assign(sc.slots, db_to_linear(p.gamma_min_db));
        sc.sic_min.assign(sc.slots, db_to_linear(p.sic_min_db));

        sc.peak_power_w = p.peak_power_w;
        sc.max_avg_power_w = p.max_avg_power_w;
        sc.circuit_power_w = p.circuit_power_w;
        sc.eh_floor_w = p.eh_floor_w;
        sc.energy.absorption = p.rhs_absorption;
        sc.energy.scaled_by_tx_power = p.eh_scaled_by_tx_power;

        sc.validate();
        return sc;
    }

    void Scenario::validate() const
    {
        if (slots == 0)
            fail(ErrorCode::InvalidParameter, "scenario needs at least one slot");
        if (radio.size() != slots || gamma_min.size() != slots || sic_min.size() != slots)
            fail(ErrorCode::InvalidParameter, "per-slot parameter vectors must have one entry per slot");
        for (const auto &sp : radio)
            sp.validate();
        for (std::size_t n = 0; n < slots; ++n)
            if (!(gamma_min[n] >= 0.0) || !(sic_min[n] >= 0.0))
                fail(ErrorCode::InvalidParameter, "SINR thresholds must be nonnegative");
        if (uav_start.z != uav_end.z)
            fail(ErrorCode::InvalidParameter, "UAV start and end must share the flight altitude");
        if (!source.finite() || !destination.finite() || !uav_start.finite() || !uav_end.finite())
            fail(ErrorCode::InvalidParameter, "node positions must be finite");
        if (distance(source, destination) <= 0.0)
            fail(ErrorCode::DegenerateGeometry, "source and destination are co-located");
    }

    TrajectoryGrid Scenario::initial_trajectory() const
    {
        return TrajectoryGrid::straight_line(slots, slot_duration_s, uav_start, uav_end, max_speed_mps);
    }

    SlotGains Scenario::gains_at(const Position3D &u) const
    {
        SlotGains g;
        g.h_su = gain_su(u, source, channel);
        g.h_ud = gain_ud(u, destination, channel);
        g.h_sd = gain_sd(source, destination, channel);
        g.g_sum = gain_sr_sum(u, rhs, source, channel);
        return g;
    }

    MetricsOptions Scenario::metrics_options() const
    {
        MetricsOptions o;
        o.access = access;
        o.energy = energy;
        return o;
    }

    PlanMetrics evaluate_plan(const Scenario &sc, const TrajectoryGrid &traj, const std::vector<NomaPower> &powers)
    {
        if (powers.size() != sc.slots || traj.points.size() != sc.slots + 1)
            fail(ErrorCode::InvalidParameter, "plan size does not match the slot count");

        PlanMetrics pm;
        pm.slots.reserve(sc.slots);
        const auto opts = sc.metrics_options();
        for (std::size_t n = 0; n < sc.slots; ++n)
        {
            pm.slots.push_back(slot_metrics(powers[n], sc.gains_at(traj.points[n]), sc.radio[n], sc.circuit_power_w, opts));
            pm.ee_sum += pm.slots.back().ee;
            pm.avg_relay_power += pm.slots.back().relay_power;
        }
        const double N = static_cast<double>(sc.slots);
        pm.ee_mean = pm.ee_sum / N;
        pm.ee_mbits = to_mbits_per_joule(pm.ee_mean, sc.channel.bandwidth_hz);
        pm.avg_relay_power /= N;
        return pm;
    }

    double ConstraintResiduals::max() const
    {
        return std::max({peak_power, avg_power, harvest, sic, mrc, harvest_sign, trajectory});
    }

    ConstraintResiduals constraint_residuals(const Scenario &sc, const TrajectoryGrid &traj,
                                             const std::vector<NomaPower> &powers)
    {
        ConstraintResiduals r;
        const auto pm = evaluate_plan(sc, traj, powers);
        const double N = static_cast<double>(sc.slots);

        double avg_tx = 0.0;
        for (std::size_t n = 0; n < sc.slots; ++n)
        {
            const auto &p = powers[n];
            const auto &m = pm.slots[n];
            const double peak = sc.access == AccessMode::Noma ? p.total() : std::max(p.rho1, p.rho2);
            r.peak_power = std::max(r.peak_power, peak - sc.peak_power_w);
            r.peak_power = std::max(r.peak_power, -std::min(p.rho1, p.rho2));
            avg_tx += m.tx_power / N;
            if (sc.sic_min[n] > 0.0)
                r.sic = std::max(r.sic, (sc.sic_min[n] - m.sinr_uav_dest) / sc.sic_min[n]);
            if (sc.gamma_min[n] > 0.0)
                r.mrc = std::max(r.mrc, (sc.gamma_min[n] - m.sinr_mrc) / sc.gamma_min[n]);
            r.harvest_sign = std::max(r.harvest_sign, -m.harvested_energy / sc.radio[n].episode1_fraction);
        }
        r.avg_power = std::max(0.0, avg_tx - sc.max_avg_power_w);
        if (sc.eh_floor_w > 0.0)
            r.harvest = std::max(0.0, (sc.eh_floor_w - pm.avg_relay_power) / sc.eh_floor_w);

        r.trajectory = 0.0;
        r.trajectory = std::max(r.trajectory, distance(traj.points.front(), traj.start));
        r.trajectory = std::max(r.trajectory, distance(traj.points.back(), traj.end));
        for (std::size_t n = 0; n + 1 < traj.points.size(); ++n)
            r.trajectory = std::max(r.trajectory, distance(traj.points[n + 1], traj.points[n]) - traj.step_limit());
        return r;
    }

    std::vector<NomaPower> default_powers(const Scenario &sc)
    {
        return std::vector<NomaPower>(sc.slots, NomaPower{0.3 * sc.peak_power_w, 0.6 * sc.peak_power_w});
    }
}
