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

#include "eesim/link_model.hpp"
#include "eesim/errors.hpp"

#include <cmath>
#include <initializer_list>
#include <numbers>

namespace eesim
{
    namespace
    {
        void require_finite(std::initializer_list<double> values, const char *where)
        {
            for (double v : values)
                if (!std::isfinite(v))
                    fail(ErrorCode::InvalidParameter, std::string(where) + ": non-finite input");
        }
    }

    void SlotRadioParams::validate() const
    {
        auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
        if (!open_unit(split_id) || !open_unit(split_eh))
            fail(ErrorCode::InvalidParameter, "power splitting factors must lie in (0, 1)");
        if (!open_unit(episode1_fraction))
            fail(ErrorCode::InvalidParameter, "episode-1 fraction must lie in (0, 1)");
        if (!(eh_efficiency > 0.0 && eh_efficiency <= 1.0))
            fail(ErrorCode::InvalidParameter, "conversion efficiency must lie in (0, 1]");
        if (!(noise_uav_id > 0.0) || !(noise_dest_ep1 > 0.0) || !(noise_dest_ep2 > 0.0))
            fail(ErrorCode::InvalidParameter, "noise powers must be positive");
        require_finite({noise_uav_id, noise_dest_ep1, noise_dest_ep2}, "SlotRadioParams");
    }

    double sinr_uav_decodes_dest(const NomaPower &p, double h_su, const SlotRadioParams &sp)
    {
        require_finite({p.rho1, p.rho2, h_su}, "sinr_uav_decodes_dest");
        const double g = h_su * h_su;
        return p.rho2 * g / (p.rho1 * g + sp.noise_uav_id / sp.split_id);
    }

    double sinr_uav_own(const NomaPower &p, double h_su, const SlotRadioParams &sp)
    {
        require_finite({p.rho1, h_su}, "sinr_uav_own");
        return sp.split_id * p.rho1 * h_su * h_su / sp.noise_uav_id;
    }

    double harvested_energy(const NomaPower &p, double g_sum, const SlotRadioParams &sp, const EnergyModel &eh)
    {
        require_finite({g_sum, p.rho1, p.rho2}, "harvested_energy");
        const double a2 = eh.absorption * eh.absorption;
        double e = sp.eh_efficiency * a2 * sp.episode1_fraction * sp.split_eh * g_sum * g_sum;
        if (eh.scaled_by_tx_power)
            e *= p.total();
        return e;
    }

    double relay_power(double harvested, const SlotRadioParams &sp)
    {
        require_finite({harvested}, "relay_power");
        return harvested / (1.0 - sp.episode1_fraction);
    }

    double sinr_dest_direct(const NomaPower &p, double h_sd, const SlotRadioParams &sp)
    {
        require_finite({p.rho1, p.rho2, h_sd}, "sinr_dest_direct");
        const double g = h_sd * h_sd;
        return p.rho2 * g / (p.rho1 * g + sp.noise_dest_ep1);
    }

    double sinr_dest_relay(double g_sum, double h_ud, const SlotRadioParams &sp, double absorption)
    {
        require_finite({g_sum, h_ud}, "sinr_dest_relay");
        return sp.eh_efficiency * absorption * absorption * sp.split_eh * g_sum * g_sum * h_ud * h_ud / sp.noise_dest_ep2;
    }

    double sinr_mrc(double direct, double relay) { return direct + relay; }

    LinkMetrics slot_metrics(const NomaPower &p, const SlotGains &gains, const SlotRadioParams &sp,
                             double circuit_power, const MetricsOptions &opts)
    {
        LinkMetrics m;
        const double tx_scale = opts.energy.scaled_by_tx_power ? 1.0 : 0.0;
        double relay = sinr_dest_relay(gains.g_sum, gains.h_ud, sp, opts.energy.absorption);

        if (opts.access == AccessMode::Noma)
        {
            m.sinr_uav_dest = sinr_uav_decodes_dest(p, gains.h_su, sp);
            m.sinr_uav_own = sinr_uav_own(p, gains.h_su, sp);
            m.sinr_dest_direct = sinr_dest_direct(p, gains.h_sd, sp);
            m.tx_power = p.total();
        }
        else
        {
            // Each half-slot carries a single message, so nothing interferes
            m.sinr_uav_dest = sinr_uav_own({p.rho2, 0.0}, gains.h_su, sp);
            m.sinr_uav_own = sinr_uav_own(p, gains.h_su, sp);
            m.sinr_dest_direct = sinr_dest_direct({0.0, p.rho2}, gains.h_sd, sp);
            m.tx_power = 0.5 * p.total();
        }

        // The harvest follows the source power actually radiated in episode 1
        EnergyModel eh = opts.energy;
        eh.scaled_by_tx_power = false;
        m.harvested_energy = harvested_energy(p, gains.g_sum, sp, eh);
        if (tx_scale > 0.0)
        {
            m.harvested_energy *= m.tx_power;
            relay *= m.tx_power;
        }
        m.relay_power = relay_power(m.harvested_energy, sp);
        m.sinr_dest_relay = relay;
        m.sinr_mrc = sinr_mrc(m.sinr_dest_direct, m.sinr_dest_relay);

        const double weight = opts.access == AccessMode::Noma ? 1.0 : 0.5;
        m.sum_rate = weight * (std::log1p(m.sinr_uav_own) + std::log1p(m.sinr_mrc)) / std::numbers::ln2;
        m.power_sum = m.tx_power + circuit_power - m.relay_power;
        if (!(m.power_sum > 0.0))
            fail(ErrorCode::NonPositivePower, "slot consumes non-positive power (harvest exceeds consumption)");

        m.ee = m.sum_rate / m.power_sum;
        if (opts.bandwidth_hz > 0.0)
            m.ee = to_mbits_per_joule(m.ee, opts.bandwidth_hz);
        return m;
    }
}
