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

#ifndef EESIM_LINK_MODEL_HPP
#define EESIM_LINK_MODEL_HPP

// Per-slot link budget of the two-episode cooperative protocol.
//
// Episode 1: the source superposes the UAV message (power rho1) and the
// destination message (power rho2). The UAV decodes the destination message
// first (SIC), then its own, while the holographic surface absorbs RF energy.
// Episode 2: the UAV forwards the destination message with the harvested
// power; the destination combines both copies (MRC).
//
// Channel arguments are amplitude gains; squares are taken internally.

namespace eesim
{
    struct NomaPower
    {
        double rho1 = 0.0; // UAV message [W]
        double rho2 = 0.0; // Destination message [W]

        double total() const { return rho1 + rho2; }
    };

    struct SlotRadioParams
    {
        double split_id = 0.5;         // ID power factor at the UAV
        double split_eh = 0.5;         // EH power factor at the surface
        double noise_uav_id = 0.0;     // [W]
        double noise_dest_ep1 = 0.0;   // [W]
        double noise_dest_ep2 = 0.0;   // [W]
        double eh_efficiency = 0.7;    // RF-to-DC conversion
        double episode1_fraction = 0.5;

        // Throws InvalidParameter when any field leaves its open interval
        void validate() const;
    };

    enum class AccessMode
    {
        Noma,
        Oma, // Two orthogonal half-slots: rho1 feeds the UAV half, rho2 the destination half
    };

    struct EnergyModel
    {
        double absorption = 1.0;         // Surface element absorption
        bool scaled_by_tx_power = false; // Multiply the harvest by the source transmit power
    };

    struct SlotGains
    {
        double h_su = 0.0;  // Source -> UAV
        double h_ud = 0.0;  // UAV -> destination
        double h_sd = 0.0;  // Source -> destination
        double g_sum = 0.0; // |sum_m g_sr[m]|
    };

    struct LinkMetrics
    {
        double sinr_uav_dest = 0.0;   // UAV decoding the destination message
        double sinr_uav_own = 0.0;    // UAV own message after SIC
        double sinr_dest_direct = 0.0;
        double sinr_dest_relay = 0.0;
        double sinr_mrc = 0.0;
        double harvested_energy = 0.0;
        double relay_power = 0.0; // [W]
        double tx_power = 0.0;    // Source power drawn in the slot [W]
        double sum_rate = 0.0;    // [bit/s/Hz]
        double power_sum = 0.0;   // [W]
        double ee = 0.0;          // [bit/s/Hz/W], or Mbit/J when bandwidth-scaled
    };

    struct MetricsOptions
    {
        AccessMode access = AccessMode::Noma;
        EnergyModel energy;
        double bandwidth_hz = 0.0; // > 0 rescales ee to Mbit/J
    };

    double sinr_uav_decodes_dest(const NomaPower &p, double h_su, const SlotRadioParams &sp);
    double sinr_uav_own(const NomaPower &p, double h_su, const SlotRadioParams &sp);
    double harvested_energy(const NomaPower &p, double g_sum, const SlotRadioParams &sp, const EnergyModel &eh = {});
    double relay_power(double harvested, const SlotRadioParams &sp);
    double sinr_dest_direct(const NomaPower &p, double h_sd, const SlotRadioParams &sp);
    double sinr_dest_relay(double g_sum, double h_ud, const SlotRadioParams &sp, double absorption = 1.0);
    double sinr_mrc(double direct, double relay);

    // Throws NonPositivePower when rho1 + rho2 + P_c - P_RHS <= 0
    LinkMetrics slot_metrics(const NomaPower &p, const SlotGains &gains, const SlotRadioParams &sp,
                             double circuit_power, const MetricsOptions &opts = {});

    // bit/s/Hz/W -> Mbit/J
    inline double to_mbits_per_joule(double ee, double bandwidth_hz) { return ee * bandwidth_hz * 1e-6; }
}

#endif
