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

#include "eesim/orchestrator.hpp"
#include "eesim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <functional>

namespace eesim
{
    const char *method_name(Method m) noexcept
    {
        switch (m)
        {
        case Method::Proposed: return "proposed";
        case Method::A: return "a";
        case Method::B: return "b";
        case Method::C: return "c";
        case Method::D: return "d";
        case Method::E: return "e";
        case Method::Initial: return "initial";
        }
        return "unknown";
    }

    Method parse_method(const std::string &name)
    {
        std::string s;
        for (char ch : name)
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        for (Method m : {Method::Proposed, Method::A, Method::B, Method::C, Method::D, Method::E, Method::Initial})
            if (s == method_name(m))
                return m;
        fail(ErrorCode::ConfigError, "unknown method \"" + name + "\"");
    }

    void AlgoConfig::validate() const
    {
        if (!(eps1 > 0.0) || !(eps2 > 0.0))
            fail(ErrorCode::InvalidParameter, "tolerances must be positive");
        if (i_max == 0)
            fail(ErrorCode::InvalidParameter, "i_max must be at least 1");
        if (!(certify_tol >= 0.0))
            fail(ErrorCode::InvalidParameter, "certify_tol must be nonnegative");
    }

    Scenario restrict_scenario(const Scenario &sc, Method method)
    {
        Scenario r = sc;
        if (method == Method::B)
            r.access = AccessMode::Oma;
        if (method == Method::D || method == Method::E)
            r.rhs = RhsLayout::point_array(1, sc.rhs.absorption, sc.rhs.phase);
        return r;
    }

    namespace
    {
        enum class PowerStep
        {
            None,
            Alm,
            PerSlot,
            Aggregate,
        };

        struct Plan
        {
            bool trajectory = true;
            RatioMode ratio = RatioMode::SumOfRatios;
            PowerStep power = PowerStep::Alm;
        };

        Plan plan_for(Method m)
        {
            switch (m)
            {
            case Method::A: return {true, RatioMode::SumOfRatios, PowerStep::None};
            case Method::B: return {true, RatioMode::SumOfRatios, PowerStep::PerSlot};
            case Method::C: return {false, RatioMode::SumOfRatios, PowerStep::Alm};
            case Method::E: return {true, RatioMode::Aggregate, PowerStep::Aggregate};
            case Method::Initial: return {false, RatioMode::SumOfRatios, PowerStep::None};
            default: return {};
            }
        }

        template <class F>
        auto staged(const char *stage, F &&f)
        {
            try
            {
                return f();
            }
            catch (const Error &e)
            {
                fail(e.code(), std::string(stage) + ": " + e.detail());
            }
        }

        // Numerical stalls reject the step instead of aborting the run
        bool recoverable(ErrorCode c)
        {
            return c == ErrorCode::MaxIterations || c == ErrorCode::LineSearchStall || c == ErrorCode::SurrogateCollapse;
        }

        std::vector<NomaPower> strictly_inside_peak(const Scenario &sc, std::vector<NomaPower> p)
        {
            for (auto &q : p)
            {
                q.rho1 = std::max(0.0, q.rho1);
                q.rho2 = std::max(0.0, q.rho2);
                const double cap = sc.peak_power_w * (1.0 - 1e-6);
                if (q.total() > cap)
                {
                    const double f = cap / q.total();
                    q.rho1 *= f;
                    q.rho2 *= f;
                }
            }
            return p;
        }

        struct Candidate
        {
            double ee = 0.0;
            double residual = 0.0;
        };

        Candidate assess(const Scenario &sc, const TrajectoryGrid &traj, const std::vector<NomaPower> &p)
        {
            return {evaluate_plan(sc, traj, p).ee_mbits, constraint_residuals(sc, traj, p).max()};
        }
    }

    RunReport run_algorithm1(const Scenario &scenario, const AlgoConfig &cfg)
    {
        cfg.validate();
        const auto t_start = std::chrono::steady_clock::now();
        const Scenario sc = restrict_scenario(scenario, cfg.method);
        const Plan plan = plan_for(cfg.method);

        RunReport rep;
        rep.method = cfg.method;
        TrajectoryGrid traj = sc.initial_trajectory();
        std::vector<NomaPower> powers = default_powers(sc);
        if (!validate_trajectory(traj).empty())
            fail(ErrorCode::InfeasibleProblem, "initial point: the straight line exceeds the speed limit");

        Candidate cur = staged("initial point", [&] { return assess(sc, traj, powers); });
        bool feasible = cur.residual <= cfg.certify_tol;
        if (!feasible)
        {
            if (plan.power == PowerStep::None)
                fail(ErrorCode::InfeasibleProblem, "initial point: static powers violate the constraints");
            staged("initial point", [&] { check_power_feasibility(sc, traj); return 0; });
        }
        else
            rep.ee_trace.push_back(cur.ee);

        auto offer = [&](const TrajectoryGrid &t, const std::vector<NomaPower> &p)
        {
            const Candidate c = assess(sc, t, p);
            const bool ok = c.residual <= cfg.certify_tol && (!feasible || c.ee >= cur.ee);
            if (ok)
            {
                traj = t;
                powers = p;
                cur = c;
                feasible = true;
            }
            else
                ++rep.rejected_steps;
            if (feasible)
                rep.ee_trace.push_back(cur.ee);
            return ok;
        };

        auto trajectory_step = [&]
        {
            TrajectoryOptions o = cfg.trajectory;
            o.mode = plan.ratio;
            try
            {
                const auto r = staged("trajectory step", [&] { return optimize_trajectory(traj, powers, sc, o); });
                offer(r.traj, powers);
            }
            catch (const Error &e)
            {
                if (!recoverable(e.code()))
                    throw;
                ++rep.rejected_steps;
            }
        };

        auto power_step = [&]
        {
            try
            {
                const auto p0 = strictly_inside_peak(sc, powers);
                const auto s = staged("power step", [&]
                {
                    switch (plan.power)
                    {
                    case PowerStep::PerSlot: return solve_power_parametric(traj, sc, p0, ParametricMode::PerSlot, cfg.power);
                    case PowerStep::Aggregate: return solve_power_parametric(traj, sc, p0, ParametricMode::Aggregate, cfg.power);
                    default: return solve_power_alm(traj, sc, p0, cfg.power);
                    }
                });
                offer(traj, s.powers);
            }
            catch (const Error &e)
            {
                if (!recoverable(e.code()))
                    throw;
                ++rep.rejected_steps;
            }
        };

        const bool any_step = plan.trajectory || plan.power != PowerStep::None;
        if (!any_step)
            rep.converged = true;
        if (!feasible)
        {
            power_step();
            if (!feasible)
                fail(ErrorCode::InfeasibleProblem, "power step: no certified allocation from the initial point");
        }

        for (std::size_t j = 1; any_step && j <= cfg.i_max; ++j)
        {
            rep.outer_iterations = j;
            const double e0 = cur.ee;
            if (plan.trajectory)
                trajectory_step();
            const double e1 = cur.ee;
            if (plan.power != PowerStep::None)
                power_step();
            const double e2 = cur.ee;

            const double gain_t = (e1 - e0) / std::max(e0, 1e-300);
            const double gain_p = (e2 - e1) / std::max(e1, 1e-300);
            if (gain_t < cfg.eps1 && gain_p < cfg.eps2)
            {
                rep.converged = true;
                break;
            }
        }

        rep.final_ee = cur.ee;
        rep.final_powers = powers;
        rep.final_trajectory = traj;
        rep.residuals = constraint_residuals(sc, traj, powers);
        rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return rep;
    }

    RunReport run_baseline(const Scenario &sc, Method method, const AlgoConfig &cfg)
    {
        AlgoConfig c = cfg;
        c.method = method;
        return run_algorithm1(sc, c);
    }

    // ---- oracles ----------------------------------------------------------

    namespace
    {
        // Per-slot constraints; `coupled` also imposes the average-power cap and
        // the harvest floor on the slot itself
        bool slot_feasible(const Scenario &sc, std::size_t n, const NomaPower &p, const LinkMetrics &m, bool coupled)
        {
            const double peak = sc.access == AccessMode::Noma ? p.total() : std::max(p.rho1, p.rho2);
            if (peak > sc.peak_power_w || p.rho1 < 0.0 || p.rho2 < 0.0)
                return false;
            if (m.sinr_uav_dest < sc.sic_min[n] || m.sinr_mrc < sc.gamma_min[n] || m.harvested_energy < 0.0)
                return false;
            if (coupled && (m.tx_power > sc.max_avg_power_w || m.relay_power < sc.eh_floor_w))
                return false;
            return true;
        }

        struct SlotBest
        {
            double ee = -1.0; // bit/s/Hz/W; negative when nothing is feasible
            NomaPower p;
        };

        SlotBest best_slot_power(const Scenario &sc, std::size_t n, const SlotGains &g, std::size_t res, bool coupled)
        {
            SlotBest best;
            const auto opts = sc.metrics_options();
            const double step = sc.peak_power_w / static_cast<double>(res - 1);
            for (std::size_t i = 0; i < res; ++i)
                for (std::size_t k = 0; k < res; ++k)
                {
                    const NomaPower p{step * static_cast<double>(i), step * static_cast<double>(k)};
                    LinkMetrics m;
                    try
                    {
                        m = slot_metrics(p, g, sc.radio[n], sc.circuit_power_w, opts);
                    }
                    catch (const Error &)
                    {
                        continue;
                    }
                    if (slot_feasible(sc, n, p, m, coupled) && m.ee > best.ee)
                        best = {m.ee, p};
                }
            return best;
        }

        // Per-slot power search at a fixed trajectory
        OracleResult powers_at(const Scenario &sc, const TrajectoryGrid &traj, std::size_t res)
        {
            OracleResult out;
            out.traj = traj;
            for (int pass = 0; pass < 2; ++pass)
            {
                const bool coupled = pass == 1;
                out.powers.assign(sc.slots, NomaPower{});
                bool all = true;
                for (std::size_t n = 0; n < sc.slots && all; ++n)
                {
                    const auto b = best_slot_power(sc, n, sc.gains_at(traj.points[n]), res, coupled);
                    out.evaluated += res * res;
                    all = b.ee >= 0.0;
                    out.powers[n] = b.p;
                }
                if (all && constraint_residuals(sc, traj, out.powers).max() <= 0.0)
                {
                    out.feasible = true;
                    out.exact = !coupled || sc.slots == 1;
                    out.ee = evaluate_plan(sc, traj, out.powers).ee_mbits;
                    return out;
                }
            }
            out.exact = sc.slots == 1;
            return out;
        }

        // Lattice points (anchored at the start) that respect the reach of the
        // start and end points for each free index 1..N-1
        std::vector<std::vector<Position3D>> free_candidates(const Scenario &sc, double step)
        {
            const TrajectoryGrid base = sc.initial_trajectory();
            const double L = base.step_limit();
            const double N = static_cast<double>(sc.slots);
            std::vector<std::vector<Position3D>> cand(sc.slots > 0 ? sc.slots - 1 : 0);
            for (std::size_t n = 1; n < sc.slots; ++n)
            {
                const double r0 = static_cast<double>(n) * L + 1e-9;
                const double r1 = (N - static_cast<double>(n)) * L + 1e-9;
                const auto &s = base.start;
                const long k = static_cast<long>(std::floor(r0 / step));
                for (long i = -k; i <= k; ++i)
                    for (long j = -k; j <= k; ++j)
                    {
                        const Position3D q{s.x + step * static_cast<double>(i), s.y + step * static_cast<double>(j), s.z};
                        if (distance(q, s) <= r0 && distance(q, base.end) <= r1)
                            cand[n - 1].push_back(q);
                    }
            }
            return cand;
        }

        double product_size(const std::vector<std::vector<Position3D>> &cand)
        {
            double total = 1.0;
            for (const auto &c : cand)
                total *= static_cast<double>(c.size());
            return total;
        }

        // Depth-first over speed-feasible combinations of free points
        void for_each_trajectory(const Scenario &sc, const std::vector<std::vector<Position3D>> &cand,
                                 const std::function<void(const TrajectoryGrid &)> &visit)
        {
            TrajectoryGrid t = sc.initial_trajectory();
            const double L = t.step_limit() + 1e-9;
            std::function<void(std::size_t)> rec = [&](std::size_t n)
            {
                if (n == sc.slots)
                {
                    if (distance(t.points[n - 1], t.points[n]) <= L)
                        visit(t);
                    return;
                }
                for (const auto &q : cand[n - 1])
                {
                    if (distance(t.points[n - 1], q) > L)
                        continue;
                    t.points[n] = q;
                    rec(n + 1);
                }
            };
            if (sc.slots == 1)
                visit(t);
            else
                rec(1);
        }
    }

    OracleResult power_grid_oracle(const Scenario &sc, const TrajectoryGrid &traj, std::size_t resolution)
    {
        if (resolution < 2)
            fail(ErrorCode::InvalidParameter, "power grid needs at least two points per axis");
        if (static_cast<double>(sc.slots) * static_cast<double>(resolution) * static_cast<double>(resolution) >
            static_cast<double>(oracle_budget))
            fail(ErrorCode::OracleTooLarge, "power grid exceeds the evaluation budget");
        return powers_at(sc, traj, resolution);
    }

    OracleResult position_grid_oracle(const Scenario &sc, const std::vector<NomaPower> &powers, double step_m)
    {
        if (!(step_m > 0.0))
            fail(ErrorCode::InvalidParameter, "lattice pitch must be positive");
        if (powers.size() != sc.slots)
            fail(ErrorCode::InvalidParameter, "powers do not match the slot count");
        const auto cand = free_candidates(sc, step_m);
        if (product_size(cand) > static_cast<double>(oracle_budget))
            fail(ErrorCode::OracleTooLarge, "position lattice exceeds the evaluation budget");

        OracleResult out;
        out.powers = powers;
        for_each_trajectory(sc, cand, [&](const TrajectoryGrid &t)
        {
            ++out.evaluated;
            if (constraint_residuals(sc, t, powers).max() > 0.0)
                return;
            const double ee = evaluate_plan(sc, t, powers).ee_mbits;
            if (!out.feasible || ee > out.ee)
            {
                out.ee = ee;
                out.traj = t;
                out.feasible = true;
            }
        });
        return out;
    }

    OracleResult brute_force_oracle(const Scenario &sc, std::size_t power_resolution, double step_m)
    {
        if (sc.slots > 3)
            fail(ErrorCode::OracleTooLarge, "brute force is limited to three slots");
        if (power_resolution < 2 || !(step_m > 0.0))
            fail(ErrorCode::InvalidParameter, "oracle resolution must be positive");
        const auto cand = free_candidates(sc, step_m);
        const double size = product_size(cand) * static_cast<double>(sc.slots) *
                            static_cast<double>(power_resolution) * static_cast<double>(power_resolution);
        if (size > static_cast<double>(oracle_budget))
            fail(ErrorCode::OracleTooLarge, "joint grid exceeds the evaluation budget");

        OracleResult out;
        for_each_trajectory(sc, cand, [&](const TrajectoryGrid &t)
        {
            auto r = powers_at(sc, t, power_resolution);
            out.evaluated += r.evaluated;
            if (!r.feasible)
                return;
            if (!out.feasible || r.ee > out.ee)
            {
                const std::size_t evaluated = out.evaluated;
                out = std::move(r);
                out.evaluated = evaluated;
            }
            else if (!r.exact && r.ee >= out.ee)
                out.exact = false;
        });
        return out;
    }
}
