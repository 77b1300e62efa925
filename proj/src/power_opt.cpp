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

#include "eesim/power_opt.hpp"
#include "eesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace eesim
{
    namespace
    {
        constexpr double ln2 = std::numbers::ln2;
        constexpr double inf = std::numeric_limits<double>::infinity();

        // Rate and power of one slot as functions of (rho1, rho2) for a fixed position
        struct SlotModel
        {
            bool noma = true;
            double weight = 1.0;
            double own = 0.0;   // UAV own SINR per Watt of rho1 (also s of the SIC constraint)
            double H = 0.0;     // |h_sd|^2
            double n1 = 0.0;    // Destination noise, episode 1
            double r0 = 0.0;    // Relay SINR = r0 + r1 (rho1 + rho2)
            double r1 = 0.0;
            double kappa = 1.0; // P_sum = kappa (rho1 + rho2) + p0
            double p0 = 0.0;
            double tx_factor = 1.0;
            double harvest0 = 0.0, harvest1 = 0.0; // Harvested power E / T = harvest0 + harvest1 (rho1 + rho2)
            double gamma_sic = 0.0;
            double chi = 0.0;

            double q() const { return H / n1; }

            static SlotModel make(const Scenario &sc, const SlotGains &g, std::size_t n)
            {
                const auto &sp = sc.radio[n];
                const double a2 = sc.energy.absorption * sc.energy.absorption;
                SlotModel m;
                m.noma = sc.access == AccessMode::Noma;
                m.weight = m.noma ? 1.0 : 0.5;
                m.tx_factor = m.noma ? 1.0 : 0.5;
                m.own = sp.split_id * g.h_su * g.h_su / sp.noise_uav_id;
                m.H = g.h_sd * g.h_sd;
                m.n1 = sp.noise_dest_ep1;
                const double relay = sinr_dest_relay(g.g_sum, g.h_ud, sp, sc.energy.absorption);
                const double energy = sp.eh_efficiency * a2 * sp.episode1_fraction * sp.split_eh * g.g_sum * g.g_sum;
                const double prhs = energy / (1.0 - sp.episode1_fraction);
                if (sc.energy.scaled_by_tx_power)
                {
                    m.r1 = relay * m.tx_factor;
                    m.kappa = m.tx_factor * (1.0 - prhs);
                    m.p0 = sc.circuit_power_w;
                    m.harvest1 = energy / sp.episode1_fraction * m.tx_factor;
                }
                else
                {
                    m.r0 = relay;
                    m.kappa = m.tx_factor;
                    m.p0 = sc.circuit_power_w - prhs;
                    m.harvest0 = energy / sp.episode1_fraction;
                }
                m.gamma_sic = sc.sic_min[n];
                m.chi = sc.gamma_min[n] - m.r0;
                return m;
            }

            double power(double r1v, double r2v) const { return kappa * (r1v + r2v) + p0; }

            struct Deriv
            {
                double v = 0.0;
                Eigen::Vector2d g = Eigen::Vector2d::Zero();
                Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
            };

            // Concave rate surrogate; returns v = -inf outside its domain
            Deriv rhat(double x1, double x2, double lambda, bool derivatives = true) const
            {
                Deriv d;
                if (x1 < 0.0 || x2 < 0.0)
                {
                    d.v = -inf;
                    return d;
                }
                const double o = 1.0 + own * x1;
                double I, Im1, I1, I2, I22 = 0.0; // Im1 = I - 1
                const double relay = r0 + r1 * (x1 + x2);
                if (noma)
                {
                    const double sq = std::sqrt(x2 * H);
                    Im1 = relay + 2.0 * lambda * sq - lambda * lambda * (x1 * H + n1);
                    I1 = r1 - lambda * lambda * H;
                    I2 = r1 + (x2 > 0.0 ? lambda * std::sqrt(H / x2) : inf);
                    I22 = x2 > 0.0 ? -0.5 * lambda * std::sqrt(H) * std::pow(x2, -1.5) : -inf;
                }
                else
                {
                    Im1 = relay + x2 * H / n1;
                    I1 = r1;
                    I2 = r1 + H / n1;
                }
                I = 1.0 + Im1;
                if (!(I > 0.0))
                {
                    d.v = -inf;
                    return d;
                }
                d.v = weight * (std::log1p(own * x1) + std::log1p(Im1)) / ln2;
                if (!derivatives)
                    return d;
                d.g[0] = weight * (own / (o * ln2) + I1 / (I * ln2));
                d.g[1] = weight * (I2 / (I * ln2));
                d.h(0, 0) = weight * (-own * own / (o * o) - I1 * I1 / (I * I)) / ln2;
                d.h(0, 1) = d.h(1, 0) = weight * (-I1 * I2 / (I * I)) / ln2;
                d.h(1, 1) = weight * (I22 / I - I2 * I2 / (I * I)) / ln2;
                return d;
            }
        };

        std::vector<SlotModel> slot_models(const Scenario &sc, const TrajectoryGrid &traj)
        {
            if (traj.points.size() != sc.slots + 1)
                fail(ErrorCode::InvalidParameter, "trajectory does not match the slot count");
            std::vector<SlotModel> m;
            for (std::size_t n = 0; n < sc.slots; ++n)
                m.push_back(SlotModel::make(sc, sc.gains_at(traj.points[n]), n));
            return m;
        }

        // g(x) = c0 + sum coef * x[idx], in Watts
        struct Affine
        {
            std::string name;
            double c0 = 0.0;
            std::vector<std::pair<std::size_t, double>> terms;

            double value(const Vector &x) const
            {
                double v = c0;
                for (const auto &[i, c] : terms)
                    v += c * x[i];
                return v;
            }
        };

        // Constraint list in multiplier order: sic, dest, peak, avg replicas, eh sign (one each per slot)
        ScalarFunction as_kernel_constraint(const Affine &c)
        {
            ScalarFunction g;
            g.name = c.name;
            g.value = [c](const Vector &x) { return c.value(x); };
            g.gradient = [c](const Vector &, Vector &gr)
            {
                for (const auto &[i, v] : c.terms)
                    gr[i] += v;
            };
            g.add_hessian = [](const Vector &, double, Matrix &) {};
            for (const auto &t : c.terms)
                g.support.push_back(t.first);
            if (g.support.empty())
                g.support.push_back(0);
            return g;
        }

        std::vector<Affine> threshold_constraints(const Scenario &sc, const std::vector<SlotModel> &models)
        {
            const std::size_t N = models.size();
            std::vector<Affine> out;
            for (std::size_t n = 0; n < N; ++n)
            {
                const auto &m = models[n];
                Affine a;
                a.name = "SIC threshold, slot " + std::to_string(n);
                if (m.gamma_sic > 0.0)
                {
                    a.c0 = m.gamma_sic / m.own;
                    if (m.noma)
                        a.terms.push_back({2 * n, m.gamma_sic});
                    a.terms.push_back({2 * n + 1, -1.0});
                }
                else
                    a.c0 = -1.0;
                out.push_back(a);
            }
            for (std::size_t n = 0; n < N; ++n)
            {
                const auto &m = models[n];
                Affine a;
                a.name = "destination SINR threshold, slot " + std::to_string(n);
                a.c0 = m.chi / m.q();
                if (m.noma)
                    a.terms.push_back({2 * n, m.chi});
                a.terms.push_back({2 * n + 1, -1.0});
                out.push_back(a);
            }
            for (std::size_t n = 0; n < N; ++n)
            {
                Affine a;
                a.name = "peak power, slot " + std::to_string(n);
                a.c0 = -sc.peak_power_w;
                a.terms = {{2 * n, 1.0}, {2 * n + 1, 1.0}};
                out.push_back(a);
            }
            for (std::size_t n = 0; n < N; ++n)
            {
                Affine a;
                a.name = "average power";
                a.c0 = -sc.max_avg_power_w;
                for (std::size_t k = 0; k < N; ++k)
                {
                    const double c = models[k].tx_factor / static_cast<double>(N);
                    a.terms.push_back({2 * k, c});
                    a.terms.push_back({2 * k + 1, c});
                }
                out.push_back(a);
            }
            for (std::size_t n = 0; n < N; ++n)
            {
                Affine a;
                a.name = "harvested power sign, slot " + std::to_string(n);
                a.c0 = -models[n].harvest0;
                if (models[n].harvest1 != 0.0)
                    a.terms = {{2 * n, -models[n].harvest1}, {2 * n + 1, -models[n].harvest1}};
                out.push_back(a);
            }
            return out;
        }

        std::vector<double *> multipliers(AlmState &alm)
        {
            std::vector<double *> out;
            for (auto *v : {&alm.mult_sic, &alm.mult_dest, &alm.mult_peak, &alm.mult_avg, &alm.mult_eh})
                for (auto &m : *v)
                    out.push_back(&m);
            return out;
        }

        Vector pack(const std::vector<NomaPower> &p)
        {
            Vector x(static_cast<Eigen::Index>(2 * p.size()));
            for (std::size_t n = 0; n < p.size(); ++n)
            {
                x[2 * n] = p[n].rho1;
                x[2 * n + 1] = p[n].rho2;
            }
            return x;
        }

        std::vector<NomaPower> unpack(const Vector &x)
        {
            std::vector<NomaPower> p(static_cast<std::size_t>(x.size()) / 2);
            for (std::size_t n = 0; n < p.size(); ++n)
                p[n] = {std::max(0.0, x[2 * n]), std::max(0.0, x[2 * n + 1])};
            return p;
        }

        std::vector<double> slot_ratios(const PlanMetrics &pm)
        {
            std::vector<double> r;
            for (const auto &m : pm.slots)
                r.push_back(m.power_sum / std::max(m.sum_rate, 1e-300));
            return r;
        }

        // Largest per-slot relative change; the sum is dominated by the weakest slots
        double ratio_change(const std::vector<double> &a, const std::vector<double> &b)
        {
            double worst = 0.0;
            for (std::size_t n = 0; n < a.size(); ++n)
                worst = std::max(worst, std::abs(a[n] - b[n]) / b[n]);
            return worst;
        }

        QuadState quad_at(const Scenario &sc, const TrajectoryGrid &traj, const std::vector<NomaPower> &p,
                          const PlanMetrics &pm)
        {
            QuadState q;
            q.varpi = varpi_update(pm.slots);
            for (std::size_t n = 0; n < sc.slots; ++n)
                q.lambda.push_back(lambda_update(p[n], sc.gains_at(traj.points[n]).h_sd, sc.radio[n]));
            return q;
        }

        PowerSolution finish(const Scenario &sc, const TrajectoryGrid &traj, PowerSolution sol)
        {
            sol.powers = restore_feasibility(sc, traj, std::move(sol.powers));
            const auto pm = evaluate_plan(sc, traj, sol.powers);
            sol.ee = pm.ee_mbits;
            sol.residuals = constraint_residuals(sc, traj, sol.powers);
            sol.feasible = sol.residuals.max() <= 1e-4;
            return sol;
        }
    }

    AlmState AlmState::zeros(std::size_t slots)
    {
        AlmState a;
        a.mult_sic.assign(slots, 0.0);
        a.mult_dest.assign(slots, 0.0);
        a.mult_peak.assign(slots, 0.0);
        a.mult_avg.assign(slots, 0.0);
        a.mult_eh.assign(slots, 0.0);
        return a;
    }

    ChiCoefficients chi(const Scenario &sc, const TrajectoryGrid &traj)
    {
        ChiCoefficients c;
        for (const auto &m : slot_models(sc, traj))
            c.chi.push_back(m.chi);
        return c;
    }

    std::vector<double> varpi_update(const std::vector<LinkMetrics> &metrics)
    {
        std::vector<double> v;
        for (const auto &m : metrics)
        {
            if (!(m.power_sum > 0.0) || !(m.sum_rate > 0.0))
                fail(ErrorCode::InvalidParameter, "quadratic transform needs positive power and rate");
            v.push_back(1.0 / (2.0 * m.power_sum * m.sum_rate));
        }
        return v;
    }

    double lambda_update(const NomaPower &p, double h_sd, const SlotRadioParams &sp)
    {
        const double H = h_sd * h_sd;
        return std::sqrt(p.rho2 * H) / (p.rho1 * H + sp.noise_dest_ep1);
    }

    double rhat_sum(const NomaPower &p, const SlotGains &gains, const SlotRadioParams &sp, double lambda,
                    const MetricsOptions &opts)
    {
        const double g_su = gains.h_su * gains.h_su;
        const double H = gains.h_sd * gains.h_sd;
        const bool noma = opts.access == AccessMode::Noma;
        const double weight = noma ? 1.0 : 0.5;
        double relay = sinr_dest_relay(gains.g_sum, gains.h_ud, sp, opts.energy.absorption);
        if (opts.energy.scaled_by_tx_power)
            relay *= noma ? p.total() : 0.5 * p.total();

        const double own = sp.split_id * p.rho1 * g_su / sp.noise_uav_id;
        const double inner = noma ? relay + 2.0 * lambda * std::sqrt(p.rho2 * H) - lambda * lambda * (p.rho1 * H + sp.noise_dest_ep1)
                                  : relay + p.rho2 * H / sp.noise_dest_ep1;
        if (!(inner > -1.0))
            return -inf;
        return weight * (std::log1p(own) + std::log1p(inner)) / ln2;
    }

    double alm_objective(const std::vector<NomaPower> &powers, const QuadState &quad, const AlmState &alm,
                         const Scenario &sc, const TrajectoryGrid &traj)
    {
        const auto models = slot_models(sc, traj);
        const std::size_t N = models.size();
        if (powers.size() != N || quad.varpi.size() != N || quad.lambda.size() != N)
            fail(ErrorCode::InvalidParameter, "power plan does not match the slot count");

        double f = 0.0;
        for (std::size_t n = 0; n < N; ++n)
        {
            const auto &m = models[n];
            const double P = m.power(powers[n].rho1, powers[n].rho2);
            const double R = m.rhat(powers[n].rho1, powers[n].rho2, quad.lambda[n], false).v;
            if (!(R > 0.0))
                fail(ErrorCode::SurrogateCollapse, "rate surrogate is not positive at slot " + std::to_string(n));
            f += quad.varpi[n] * P * P + 1.0 / (4.0 * quad.varpi[n] * R * R);
        }

        AlmState a = alm;
        const auto cons = threshold_constraints(sc, models);
        const auto mult = multipliers(a);
        const Vector x = pack(powers);
        const double z = alm.penalty;
        for (std::size_t j = 0; j < cons.size(); ++j)
        {
            const double m = *mult[j];
            const double h = std::max(0.0, m + z * cons[j].value(x));
            f += (h * h - m * m) / (2.0 * z);
        }
        return f;
    }

    void check_power_feasibility(const Scenario &sc, const TrajectoryGrid &traj)
    {
        const double cap = std::min(sc.peak_power_w, sc.max_avg_power_w * (sc.access == AccessMode::Noma ? 1.0 : 2.0));
        const auto models = slot_models(sc, traj);
        for (std::size_t n = 0; n < models.size(); ++n)
        {
            const auto &m = models[n];
            if (m.gamma_sic > 0.0 && cap * m.own < m.gamma_sic)
                fail(ErrorCode::InfeasibleProblem, "SIC threshold unreachable at slot " + std::to_string(n));
            if (m.chi > 0.0 && cap * m.q() < m.chi)
                fail(ErrorCode::InfeasibleProblem, "destination SINR threshold unreachable at slot " + std::to_string(n));
        }
    }

    std::vector<NomaPower> restore_feasibility(const Scenario &sc, const TrajectoryGrid &traj, std::vector<NomaPower> p)
    {
        const auto models = slot_models(sc, traj);
        const std::size_t N = models.size();
        constexpr double margin = 1.0 + 1e-12;

        auto required_rho2 = [&](std::size_t n, double rho1)
        {
            const auto &m = models[n];
            const double lead = m.noma ? rho1 : 0.0;
            double r = 0.0;
            if (m.gamma_sic > 0.0)
                r = std::max(r, m.gamma_sic * (lead + 1.0 / m.own));
            if (m.chi > 0.0)
                r = std::max(r, m.chi * (lead + 1.0 / m.q()));
            return r * margin;
        };

        for (std::size_t n = 0; n < N; ++n)
        {
            auto &q = p[n];
            q.rho1 = std::max(0.0, q.rho1);
            q.rho2 = std::max(q.rho2, required_rho2(n, q.rho1));
            if (models[n].noma)
            {
                q.rho2 = std::min(q.rho2, std::max(sc.peak_power_w, required_rho2(n, 0.0)));
                if (q.rho1 + q.rho2 > sc.peak_power_w)
                    q.rho1 = std::max(0.0, sc.peak_power_w - q.rho2);
            }
            else
            {
                q.rho1 = std::min(q.rho1, sc.peak_power_w);
                q.rho2 = std::min(q.rho2, sc.peak_power_w);
            }
        }

        double avg = 0.0, avg1 = 0.0;
        for (std::size_t n = 0; n < N; ++n)
        {
            avg += models[n].tx_factor * p[n].total() / static_cast<double>(N);
            avg1 += models[n].tx_factor * p[n].rho1 / static_cast<double>(N);
        }
        if (avg > sc.max_avg_power_w && avg1 > 0.0)
        {
            const double f = std::max(0.0, 1.0 - (avg - sc.max_avg_power_w) / avg1);
            for (auto &q : p)
                q.rho1 *= f;
        }
        return p;
    }

    PowerSolution solve_power_alm(const TrajectoryGrid &traj, const Scenario &sc, const std::vector<NomaPower> &powers0,
                                  const PowerOptions &opts)
    {
        if (sc.access != AccessMode::Noma)
            fail(ErrorCode::InvalidParameter, "the augmented Lagrangian power step targets NOMA scenarios");
        if (powers0.size() != sc.slots)
            fail(ErrorCode::InvalidParameter, "initial powers do not match the slot count");
        for (const auto &p : powers0)
            if (!(p.rho1 >= 0.0 && p.rho2 >= 0.0 && p.total() < sc.peak_power_w))
                fail(ErrorCode::InvalidParameter, "initial powers must satisfy the peak constraint strictly");
        check_power_feasibility(sc, traj);

        const auto models = slot_models(sc, traj);
        const auto cons = threshold_constraints(sc, models);
        const std::size_t N = sc.slots;

        PowerSolution sol;
        sol.powers = powers0;
        auto pm = evaluate_plan(sc, traj, sol.powers);
        QuadState quad = quad_at(sc, traj, sol.powers, pm);
        AlmState alm = AlmState::zeros(N);
        auto r_prev = slot_ratios(evaluate_plan(sc, traj, restore_feasibility(sc, traj, sol.powers)));
        double B_prev = std::accumulate(r_prev.begin(), r_prev.end(), 0.0);
        sol.objective_trace.push_back(B_prev);

        double tau = 1.0;
        int increases = 0, calm = 0;
        for (std::size_t l = 1; l <= opts.max_iterations; ++l)
        {
            sol.iterations = l;
            const auto mult = multipliers(alm);
            std::vector<double> mvals;
            for (auto *m : mult)
                mvals.push_back(*m);
            const double z = alm.penalty;

            ConvexProblem prob;
            prob.dimension = 2 * N;
            prob.box_bounds.assign(2 * N, Bound{0.0, inf});
            auto &f = prob.objective;
            f.name = "augmented Lagrangian";
            f.value = [&, z, mvals](const Vector &x)
            {
                double v = 0.0;
                for (std::size_t n = 0; n < N; ++n)
                {
                    const auto &m = models[n];
                    const double P = m.power(x[2 * n], x[2 * n + 1]);
                    const double R = m.rhat(x[2 * n], x[2 * n + 1], quad.lambda[n], false).v;
                    if (!(R > 0.0))
                        return inf;
                    v += quad.varpi[n] * P * P + 1.0 / (4.0 * quad.varpi[n] * R * R);
                }
                for (std::size_t j = 0; j < cons.size(); ++j)
                {
                    const double h = std::max(0.0, mvals[j] + z * cons[j].value(x));
                    v += (h * h - mvals[j] * mvals[j]) / (2.0 * z);
                }
                return v;
            };
            f.gradient = [&, z, mvals](const Vector &x, Vector &g)
            {
                for (std::size_t n = 0; n < N; ++n)
                {
                    const auto &m = models[n];
                    const double P = m.power(x[2 * n], x[2 * n + 1]);
                    const auto R = m.rhat(x[2 * n], x[2 * n + 1], quad.lambda[n]);
                    const double w = quad.varpi[n];
                    const double dR = -1.0 / (2.0 * w * R.v * R.v * R.v);
                    g[2 * n] += 2.0 * w * P * m.kappa + dR * R.g[0];
                    g[2 * n + 1] += 2.0 * w * P * m.kappa + dR * R.g[1];
                }
                for (std::size_t j = 0; j < cons.size(); ++j)
                {
                    const double h = mvals[j] + z * cons[j].value(x);
                    if (h > 0.0)
                        for (const auto &[i, c] : cons[j].terms)
                            g[i] += h * c;
                }
            };
            f.add_hessian = [&, z, mvals](const Vector &x, double wt, Matrix &H)
            {
                for (std::size_t n = 0; n < N; ++n)
                {
                    const auto &m = models[n];
                    const auto R = m.rhat(x[2 * n], x[2 * n + 1], quad.lambda[n]);
                    const double w = quad.varpi[n];
                    const double d1 = -1.0 / (2.0 * w * std::pow(R.v, 3));
                    const double d2 = 3.0 / (2.0 * w * std::pow(R.v, 4));
                    const Eigen::Matrix2d block = 2.0 * w * m.kappa * m.kappa * Eigen::Matrix2d::Ones() +
                                                  d2 * R.g * R.g.transpose() + d1 * R.h;
                    H.block<2, 2>(2 * n, 2 * n) += wt * block;
                }
                for (std::size_t j = 0; j < cons.size(); ++j)
                {
                    const double h = mvals[j] + z * cons[j].value(x);
                    if (h > 0.0)
                        for (const auto &[a, ca] : cons[j].terms)
                            for (const auto &[b, cb] : cons[j].terms)
                                H(a, b) += wt * z * ca * cb;
                }
            };

            // Peak caps stay hard: with P_max = P_peak the average cap is active
            // exactly when every slot is at its peak, and penalizing both lets
            // the average multiplier starve the strongest slots
            for (const auto &c : cons)
                if (c.name.rfind("peak power", 0) == 0)
                    prob.inequality_constraints.push_back(as_kernel_constraint(c));

            const Vector x0 = pack(sol.powers);
            const auto sr = solve(prob, x0, opts.kernel);
            const Vector x = x0 + tau * (sr.x_opt - x0);
            sol.powers = unpack(x);

            double worst = 0.0;
            for (std::size_t j = 0; j < cons.size(); ++j)
            {
                const double g = cons[j].value(x);
                worst = std::max(worst, g);
                *mult[j] = std::max(0.0, *mult[j] + z * g);
            }
            alm.penalty = std::min(2.0 * alm.penalty, opts.max_penalty);

            pm = evaluate_plan(sc, traj, sol.powers);
            quad = quad_at(sc, traj, sol.powers, pm);
            // Merit on the nearest admissible allocation, so penalty growth is not mistaken for divergence
            const auto r = slot_ratios(evaluate_plan(sc, traj, restore_feasibility(sc, traj, sol.powers)));
            const double B = std::accumulate(r.begin(), r.end(), 0.0);
            sol.objective_trace.push_back(B);

            increases = B > B_prev ? increases + 1 : 0;
            if (increases >= 3)
            {
                tau *= 0.5;
                sol.damped = true;
                increases = 0;
            }
            calm = ratio_change(r, r_prev) <= opts.tol ? calm + 1 : 0;
            B_prev = B;
            r_prev = r;
            if (calm >= 2 && worst <= opts.violation_tol)
            {
                sol.converged = true;
                break;
            }
        }
        return finish(sc, traj, std::move(sol));
    }

    PowerSolution solve_power_parametric(const TrajectoryGrid &traj, const Scenario &sc,
                                         const std::vector<NomaPower> &powers0, ParametricMode mode,
                                         const PowerOptions &opts)
    {
        if (powers0.size() != sc.slots)
            fail(ErrorCode::InvalidParameter, "initial powers do not match the slot count");
        check_power_feasibility(sc, traj);

        const auto models = slot_models(sc, traj);
        const auto cons = threshold_constraints(sc, models);
        const std::size_t N = sc.slots;

        PowerSolution sol;
        sol.powers = powers0;
        auto pm = evaluate_plan(sc, traj, sol.powers);

        for (std::size_t l = 1; l <= opts.max_iterations; ++l)
        {
            sol.iterations = l;
            std::vector<double> q(N), lambda(N);
            double R = 0.0, Pw = 0.0;
            for (std::size_t n = 0; n < N; ++n)
            {
                R += pm.slots[n].sum_rate;
                Pw += pm.slots[n].power_sum;
                q[n] = pm.slots[n].sum_rate / pm.slots[n].power_sum;
                lambda[n] = lambda_update(sol.powers[n], sc.gains_at(traj.points[n]).h_sd, sc.radio[n]);
            }
            if (mode == ParametricMode::Aggregate)
                std::fill(q.begin(), q.end(), R / Pw);
            sol.objective_trace.push_back(mode == ParametricMode::Aggregate ? R / Pw : pm.ee_sum);

            ConvexProblem prob;
            prob.dimension = 2 * N;
            prob.box_bounds.assign(2 * N, Bound{0.0, inf});
            auto &f = prob.objective;
            f.name = "parametric rate minus power";
            f.value = [&, q, lambda](const Vector &x)
            {
                double v = 0.0;
                for (std::size_t n = 0; n < N; ++n)
                {
                    const double r = models[n].rhat(x[2 * n], x[2 * n + 1], lambda[n], false).v;
                    if (!std::isfinite(r))
                        return inf;
                    v -= r - q[n] * models[n].power(x[2 * n], x[2 * n + 1]);
                }
                return v;
            };
            f.gradient = [&, q, lambda](const Vector &x, Vector &g)
            {
                for (std::size_t n = 0; n < N; ++n)
                {
                    const auto r = models[n].rhat(x[2 * n], x[2 * n + 1], lambda[n]);
                    g[2 * n] -= r.g[0] - q[n] * models[n].kappa;
                    g[2 * n + 1] -= r.g[1] - q[n] * models[n].kappa;
                }
            };
            f.add_hessian = [&, lambda](const Vector &x, double w, Matrix &H)
            {
                for (std::size_t n = 0; n < N; ++n)
                    H.block<2, 2>(2 * n, 2 * n) -= w * models[n].rhat(x[2 * n], x[2 * n + 1], lambda[n]).h;
            };

            for (const auto &c : cons)
            {
                if (c.terms.empty() && c.c0 < 0.0)
                    continue;
                prob.inequality_constraints.push_back(as_kernel_constraint(c));
            }
            if (!models.front().noma)
            {
                // Each half-slot message obeys the peak cap on its own
                prob.inequality_constraints.erase(
                    std::remove_if(prob.inequality_constraints.begin(), prob.inequality_constraints.end(),
                                   [](const ScalarFunction &g) { return g.name.rfind("peak power", 0) == 0; }),
                    prob.inequality_constraints.end());
                for (std::size_t j = 0; j < 2 * N; ++j)
                    prob.box_bounds[j].hi = sc.peak_power_w;
            }

            const auto sr = solve(prob, pack(sol.powers), opts.kernel);
            sol.powers = unpack(sr.x_opt);
            const auto pm_new = evaluate_plan(sc, traj, sol.powers);

            double gap = 0.0, scale = 0.0;
            for (std::size_t n = 0; n < N; ++n)
            {
                gap += pm_new.slots[n].sum_rate - q[n] * pm_new.slots[n].power_sum;
                scale += pm_new.slots[n].sum_rate;
            }
            pm = pm_new;
            if (std::abs(gap) <= opts.tol * std::max(scale, 1e-300))
            {
                sol.converged = true;
                break;
            }
        }
        return finish(sc, traj, std::move(sol));
    }
}
