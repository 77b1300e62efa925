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

#include "eesim/trajectory_opt.hpp"
#include "eesim/errors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>

namespace eesim
{
    namespace
    {
        constexpr double ln2 = std::numbers::ln2;

        struct Profile
        {
            double value = 0.0;
            double gx = 0.0, gy = 0.0;
            double hxx = 0.0, hxy = 0.0, hyy = 0.0;
        };

        // |u - a|^2 e^{xi |u - a|} and its horizontal derivatives; u.z is fixed
        Profile profile_xy(double x, double y, double z, const Position3D &a, double xi)
        {
            const double dx = x - a.x, dy = y - a.y, dz = z - a.z;
            const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            const double e = std::exp(xi * r);
            Profile p;
            p.value = r * r * e;
            const double h = (2.0 + xi * r) * e;
            p.gx = h * dx;
            p.gy = h * dy;
            const double k = r > 0.0 ? xi * e * (3.0 + xi * r) / r : 0.0;
            p.hxx = h + k * dx * dx;
            p.hxy = k * dx * dy;
            p.hyy = h + k * dy * dy;
            return p;
        }

        // Per-slot coefficients of the trajectory surrogate, frozen at the expansion point
        struct SlotCoeffs
        {
            double alpha = 0.0, beta = 0.0;
            double weight = 1.0;     // Time-split weight on the rates
            double k1 = 0.0;         // UAV own SINR = k1 e^{-c}
            double k2 = 0.0;         // Relay SINR = k2 e^{-c-d}
            double k3 = 0.0;         // Relay power = k3 e^{-c}
            double direct = 0.0;     // Direct SINR
            double fixed_power = 0.0; // tx + P_c
            double c_k = 0.0, d_k = 0.0;

            // Surrogate terms: F(c, d) and partial derivatives
            double value(double c, double d) const
            {
                const double own = std::log1p(k1 * std::exp(-c)) / ln2;
                const double mrc = std::log1p(direct + k2 * std::exp(-c - d)) / ln2;
                return alpha * (weight * (own + mrc) - beta * (fixed_power - k3 * std::exp(-c)));
            }
            double dc() const
            {
                const double e1 = k1 * std::exp(-c_k);
                const double e2 = k2 * std::exp(-c_k - d_k);
                return alpha * (-weight * e1 / ((1.0 + e1) * ln2) - weight * e2 / ((1.0 + direct + e2) * ln2) -
                                beta * k3 * std::exp(-c_k));
            }
            double dd() const
            {
                const double e2 = k2 * std::exp(-c_k - d_k);
                return alpha * (-weight * e2 / ((1.0 + direct + e2) * ln2));
            }
        };

        double sum_weighted_rate(const PlanMetrics &pm, const FractionalParams &fp)
        {
            double s = 0.0;
            for (std::size_t n = 0; n < pm.slots.size(); ++n)
                s += fp.alpha[n] * pm.slots[n].sum_rate;
            return s;
        }
    }

    void FractionalParams::validate() const
    {
        if (alpha.size() != beta.size())
            fail(ErrorCode::InvalidParameter, "alpha and beta must have equal length");
        for (std::size_t n = 0; n < alpha.size(); ++n)
            if (!(alpha[n] > 0.0) || !(beta[n] >= 0.0) || !std::isfinite(alpha[n]) || !std::isfinite(beta[n]))
                fail(ErrorCode::InvalidParameter, "alpha must be positive and beta nonnegative");
    }

    FractionalParams FractionalParams::at(const Scenario &sc, const TrajectoryGrid &traj, const std::vector<NomaPower> &powers)
    {
        const auto pm = evaluate_plan(sc, traj, powers);
        FractionalParams fp;
        for (const auto &m : pm.slots)
        {
            fp.alpha.push_back(1.0 / m.power_sum);
            fp.beta.push_back(m.sum_rate / m.power_sum);
        }
        return fp;
    }

    SlackState SlackState::expand(const Scenario &sc, const TrajectoryGrid &traj)
    {
        SlackState s;
        const double xi = sc.channel.absorption_coeff;
        for (std::size_t n = 0; n < sc.slots; ++n)
        {
            const auto &u = traj.points[n];
            const double ps = inverse_gain_profile(u, sc.source, xi);
            const double pd = inverse_gain_profile(u, sc.destination, xi);
            if (!(ps > 0.0) || !(pd > 0.0))
                fail(ErrorCode::DegenerateGeometry, "UAV co-located with a ground node at slot " + std::to_string(n));
            s.expansion_c.push_back(std::log(ps));
            s.expansion_d.push_back(std::log(pd));
            s.c.push_back(s.expansion_c.back());
            s.d.push_back(s.expansion_d.back());
            s.a.push_back(ps);
            s.b.push_back(pd);
            s.expansion_u.push_back(u);
        }
        return s;
    }

    DerivedConstants DerivedConstants::of(const Scenario &sc, std::size_t slot)
    {
        const auto &sp = sc.radio.at(slot);
        const double b2 = sc.channel.ref_gain * sc.channel.ref_gain;
        const double a2 = sc.energy.absorption * sc.energy.absorption;
        DerivedConstants k;
        k.c1 = sp.eh_efficiency * static_cast<double>(sc.rhs.element_count()) * a2 * sp.split_eh * b2;
        k.c2 = sp.noise_uav_id / (sp.split_id * b2);
        return k;
    }

    double subtractive_objective(const TrajectoryGrid &traj, const FractionalParams &fp,
                                 const std::vector<NomaPower> &powers, const Scenario &sc)
    {
        const auto pm = evaluate_plan(sc, traj, powers);
        if (fp.alpha.size() != pm.slots.size() || fp.beta.size() != pm.slots.size())
            fail(ErrorCode::InvalidParameter, "fractional parameters do not match the slot count");
        double s = 0.0;
        for (std::size_t n = 0; n < pm.slots.size(); ++n)
            s += fp.alpha[n] * (pm.slots[n].sum_rate - fp.beta[n] * pm.slots[n].power_sum);
        return s;
    }

    double taylor_exp_lower_bound(double c, double c_k) { return std::exp(c_k) * (1.0 + c - c_k); }

    double taylor_distance_lower_bound(const Position3D &u, const Position3D &u_k, const Position3D &anchor, double xi)
    {
        const Position3D d = u_k - anchor;
        const double r = d.norm();
        if (!(r > 0.0))
            fail(ErrorCode::DegenerateGeometry, "expansion point coincides with the anchor");
        const double e = std::exp(xi * r);
        return r * r * e + (2.0 + xi * r) * e * d.dot(u - u_k);
    }

    TrajectoryGrid P5Problem::decode(const Vector &x) const
    {
        TrajectoryGrid t = base;
        for (std::size_t i = 0; i < free_points.size(); ++i)
        {
            auto &p = t.points[free_points[i]];
            p.x = x[2 * i];
            p.y = x[2 * i + 1];
        }
        return t;
    }

    SlackState P5Problem::decode_slack(const Vector &x, const SlackState &e) const
    {
        SlackState s = e;
        for (std::size_t n = 0; n < slots; ++n)
        {
            s.a[n] = x[index_a(n)] * std::exp(e.expansion_c[n]);
            s.b[n] = x[index_b(n)] * std::exp(e.expansion_d[n]);
            s.c[n] = x[index_c(n)];
            s.d[n] = x[index_d(n)];
        }
        return s;
    }

    double P5Problem::surrogate(const Vector &x) const { return -objective_scale * problem.objective.value(x); }

    P5Problem build_p5(const TrajectoryGrid &traj_k, const SlackState &slack_k, const FractionalParams &fp,
                       const std::vector<NomaPower> &powers, const Scenario &sc)
    {
        fp.validate();
        const std::size_t N = sc.slots;
        if (traj_k.points.size() != N + 1 || fp.alpha.size() != N || powers.size() != N || slack_k.c.size() != N)
            fail(ErrorCode::InvalidParameter, "subproblem inputs do not match the slot count");

        P5Problem P;
        P.slots = N;
        P.base = traj_k;
        for (std::size_t p = 1; p < N; ++p)
            P.free_points.push_back(p);
        const std::size_t F = P.free_points.size();
        const std::size_t dim = 2 * F + 4 * N;
        P.problem.dimension = dim;

        // Variable index of point p, or -1 when fixed
        std::vector<long> var(N + 1, -1);
        for (std::size_t i = 0; i < F; ++i)
            var[P.free_points[i]] = static_cast<long>(2 * i);

        const auto pm = evaluate_plan(sc, traj_k, powers);
        const double xi = sc.channel.absorption_coeff;
        const double b2 = sc.channel.ref_gain * sc.channel.ref_gain;
        const double a2 = sc.energy.absorption * sc.energy.absorption;
        const bool noma = sc.access == AccessMode::Noma;

        std::vector<SlotCoeffs> co(N);
        for (std::size_t n = 0; n < N; ++n)
        {
            const auto &sp = sc.radio[n];
            const auto &m = pm.slots[n];
            auto &k = co[n];
            k.alpha = fp.alpha[n];
            k.beta = fp.beta[n];
            k.weight = noma ? 1.0 : 0.5;
            k.c_k = slack_k.expansion_c[n];
            k.d_k = slack_k.expansion_d[n];
            const double g_sum = sc.gains_at(traj_k.points[n]).g_sum;
            const double G = g_sum * g_sum * std::exp(k.c_k); // g_sum^2 phi_s, nearly position independent
            const double tx_scale = sc.energy.scaled_by_tx_power ? m.tx_power : 1.0;
            k.k1 = sp.split_id * powers[n].rho1 * b2 / sp.noise_uav_id;
            k.k2 = sp.eh_efficiency * a2 * sp.split_eh * G * b2 / sp.noise_dest_ep2 * tx_scale;
            k.k3 = sp.eh_efficiency * a2 * sp.episode1_fraction * sp.split_eh * G / (1.0 - sp.episode1_fraction) * tx_scale;
            k.direct = m.sinr_dest_direct;
            k.fixed_power = m.tx_power + sc.circuit_power_w;
        }

        double scale = sum_weighted_rate(pm, fp);
        if (!(scale > 0.0))
            scale = 1.0;
        P.objective_scale = scale;

        // Objective: minus the linearized surrogate, normalized
        {
            double constant = 0.0;
            Vector lin = Vector::Zero(static_cast<Eigen::Index>(dim));
            for (std::size_t n = 0; n < N; ++n)
            {
                const auto &k = co[n];
                const double gc = k.dc(), gd = k.dd();
                constant += k.value(k.c_k, k.d_k) - gc * k.c_k - gd * k.d_k;
                lin[P.index_c(n)] = gc;
                lin[P.index_d(n)] = gd;
            }
            lin /= -scale;
            constant /= -scale;
            auto &f = P.problem.objective;
            f.name = "surrogate";
            f.value = [lin, constant](const Vector &x) { return constant + lin.dot(x); };
            f.gradient = [lin](const Vector &, Vector &g) { g = lin; };
            f.add_hessian = [](const Vector &, double, Matrix &) {};
        }

        auto &cons = P.problem.inequality_constraints;
        const double L = traj_k.step_limit();
        const double L2 = L * L;

        for (std::size_t n = 0; n < N; ++n)
        {
            const auto &k = co[n];
            const long v = var[n];
            const Position3D u = traj_k.points[n];
            const std::size_t ia = P.index_a(n), ib = P.index_b(n), ic = P.index_c(n), id = P.index_d(n);

            // phi(u) e^{-expansion} <= slack, for the source and the destination profiles
            auto add_profile = [&](const Position3D &anchor, double expansion, std::size_t is, const char *tag)
            {
                ScalarFunction g;
                g.name = std::string(tag) + " profile, slot " + std::to_string(n);
                const double inv = std::exp(-expansion);
                if (v < 0)
                {
                    const double fixed = inverse_gain_profile(u, anchor, xi) * inv;
                    g.value = [fixed, is](const Vector &x) { return fixed - x[is]; };
                    g.gradient = [is](const Vector &, Vector &gr) { gr[is] = -1.0; };
                    g.add_hessian = [](const Vector &, double, Matrix &) {};
                    g.support = {is};
                }
                else
                {
                    const auto iv = static_cast<std::size_t>(v);
                    const double z = u.z;
                    g.value = [=](const Vector &x) { return profile_xy(x[iv], x[iv + 1], z, anchor, xi).value * inv - x[is]; };
                    g.gradient = [=](const Vector &x, Vector &gr)
                    {
                        const auto p = profile_xy(x[iv], x[iv + 1], z, anchor, xi);
                        gr[iv] = p.gx * inv;
                        gr[iv + 1] = p.gy * inv;
                        gr[is] = -1.0;
                    };
                    g.add_hessian = [=](const Vector &x, double w, Matrix &H)
                    {
                        const auto p = profile_xy(x[iv], x[iv + 1], z, anchor, xi);
                        H(iv, iv) += w * inv * p.hxx;
                        H(iv, iv + 1) += w * inv * p.hxy;
                        H(iv + 1, iv) += w * inv * p.hxy;
                        H(iv + 1, iv + 1) += w * inv * p.hyy;
                    };
                    g.support = {iv, iv + 1, is};
                }
                cons.push_back(std::move(g));
            };
            add_profile(sc.source, k.c_k, ia, "source");
            add_profile(sc.destination, k.d_k, ib, "destination");

            // slack <= 1 + t - t_k (tangent of the exponential)
            auto add_tangent = [&](std::size_t is, std::size_t it, double t_k, const char *tag)
            {
                ScalarFunction g;
                g.name = std::string(tag) + " exponential tangent, slot " + std::to_string(n);
                g.value = [=](const Vector &x) { return x[is] - 1.0 - x[it] + t_k; };
                g.gradient = [=](const Vector &, Vector &gr)
                {
                    gr[is] = 1.0;
                    gr[it] = -1.0;
                };
                g.add_hessian = [](const Vector &, double, Matrix &) {};
                g.support = {is, it};
                cons.push_back(std::move(g));
            };
            add_tangent(ia, ic, k.c_k, "source");
            add_tangent(ib, id, k.d_k, "destination");

            // UAV decodes the destination message: Gamma (iota rho1 + c2 e^c) / rho2 <= 1
            const double Gamma = sc.sic_min[n];
            if (Gamma > 0.0)
            {
                const double rho2 = powers[n].rho2;
                const double c2 = DerivedConstants::of(sc, n).c2;
                const double lead = noma ? powers[n].rho1 : 0.0;
                ScalarFunction g;
                g.name = "SIC threshold, slot " + std::to_string(n);
                if (!(rho2 > 0.0))
                {
                    g.value = [](const Vector &) { return 1.0; };
                    g.gradient = [](const Vector &, Vector &) {};
                    g.add_hessian = [](const Vector &, double, Matrix &) {};
                }
                else
                {
                    g.value = [=](const Vector &x) { return Gamma * (lead + c2 * std::exp(x[ic])) / rho2 - 1.0; };
                    g.gradient = [=](const Vector &x, Vector &gr) { gr[ic] = Gamma * c2 * std::exp(x[ic]) / rho2; };
                    g.add_hessian = [=](const Vector &x, double w, Matrix &H) { H(ic, ic) += w * Gamma * c2 * std::exp(x[ic]) / rho2; };
                }
                g.support = {ic};
                cons.push_back(std::move(g));
            }

            // Destination QoS, only when the direct link alone misses the threshold
            // by more than qos_slack relative. A power step can leave the threshold
            // active with the UAV already at its best reachable point, so the
            // constraint carries the same slack to keep a strict interior.
            constexpr double qos_slack = 1e-6;
            const double gmin = sc.gamma_min[n];
            const double direct = k.direct;
            if (gmin - direct > qos_slack * gmin)
            {
                const double x_k = k.c_k + k.d_k;
                const double k2e = k.k2 * std::exp(-x_k);
                ScalarFunction g;
                g.name = "destination SINR threshold, slot " + std::to_string(n);
                g.value = [=](const Vector &x) { return (gmin - direct - k2e * (1.0 - x[ic] - x[id] + x_k)) / gmin - qos_slack; };
                g.gradient = [=](const Vector &, Vector &gr)
                {
                    gr[ic] = k2e / gmin;
                    gr[id] = k2e / gmin;
                };
                g.add_hessian = [](const Vector &, double, Matrix &) {};
                g.support = {ic, id};
                cons.push_back(std::move(g));
            }
        }

        // Average relay power floor, tangent of e^{-c}
        if (sc.eh_floor_w > 0.0)
        {
            std::vector<double> w(N);
            std::vector<std::size_t> idx(N);
            double constant = 1.0;
            for (std::size_t n = 0; n < N; ++n)
            {
                w[n] = co[n].k3 * std::exp(-co[n].c_k) / (static_cast<double>(N) * sc.eh_floor_w);
                idx[n] = P.index_c(n);
                constant -= w[n] * (1.0 + co[n].c_k);
            }
            ScalarFunction g;
            g.name = "harvested power floor";
            g.value = [=](const Vector &x)
            {
                double s = constant;
                for (std::size_t n = 0; n < w.size(); ++n)
                    s += w[n] * x[idx[n]];
                return s;
            };
            g.gradient = [=](const Vector &, Vector &gr)
            {
                for (std::size_t n = 0; n < w.size(); ++n)
                    gr[idx[n]] = w[n];
            };
            g.add_hessian = [](const Vector &, double, Matrix &) {};
            g.support = idx;
            cons.push_back(std::move(g));
        }

        // Speed limits between consecutive points and the per-step trust region
        auto add_squared_distance = [&](long va, Position3D pa, long vb, Position3D pb, const std::string &name)
        {
            ScalarFunction g;
            g.name = name;
            std::vector<std::size_t> sup;
            if (va >= 0)
                sup.insert(sup.end(), {static_cast<std::size_t>(va), static_cast<std::size_t>(va) + 1});
            if (vb >= 0)
                sup.insert(sup.end(), {static_cast<std::size_t>(vb), static_cast<std::size_t>(vb) + 1});
            auto coords = [=](const Vector &x, double &dx, double &dy)
            {
                const double ax = va >= 0 ? x[va] : pa.x, ay = va >= 0 ? x[va + 1] : pa.y;
                const double bx = vb >= 0 ? x[vb] : pb.x, by = vb >= 0 ? x[vb + 1] : pb.y;
                dx = ax - bx;
                dy = ay - by;
            };
            const double dz2 = (pa.z - pb.z) * (pa.z - pb.z);
            g.value = [=](const Vector &x)
            {
                double dx, dy;
                coords(x, dx, dy);
                return (dx * dx + dy * dy + dz2) / L2 - 1.0;
            };
            g.gradient = [=](const Vector &x, Vector &gr)
            {
                double dx, dy;
                coords(x, dx, dy);
                if (va >= 0)
                {
                    gr[va] += 2.0 * dx / L2;
                    gr[va + 1] += 2.0 * dy / L2;
                }
                if (vb >= 0)
                {
                    gr[vb] -= 2.0 * dx / L2;
                    gr[vb + 1] -= 2.0 * dy / L2;
                }
            };
            g.add_hessian = [=](const Vector &, double w, Matrix &H)
            {
                const double h = 2.0 * w / L2;
                for (int j = 0; j < 2; ++j)
                {
                    if (va >= 0)
                        H(va + j, va + j) += h;
                    if (vb >= 0)
                        H(vb + j, vb + j) += h;
                    if (va >= 0 && vb >= 0)
                    {
                        H(va + j, vb + j) -= h;
                        H(vb + j, va + j) -= h;
                    }
                }
            };
            g.support = sup;
            cons.push_back(std::move(g));
        };

        if (L > 0.0)
        {
            for (std::size_t n = 0; n < N; ++n)
                if (var[n] >= 0 || var[n + 1] >= 0)
                    add_squared_distance(var[n + 1], traj_k.points[n + 1], var[n], traj_k.points[n],
                                         "speed limit, slot " + std::to_string(n));
            for (std::size_t p : P.free_points)
                add_squared_distance(var[p], traj_k.points[p], -1, traj_k.points[p],
                                     "trust region, point " + std::to_string(p));
        }

        // Start slightly inside the slack constraints at the expansion point
        constexpr double delta = 1e-3;
        P.x0 = Vector::Zero(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < F; ++i)
        {
            P.x0[2 * i] = traj_k.points[P.free_points[i]].x;
            P.x0[2 * i + 1] = traj_k.points[P.free_points[i]].y;
        }
        for (std::size_t n = 0; n < N; ++n)
        {
            P.x0[P.index_a(n)] = 1.0 + delta;
            P.x0[P.index_b(n)] = 1.0 + delta;
            P.x0[P.index_c(n)] = co[n].c_k + 2.0 * delta;
            P.x0[P.index_d(n)] = co[n].d_k + 2.0 * delta;
        }
        return P;
    }

    ScaResult solve_inner_sca(const TrajectoryGrid &traj0, const FractionalParams &fp, const std::vector<NomaPower> &powers,
                              const Scenario &sc, const ScaOptions &opts)
    {
        ScaResult res;
        res.traj = traj0;
        res.slack = SlackState::expand(sc, traj0);

        double A = subtractive_objective(traj0, fp, powers, sc);
        res.objective_trace.push_back(A);
        if (!(traj0.step_limit() > 0.0) || sc.slots < 2)
        {
            res.iterations = 1;
            res.converged = true;
            return res;
        }

        for (std::size_t k = 1; k <= opts.max_iterations; ++k)
        {
            res.iterations = k;
            const auto P = build_p5(res.traj, res.slack, fp, powers, sc);
            SolveResult sr;
            try
            {
                sr = solve(P.problem, P.x0, opts.kernel);
            }
            catch (const Error &e)
            {
                fail(e.code(), "SCA iteration " + std::to_string(k) + ": " + e.what());
            }

            const auto cand = P.decode(sr.x_opt);
            double A_new;
            try
            {
                A_new = subtractive_objective(cand, fp, powers, sc);
            }
            catch (const Error &)
            {
                res.converged = true; // Candidate leaves the model domain; keep the incumbent
                break;
            }

            // Ascent guard: the surrogate is a minorant, so a decrease means numerical noise
            const double scale = std::max(std::abs(A), sum_weighted_rate(evaluate_plan(sc, res.traj, powers), fp));
            if (A_new < A)
            {
                res.converged = true;
                break;
            }

            res.traj = cand;
            res.slack = SlackState::expand(sc, cand);
            res.objective_trace.push_back(A_new);
            const bool small = std::abs(A_new - A) <= opts.tol * scale;
            A = A_new;
            if (small)
            {
                res.converged = true;
                break;
            }
        }
        return res;
    }

    Vector theta_residual(const TrajectoryGrid &traj, const FractionalParams &fp, const std::vector<NomaPower> &powers,
                          const Scenario &sc)
    {
        const auto pm = evaluate_plan(sc, traj, powers);
        const std::size_t N = pm.slots.size();
        if (fp.alpha.size() != N || fp.beta.size() != N)
            fail(ErrorCode::InvalidParameter, "fractional parameters do not match the slot count");
        Vector th(static_cast<Eigen::Index>(2 * N));
        for (std::size_t n = 0; n < N; ++n)
        {
            th[n] = pm.slots[n].sum_rate - fp.beta[n] * pm.slots[n].power_sum;
            th[N + n] = 1.0 - fp.alpha[n] * pm.slots[n].power_sum;
        }
        return th;
    }

    NewtonState damped_newton_step(const NewtonState &state, const TrajectoryGrid &traj,
                                   const std::vector<NomaPower> &powers, const Scenario &sc)
    {
        NewtonState out = state;
        const std::size_t N = state.params.alpha.size();
        const auto pm = evaluate_plan(sc, traj, powers);

        out.theta = theta_residual(traj, state.params, powers, sc);
        out.jacobian = Matrix::Zero(static_cast<Eigen::Index>(2 * N), static_cast<Eigen::Index>(2 * N));
        for (std::size_t n = 0; n < N; ++n)
        {
            out.jacobian(n, n) = -pm.slots[n].power_sum;
            out.jacobian(N + n, N + n) = -pm.slots[n].power_sum;
        }
        const double norm0 = out.theta.norm();
        bool rounding = true;
        for (std::size_t n = 0; n < N && rounding; ++n)
        {
            const double P = pm.slots[n].power_sum;
            const double eps = 16.0 * std::numeric_limits<double>::epsilon();
            rounding = std::abs(out.theta[n]) <= eps * (pm.slots[n].sum_rate + state.params.beta[n] * P) &&
                       std::abs(out.theta[N + n]) <= eps * (1.0 + state.params.alpha[n] * P);
        }
        if (rounding)
            return out;

        // theta is affine in (alpha, beta) with a diagonal Jacobian
        const Vector mu = -(out.theta.array() / out.jacobian.diagonal().array()).matrix();

        double step = 1.0;
        for (std::size_t m = 0; m <= state.max_backtracks; ++m)
        {
            FractionalParams trial = state.params;
            for (std::size_t n = 0; n < N; ++n)
            {
                trial.beta[n] = state.params.beta[n] + step * mu[n];
                trial.alpha[n] = state.params.alpha[n] + step * mu[N + n];
            }
            const bool valid = std::all_of(trial.alpha.begin(), trial.alpha.end(), [](double a) { return a > 0.0; }) &&
                               std::all_of(trial.beta.begin(), trial.beta.end(), [](double b) { return b >= 0.0; });
            if (valid)
            {
                const Vector th = theta_residual(traj, trial, powers, sc);
                if (th.norm() <= (1.0 - state.armijo * step) * norm0)
                {
                    out.params = trial;
                    out.theta = th;
                    out.step_scale = step;
                    return out;
                }
            }
            step *= state.shrink;
        }
        fail(ErrorCode::LineSearchStall, "damped Newton backtracking exceeded " + std::to_string(state.max_backtracks) + " halvings");
    }

    TrajectoryResult optimize_trajectory(const TrajectoryGrid &traj0, const std::vector<NomaPower> &powers,
                                         const Scenario &sc, const TrajectoryOptions &opts)
    {
        TrajectoryResult res;
        res.traj = traj0;

        FractionalParams fp = FractionalParams::at(sc, traj0, powers);
        if (opts.mode == RatioMode::Aggregate)
        {
            const auto pm = evaluate_plan(sc, traj0, powers);
            double R = 0.0, Pw = 0.0;
            for (const auto &m : pm.slots)
            {
                R += m.sum_rate;
                Pw += m.power_sum;
            }
            std::fill(fp.alpha.begin(), fp.alpha.end(), 1.0);
            std::fill(fp.beta.begin(), fp.beta.end(), R / Pw);
        }

        NewtonState ns;
        ns.params = fp;
        for (std::size_t i = 0; i < opts.i_max; ++i)
        {
            res.iterations = i + 1;
            const auto sca = solve_inner_sca(res.traj, ns.params, powers, sc, opts.sca);
            res.sca_iterations += sca.iterations;
            res.traj = sca.traj;
            res.params = ns.params;

            if (opts.mode == RatioMode::Aggregate)
            {
                const auto pm = evaluate_plan(sc, res.traj, powers);
                double R = 0.0, Pw = 0.0;
                for (const auto &m : pm.slots)
                {
                    R += m.sum_rate;
                    Pw += m.power_sum;
                }
                const double q = ns.params.beta.front();
                const double gap = std::abs(R - q * Pw);
                res.theta_trace.push_back(gap);
                if (gap <= opts.theta_tol * Pw)
                {
                    res.converged = true;
                    break;
                }
                std::fill(ns.params.beta.begin(), ns.params.beta.end(), R / Pw);
                continue;
            }

            const Vector th = theta_residual(res.traj, ns.params, powers, sc);
            const double inf_norm = th.lpNorm<Eigen::Infinity>();
            res.theta_trace.push_back(inf_norm);
            if (inf_norm <= opts.theta_tol)
            {
                res.converged = true;
                break;
            }
            ns = damped_newton_step(ns, res.traj, powers, sc);
        }
        return res;
    }
}
