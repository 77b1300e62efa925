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

#include "eesim/convex_kernel.hpp"
#include "eesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eesim
{
    namespace
    {
        constexpr double inf = std::numeric_limits<double>::infinity();

        std::vector<std::size_t> support_of(const ScalarFunction &f, std::size_t dim)
        {
            if (!f.support.empty())
                return f.support;
            std::vector<std::size_t> all(dim);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }

        void eval_gradient(const ScalarFunction &f, const Vector &x, Vector &g)
        {
            if (f.has_gradient())
            {
                g.setZero(x.size());
                f.gradient(x, g);
            }
            else
                g = numeric_gradient(f, x);
        }

        void add_hessian(const ScalarFunction &f, const Vector &x, double w, Matrix &H)
        {
            if (f.has_hessian())
                f.add_hessian(x, w, H);
            else
                H += w * numeric_hessian(f, x);
        }

        // Barrier state shared by the centering loop
        struct Barrier
        {
            const ConvexProblem &p;
            std::vector<std::vector<std::size_t>> supports;
            std::size_t box_terms = 0;

            explicit Barrier(const ConvexProblem &prob) : p(prob)
            {
                for (const auto &g : p.inequality_constraints)
                    supports.push_back(support_of(g, p.dimension));
                for (const auto &b : p.box_bounds)
                    box_terms += std::isfinite(b.lo) + std::isfinite(b.hi);
            }

            std::size_t terms() const { return p.inequality_constraints.size() + box_terms; }

            double value(const Vector &x, double t) const
            {
                if (!x.allFinite())
                    return inf;
                double phi = 0.0;
                for (std::size_t j = 0; j < p.box_bounds.size(); ++j)
                {
                    const auto &b = p.box_bounds[j];
                    if (std::isfinite(b.lo))
                    {
                        if (!(x[j] > b.lo))
                            return inf;
                        phi -= std::log(x[j] - b.lo);
                    }
                    if (std::isfinite(b.hi))
                    {
                        if (!(x[j] < b.hi))
                            return inf;
                        phi -= std::log(b.hi - x[j]);
                    }
                }
                for (const auto &g : p.inequality_constraints)
                {
                    const double v = g.value(x);
                    if (!(v < 0.0))
                        return inf;
                    phi -= std::log(-v);
                }
                const double f = p.objective.value(x);
                if (!std::isfinite(f))
                    return inf;
                return phi + t * f;
            }

            void derivatives(const Vector &x, double t, Vector &grad, Matrix &H) const
            {
                const auto n = static_cast<Eigen::Index>(p.dimension);
                grad.setZero(n);
                H.setZero(n, n);
                Vector g(n);

                eval_gradient(p.objective, x, g);
                grad += t * g;
                add_hessian(p.objective, x, t, H);

                for (std::size_t i = 0; i < p.inequality_constraints.size(); ++i)
                {
                    const auto &c = p.inequality_constraints[i];
                    const double v = c.value(x);
                    eval_gradient(c, x, g);
                    const double r = -1.0 / v; // > 0
                    const auto &s = supports[i];
                    for (auto a : s)
                    {
                        grad[a] += r * g[a];
                        for (auto b : s)
                            H(a, b) += r * r * g[a] * g[b];
                    }
                    add_hessian(c, x, r, H);
                }

                for (std::size_t j = 0; j < p.box_bounds.size(); ++j)
                {
                    const auto &b = p.box_bounds[j];
                    if (std::isfinite(b.lo))
                    {
                        const double r = 1.0 / (x[j] - b.lo);
                        grad[j] -= r;
                        H(j, j) += r * r;
                    }
                    if (std::isfinite(b.hi))
                    {
                        const double r = 1.0 / (b.hi - x[j]);
                        grad[j] += r;
                        H(j, j) += r * r;
                    }
                }
            }
        };

        // Newton direction with a growing diagonal shift when H is not safely positive definite
        Vector newton_direction(Matrix H, const Vector &grad)
        {
            const double scale = std::max(1e-300, H.diagonal().cwiseAbs().maxCoeff());
            double shift = 0.0;
            for (int attempt = 0; attempt < 30; ++attempt)
            {
                Matrix K = H;
                if (shift > 0.0)
                    K.diagonal().array() += shift;
                Eigen::LDLT<Matrix> ldlt(K);
                if (ldlt.info() == Eigen::Success && ldlt.isPositive())
                {
                    Vector dx = ldlt.solve(-grad);
                    if (dx.allFinite() && grad.dot(dx) < 0.0)
                        return dx;
                }
                shift = shift == 0.0 ? 1e-12 * scale : shift * 10.0;
            }
            return -grad / scale;
        }

        using StopRule = std::function<bool(const Vector &)>;

        SolveResult barrier_solve(const ConvexProblem &p, Vector x, const SolveOptions &opts, const StopRule &stop)
        {
            Barrier bar(p);
            SolveResult res;
            const double m = static_cast<double>(bar.terms());
            double t = opts.t0;
            Vector grad;
            Matrix H;

            auto finish = [&](bool converged)
            {
                res.x_opt = x;
                res.objective_value = p.objective.value(x);
                res.max_constraint_violation = max_violation(p, x);
                res.converged = converged && res.max_constraint_violation <= opts.feas_tol;
                return res;
            };

            while (true)
            {
                // Centering
                double phi = bar.value(x, t);
                for (std::size_t k = 0; k < opts.max_newton; ++k)
                {
                    if (res.iterations >= opts.max_total_newton)
                        return finish(false);
                    ++res.iterations;

                    bar.derivatives(x, t, grad, H);
                    const Vector dx = newton_direction(H, grad);
                    const double slope = grad.dot(dx);
                    if (-0.5 * slope <= opts.newton_tol)
                        break;

                    double step = 1.0, trial = inf;
                    bool accepted = false;
                    Vector xn;
                    while (step > 1e-14)
                    {
                        xn = x + step * dx;
                        trial = bar.value(xn, t);
                        if (trial <= phi + opts.armijo * step * slope)
                        {
                            accepted = true;
                            break;
                        }
                        step *= opts.shrink;
                    }
                    if (!accepted)
                        break; // Stalled at machine precision
                    x = xn;
                    phi = trial;
                    if (stop && stop(x))
                        return finish(true);
                }

                res.objective_trace.push_back(p.objective.value(x));
                if (m == 0.0 || m / t <= opts.kkt_tol)
                    return finish(true);
                t *= opts.mu;
            }
        }

        Vector interior_start(const ConvexProblem &p, Vector x)
        {
            for (std::size_t j = 0; j < p.box_bounds.size(); ++j)
            {
                const auto &b = p.box_bounds[j];
                const double width = b.hi - b.lo;
                if (!(width > 0.0))
                    fail(ErrorCode::InfeasibleProblem, "empty box for coordinate " + std::to_string(j));
                auto margin = [&](double bound)
                {
                    double d = 1e-6 * (1.0 + std::abs(bound));
                    if (std::isfinite(width))
                        d = std::min(d, 0.25 * width);
                    return d;
                };
                if (std::isfinite(b.lo))
                    x[j] = std::max(x[j], b.lo + margin(b.lo));
                if (std::isfinite(b.hi))
                    x[j] = std::min(x[j], b.hi - margin(b.hi));
            }
            return x;
        }

        bool strictly_feasible(const ConvexProblem &p, const Vector &x)
        {
            for (const auto &g : p.inequality_constraints)
                if (!(g.value(x) < 0.0))
                    return false;
            return std::isfinite(p.objective.value(x));
        }

        // Minimize s subject to g_i(x) <= s; stops at the first strictly feasible x
        Vector phase_one(const ConvexProblem &p, const Vector &x0, const SolveOptions &opts, std::size_t &iterations)
        {
            const std::size_t n = p.dimension;
            double worst = -inf;
            for (const auto &g : p.inequality_constraints)
                worst = std::max(worst, g.value(x0));
            if (!std::isfinite(worst))
                fail(ErrorCode::InfeasibleProblem, "constraints are not finite at the initial point");

            ConvexProblem aux;
            aux.dimension = n + 1;
            aux.objective.name = "phase-one";
            // Stays inside the objective's domain so the point handed back is usable
            aux.objective.value = [&p, n](const Vector &z)
            { return std::isfinite(p.objective.value(z.head(n))) ? z[n] : inf; };
            aux.objective.gradient = [n](const Vector &, Vector &g) { g[n] = 1.0; };
            aux.objective.add_hessian = [](const Vector &, double, Matrix &) {};
            aux.objective.support = {n};

            for (const auto &g : p.inequality_constraints)
            {
                ScalarFunction h;
                h.name = g.name;
                h.value = [g, n](const Vector &z) { return g.value(z.head(n)) - z[n]; };
                h.gradient = [g, n](const Vector &z, Vector &out)
                {
                    Vector gx;
                    eval_gradient(g, z.head(n), gx);
                    out.head(n) = gx;
                    out[n] = -1.0;
                };
                h.add_hessian = [g, n](const Vector &z, double w, Matrix &H)
                {
                    Matrix Hx = Matrix::Zero(n, n);
                    add_hessian(g, z.head(n), w, Hx);
                    H.topLeftCorner(n, n) += Hx;
                };
                if (!g.support.empty())
                {
                    h.support = g.support;
                    h.support.push_back(n);
                }
                aux.inequality_constraints.push_back(std::move(h));
            }
            // s >= -1 keeps phase one bounded when every g_i is affine
            aux.box_bounds = p.box_bounds;
            aux.box_bounds.resize(n);
            aux.box_bounds.push_back({-1.0, inf});

            Vector z(n + 1);
            z.head(n) = x0;
            z[n] = worst + 1.0 + 0.1 * std::abs(worst);

            auto stop = [&p, n](const Vector &zz) { return zz[n] < 0.0 && strictly_feasible(p, zz.head(n)); };
            SolveOptions o = opts;
            o.t0 = 1.0;
            const auto r = barrier_solve(aux, z, o, stop);
            iterations += r.iterations;

            const Vector x = r.x_opt.head(n);
            if (!strictly_feasible(p, x))
            {
                std::string worst_name = "objective domain";
                double wv = -inf;
                for (const auto &g : p.inequality_constraints)
                {
                    const double v = g.value(x);
                    if (v > wv)
                    {
                        wv = v;
                        worst_name = g.name.empty() ? "unnamed constraint" : g.name;
                    }
                }
                if (wv < 0.0)
                    fail(ErrorCode::InfeasibleProblem, "no strictly feasible point inside the objective domain");
                fail(ErrorCode::InfeasibleProblem, "no strictly feasible point; tightest constraint: " + worst_name);
            }
            return x;
        }
    }

    Vector numeric_gradient(const ScalarFunction &f, const Vector &x)
    {
        Vector g = Vector::Zero(x.size());
        Vector xp = x;
        for (auto j : support_of(f, static_cast<std::size_t>(x.size())))
        {
            const double h = 1e-6 * (1.0 + std::abs(x[j]));
            xp[j] = x[j] + h;
            const double fp = f.value(xp);
            xp[j] = x[j] - h;
            const double fm = f.value(xp);
            xp[j] = x[j];
            g[j] = (fp - fm) / (2.0 * h);
        }
        return g;
    }

    Matrix numeric_hessian(const ScalarFunction &f, const Vector &x)
    {
        const auto n = x.size();
        Matrix H = Matrix::Zero(n, n);
        Vector xp = x, gp, gm;
        for (auto j : support_of(f, static_cast<std::size_t>(n)))
        {
            const double h = 1e-4 * (1.0 + std::abs(x[j]));
            xp[j] = x[j] + h;
            eval_gradient(f, xp, gp);
            xp[j] = x[j] - h;
            eval_gradient(f, xp, gm);
            xp[j] = x[j];
            H.col(j) = (gp - gm) / (2.0 * h);
        }
        return 0.5 * (H + H.transpose());
    }

    double max_violation(const ConvexProblem &p, const Vector &x)
    {
        double v = 0.0;
        for (const auto &g : p.inequality_constraints)
        {
            const double gv = g.value(x);
            v = std::max(v, std::isfinite(gv) ? gv : inf);
        }
        for (std::size_t j = 0; j < p.box_bounds.size(); ++j)
            v = std::max({v, p.box_bounds[j].lo - x[j], x[j] - p.box_bounds[j].hi});
        return v;
    }

    SolveResult solve(const ConvexProblem &problem, const Vector &x0, const SolveOptions &opts)
    {
        if (static_cast<std::size_t>(x0.size()) != problem.dimension)
            fail(ErrorCode::InvalidParameter, "initial point has the wrong dimension");
        if (!x0.allFinite())
            fail(ErrorCode::InvalidParameter, "initial point is not finite");
        if (!problem.box_bounds.empty() && problem.box_bounds.size() != problem.dimension)
            fail(ErrorCode::InvalidParameter, "box bounds must cover every coordinate");
        if (!problem.objective.value)
            fail(ErrorCode::InvalidParameter, "problem has no objective");

        Vector x = interior_start(problem, x0);
        std::size_t pre = 0;
        bool used_phase_one = false;
        if (!strictly_feasible(problem, x))
        {
            x = phase_one(problem, x, opts, pre);
            used_phase_one = true;
        }

        auto res = barrier_solve(problem, x, opts, nullptr);
        res.iterations += pre;
        res.phase_one = used_phase_one;
        return res;
    }
}
