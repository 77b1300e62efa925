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

#ifndef EESIM_CONVEX_KERNEL_HPP
#define EESIM_CONVEX_KERNEL_HPP

// Small dense log-barrier interior point solver for smooth convex problems
//
//   minimize f(x)  subject to  g_i(x) <= 0,  lo <= x <= hi
//
// Derivatives are optional. Missing gradients fall back to central differences
// with step 1e-6 (1 + |x|); missing Hessians are differenced from the gradient.

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace eesim
{
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    struct ScalarFunction
    {
        std::string name;
        std::function<double(const Vector &)> value;
        std::function<void(const Vector &, Vector &)> gradient;              // Optional, writes a dense gradient
        std::function<void(const Vector &, double, Matrix &)> add_hessian;   // Optional, H += w * hessian
        std::vector<std::size_t> support;                                    // Optional, indices f depends on

        bool has_gradient() const { return static_cast<bool>(gradient); }
        bool has_hessian() const { return static_cast<bool>(add_hessian); }
    };

    struct Bound
    {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
    };

    struct ConvexProblem
    {
        std::size_t dimension = 0;
        ScalarFunction objective;
        std::vector<ScalarFunction> inequality_constraints; // g_i(x) <= 0
        std::vector<Bound> box_bounds;                      // Empty, or one entry per coordinate
    };

    struct SolveOptions
    {
        double kkt_tol = 1e-7;  // Barrier duality gap m / t
        double feas_tol = 1e-8; // Accepted constraint violation
        double t0 = 1.0;
        double mu = 20.0;
        double newton_tol = 1e-10; // Half squared Newton decrement
        std::size_t max_newton = 60;  // Per centering step
        std::size_t max_total_newton = 1000;
        double armijo = 0.25;
        double shrink = 0.5;
    };

    struct SolveResult
    {
        Vector x_opt;
        double objective_value = 0.0;
        double max_constraint_violation = 0.0;
        std::size_t iterations = 0; // Newton steps, including phase I
        bool converged = false;
        bool phase_one = false;
        std::vector<double> objective_trace; // True objective after each centering step
    };

    // Throws InfeasibleProblem when no strictly feasible point is found
    SolveResult solve(const ConvexProblem &problem, const Vector &x0, const SolveOptions &opts = {});

    // Finite-difference helpers, also used to audit analytic derivatives
    Vector numeric_gradient(const ScalarFunction &f, const Vector &x);
    Matrix numeric_hessian(const ScalarFunction &f, const Vector &x);

    // Maximum of g_i(x) and box violations, clipped at zero
    double max_violation(const ConvexProblem &problem, const Vector &x);
}

#endif
