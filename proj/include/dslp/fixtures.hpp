// Copyright 2026 The dslp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small worked problems on two interior points and the eigenvalue branches they produce.
// The closed forms below are reference values only; the library never consults them.

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dslp/bc_space.hpp"
#include "dslp/core.hpp"
#include "dslp/perturbation.hpp"

namespace dslp::fixtures {

inline constexpr double pi = std::numbers::pi;

/// N = 2, f = (1, 1, 1), q = 0, w = (1, w2).
inline SLEquation fourier_equation(double w2 = 1.0) {
    return SLEquation({1.0, 1.0, 1.0}, {0.0, 0.0}, {1.0, w2});
}

/// [[c, 2c + 1, 0, 0], [0, 0, c, 1]].
inline BoundaryCondition double_root_family_bc(cplx c) {
    return {Mat2{c, 2.0 * c + 1.0, 0.0, 0.0}, Mat2{0.0, 0.0, c, 1.0}};
}

/// [[cos a, 2 cos a - sin a, 0, 0], [0, 0, cos a, -sin a]].
inline BoundaryCondition indefinite_weight_bc(double a) {
    return {Mat2{std::cos(a), 2.0 * std::cos(a) - std::sin(a), 0.0, 0.0}, Mat2{0.0, 0.0, std::cos(a), -std::sin(a)}};
}

/// Weight w2 that makes 0 a double eigenvalue for indefinite_weight_bc(a).
inline double indefinite_weight(double a) { return (std::sin(2.0 * a) - 1.0) / (std::sin(a) * std::sin(a)); }

/// [[1, a12, -1, 0], [0, -1, b21, 1]], a point of chart O14.
inline BoundaryCondition o14_family_bc(double a12, double b21) {
    return {Mat2{1.0, a12, 0.0, -1.0}, Mat2{-1.0, 0.0, b21, 1.0}};
}

/// [[1, -1, 0, 1], [0, 1, -1, 0]], shared by the three coefficient families below.
inline BoundaryCondition coefficient_family_bc() { return {Mat2{1.0, -1.0, 0.0, 1.0}, Mat2{0.0, 1.0, -1.0, 0.0}}; }

/// f = (s, 1, 1), q = 0, w = (1, 1).
inline SLEquation f0_family_equation(double s) { return SLEquation({s, 1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}); }

/// f = (-1, 1, 1), q = (s, 0), w = (1, 1).
inline SLEquation q1_family_equation(double s) { return SLEquation({-1.0, 1.0, 1.0}, {s, 0.0}, {1.0, 1.0}); }

/// f = (-1, 1, 1), q = 0, w = (s, 1).
inline SLEquation w1_family_equation(double s) { return SLEquation({-1.0, 1.0, 1.0}, {0.0, 0.0}, {s, 1.0}); }

// ---------------------------------------------------------------------------
// Closed-form eigenvalues

/// Only eigenvalue under S_{a, pi}.
inline double separated_pi_eigenvalue(double a) {
    return (2.0 * std::cos(a) + std::sin(a)) / (std::cos(a) + std::sin(a));
}

namespace detail {

// Roots of (c + s) x^2 - (3c + 2s) x + c, evaluated in whichever of the two algebraically
// equal forms avoids a 0/0.
inline double half_pi_root(double a, double sign) {
    const double c = std::cos(a), s = std::sin(a);
    const double b = 3.0 * c + 2.0 * s;
    const double d = std::sqrt(c * c + 4.0 * std::sin(2.0 * a) + 4.0);
    if (sign * b > 0.0) return (b + sign * d) / (2.0 * (c + s));
    return 2.0 * c / (b - sign * d);
}

}  // namespace detail

/// lambda_+ of S_{a, pi/2}: stays bounded through a = 3 pi / 4.
inline double separated_half_pi_bounded(double a) { return detail::half_pi_root(a, 1.0); }

/// lambda_- of S_{a, pi/2}: escapes to infinity at a = 3 pi / 4.
inline double separated_half_pi_unbounded(double a) { return detail::half_pi_root(a, -1.0); }

/// Eigenvalues of o14_family_bc(a12, b21), smaller first.
inline std::array<double, 2> o14_family_eigenvalues(double a12, double b21) {
    const double p = (a12 - 1.0) * b21 + 2.0 * (a12 - 2.0);
    const double delta = (a12 - 1.0) * (a12 - 1.0) * b21 * b21 + 4.0 * (a12 - 2.0) * (a12 - 2.0);
    return {(p - std::sqrt(delta)) / (2.0 * (a12 - 1.0)), (p + std::sqrt(delta)) / (2.0 * (a12 - 1.0))};
}

// ---------------------------------------------------------------------------
// Figure families

struct FigureTrace {
    ProblemFamily family;
    int start_rank;  // position of the starting eigenvalue in the sorted spectrum at family.lo
    int branch_id;
    std::function<double(double)> reference;
};

struct Figure {
    std::string name;
    std::string caption;
    std::vector<FigureTrace> traces;
};

inline ProblemFamily make_family(SLEquation eq, BoundaryCondition bc, FamilyTarget target, int index, double lo,
                                 double hi, int steps) {
    ProblemFamily f{std::move(eq), bc};
    f.target = target;
    f.index = index;
    f.lo = lo;
    f.hi = hi;
    f.steps = steps;
    return f;
}

inline std::vector<Figure> figure_set() {
    std::vector<Figure> figs;
    const SLEquation fe = fourier_equation();
    auto lo_of = [](double a, double b) { return std::min(a, b); };
    auto hi_of = [](double a, double b) { return std::max(a, b); };

    {
        Figure f{"fig5_1", "S_{alpha,pi}: single branch in alpha", {}};
        auto fam = make_family(fe, canonical_bc(SeparatedParams{0.0, pi}), FamilyTarget::separated_alpha, 0, 0.0,
                               3.0 * pi / 4.0 - 0.01, 100);
        f.traces.push_back({fam, 0, 0, separated_pi_eigenvalue});
        figs.push_back(f);
    }
    {
        Figure f{"fig5_2", "S_{alpha,pi/2}: branch index changes across alpha = 3pi/4", {}};
        const auto bc = canonical_bc(SeparatedParams{0.0, pi / 2.0});
        f.traces.push_back({make_family(fe, bc, FamilyTarget::separated_alpha, 0, 0.0, 0.74 * pi, 100), 0, 0,
                            separated_half_pi_unbounded});
        f.traces.push_back({make_family(fe, bc, FamilyTarget::separated_alpha, 0, 0.0, 0.99 * pi, 100), 1, 1,
                            separated_half_pi_bounded});
        f.traces.push_back({make_family(fe, bc, FamilyTarget::separated_alpha, 0, 0.76 * pi, 0.99 * pi, 100), 1, 2,
                            separated_half_pi_unbounded});
        figs.push_back(f);
    }
    {
        Figure f{"fig5_3", "O14 family in a12 with b21 = 0: kink at a12 = 2", {}};
        auto fam = make_family(fe, o14_family_bc(0.0, 0.0), FamilyTarget::bc_chart_coord, 0, 1.04, 5.0, 100);
        fam.bc_direction = chart_tangent(ChartId::O14, {1.0, 0.0, 0.0, 0.0});
        f.traces.push_back({fam, 0, 0, [](double a) { return o14_family_eigenvalues(a, 0.0)[0]; }});
        f.traces.push_back({fam, 1, 1, [](double a) { return o14_family_eigenvalues(a, 0.0)[1]; }});
        figs.push_back(f);
    }
    {
        Figure f{"fig5_4", "f0 = s family: crossing at s = -1", {}};
        auto fam = make_family(f0_family_equation(-2.98), coefficient_family_bc(), FamilyTarget::eq_f, 0, -2.98, -0.01, 100);
        f.traces.push_back({fam, 0, 0, [=](double s) { return lo_of(1.0, -1.0 / s); }});
        f.traces.push_back({fam, 1, 1, [=](double s) { return hi_of(1.0, -1.0 / s); }});
        figs.push_back(f);
    }
    {
        Figure f{"fig5_5", "q1 = s family: crossing at s = 0", {}};
        auto fam = make_family(q1_family_equation(-2.0), coefficient_family_bc(), FamilyTarget::eq_q, 1, -2.0, 1.96, 100);
        f.traces.push_back({fam, 0, 0, [=](double s) { return lo_of(1.0, 1.0 + s); }});
        f.traces.push_back({fam, 1, 1, [=](double s) { return hi_of(1.0, 1.0 + s); }});
        figs.push_back(f);
    }
    {
        Figure f{"fig5_6", "w1 = s family: crossing at s = 1", {}};
        auto fam = make_family(w1_family_equation(0.04), coefficient_family_bc(), FamilyTarget::eq_w, 1, 0.04, 4.0, 100);
        f.traces.push_back({fam, 0, 0, [=](double s) { return lo_of(1.0, 1.0 / s); }});
        f.traces.push_back({fam, 1, 1, [=](double s) { return hi_of(1.0, 1.0 / s); }});
        figs.push_back(f);
    }
    return figs;
}

}  // namespace dslp::fixtures
