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

// Seeded generators for property tests.

#pragma once

#include <numbers>
#include <random>

#include "dslp/dslp.hpp"

namespace dslp::testing {

class Rng {
   public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    cplx complex(double r) { return {uniform(-r, r), uniform(-r, r)}; }
    // Magnitude in [lo, hi] with a random sign.
    double signed_magnitude(double lo, double hi) { return (integer(0, 1) ? 1.0 : -1.0) * uniform(lo, hi); }
    double angle() { return uniform(0.0, std::numbers::pi); }

   private:
    std::mt19937_64 gen_;
};

/// Entries in [-5, 5] (complex: both parts), f and w kept away from zero.
inline SLEquation random_complex_equation(Rng& rng, int N) {
    std::vector<cplx> f(N + 1), q(N), w(N);
    auto away = [&](double r) {
        cplx v;
        do v = rng.complex(r);
        while (std::abs(v) < 0.1);
        return v;
    };
    for (auto& v : f) v = away(5.0);
    for (auto& v : q) v = rng.complex(5.0);
    for (auto& v : w) v = away(5.0);
    return SLEquation(f, q, w);
}

/// Real entries in [-5, 5] with |f| >= 0.1 and w >= 0.1.
inline SLEquation random_real_positive_equation(Rng& rng, int N, double floor = 0.1) {
    std::vector<cplx> f(N + 1), q(N), w(N);
    for (auto& v : f) v = rng.signed_magnitude(floor, 5.0);
    for (auto& v : q) v = rng.uniform(-5.0, 5.0);
    for (auto& v : w) v = rng.uniform(floor, 5.0);
    return SLEquation(f, q, w);
}

/// Real entries in [-5, 5] with |f| >= 0.1, w of either sign.
inline SLEquation random_real_equation(Rng& rng, int N) {
    std::vector<cplx> f(N + 1), q(N), w(N);
    for (auto& v : f) v = rng.signed_magnitude(0.1, 5.0);
    for (auto& v : q) v = rng.uniform(-5.0, 5.0);
    for (auto& v : w) v = rng.signed_magnitude(0.1, 5.0);
    return SLEquation(f, q, w);
}

inline Mat2 random_complex_mat(Rng& rng, double r = 1.0) {
    return Mat2{rng.complex(r), rng.complex(r), rng.complex(r), rng.complex(r)};
}

inline Mat2 random_invertible(Rng& rng) {
    Mat2 T;
    do T = random_complex_mat(rng);
    while (std::abs(T.det()) < 0.2);
    return T;
}

inline Mat2 random_sl2r(Rng& rng) {
    const double a = rng.signed_magnitude(0.3, 2.0);
    const double b = rng.uniform(-2.0, 2.0);
    const double c = rng.uniform(-2.0, 2.0);
    return Mat2{a, b, c, (1.0 + b * c) / a};
}

inline BoundaryCondition random_complex_bc(Rng& rng) {
    BoundaryCondition bc;
    do bc = {random_complex_mat(rng), random_complex_mat(rng)};
    while (bc_rank(bc) != 2);
    return bc;
}

inline BoundaryCondition random_separated_bc(Rng& rng) {
    return canonical_bc(SeparatedParams{rng.angle(), std::numbers::pi - rng.angle()});
}

inline BoundaryCondition random_coupled_bc(Rng& rng) {
    return canonical_bc(CoupledParams{rng.angle(), random_sl2r(rng)});
}

inline BoundaryCondition random_o_chart_bc(Rng& rng) {
    static constexpr std::array<ChartId, 4> charts{ChartId::O13, ChartId::O14, ChartId::O23, ChartId::O24};
    const ChartId c = charts[rng.integer(0, 3)];
    return reconstruct(ChartPoint{c, {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}});
}

/// Self-adjoint BC from a mix of canonical separated, canonical coupled and O-chart points,
/// then multiplied by a random invertible T.
inline BoundaryCondition random_self_adjoint_bc(Rng& rng) {
    BoundaryCondition bc;
    switch (rng.integer(0, 2)) {
        case 0: bc = random_separated_bc(rng); break;
        case 1: bc = random_coupled_bc(rng); break;
        default: bc = random_o_chart_bc(rng); break;
    }
    return bc.left_multiplied(random_invertible(rng));
}

}  // namespace dslp::testing
