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

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

#include "dslp/core.hpp"

namespace dslp {

/// Lexicographic (Re, Im) order used for every eigenvalue listing.
inline bool lex_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

struct RootResult {
    std::vector<cplx> roots;  // sorted by lex_less
    bool converged = true;
};

namespace detail {

inline void balance(Eigen::MatrixXcd& a) {
    constexpr double radix = 2.0, sqrdx = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    for (int sweep = 0; !done && sweep < 100; ++sweep) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

// Newton steps that are kept only while they shrink |p|; large jumps are refused so a
// root cannot migrate onto a neighbour.
inline cplx newton_polish(const Polynomial& p, const Polynomial& dp, cplx r, int iters = 8) {
    cplx pr = p(r);
    for (int it = 0; it < iters && pr != cplx{}; ++it) {
        const cplx d = dp(r);
        if (d == cplx{}) break;
        const cplx step = pr / d;
        if (!(std::abs(step) <= 1e-4 * std::max(1.0, std::abs(r)))) break;
        const cplx rn = r - step;
        const cplx pn = p(rn);
        if (!(std::abs(pn) < std::abs(pr))) break;
        r = rn;
        pr = pn;
    }
    return r;
}

}  // namespace detail

/// Roots of the degree-`degree` truncation of p: eigenvalues of the balanced companion
/// matrix, then guarded Newton polishing.
inline RootResult polynomial_roots(const Polynomial& p, int degree) {
    RootResult out;
    if (degree <= 0) return out;
    const Polynomial q = p.truncated(degree);
    const cplx lead = q[degree];
    if (lead == cplx{}) {
        out.converged = false;
        return out;
    }
    if (degree == 1) {
        out.roots.push_back(-q[0] / lead);
        return out;
    }
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(degree, degree);
    for (int k = 0; k < degree; ++k) C(0, k) = -q[degree - 1 - k] / lead;
    for (int k = 1; k < degree; ++k) C(k, k - 1) = 1.0;
    detail::balance(C);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success) {
        out.converged = false;
        return out;
    }
    const Polynomial dq = q.derivative();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        out.roots.push_back(detail::newton_polish(q, dq, es.eigenvalues()(i)));
    std::sort(out.roots.begin(), out.roots.end(), lex_less);
    return out;
}

struct RootCluster {
    cplx value;
    int multiplicity = 1;
    bool certified = true;  // false for multiplicity >= 3 or a failed derivative cross-check
};

/// Single-linkage clustering with radius tol.cluster * max(1, |lambda|). Each cluster is
/// represented by its mean, refined by Newton on p^(m-1).
inline std::vector<RootCluster> cluster_roots(const Polynomial& p, const std::vector<cplx>& roots,
                                              const Tolerances& tol = {}) {
    const std::size_t n = roots.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = tol.cluster * std::max({1.0, std::abs(roots[i]), std::abs(roots[j])});
            if (std::abs(roots[i] - roots[j]) <= r) parent[find(i)] = find(j);
        }
    }
    std::vector<std::vector<cplx>> groups;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(roots[i]);
    }
    std::vector<RootCluster> out;
    for (const auto& g : groups) {
        RootCluster c;
        c.multiplicity = static_cast<int>(g.size());
        cplx mean{};
        for (auto v : g) mean += v;
        mean /= static_cast<double>(g.size());
        c.value = mean;
        if (c.multiplicity >= 2) {
            const Polynomial pm = p.derivative(c.multiplicity - 1);
            const cplx refined = detail::newton_polish(pm, pm.derivative(), mean);
            if (std::abs(refined - mean) <= tol.cluster * std::max(1.0, std::abs(mean))) c.value = refined;
            // Taylor coefficients below the multiplicity must be negligible.
            Polynomial d = p;
            for (int k = 0; k < c.multiplicity; ++k) {
                if (std::abs(d(c.value)) > tol.simple * d.abs_bound(c.value)) c.certified = false;
                d = d.derivative();
            }
        }
        if (c.multiplicity >= 3) c.certified = false;
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) { return lex_less(a.value, b.value); });
    return out;
}

}  // namespace dslp
