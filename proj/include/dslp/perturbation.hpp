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

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dslp/bc_space.hpp"
#include "dslp/core.hpp"
#include "dslp/spectrum.hpp"
#include "dslp/transfer.hpp"

namespace dslp {

// ---------------------------------------------------------------------------
// Families

/// Perturbation of (1/f, q, w): h indexed 0..N, k and l indexed 1..N (stored from 0).
struct EquationTangent {
    std::vector<double> h, k, l;

    static EquationTangent zero(int N) {
        return {std::vector<double>(N + 1, 0.0), std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
    }
};

/// Equation with 1/f + t h, q + t k, w + t l.
inline SLEquation perturb_equation(const SLEquation& eq, const EquationTangent& d, double t) {
    const int N = eq.N();
    if (static_cast<int>(d.h.size()) != N + 1 || static_cast<int>(d.k.size()) != N || static_cast<int>(d.l.size()) != N)
        throw Error(ErrorCode::ParamOutOfRange, "equation tangent sizes must be N+1, N, N");
    std::vector<cplx> f(N + 1), q(N), w(N);
    for (int n = 0; n <= N; ++n) f[n] = 1.0 / (1.0 / eq.f(n) + t * d.h[n]);
    for (int n = 1; n <= N; ++n) {
        q[n - 1] = eq.q(n) + t * d.k[n - 1];
        w[n - 1] = eq.w(n) + t * d.l[n - 1];
    }
    return SLEquation(std::move(f), std::move(q), std::move(w));
}

enum class FamilyTarget {
    bc_chart_coord,   // (A + t H, B + t L)
    separated_alpha,  // S_{t, beta}
    separated_beta,   // S_{alpha, t}
    coupled_gamma,    // [e^{i t} K | -I]
    eq_tangent,       // (1/f + t h, q + t k, w + t l)
    eq_inv_f,         // 1/f_n = t
    eq_f,             // f_n = t
    eq_q,             // q_n = t
    eq_w,             // w_n = t
};

inline std::string target_name(FamilyTarget t, int index) {
    switch (t) {
        case FamilyTarget::bc_chart_coord: return "bc_chart_coord";
        case FamilyTarget::separated_alpha: return "separated_alpha";
        case FamilyTarget::separated_beta: return "separated_beta";
        case FamilyTarget::coupled_gamma: return "coupled_gamma";
        case FamilyTarget::eq_tangent: return "eq_tangent";
        case FamilyTarget::eq_inv_f: return "eq_inv_f(" + std::to_string(index) + ")";
        case FamilyTarget::eq_f: return "eq_f(" + std::to_string(index) + ")";
        case FamilyTarget::eq_q: return "eq_q(" + std::to_string(index) + ")";
        case FamilyTarget::eq_w: return "eq_w(" + std::to_string(index) + ")";
    }
    return "";
}

struct ProblemFamily {
    SLEquation base_eq;
    BoundaryCondition base_bc;
    FamilyTarget target = FamilyTarget::bc_chart_coord;
    int index = 0;  // coefficient index for eq_inv_f, eq_f, eq_q, eq_w
    BCTangent bc_direction{};
    EquationTangent eq_direction{};
    double lo = 0.0, hi = 1.0;
    int steps = 2;

    /// Problem at parameter t. Coefficient-level validity is not checked here.
    Problem at(double t) const {
        switch (target) {
            case FamilyTarget::bc_chart_coord:
                return {base_eq, {base_bc.A + t * bc_direction.H, base_bc.B + t * bc_direction.L}};
            case FamilyTarget::separated_alpha: {
                auto p = separated_params(base_bc);
                p.alpha = t;
                return {base_eq, canonical_bc(p)};
            }
            case FamilyTarget::separated_beta: {
                auto p = separated_params(base_bc);
                p.beta = t;
                return {base_eq, canonical_bc(p)};
            }
            case FamilyTarget::coupled_gamma: {
                auto p = coupled_params(base_bc);
                p.gamma = t;
                return {base_eq, canonical_bc(p)};
            }
            case FamilyTarget::eq_tangent: return {perturb_equation(base_eq, eq_direction, t), base_bc};
            case FamilyTarget::eq_inv_f: return {base_eq.with_f(index, 1.0 / t), base_bc};
            case FamilyTarget::eq_f: return {base_eq.with_f(index, t), base_bc};
            case FamilyTarget::eq_q: return {base_eq.with_q(index, t), base_bc};
            case FamilyTarget::eq_w: return {base_eq.with_w(index, t), base_bc};
        }
        throw Error(ErrorCode::ParamOutOfRange, "unknown family target");
    }

    std::vector<double> grid() const {
        if (steps < 2) throw Error(ErrorCode::ParamOutOfRange, "a family needs at least 2 steps");
        std::vector<double> g(steps);
        const int m = steps - 1;
        for (int i = 0; i < steps; ++i) g[i] = ((m - i) * lo + i * hi) / m;
        return g;
    }
};

// ---------------------------------------------------------------------------
// Branch tracing

struct BranchSample {
    double param;
    cplx lambda;
    int analytic_mult;
    int geometric_mult;
};

enum class BranchStatus { complete, match_ambiguity, invalid_grid_point };

struct Branch {
    int id = 0;
    std::vector<BranchSample> samples;
    std::vector<double> continuity_radius;  // one per step between consecutive samples
    BranchStatus status = BranchStatus::complete;
    std::string diagnostic;
};

struct TraceOptions {
    int max_halvings = 12;
};

namespace detail {

struct PointSpectrum {
    double t = 0.0;
    bool valid = false;
    std::string why;
    bool self_adjoint = false;
    std::vector<cplx> values;  // eigenvalues repeated by analytic multiplicity, lex order
    std::vector<int> am, gm;   // per entry of values
};

inline PointSpectrum solve_point(const ProblemFamily& fam, double t, const Tolerances& tol) {
    PointSpectrum ps;
    ps.t = t;
    try {
        const Problem p = fam.at(t);
        const auto viol = validate_equation(p.eq);
        if (!viol.empty()) {
            ps.why = viol.front().describe();
            return ps;
        }
        if (bc_rank(p.bc, tol) != 2) {
            ps.why = "boundary condition is not of rank 2";
            return ps;
        }
        const SpectrumReport rep = eigenvalues(p.eq, p.bc, tol);
        if (rep.kind == SpectrumKind::whole_plane) {
            ps.why = "every complex number is an eigenvalue";
            return ps;
        }
        ps.self_adjoint = is_self_adjoint_problem(p.eq, p.bc, tol);
        for (const auto& e : rep.eigenvalues) {
            for (int k = 0; k < e.analytic_mult; ++k) {
                ps.values.push_back(e.value);
                ps.am.push_back(e.analytic_mult);
                ps.gm.push_back(e.geometric_mult);
            }
        }
        ps.valid = true;
    } catch (const Error& err) {
        ps.why = err.what();
    }
    return ps;
}

struct Member {
    cplx value;
    int branch;  // -1 for an untracked companion
};

inline double dist_to_group(cplx v, const std::vector<Member>& g) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& m : g) d = std::min(d, std::abs(v - m.value));
    return d;
}

// Entries of `values` not claimed by a group member (each member claims its nearest one).
inline std::vector<std::size_t> unclaimed(const std::vector<cplx>& values, const std::vector<Member>& g) {
    std::vector<bool> used(values.size(), false);
    for (const auto& m : g) {
        std::size_t best = values.size();
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(values[i] - m.value);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        if (best < values.size()) used[best] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!used[i]) out.push_back(i);
    return out;
}

inline void sort_group(std::vector<Member>& g) {
    std::stable_sort(g.begin(), g.end(), [](const Member& a, const Member& b) { return lex_less(a.value, b.value); });
}

struct StepResult {
    bool ok = false;
    std::vector<Member> group;
    std::vector<std::size_t> picked;  // indices into the next point's values, aligned with group
    double radius = 0.0;
    std::size_t inside = 0;
};

inline double group_diameter(const std::vector<Member>& g) {
    double d = 0.0;
    for (const auto& a : g)
        for (const auto& b : g) d = std::max(d, std::abs(a.value - b.value));
    return d;
}

// Minimal total distance assignment of candidates to members (groups are tiny).
inline std::vector<std::size_t> min_distance_assignment(const std::vector<Member>& g, const std::vector<cplx>& values,
                                                        std::vector<std::size_t> cand) {
    std::vector<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();
    // keep the few candidates nearest to the group, then try every order
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        return dist_to_group(values[a], g) < dist_to_group(values[b], g);
    });
    if (cand.size() > g.size() + 2) cand.resize(g.size() + 2);
    std::sort(cand.begin(), cand.end());
    std::vector<std::size_t> perm = cand;
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) cost += std::abs(values[perm[i]] - g[i].value);
        if (cost < best_cost) {
            best_cost = cost;
            best.assign(perm.begin(), perm.begin() + static_cast<long>(g.size()));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline StepResult try_step(const std::vector<Member>& group, const PointSpectrum& prev, const PointSpectrum& next,
                           bool allow_excess) {
    StepResult r;
    double cap = 1.0;
    for (const auto& m : group) cap = std::max(cap, std::abs(m.value));
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i : unclaimed(prev.values, group)) gap = std::min(gap, dist_to_group(prev.values[i], group));
    const double rho = std::min(cap, 0.5 * gap);
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < next.values.size(); ++i)
        if (dist_to_group(next.values[i], group) < rho) inside.push_back(i);
    r.radius = rho + group_diameter(group);
    r.inside = inside.size();
    if (inside.size() != group.size() && !(allow_excess && inside.size() > group.size())) return r;
    const bool sa = prev.self_adjoint && next.self_adjoint;
    std::vector<std::size_t> pick;
    if (sa && inside.size() == group.size()) {
        pick = inside;  // already in lex order; members keep their rank
    } else {
        pick = min_distance_assignment(group, next.values, inside);
    }
    r.group = group;
    for (std::size_t i = 0; i < group.size(); ++i) r.group[i].value = next.values[pick[i]];
    r.picked = pick;
    r.ok = true;
    return r;
}

}  // namespace detail

/// Continuous eigenvalue branch(es) through lambda_start at the family's lower end. A
/// starting eigenvalue of multiplicity m yields m branches ordered by rank.
inline std::vector<Branch> branch_trace(const ProblemFamily& fam, cplx lambda_start, const Tolerances& tol = {},
                                        const TraceOptions& opt = {}) {
    using detail::Member;
    const std::vector<double> grid = fam.grid();
    detail::PointSpectrum cur = detail::solve_point(fam, grid.front(), tol);
    if (!cur.valid) {
        Branch b;
        b.status = BranchStatus::invalid_grid_point;
        b.diagnostic = "invalid grid point at param " + std::to_string(grid.front()) + ": " + cur.why;
        return {b};
    }
    // locate the starting eigenvalue
    std::size_t start = cur.values.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cur.values.size(); ++i) {
        const double d = std::abs(cur.values[i] - lambda_start);
        if (d < bd) {
            bd = d;
            start = i;
        }
    }
    if (start == cur.values.size() || bd > tol.cluster * std::max(1.0, std::abs(lambda_start)) * 10.0)
        throw Error(ErrorCode::NotAnEigenvalue, "start value is not an eigenvalue of the first family member");
    const int m = cur.am[start];
    std::vector<Member> group;
    std::vector<Branch> branches(m);
    for (int k = 0; k < m; ++k) {
        group.push_back({cur.values[start], k});
        branches[k].id = k;
        branches[k].samples.push_back({grid.front(), cur.values[start], cur.am[start], cur.gm[start]});
    }

    auto fail_all = [&](BranchStatus s, const std::string& why) {
        for (auto& b : branches) {
            b.status = s;
            b.diagnostic = why;
        }
        return branches;
    };

    auto accept = [&](const detail::StepResult& r, const detail::PointSpectrum& next) {
        for (std::size_t i = 0; i < r.group.size(); ++i) {
            const int id = r.group[i].branch;
            if (id < 0) continue;
            const std::size_t j = r.picked[i];
            branches[id].samples.push_back({next.t, next.values[j], next.am[j], next.gm[j]});
            branches[id].continuity_radius.push_back(r.radius);
        }
        group = r.group;
        // release companions that no longer coincide with a tracked member
        std::vector<Member> kept;
        for (const auto& mbr : group) {
            if (mbr.branch >= 0) {
                kept.push_back(mbr);
                continue;
            }
            bool coincident = false;
            for (const auto& o : group)
                if (o.branch >= 0 && std::abs(o.value - mbr.value) <= tol.cluster * std::max(1.0, std::abs(o.value)))
                    coincident = true;
            if (coincident) kept.push_back(mbr);
        }
        group = kept;
        cur = next;
    };

    std::string notes;
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        const double target = grid[gi];
        int halvings = 0;
        double t_try = target;
        while (cur.t != target) {
            const detail::PointSpectrum next = detail::solve_point(fam, t_try, tol);
            if (!next.valid) {
                if (t_try == target)
                    return fail_all(BranchStatus::invalid_grid_point,
                                    "invalid grid point at param " + std::to_string(target) + ": " + next.why);
                // an inserted point failed; fall through to halving
            } else {
                detail::StepResult r = detail::try_step(group, cur, next, false);
                // Self-adjoint: a companion that entered the disc joins the group; ranks
                // inside the group are preserved.
                std::vector<Member> work = group;
                for (int grown = 0; !r.ok && cur.self_adjoint && next.self_adjoint && grown < 4; ++grown) {
                    const auto free_idx = detail::unclaimed(cur.values, work);
                    if (free_idx.empty()) break;
                    std::size_t near = free_idx.front();
                    for (std::size_t i : free_idx)
                        if (detail::dist_to_group(cur.values[i], work) < detail::dist_to_group(cur.values[near], work))
                            near = i;
                    work.push_back({cur.values[near], -1});
                    detail::sort_group(work);
                    r = detail::try_step(work, cur, next, false);
                }
                if (r.ok) {
                    accept(r, next);
                    t_try = target;
                    continue;
                }
            }
            if (++halvings > opt.max_halvings) {
                const bool sa = cur.self_adjoint && next.valid && next.self_adjoint;
                if (!sa && next.valid) {
                    detail::StepResult r = detail::try_step(group, cur, next, true);
                    if (r.ok) {
                        notes += (notes.empty() ? "" : "; ") + std::string("minimal-distance continuation at param ") +
                                 std::to_string(next.t);
                        accept(r, next);
                        t_try = target;
                        halvings = 0;
                        continue;
                    }
                }
                return fail_all(BranchStatus::match_ambiguity,
                                "refinement cap reached between params " + std::to_string(cur.t) + " and " +
                                    std::to_string(target));
            }
            t_try = 0.5 * (cur.t + t_try);
        }
    }
    for (auto& b : branches) b.diagnostic = notes;
    return branches;
}

// ---------------------------------------------------------------------------
// Derivative formulas

struct BCDerivativeKernel {
    Mat2 D, E;
};

/// D = cof(A + B Phi), E = cof(A) Phi^T + cof(B).
inline BCDerivativeKernel bc_derivative_kernel(const Mat2& A, const Mat2& B, const Mat2& phi) {
    return {(A + B * phi).cofactor(), A.cofactor() * phi.transpose() + B.cofactor()};
}

namespace detail {

inline cplx simple_gamma_prime(const CharacteristicPolynomial& cp, const SLEquation& eq, const BoundaryCondition& bc,
                               cplx lambda, const Tolerances& tol) {
    require_eigenvalue(cp, eq, bc, lambda, tol);
    const cplx g1 = gamma_at(eq, bc, lambda).derivative;
    double ref = 0.0;
    const double r = std::abs(lambda);
    for (std::size_t k = cp.reference.size(); k-- > 1;) ref = ref * r + static_cast<double>(k) * cp.reference[k];
    if (std::abs(g1) <= tol.simple * ref) throw Error(ErrorCode::NotSimple, "eigenvalue is not simple");
    return g1;
}

inline EigenfunctionData normalized_eigenfunction(const TransferSystem& ts, const BoundaryCondition& bc, cplx lambda,
                                                  const Tolerances& tol) {
    EigenfunctionData d = eigenfunction(ts, bc, lambda, tol);
    if (!d.normalized) throw Error(ErrorCode::NotSelfAdjoint, "eigenfunction cannot be normalized");
    return d;
}

}  // namespace detail

/// -sum(D o H + E o L) / Gamma'(lambda) for any representative (A, B) and any (H, L).
inline cplx bc_derivative_any_representative(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda,
                                             const Mat2& H, const Mat2& L, const Tolerances& tol = {}) {
    const TransferSystem ts(eq);
    const auto cp = characteristic_polynomial(ts, bc, tol);
    const cplx g1 = detail::simple_gamma_prime(cp, eq, bc, lambda, tol);
    const auto K = bc_derivative_kernel(bc.A, bc.B, ts.final_at(lambda));
    cplx s{};
    for (int i = 0; i < 4; ++i) s += K.D.m[i] * H.m[i] + K.E.m[i] * L.m[i];
    return -s / g1;
}

/// Derivative along a chart tangent; bc must be in the normalized form of that chart.
inline cplx bc_derivative(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda, const BCTangent& t,
                          const Tolerances& tol = {}) {
    if (!t.chart) throw Error(ErrorCode::ChartTangentMismatch, "tangent carries no chart");
    if (auto v = chart_violation(bc, *t.chart, tol.chart); !v.empty()) throw Error(ErrorCode::ChartTangentMismatch, v);
    if (auto v = tangent_violation(t, tol.chart); !v.empty()) throw Error(ErrorCode::ChartTangentMismatch, v);
    return bc_derivative_any_representative(eq, bc, lambda, t.H, t.L, tol);
}

struct SeparatedDerivatives {
    double d_alpha;
    double d_beta;
};

inline SeparatedDerivatives separated_derivatives(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda,
                                                  const Tolerances& tol = {}) {
    if (eq.eq_class() != EquationClass::real_positive_weight)
        throw Error(ErrorCode::NotSelfAdjoint, "equation must be real with positive weights");
    (void)separated_params(bc, tol);
    const TransferSystem ts(eq);
    detail::simple_gamma_prime(characteristic_polynomial(ts, bc, tol), eq, bc, lambda, tol);
    const auto y = detail::normalized_eigenfunction(ts, bc, lambda, tol);
    const int N = eq.N();
    return {-std::norm(y.seq.y[0]) - std::norm(y.seq.qd[0]), std::norm(y.seq.y[N]) + std::norm(y.seq.qd[N])};
}

/// Hermitian form v* Q v for a tangent of a self-adjoint chart.
inline double self_adjoint_bc_derivative(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda,
                                         const BCTangent& t, const Tolerances& tol = {}) {
    if (!t.chart || !is_self_adjoint_chart(*t.chart))
        throw Error(ErrorCode::NotSelfAdjointChart, "tangent must belong to one of O13, O14, O23, O24");
    if (eq.eq_class() != EquationClass::real_positive_weight)
        throw Error(ErrorCode::NotSelfAdjoint, "equation must be real with positive weights");
    if (auto v = chart_violation(bc, *t.chart, tol.chart); !v.empty()) throw Error(ErrorCode::ChartTangentMismatch, v);
    if (auto v = tangent_violation(t, tol.chart); !v.empty()) throw Error(ErrorCode::ChartTangentMismatch, v);
    const TransferSystem ts(eq);
    detail::simple_gamma_prime(characteristic_polynomial(ts, bc, tol), eq, bc, lambda, tol);
    const auto y = detail::normalized_eigenfunction(ts, bc, lambda, tol);
    const int N = eq.N();
    const auto p = chart_pattern(*t.chart);
    const cplx v1 = p.free0 == 0 ? y.seq.y[0] : y.seq.qd[0];
    const cplx v2 = p.free1 == 2 ? y.seq.y[N] : y.seq.qd[N];
    const double h = t.col(0, p.free0).real();
    const cplx hz = t.col(1, p.free0);
    const double l = t.col(1, p.free1).real();
    return h * std::norm(v1) + l * std::norm(v2) + 2.0 * (std::conj(v1) * std::conj(hz) * v2).real();
}

inline double equation_derivative(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda,
                                  const EquationTangent& d, const Tolerances& tol = {}) {
    if (!is_self_adjoint_problem(eq, bc, tol))
        throw Error(ErrorCode::NotSelfAdjoint, "equation derivative needs a self-adjoint problem");
    const int N = eq.N();
    if (static_cast<int>(d.h.size()) != N + 1 || static_cast<int>(d.k.size()) != N || static_cast<int>(d.l.size()) != N)
        throw Error(ErrorCode::ParamOutOfRange, "equation tangent sizes must be N+1, N, N");
    const TransferSystem ts(eq);
    detail::simple_gamma_prime(characteristic_polynomial(ts, bc, tol), eq, bc, lambda, tol);
    const auto y = detail::normalized_eigenfunction(ts, bc, lambda, tol);
    double s = 0.0;
    for (int n = 0; n < N; ++n)
        if (d.h[n] != 0.0) s -= std::norm(y.seq.qd[n]) * d.h[n];
    for (int n = 1; n <= N; ++n) {
        const double yy = std::norm(y.seq.y[n]);
        if (d.k[n - 1] != 0.0) s += yy * d.k[n - 1];
        if (d.l[n - 1] != 0.0) s -= lambda.real() * yy * d.l[n - 1];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Boundary forms

struct BoundaryForms {
    cplx left, right;
};

/// u_n conj(g_n Delta v_n) - (f_n Delta u_n) conj(v_n) at n = 0 and n = N.
inline BoundaryForms lagrange_form(const SolutionSequence& u, const SolutionSequence& v) {
    const int N = u.N();
    if (v.N() != N) throw Error(ErrorCode::ParamOutOfRange, "sequences must have the same length");
    return {u.y[0] * std::conj(v.qd[0]) - u.qd[0] * std::conj(v.y[0]),
            u.y[N] * std::conj(v.qd[N]) - u.qd[N] * std::conj(v.y[N])};
}

// ---------------------------------------------------------------------------
// Finite differences

/// Eigenvalue of `p` closest to `guess`.
inline cplx nearest_eigenvalue(const Problem& p, cplx guess, const Tolerances& tol = {}) {
    const auto rep = eigenvalues(p.eq, p.bc, tol);
    if (rep.kind == SpectrumKind::whole_plane || rep.eigenvalues.empty())
        throw Error(ErrorCode::NotAnEigenvalue, "problem has no isolated eigenvalues");
    cplx best = rep.eigenvalues.front().value;
    for (const auto& e : rep.eigenvalues)
        if (std::abs(e.value - guess) < std::abs(best - guess)) best = e.value;
    return best;
}

struct FiniteDifference {
    cplx value;
    bool richardson = false;
};

/// Central difference of the simple branch through lambda_star of t -> at(t) at t = 0,
/// with one Richardson step when another eigenvalue lies within 1e-3.
inline FiniteDifference central_difference(const std::function<Problem(double)>& at, cplx lambda_star, double h,
                                           const Tolerances& tol = {}) {
    auto D = [&](double step) {
        return (nearest_eigenvalue(at(step), lambda_star, tol) - nearest_eigenvalue(at(-step), lambda_star, tol)) /
               (2.0 * step);
    };
    const auto rep = eigenvalues(at(0.0).eq, at(0.0).bc, tol);
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& e : rep.eigenvalues) {
        const double d = std::abs(e.value - lambda_star);
        if (d > tol.cluster * std::max(1.0, std::abs(lambda_star))) gap = std::min(gap, d);
    }
    if (gap < 1e-3) return {(4.0 * D(0.5 * h) - D(h)) / 3.0, true};
    return {D(h), false};
}

// ---------------------------------------------------------------------------
// Monotonicity

enum class Monotonicity { strict_decreasing, strict_increasing, nondecreasing, nonincreasing, sign_split_by_zero };

inline const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::strict_decreasing: return "strict_decreasing";
        case Monotonicity::strict_increasing: return "strict_increasing";
        case Monotonicity::nondecreasing: return "nondecreasing";
        case Monotonicity::nonincreasing: return "nonincreasing";
        case Monotonicity::sign_split_by_zero: return "sign_split_by_zero";
    }
    return "";
}

struct AuditResult {
    bool pass = true;
    std::vector<std::string> findings;
};

inline AuditResult monotonicity_audit(const Branch& b, Monotonicity mode) {
    constexpr double slack = 1e-9;
    constexpr double noise = 1e-12;
    AuditResult r;
    auto flag = [&](std::size_t i, const std::string& what) {
        r.pass = false;
        r.findings.push_back(what + " between params " + std::to_string(b.samples[i].param) + " and " +
                             std::to_string(b.samples[i + 1].param));
    };
    for (const auto& s : b.samples) {
        if (std::abs(s.lambda.imag()) > 1e-7 * std::max(1.0, std::abs(s.lambda))) {
            r.pass = false;
            r.findings.push_back("non-real sample at param " + std::to_string(s.param));
        }
    }
    for (std::size_t i = 0; i + 1 < b.samples.size(); ++i) {
        const double a = b.samples[i].lambda.real(), c = b.samples[i + 1].lambda.real();
        const double d = c - a;
        const double mag = std::max({1.0, std::abs(a), std::abs(c)});
        switch (mode) {
            case Monotonicity::nondecreasing:
                if (d < -slack * mag) flag(i, "decrease");
                break;
            case Monotonicity::nonincreasing:
                if (d > slack * mag) flag(i, "increase");
                break;
            case Monotonicity::strict_increasing:
                if (!(d > noise * mag)) flag(i, "no strict increase");
                break;
            case Monotonicity::strict_decreasing:
                if (!(d < -noise * mag)) flag(i, "no strict decrease");
                break;
            case Monotonicity::sign_split_by_zero:
                if (a > 0.0 && c > 0.0 && d > slack * mag) flag(i, "positive part increases");
                if (a < 0.0 && c < 0.0 && d < -slack * mag) flag(i, "negative part decreases");
                break;
        }
    }
    return r;
}

}  // namespace dslp
