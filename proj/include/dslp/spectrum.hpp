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
#include <bit>
#include <cstdint>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "dslp/bc_space.hpp"
#include "dslp/core.hpp"
#include "dslp/roots.hpp"
#include "dslp/transfer.hpp"

namespace dslp {

struct Problem {
    SLEquation eq;
    BoundaryCondition bc;
};

inline bool is_self_adjoint_problem(const SLEquation& eq, const BoundaryCondition& bc, const Tolerances& tol = {}) {
    return eq.eq_class() == EquationClass::real_positive_weight && is_self_adjoint(bc, tol);
}

// ---------------------------------------------------------------------------
// Characteristic polynomial

struct CharacteristicPolynomial {
    Polynomial gamma;        // det(A + B Phi_N)
    Polynomial via_cofactor;  // det A + det B + sum c_ij (Phi_N)_ij with C = B^T cof(A)
    /// Per-coefficient magnitude reference: max |c_ij| times sum_ij |coefficient k of (Phi_N)_ij|.
    std::vector<double> reference;
    double scale = 0.0;  // (||A|| + ||B||)^2 max(1, max |Phi_N coefficient|)
    int degree = -1;     // numeric degree, -1 when Gamma vanishes identically
    bool whole_plane = false;

    /// sum_k reference_k |lambda|^k, the rounding reference for Gamma(lambda).
    double bound(cplx lambda) const {
        const double r = std::abs(lambda);
        double acc = 0.0;
        for (auto it = reference.rbegin(); it != reference.rend(); ++it) acc = acc * r + *it;
        return acc;
    }
};

namespace detail {

// Numeric degree with each coefficient judged against its own magnitude reference. Using
// the largest coefficient instead would make the answer depend on the scale of lambda.
inline int numeric_degree_ref(const Polynomial& p, const std::vector<double>& ref, double tau) {
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k) {
        const double r = k < static_cast<int>(ref.size()) ? ref[k] : 0.0;
        if (std::abs(p[k]) > tau * r && p[k] != cplx{}) return k;
    }
    return -1;
}

}  // namespace detail

inline CharacteristicPolynomial characteristic_polynomial(const TransferSystem& ts, const BoundaryCondition& bc,
                                                          const Tolerances& tol = {}) {
    require_rank2(bc, tol);
    const PolyMat2& P = ts.final();
    const Mat2& A = bc.A;
    const Mat2& B = bc.B;
    CharacteristicPolynomial cp;

    PolyMat2 M;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) M(i, j) = Polynomial{A(i, j)} + P(0, j) * B(i, 0) + P(1, j) * B(i, 1);
    cp.gamma = M.det();

    const Mat2 C = B.transpose() * A.cofactor();
    cp.via_cofactor = Polynomial{A.det() + B.det()};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) cp.via_cofactor += P(i, j) * C(i, j);

    const int N = ts.N();
    cp.reference.assign(N + 1, 0.0);
    cp.reference[0] = std::abs(A.det()) + std::abs(B.det());
    const double cmax = C.max_abs();
    for (int k = 0; k <= N; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) cp.reference[k] += cmax * std::abs(P(i, j)[k]);

    const double phis = std::max(1.0, P.max_abs());
    const double na = A.frobenius(), nb = B.frobenius();
    cp.scale = (na + nb) * (na + nb) * phis;

    const double direct_scale = (na + nb * phis) * (na + nb * phis);
    const std::size_t len = std::max(cp.gamma.size(), cp.via_cofactor.size());
    for (std::size_t k = 0; k < len; ++k) {
        if (std::abs(cp.gamma[k] - cp.via_cofactor[k]) > tol.formula * direct_scale) {
            throw Error(ErrorCode::FormulaMismatch,
                        "det(A + B Phi_N) and the expanded form disagree at coefficient " + std::to_string(k));
        }
    }

    cp.whole_plane = true;
    for (std::size_t k = 0; k < cp.via_cofactor.size(); ++k) {
        const double ref = k < cp.reference.size() ? cp.reference[k] : 0.0;
        if (std::abs(cp.via_cofactor[k]) > tol.whole_plane * ref) cp.whole_plane = false;
    }
    cp.degree = cp.whole_plane ? -1 : detail::numeric_degree_ref(cp.via_cofactor, cp.reference, tol.degree);
    return cp;
}

inline CharacteristicPolynomial characteristic_polynomial(const SLEquation& eq, const BoundaryCondition& bc,
                                                          const Tolerances& tol = {}) {
    return characteristic_polynomial(TransferSystem(eq), bc, tol);
}

// ---------------------------------------------------------------------------
// Eigenvalues

struct Eigenvalue {
    cplx value;
    int analytic_mult = 1;
    int geometric_mult = 1;
    bool certified = true;
};

enum class SpectrumKind { finite, whole_plane };

struct SpectrumReport {
    SpectrumKind kind = SpectrumKind::finite;
    std::vector<Eigenvalue> eigenvalues;  // lex order (Re, Im)
    CharacteristicPolynomial char_poly;
    bool complete = true;  // false when the root finder did not converge
    std::string diagnostic;

    int total_multiplicity() const {
        int s = 0;
        for (const auto& e : eigenvalues) s += e.analytic_mult;
        return s;
    }
};

namespace detail {

// ||A|| + ||B Phi||. Using ||B|| ||Phi|| instead overstates the scale by orders of magnitude
// when the growing direction of Phi lies in the kernel of B.
inline double m_scale(const BoundaryCondition& bc, const Mat2& phi) {
    return bc.A.frobenius() + (bc.B * phi).frobenius();
}

inline int rank_deficiency(const BoundaryCondition& bc, const Mat2& phi, const Tolerances& tol) {
    const Mat2 M = bc.A + bc.B * phi;
    return 2 - mat2_rank(M, m_scale(bc, phi), tol.rank);
}

/// Gamma(lambda) and Gamma'(lambda) through the numeric recursion, with M = A + B Phi_N.
struct GammaAt {
    cplx value, derivative;
    Mat2 phi, M;
};

inline GammaAt gamma_at(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda) {
    const auto [phi, dphi] = transfer_derivative_at(eq, lambda);
    const Mat2 M = bc.A + bc.B * phi;
    const Mat2 dM = bc.B * dphi;
    return {M.det(), M(0, 0) * dM(1, 1) + dM(0, 0) * M(1, 1) - M(0, 1) * dM(1, 0) - dM(0, 1) * M(1, 0), phi, M};
}

// Accepts lambda when either the expanded polynomial or the recursion shows Gamma(lambda)
// to be negligible. The recursion is the sharper test at large |lambda|.
inline void require_eigenvalue(const CharacteristicPolynomial& cp, const SLEquation& eq, const BoundaryCondition& bc,
                               cplx lambda, const Tolerances& tol) {
    if (cp.whole_plane) return;
    const double g = std::abs(cp.via_cofactor(lambda));
    if (g <= tol.eigen_check * cp.bound(lambda)) return;
    const GammaAt ga = gamma_at(eq, bc, lambda);
    const double s = m_scale(bc, ga.phi);
    if (std::abs(ga.value) <= tol.eigen_check * s * s) return;
    throw Error(ErrorCode::NotAnEigenvalue, "|Gamma(lambda)| = " + std::to_string(g) + " exceeds tolerance");
}

}  // namespace detail

/// 2 - rank(A + B Phi_N(lambda)); lambda must be an eigenvalue.
inline int geometric_multiplicity(const TransferSystem& ts, const BoundaryCondition& bc, cplx lambda,
                                  const Tolerances& tol = {}) {
    detail::require_eigenvalue(characteristic_polynomial(ts, bc, tol), ts.equation(), bc, lambda, tol);
    return std::max(1, detail::rank_deficiency(bc, ts.final_at(lambda), tol));
}

inline int geometric_multiplicity(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda,
                                  const Tolerances& tol = {}) {
    return geometric_multiplicity(TransferSystem(eq), bc, lambda, tol);
}

// ---------------------------------------------------------------------------
// Linear pencil in y_0..y_{N+1}: N rows of the difference equation, 2 rows of the
// boundary condition.

inline constexpr int kPencilMaxN = 12;

struct Pencil {
    Eigen::MatrixXcd M0, M1;
};

inline Pencil build_pencil(const SLEquation& eq, const BoundaryCondition& bc) {
    const int N = eq.N();
    const int n = N + 2;
    Pencil P{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
    for (int k = 1; k <= N; ++k) {
        const int r = k - 1;
        P.M0(r, k - 1) = -eq.f(k - 1);
        P.M0(r, k) = eq.f(k) + eq.f(k - 1) + eq.q(k);
        P.M0(r, k + 1) = -eq.f(k);
        P.M1(r, k) = -eq.w(k);
    }
    const cplx f0 = eq.f(0), fN = eq.f(N);
    for (int i = 0; i < 2; ++i) {
        const int r = N + i;
        P.M0(r, 0) += bc.A(i, 0) - bc.A(i, 1) * f0;
        P.M0(r, 1) += bc.A(i, 1) * f0;
        P.M0(r, N) += bc.B(i, 0) - bc.B(i, 1) * fN;
        P.M0(r, N + 1) += bc.B(i, 1) * fN;
    }
    return P;
}

namespace detail {

// Newton on det(A + B Phi_N(lambda)) with Phi_N from the recursion. Steps are capped at
// `reach` and kept only while |det| shrinks; `real_axis` restricts steps to the real line.
inline cplx polish_simple(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda, double reach, bool real_axis) {
    auto eval = [&](cplx x) {
        const GammaAt ga = gamma_at(eq, bc, x);
        return std::pair<cplx, cplx>{ga.value, ga.derivative};
    };
    auto [g, dg] = eval(lambda);
    const cplx start = lambda;
    for (int it = 0; it < 20 && g != cplx{} && dg != cplx{}; ++it) {
        cplx step = g / dg;
        if (real_axis) step = step.real();
        const cplx next = lambda - step;
        if (!(std::abs(next - start) <= reach)) break;
        const auto [gn, dgn] = eval(next);
        if (!(std::abs(gn) < std::abs(g))) break;
        lambda = next;
        g = gn;
        dg = dgn;
    }
    return lambda;
}

inline constexpr int kPencilPolishMaxN = 64;

/// Smallest singular value of M0 + x M1.
inline double pencil_residual(const Pencil& P, cplx x) {
    const Eigen::MatrixXcd M = P.M0 + x * P.M1;
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// Shift-invert step on the linear pencil M(lambda) = M0 + lambda M1: the eigenvalue nearest
// the shift is lambda + 1/mu for the largest |mu| among the eigenvalues of -M(lambda)^{-1} M1.
// The pencil stays well scaled when det(A + B Phi_N) cancels, e.g. for eigenfunctions that
// are small in the interior or coefficients spanning many decades. A step is kept only while
// the smallest singular value of M shrinks.
inline cplx polish_pencil(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda, double reach, bool real_axis) {
    if (eq.N() > kPencilPolishMaxN) return lambda;
    const Pencil P = build_pencil(eq, bc);
    auto sigma_min = [&](cplx x) { return pencil_residual(P, x); };
    const cplx start = lambda;
    double sigma = sigma_min(lambda);
    for (int it = 0; it < 6 && sigma > 0.0; ++it) {
        const Eigen::MatrixXcd M = P.M0 + lambda * P.M1;
        const Eigen::MatrixXcd K = -M.partialPivLu().solve(P.M1);
        if (!K.allFinite()) break;
        const Eigen::VectorXcd mu = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(K, false).eigenvalues();
        Eigen::Index best;
        mu.cwiseAbs().maxCoeff(&best);
        if (mu(best) == cplx{}) break;
        cplx step = 1.0 / mu(best);
        if (real_axis) step = step.real();
        const cplx next = lambda + step;
        if (!(std::abs(next - start) <= reach)) break;
        const double sn = sigma_min(next);
        if (!(sn < sigma)) break;
        lambda = next;
        sigma = sn;
    }
    return lambda;
}

}  // namespace detail

inline SpectrumReport eigenvalues(const TransferSystem& ts, const BoundaryCondition& bc, const Tolerances& tol = {}) {
    SpectrumReport rep;
    rep.char_poly = characteristic_polynomial(ts, bc, tol);
    if (rep.char_poly.whole_plane) {
        rep.kind = SpectrumKind::whole_plane;
        return rep;
    }
    const int d = rep.char_poly.degree;
    const Polynomial p = rep.char_poly.via_cofactor.truncated(d);
    const RootResult rr = polynomial_roots(p, d);
    if (!rr.converged) {
        rep.complete = false;
        rep.diagnostic = "companion eigenvalue iteration did not converge";
    }
    const bool sa = is_self_adjoint_problem(ts.equation(), bc, tol);
    const auto clusters = cluster_roots(p, rr.roots, tol);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const auto& c = clusters[i];
        Eigenvalue e;
        e.value = c.value;
        bool snapped = false;
        if (sa && std::abs(e.value.imag()) <= tol.real_snap * std::max(1.0, std::abs(e.value))) {
            e.value = e.value.real();
            snapped = true;
        }
        if (c.multiplicity == 1) {
            double gap = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < clusters.size(); ++j)
                if (j != i) gap = std::min(gap, std::abs(clusters[j].value - c.value));
            const double reach = std::min(0.25 * gap, 1e-3 * std::max(1.0, std::abs(c.value)));
            // The pencil goes first: when det(A + B Phi_N) cancels, recursion Newton can walk
            // to a spurious zero of the rounded determinant. The recursion step then refines,
            // and is kept only if the pencil residual does not grow.
            const SLEquation& eq = ts.equation();
            if (eq.N() <= detail::kPencilPolishMaxN) {
                // shift-invert converges to the nearest pencil eigenvalue, so a quarter gap is safe
                const cplx p1 = detail::polish_pencil(eq, bc, e.value, 0.25 * gap, snapped);
                const cplx p2 = detail::polish_simple(eq, bc, p1, reach - std::abs(p1 - c.value), snapped);
                const Pencil P = build_pencil(eq, bc);
                e.value = detail::pencil_residual(P, p2) <= detail::pencil_residual(P, p1) ? p2 : p1;
            } else {
                e.value = detail::polish_simple(eq, bc, e.value, reach, snapped);
            }
        }
        e.analytic_mult = c.multiplicity;
        e.certified = c.certified;
        e.geometric_mult = std::clamp(detail::rank_deficiency(bc, ts.final_at(e.value), tol), 1, e.analytic_mult);
        rep.eigenvalues.push_back(e);
    }
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const Eigenvalue& a, const Eigenvalue& b) { return lex_less(a.value, b.value); });
    return rep;
}

inline SpectrumReport eigenvalues(const SLEquation& eq, const BoundaryCondition& bc, const Tolerances& tol = {}) {
    return eigenvalues(TransferSystem(eq), bc, tol);
}

/// Sum of analytic multiplicities strictly inside the disc.
inline int count_in_region(const SpectrumReport& rep, cplx center, double radius) {
    if (rep.kind == SpectrumKind::whole_plane) throw Error(ErrorCode::WholePlaneSpectrum, "every complex number is an eigenvalue");
    int s = 0;
    for (const auto& e : rep.eigenvalues)
        if (std::abs(e.value - center) < radius) s += e.analytic_mult;
    return s;
}

inline double bc_residual(const BoundaryCondition& bc, const SolutionSequence& s) {
    const int N = s.N();
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        const cplx r = bc.A(i, 0) * s.y[0] + bc.A(i, 1) * s.qd[0] + bc.B(i, 0) * s.y[N] + bc.B(i, 1) * s.qd[N];
        const double den = std::abs(bc.A(i, 0) * s.y[0]) + std::abs(bc.A(i, 1) * s.qd[0]) + std::abs(bc.B(i, 0) * s.y[N]) +
                           std::abs(bc.B(i, 1) * s.qd[N]);
        worst = std::max(worst, den > 0.0 ? std::abs(r) / den : std::abs(r));
    }
    return worst;
}

namespace detail {

// Sequence from the right singular vector of the smallest singular value of the pencil
// matrix at lambda. Used when both shooting directions lose accuracy.
inline SolutionSequence pencil_null_sequence(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda) {
    const Pencil P = build_pencil(eq, bc);
    const Eigen::MatrixXcd M = P.M0 + lambda * P.M1;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXcd v = svd.matrixV().col(M.cols() - 1);
    const int N = eq.N();
    SolutionSequence s;
    s.y.assign(N + 2, cplx{});
    s.qd.assign(N + 1, cplx{});
    for (int n = 0; n <= N + 1; ++n) s.y[n] = v(n);
    for (int n = 0; n <= N; ++n) s.qd[n] = eq.f(n) * (s.y[n + 1] - s.y[n]);
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Eigenfunctions

struct EigenfunctionData {
    cplx lambda;
    cplx c1, c2;  // y = c1 phi + c2 psi
    SolutionSequence seq;
    bool normalized = false;
};

namespace detail {

inline void normalize_eigenfunction(const SLEquation& eq, EigenfunctionData& d) {
    double s = 0.0;
    for (int n = 1; n <= eq.N(); ++n) s += eq.w(n).real() * std::norm(d.seq.y[n]);
    double big = 0.0;
    for (const auto& v : d.seq.y) big = std::max(big, std::abs(v));
    cplx phase = 1.0;
    for (const auto& v : d.seq.y) {
        if (std::abs(v) >= big * (1.0 - 1e-12)) {
            phase = std::conj(v) / std::abs(v);
            break;
        }
    }
    const cplx k = phase / std::sqrt(s);
    for (auto& v : d.seq.y) v *= k;
    for (auto& v : d.seq.qd) v *= k;
    d.c1 *= k;
    d.c2 *= k;
    d.normalized = true;
}

}  // namespace detail

/// Relative residual above which eigenfunction() also tries the pencil null vector.
inline constexpr double kShootingQuality = 1e-11;

/// Eigenfunction for an eigenvalue of geometric multiplicity 1. Normalized (weighted unit
/// norm, largest component real positive) when the problem is self-adjoint.
inline EigenfunctionData eigenfunction(const TransferSystem& ts, const BoundaryCondition& bc, cplx lambda,
                                       const Tolerances& tol = {}) {
    detail::require_eigenvalue(characteristic_polynomial(ts, bc, tol), ts.equation(), bc, lambda, tol);
    const Mat2 phi = ts.final_at(lambda);
    const Mat2 M = bc.A + bc.B * phi;
    if (mat2_rank(M, detail::m_scale(bc, phi), tol.rank) == 0)
        throw Error(ErrorCode::GeometricMultiplicityTwo, "eigenspace is two-dimensional; use eigenspace_basis");
    // Null vector from the row holding the largest entry: (m_r2, -m_r1).
    auto null_vector = [](const Mat2& X) {
        int best = 0;
        for (int k = 1; k < 4; ++k)
            if (std::abs(X.m[k]) > std::abs(X.m[best])) best = k;
        const int row = best / 2;
        return std::pair<cplx, cplx>{X(row, 1), -X(row, 0)};
    };
    EigenfunctionData d;
    d.lambda = lambda;
    std::tie(d.c1, d.c2) = null_vector(M);
    d.seq = solve_ivp(ts.equation(), lambda, 0, d.c1, d.c2);
    // Shooting amplifies errors along the growing solution, so also shoot back from n = N
    // using (A Phi^{-1} + B) (y_N, f_N Delta y_N)^T = 0 and keep whichever run satisfies
    // the boundary condition better.
    const SLEquation& eq = ts.equation();
    auto quality = [&](const SolutionSequence& s) { return std::max(bc_residual(bc, s), ivp_residual(eq, lambda, s)); };
    double q = quality(d.seq);
    auto consider = [&](SolutionSequence s) {
        const double qs = quality(s);
        if (qs < q) {
            q = qs;
            d.seq = std::move(s);
            d.c1 = d.seq.y[0];
            d.c2 = d.seq.qd[0];
        }
    };
    const auto [e1, e2] = null_vector(bc.A * phi.adjugate() + bc.B);
    consider(solve_ivp(eq, lambda, ts.N(), e1, e2));
    // A solution peaked in the interior defeats both shooting directions.
    if (q > kShootingQuality) consider(detail::pencil_null_sequence(eq, bc, lambda));
    if (is_self_adjoint_problem(ts.equation(), bc, tol)) detail::normalize_eigenfunction(ts.equation(), d);
    return d;
}

inline EigenfunctionData eigenfunction(const SLEquation& eq, const BoundaryCondition& bc, cplx lambda,
                                       const Tolerances& tol = {}) {
    return eigenfunction(TransferSystem(eq), bc, lambda, tol);
}

/// A basis of the eigenspace: phi and psi when every solution satisfies the condition,
/// otherwise the single eigenfunction.
inline std::vector<SolutionSequence> eigenspace_basis(const TransferSystem& ts, const BoundaryCondition& bc, cplx lambda,
                                                      const Tolerances& tol = {}) {
    detail::require_eigenvalue(characteristic_polynomial(ts, bc, tol), ts.equation(), bc, lambda, tol);
    const Mat2 phi = ts.final_at(lambda);
    if (mat2_rank(bc.A + bc.B * phi, detail::m_scale(bc, phi), tol.rank) == 0) {
        const auto fp = fundamental_pair(ts.equation(), lambda);
        return {fp.phi, fp.psi};
    }
    return {eigenfunction(ts, bc, lambda, tol).seq};
}

// ---------------------------------------------------------------------------
// Eigenvalue count for self-adjoint problems

struct SelfAdjointCount {
    int r = 0;
    cplx kappa;
    int expected_total = 0;
};

inline SelfAdjointCount self_adjoint_count(const SLEquation& eq, const BoundaryCondition& bc, const Tolerances& tol = {}) {
    if (!is_self_adjoint_problem(eq, bc, tol))
        throw Error(ErrorCode::NotSelfAdjoint, "count law needs a real positive-weight equation and a self-adjoint condition");
    const cplx f0 = eq.f(0);
    const Mat2& A = bc.A;
    const Mat2& B = bc.B;
    const Mat2 S{-A(0, 0) + f0 * A(0, 1), B(0, 1), -A(1, 0) + f0 * A(1, 1), B(1, 1)};
    const double scale = A.frobenius() * (1.0 + std::abs(f0)) + B.frobenius();
    SelfAdjointCount c;
    c.r = mat2_rank(S, scale, tol.rank);
    c.kappa = S.det();
    c.expected_total = eq.N() - 2 + c.r;
    return c;
}

// ---------------------------------------------------------------------------
// Independent oracle: determinant of the (N+2)x(N+2) linear pencil in y_0..y_{N+1}

struct PencilDeterminant {
    Polynomial det;
    std::vector<double> reference;  // per-coefficient magnitude reference
    int degree = -1;
};

/// Exact Laplace expansion row by row, memoized over the set of used columns.
inline PencilDeterminant pencil_determinant(const SLEquation& eq, const BoundaryCondition& bc,
                                            const Tolerances& tol = {}) {
    if (eq.N() > kPencilMaxN)
        throw Error(ErrorCode::SizeLimit, "pencil expansion is limited to N <= " + std::to_string(kPencilMaxN));
    const Pencil P = build_pencil(eq, bc);
    const int n = static_cast<int>(P.M0.rows());
    struct Entry {
        Polynomial value;
        Polynomial absval;
    };
    std::unordered_map<std::uint32_t, Entry> cur{{0u, {Polynomial{1.0}, Polynomial{1.0}}}};
    for (int r = 0; r < n; ++r) {
        // Each nonzero entry is charged its row's magnitude, so rounding-level entries do
        // not shrink the reference.
        const double row0 = P.M0.row(r).cwiseAbs().maxCoeff();
        const double row1 = P.M1.row(r).cwiseAbs().maxCoeff();
        std::unordered_map<std::uint32_t, Entry> next;
        for (const auto& [mask, e] : cur) {
            for (int c = 0; c < n; ++c) {
                if (mask & (1u << c)) continue;
                const cplx a = P.M0(r, c), b = P.M1(r, c);
                if (a == cplx{} && b == cplx{}) continue;
                const int above = std::popcount(mask >> (c + 1));
                const double sign = above % 2 == 0 ? 1.0 : -1.0;
                const Polynomial entry{a * sign, b * sign};
                const Polynomial abs_entry{a == cplx{} ? 0.0 : row0, b == cplx{} ? 0.0 : row1};
                Entry& slot = next[mask | (1u << c)];
                slot.value += e.value * entry;
                slot.absval += e.absval * abs_entry;
            }
        }
        cur = std::move(next);
    }
    PencilDeterminant out;
    const auto it = cur.find((n >= 32 ? 0u : (1u << n)) - 1u);
    if (it == cur.end()) {
        out.det = Polynomial{0.0};
        out.reference = {0.0};
        return out;
    }
    out.det = it->second.value;
    for (const auto& v : it->second.absval.coeffs()) out.reference.push_back(v.real());
    out.degree = detail::numeric_degree_ref(out.det, out.reference, tol.degree);
    return out;
}

/// Spectrum computed from the pencil determinant; geometric multiplicities from the
/// nullity of the pencil matrix.
inline SpectrumReport pencil_oracle(const SLEquation& eq, const BoundaryCondition& bc, const Tolerances& tol = {}) {
    require_valid(eq);
    require_rank2(bc, tol);
    const PencilDeterminant pd = pencil_determinant(eq, bc, tol);
    SpectrumReport rep;
    rep.char_poly.gamma = pd.det;
    rep.char_poly.via_cofactor = pd.det;
    rep.char_poly.reference = pd.reference;
    rep.char_poly.degree = pd.degree;
    bool zero = true;
    for (std::size_t k = 0; k < pd.det.size(); ++k)
        if (std::abs(pd.det[k]) > tol.whole_plane * (k < pd.reference.size() ? pd.reference[k] : 0.0)) zero = false;
    if (zero) {
        rep.kind = SpectrumKind::whole_plane;
        rep.char_poly.whole_plane = true;
        rep.char_poly.degree = -1;
        return rep;
    }
    const Polynomial p = pd.det.truncated(pd.degree);
    const RootResult rr = polynomial_roots(p, pd.degree);
    rep.complete = rr.converged;
    const Pencil P = build_pencil(eq, bc);
    const bool sa = is_self_adjoint_problem(eq, bc, tol);
    for (const auto& c : cluster_roots(p, rr.roots, tol)) {
        Eigenvalue e;
        e.value = c.value;
        if (sa && std::abs(e.value.imag()) <= tol.real_snap * std::max(1.0, std::abs(e.value))) e.value = e.value.real();
        e.analytic_mult = c.multiplicity;
        e.certified = c.certified;
        const Eigen::MatrixXcd M = P.M0 + e.value * P.M1;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        const auto& s = svd.singularValues();
        int nullity = 0;
        for (Eigen::Index k = 0; k < s.size(); ++k)
            if (s(k) <= tol.rank * s(0)) ++nullity;
        e.geometric_mult = std::clamp(nullity, 1, e.analytic_mult);
        rep.eigenvalues.push_back(e);
    }
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
              [](const Eigenvalue& a, const Eigenvalue& b) { return lex_less(a.value, b.value); });
    return rep;
}

/// Coefficients divided by the coefficient at the numeric degree.
inline Polynomial unit_leading(const Polynomial& p, int degree) {
    if (degree < 0) return p;
    Polynomial q = p.truncated(degree);
    return q * (1.0 / q[degree]);
}

}  // namespace dslp
