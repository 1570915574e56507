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

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "dslp/core.hpp"
#include "dslp/transfer.hpp"

namespace dslp {

/// Boundary condition A (y_0, f_0 Delta y_0)^T + B (y_N, f_N Delta y_N)^T = 0.
/// Only the row space of the 2x4 matrix (A | B) matters.
struct BoundaryCondition {
    Mat2 A;
    Mat2 B;

    /// Entry (i, c) of the 2x4 matrix (A | B), c in [0, 4).
    cplx col(int i, int c) const { return c < 2 ? A(i, c) : B(i, c - 2); }
    cplx& col(int i, int c) { return c < 2 ? A(i, c) : B(i, c - 2); }

    /// Determinant of the 2x2 minor formed by columns c0 and c1.
    cplx minor(int c0, int c1) const { return col(0, c0) * col(1, c1) - col(0, c1) * col(1, c0); }

    double frobenius() const { return std::sqrt(A.frobenius() * A.frobenius() + B.frobenius() * B.frobenius()); }

    BoundaryCondition left_multiplied(const Mat2& T) const { return {T * A, T * B}; }
};

/// Singular values of the 2x4 matrix (A | B), largest first.
inline std::array<double, 2> bc_singular_values(const BoundaryCondition& bc) {
    const double tr = bc.frobenius() * bc.frobenius();
    double det = 0.0;  // sum of squared minors
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) det += std::norm(bc.minor(i, j));
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double s1sq = 0.5 * (tr + disc);
    const double s1 = std::sqrt(s1sq);
    const double s2 = s1sq > 0.0 ? std::sqrt(det / s1sq) : 0.0;
    return {s1, s2};
}

inline int bc_rank(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    const auto s = bc_singular_values(bc);
    if (s[0] == 0.0) return 0;
    return s[1] <= tol.rank * s[0] ? 1 : 2;
}

inline void require_rank2(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    if (bc_rank(bc, tol) != 2) throw Error(ErrorCode::NotRank2, "boundary condition matrix (A|B) must have rank 2");
}

// ---------------------------------------------------------------------------
// Charts

enum class ChartId { N12, N13, N14, N23, N24, N34, O13, O14, O23, O24 };

inline const char* to_string(ChartId c) {
    constexpr const char* names[] = {"N12", "N13", "N14", "N23", "N24", "N34", "O13", "O14", "O23", "O24"};
    return names[static_cast<int>(c)];
}

inline std::optional<ChartId> chart_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ChartId::O24); ++i) {
        if (s == to_string(static_cast<ChartId>(i))) return static_cast<ChartId>(i);
    }
    return std::nullopt;
}

inline bool is_self_adjoint_chart(ChartId c) { return c >= ChartId::O13; }

/// Pivot columns, the value the pivot block takes in normalized form, and the free columns.
struct ChartPattern {
    int pivot0, pivot1;
    Mat2 pivot_block;
    int free0, free1;
};

inline ChartPattern chart_pattern(ChartId c) {
    switch (c) {
        case ChartId::N12: return {0, 1, Mat2{1.0, 0.0, 0.0, 1.0}, 2, 3};
        case ChartId::N13:
        case ChartId::O13: return {0, 2, Mat2{1.0, 0.0, 0.0, -1.0}, 1, 3};
        case ChartId::N14:
        case ChartId::O14: return {0, 3, Mat2{1.0, 0.0, 0.0, 1.0}, 1, 2};
        case ChartId::N23:
        case ChartId::O23: return {1, 2, Mat2{-1.0, 0.0, 0.0, -1.0}, 0, 3};
        case ChartId::N24:
        case ChartId::O24: return {1, 3, Mat2{-1.0, 0.0, 0.0, 1.0}, 0, 2};
        case ChartId::N34: return {2, 3, Mat2{-1.0, 0.0, 0.0, -1.0}, 0, 1};
    }
    throw Error(ErrorCode::ParamOutOfRange, "unknown chart");
}

/// The general chart underlying a self-adjoint one (O13 -> N13 and so on).
inline ChartId general_chart(ChartId c) {
    switch (c) {
        case ChartId::O13: return ChartId::N13;
        case ChartId::O14: return ChartId::N14;
        case ChartId::O23: return ChartId::N23;
        case ChartId::O24: return ChartId::N24;
        default: return c;
    }
}

/// A chart id plus its four coordinates. General charts: the free entries in row-major
/// order. Self-adjoint charts: (r1, Re z, Im z, r2), stored as real parts, where r1 is the
/// free A-entry of row 1, r2 the free B-entry of row 2 and z the free A-entry of row 2.
struct ChartPoint {
    ChartId chart;
    std::array<cplx, 4> coords;
};

/// (A|B) rewritten so that the pivot block of `chart` takes its normalized value.
inline BoundaryCondition normalized_form(const BoundaryCondition& bc, ChartId chart) {
    const auto p = chart_pattern(chart);
    const Mat2 Pw{bc.col(0, p.pivot0), bc.col(0, p.pivot1), bc.col(1, p.pivot0), bc.col(1, p.pivot1)};
    if (Pw.det() == cplx{}) throw Error(ErrorCode::ParamOutOfRange, std::string("point is not in chart ") + to_string(chart));
    BoundaryCondition out = bc.left_multiplied(p.pivot_block * Pw.inverse());
    // pivot entries are exact by definition
    out.col(0, p.pivot0) = p.pivot_block(0, 0);
    out.col(0, p.pivot1) = p.pivot_block(0, 1);
    out.col(1, p.pivot0) = p.pivot_block(1, 0);
    out.col(1, p.pivot1) = p.pivot_block(1, 1);
    return out;
}

namespace detail {

inline constexpr std::array<ChartId, 6> kGeneralCharts{ChartId::N12, ChartId::N13, ChartId::N14,
                                                       ChartId::N23, ChartId::N24, ChartId::N34};
inline constexpr std::array<ChartId, 4> kSelfAdjointCharts{ChartId::O13, ChartId::O14, ChartId::O23, ChartId::O24};

// Minors whose magnitude is within this factor of the largest count as ties; the first
// chart in the fixed order wins, so equivalent inputs pick the same chart.
inline constexpr double kPivotTie = 1e-6;

template <std::size_t K>
ChartId pick_chart(const BoundaryCondition& bc, const std::array<ChartId, K>& order) {
    double best = 0.0;
    for (ChartId c : order) {
        const auto p = chart_pattern(c);
        best = std::max(best, std::abs(bc.minor(p.pivot0, p.pivot1)));
    }
    for (ChartId c : order) {
        const auto p = chart_pattern(c);
        if (std::abs(bc.minor(p.pivot0, p.pivot1)) >= (1.0 - kPivotTie) * best) return c;
    }
    return order.front();
}

}  // namespace detail

/// Normalized form in the general chart with the largest pivot minor.
inline ChartPoint normalize_to_chart(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    require_rank2(bc, tol);
    const ChartId c = detail::pick_chart(bc, detail::kGeneralCharts);
    const auto p = chart_pattern(c);
    const BoundaryCondition n = normalized_form(bc, c);
    return {c, {n.col(0, p.free0), n.col(0, p.free1), n.col(1, p.free0), n.col(1, p.free1)}};
}

/// Coefficient matrix of a chart point in normalized form.
inline BoundaryCondition reconstruct(const ChartPoint& pt) {
    const auto p = chart_pattern(pt.chart);
    BoundaryCondition bc{};
    bc.col(0, p.pivot0) = p.pivot_block(0, 0);
    bc.col(0, p.pivot1) = p.pivot_block(0, 1);
    bc.col(1, p.pivot0) = p.pivot_block(1, 0);
    bc.col(1, p.pivot1) = p.pivot_block(1, 1);
    if (is_self_adjoint_chart(pt.chart)) {
        const double r1 = pt.coords[0].real(), r2 = pt.coords[3].real();
        const cplx z{pt.coords[1].real(), pt.coords[2].real()};
        bc.col(0, p.free0) = r1;
        bc.col(0, p.free1) = std::conj(z);
        bc.col(1, p.free0) = z;
        bc.col(1, p.free1) = r2;
    } else {
        bc.col(0, p.free0) = pt.coords[0];
        bc.col(0, p.free1) = pt.coords[1];
        bc.col(1, p.free0) = pt.coords[2];
        bc.col(1, p.free1) = pt.coords[3];
    }
    return bc;
}

/// True iff (A1|B1) = T (A2|B2) for an invertible T, compared in the chart of the first.
inline bool bc_equivalent(const BoundaryCondition& a, const BoundaryCondition& b, double rel = 1e-10) {
    const auto pa = normalize_to_chart(a);
    const auto p = chart_pattern(pa.chart);
    if (std::abs(b.minor(p.pivot0, p.pivot1)) <= 1e-12 * b.frobenius() * b.frobenius()) return false;
    const BoundaryCondition na = normalized_form(a, pa.chart), nb = normalized_form(b, pa.chart);
    const double scale = 1.0 + std::max(na.frobenius(), nb.frobenius());
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 4; ++c)
            if (std::abs(na.col(i, c) - nb.col(i, c)) > rel * scale) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Self-adjointness and classification

inline double self_adjoint_defect(const BoundaryCondition& bc) {
    const Mat2 d = bc.A * kSymplectic * bc.A.adjoint() - bc.B * kSymplectic * bc.B.adjoint();
    const double s = bc.A.frobenius() * bc.A.frobenius() + bc.B.frobenius() * bc.B.frobenius();
    return s > 0.0 ? d.frobenius() / s : 0.0;
}

inline bool is_self_adjoint(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    return self_adjoint_defect(bc) <= tol.self_adjoint;
}

/// Self-adjoint chart containing bc, chosen by the largest pivot minor among the four.
inline ChartPoint normalize_to_self_adjoint_chart(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    require_rank2(bc, tol);
    if (!is_self_adjoint(bc, tol)) throw Error(ErrorCode::NotSelfAdjoint, "boundary condition is not self-adjoint");
    const ChartId c = detail::pick_chart(bc, detail::kSelfAdjointCharts);
    const auto p = chart_pattern(c);
    const BoundaryCondition n = normalized_form(bc, c);
    // Average the two copies of z to absorb rounding.
    const cplx z = 0.5 * (n.col(1, p.free0) + std::conj(n.col(0, p.free1)));
    return {c, {n.col(0, p.free0).real(), z.real(), z.imag(), n.col(1, p.free1).real()}};
}

enum class BCClass { degenerated, separated, coupled };

inline const char* to_string(BCClass c) {
    switch (c) {
        case BCClass::degenerated: return "degenerated";
        case BCClass::separated: return "separated";
        case BCClass::coupled: return "coupled";
    }
    return "coupled";
}

inline BCClass classify(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    require_rank2(bc, tol);
    const double scale = bc.frobenius();
    const int ra = mat2_rank(bc.A, scale, tol.rank);
    const int rb = mat2_rank(bc.B, scale, tol.rank);
    if (ra == 0 || rb == 0) return BCClass::degenerated;
    if (ra <= 1 && rb <= 1) return BCClass::separated;
    return BCClass::coupled;
}

// ---------------------------------------------------------------------------
// Canonical forms

struct SeparatedParams {
    double alpha = 0.0;           // [0, pi)
    double beta = std::numbers::pi;  // (0, pi]
};

struct CoupledParams {
    double gamma = 0.0;  // [0, pi)
    Mat2 K = Mat2::identity();
};

inline BoundaryCondition canonical_bc(const SeparatedParams& p) {
    constexpr double pi = std::numbers::pi;
    if (!(p.alpha >= 0.0 && p.alpha < pi)) throw Error(ErrorCode::ParamOutOfRange, "alpha must lie in [0, pi)");
    if (!(p.beta > 0.0 && p.beta <= pi)) throw Error(ErrorCode::ParamOutOfRange, "beta must lie in (0, pi]");
    return {Mat2{std::cos(p.alpha), -std::sin(p.alpha), 0.0, 0.0}, Mat2{0.0, 0.0, std::cos(p.beta), -std::sin(p.beta)}};
}

inline BoundaryCondition canonical_bc(const CoupledParams& p) {
    constexpr double pi = std::numbers::pi;
    if (!(p.gamma >= 0.0 && p.gamma < pi)) throw Error(ErrorCode::ParamOutOfRange, "gamma must lie in [0, pi)");
    for (const auto& v : p.K.m)
        if (v.imag() != 0.0) throw Error(ErrorCode::ParamOutOfRange, "K must be real");
    if (std::abs(p.K.det() - 1.0) > 1e-10) throw Error(ErrorCode::ParamOutOfRange, "det K must equal 1");
    return {std::polar(1.0, p.gamma) * p.K, Mat2{-1.0, 0.0, 0.0, -1.0}};
}

namespace detail {

// Angle theta in [0, pi) with (cos theta, -sin theta) parallel to the row vector u, which
// must be a complex multiple of a real vector.
inline double row_angle(cplx u1, cplx u2) {
    const cplx ref = std::abs(u1) >= std::abs(u2) ? u1 : u2;
    const cplx phase = std::conj(ref) / std::abs(ref);
    const double a = (u1 * phase).real(), b = (u2 * phase).real();
    double t = std::atan2(-b, a);
    if (t < 0.0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    return t;
}

}  // namespace detail

/// (alpha, beta) of a separated self-adjoint condition.
inline SeparatedParams separated_params(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    if (!is_self_adjoint(bc, tol) || classify(bc, tol) != BCClass::separated)
        throw Error(ErrorCode::NotSeparatedSelfAdjoint, "boundary condition is not separated self-adjoint");
    auto dominant_row = [](const Mat2& M) {
        const int i = std::norm(M(0, 0)) + std::norm(M(0, 1)) >= std::norm(M(1, 0)) + std::norm(M(1, 1)) ? 0 : 1;
        return std::pair{M(i, 0), M(i, 1)};
    };
    const auto [a1, a2] = dominant_row(bc.A);
    const auto [b1, b2] = dominant_row(bc.B);
    constexpr double snap = 1e-12;
    double alpha = detail::row_angle(a1, a2);
    if (alpha > std::numbers::pi - snap) alpha = 0.0;
    double beta = detail::row_angle(b1, b2);
    if (beta < snap) beta = std::numbers::pi;
    return {alpha, beta};
}

/// (gamma, K) of a coupled self-adjoint condition, read off its N34 normalized form.
inline CoupledParams coupled_params(const BoundaryCondition& bc, const Tolerances& tol = {}) {
    if (!is_self_adjoint(bc, tol) || classify(bc, tol) != BCClass::coupled)
        throw Error(ErrorCode::NotSelfAdjoint, "boundary condition is not coupled self-adjoint");
    const BoundaryCondition n = normalized_form(bc, ChartId::N34);
    double gamma = 0.5 * std::arg(n.A.det());
    if (gamma < 0.0) gamma += std::numbers::pi;
    if (gamma >= std::numbers::pi) gamma -= std::numbers::pi;
    Mat2 K = std::polar(1.0, -gamma) * n.A;
    for (auto& v : K.m) v = v.real();
    return {gamma, K};
}

/// [Phi_N(lambda) | -I], the unique condition with lambda of geometric multiplicity 2.
inline BoundaryCondition double_eigenvalue_bc(const TransferSystem& ts, cplx lambda) {
    return {ts.final_at(lambda), Mat2{-1.0, 0.0, 0.0, -1.0}};
}

// ---------------------------------------------------------------------------
// Tangent vectors

/// A perturbation (H | L) of a boundary condition. When `chart` is set the perturbation is
/// meant to live in that chart's tangent space.
struct BCTangent {
    std::optional<ChartId> chart;
    Mat2 H;
    Mat2 L;

    cplx col(int i, int c) const { return c < 2 ? H(i, c) : L(i, c - 2); }
    cplx& col(int i, int c) { return c < 2 ? H(i, c) : L(i, c - 2); }
};

/// Tangent in a chart from coordinates laid out like ChartPoint::coords.
inline BCTangent chart_tangent(ChartId chart, const std::array<cplx, 4>& d) {
    const auto p = chart_pattern(chart);
    BCTangent t{chart, Mat2::zero(), Mat2::zero()};
    if (is_self_adjoint_chart(chart)) {
        const cplx z{d[1].real(), d[2].real()};
        t.col(0, p.free0) = d[0].real();
        t.col(0, p.free1) = std::conj(z);
        t.col(1, p.free0) = z;
        t.col(1, p.free1) = d[3].real();
    } else {
        t.col(0, p.free0) = d[0];
        t.col(0, p.free1) = d[1];
        t.col(1, p.free0) = d[2];
        t.col(1, p.free1) = d[3];
    }
    return t;
}

/// Empty string when the tangent respects its chart's free slots (and, for self-adjoint
/// charts, the reality and conjugacy constraints); otherwise a description of the failure.
inline std::string tangent_violation(const BCTangent& t, double tol = Tolerances{}.chart) {
    if (!t.chart) return "tangent has no chart";
    const auto p = chart_pattern(*t.chart);
    const double scale = 1.0 + std::max(t.H.max_abs(), t.L.max_abs());
    for (int i = 0; i < 2; ++i)
        for (int c : {p.pivot0, p.pivot1})
            if (std::abs(t.col(i, c)) > tol * scale)
                return "nonzero entry in pivot column " + std::to_string(c + 1) + " of chart " + to_string(*t.chart);
    if (is_self_adjoint_chart(*t.chart)) {
        if (std::abs(t.col(0, p.free0).imag()) > tol * scale || std::abs(t.col(1, p.free1).imag()) > tol * scale)
            return "real slots of a self-adjoint chart tangent have imaginary parts";
        if (std::abs(t.col(0, p.free1) - std::conj(t.col(1, p.free0))) > tol * scale)
            return "conjugate slots of a self-adjoint chart tangent do not match";
    }
    return {};
}

/// Empty string when bc is literally in the normalized form of `chart`.
inline std::string chart_violation(const BoundaryCondition& bc, ChartId chart, double tol = Tolerances{}.chart) {
    const auto p = chart_pattern(chart);
    const double scale = 1.0 + std::max(bc.A.max_abs(), bc.B.max_abs());
    for (int i = 0; i < 2; ++i) {
        if (std::abs(bc.col(i, p.pivot0) - p.pivot_block(i, 0)) > tol * scale ||
            std::abs(bc.col(i, p.pivot1) - p.pivot_block(i, 1)) > tol * scale)
            return std::string("boundary condition is not in the normalized form of chart ") + to_string(chart);
    }
    if (is_self_adjoint_chart(chart)) {
        if (std::abs(bc.col(0, p.free0).imag()) > tol * scale || std::abs(bc.col(1, p.free1).imag()) > tol * scale ||
            std::abs(bc.col(0, p.free1) - std::conj(bc.col(1, p.free0))) > tol * scale)
            return std::string("boundary condition violates the structure of chart ") + to_string(chart);
    }
    return {};
}

}  // namespace dslp
