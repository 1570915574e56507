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
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dslp {

using cplx = std::complex<double>;

enum class ErrorCode {
    InvalidEquation,
    NotRank2,
    ParamOutOfRange,
    FormulaMismatch,
    RootFindFailure,
    NotAnEigenvalue,
    GeometricMultiplicityTwo,
    NotSelfAdjoint,
    SizeLimit,
    WholePlaneSpectrum,
    NotSimple,
    ChartTangentMismatch,
    NotSelfAdjointChart,
    NotSeparatedSelfAdjoint,
    MatchAmbiguity,
    InvalidGridPoint,
    Parse,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidEquation: return "InvalidEquation";
        case ErrorCode::NotRank2: return "NotRank2";
        case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
        case ErrorCode::FormulaMismatch: return "FormulaMismatch";
        case ErrorCode::RootFindFailure: return "RootFindFailure";
        case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
        case ErrorCode::GeometricMultiplicityTwo: return "GeometricMultiplicityTwo";
        case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
        case ErrorCode::SizeLimit: return "SizeLimit";
        case ErrorCode::WholePlaneSpectrum: return "WholePlaneSpectrum";
        case ErrorCode::NotSimple: return "NotSimple";
        case ErrorCode::ChartTangentMismatch: return "ChartTangentMismatch";
        case ErrorCode::NotSelfAdjointChart: return "NotSelfAdjointChart";
        case ErrorCode::NotSeparatedSelfAdjoint: return "NotSeparatedSelfAdjoint";
        case ErrorCode::MatchAmbiguity: return "MatchAmbiguity";
        case ErrorCode::InvalidGridPoint: return "InvalidGridPoint";
        case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

/// Numerical thresholds used across the library. Every comparison that decides a
/// degree, a rank, a multiplicity or a class goes through one of these.
struct Tolerances {
    double degree = 1e-10;        // numeric_degree, relative to the largest coefficient
    double rank = 1e-8;           // 2x2 rank decisions, relative to a caller-supplied scale
    double self_adjoint = 1e-10;  // ||AEA* - BEB*|| <= tol * (||A||^2 + ||B||^2)
    double chart = 1e-10;         // chart pattern and tangent slot checks
    double cluster = 1e-6;        // root clustering radius, times max(1, |lambda|)
    double whole_plane = 1e-12;   // all |Gamma_k| below this times the natural scale
    double real_snap = 1e-7;      // |Im lambda| snap for self-adjoint problems
    double formula = 1e-9;        // agreement of the two characteristic-polynomial routes
    double eigen_check = 1e-8;    // |Gamma(lambda)| test for "is an eigenvalue"
    double simple = 1e-6;         // |Gamma'(lambda)| test for "is simple"

    /// Every threshold multiplied by `factor`.
    Tolerances scaled(double factor) const {
        Tolerances t = *this;
        for (double* v : {&t.degree, &t.rank, &t.self_adjoint, &t.chart, &t.cluster, &t.whole_plane,
                          &t.real_snap, &t.formula, &t.eigen_check, &t.simple}) {
            *v *= factor;
        }
        return t;
    }
};

// ---------------------------------------------------------------------------
// Dense complex polynomials

class Polynomial {
   public:
    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {}
    Polynomial(std::initializer_list<cplx> coeffs) : c_(coeffs) {}

    static Polynomial constant(cplx value) { return Polynomial({value}); }
    static Polynomial monomial(cplx value, std::size_t k) {
        std::vector<cplx> c(k + 1, cplx{});
        c[k] = value;
        return Polynomial(std::move(c));
    }

    const std::vector<cplx>& coeffs() const noexcept { return c_; }
    std::size_t size() const noexcept { return c_.size(); }

    /// Coefficient of lambda^k; zero past the stored length.
    cplx operator[](std::size_t k) const noexcept { return k < c_.size() ? c_[k] : cplx{}; }

    /// Horner evaluation.
    cplx operator()(cplx x) const noexcept {
        cplx acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    /// sum_k |c_k| |x|^k, the rounding reference for evaluation at x.
    double abs_bound(cplx x) const noexcept {
        const double r = std::abs(x);
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
        return acc;
    }

    /// Largest k with |c_k| > tau * max_j |c_j|; -1 for the zero polynomial.
    int numeric_degree(double tau) const noexcept {
        const double m = max_abs();
        if (m == 0.0) return -1;
        for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
            if (std::abs(c_[k]) > tau * m) return k;
        }
        return -1;
    }

    Polynomial truncated(int degree) const {
        if (degree < 0) return Polynomial{};
        std::vector<cplx> c(c_.begin(), c_.begin() + std::min<std::size_t>(c_.size(), degree + 1));
        return Polynomial(std::move(c));
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial{};
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    Polynomial derivative(int order) const {
        Polynomial p = *this;
        for (int i = 0; i < order; ++i) p = p.derivative();
        return p;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Polynomial& operator*=(cplx s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
    friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.c_.empty() || b.c_.empty()) return Polynomial{};
        std::vector<cplx> r(a.c_.size() + b.c_.size() - 1, cplx{});
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == cplx{}) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Polynomial(std::move(r));
    }

   private:
    std::vector<cplx> c_;
};

// ---------------------------------------------------------------------------
// 2x2 complex matrices

struct Mat2 {
    std::array<cplx, 4> m{};  // row-major

    constexpr Mat2() = default;
    constexpr Mat2(cplx a11, cplx a12, cplx a21, cplx a22) : m{a11, a12, a21, a22} {}

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 zero() { return {}; }

    cplx& operator()(int i, int j) { return m[2 * i + j]; }
    const cplx& operator()(int i, int j) const { return m[2 * i + j]; }

    cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
    /// Cofactor matrix [[a22, -a21], [-a12, a11]].
    Mat2 cofactor() const { return {m[3], -m[2], -m[1], m[0]}; }
    Mat2 adjugate() const { return {m[3], -m[1], -m[2], m[0]}; }
    Mat2 transpose() const { return {m[0], m[2], m[1], m[3]}; }
    Mat2 adjoint() const { return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}; }
    Mat2 inverse() const {
        const cplx d = det();
        Mat2 a = adjugate();
        for (auto& v : a.m) v /= d;
        return a;
    }

    double frobenius() const {
        double s = 0.0;
        for (const auto& v : m) s += std::norm(v);
        return std::sqrt(s);
    }
    double max_abs() const {
        double s = 0.0;
        for (const auto& v : m) s = std::max(s, std::abs(v));
        return s;
    }

    friend Mat2 operator+(const Mat2& a, const Mat2& b) {
        return {a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]};
    }
    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        return {a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2], a.m[3] - b.m[3]};
    }
    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
                a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]};
    }
    friend Mat2 operator*(cplx s, const Mat2& a) { return {s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}; }
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// The symplectic form [[0, 1], [-1, 0]].
inline constexpr Mat2 kSymplectic{0.0, 1.0, -1.0, 0.0};

/// Singular values (largest first) of a 2x2 complex matrix.
inline std::array<double, 2> singular_values(const Mat2& a) {
    const double fro2 = a.frobenius() * a.frobenius();
    const double d = std::abs(a.det());
    // s1^2 + s2^2 = fro2, s1 s2 = d
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * d * d));
    const double s1 = std::sqrt(0.5 * (fro2 + disc));
    const double s2 = s1 > 0.0 ? d / s1 : 0.0;
    return {s1, s2};
}

/// Numerical rank from singular values with threshold eps * scale.
inline int mat2_rank(const Mat2& a, double scale, double eps = Tolerances{}.rank) {
    const auto s = singular_values(a);
    const double thr = eps * scale;
    if (s[0] <= thr) return 0;
    if (s[1] <= thr) return 1;
    return 2;
}

// ---------------------------------------------------------------------------
// Equations

enum class EquationClass { complex, real, real_positive_weight };

inline const char* to_string(EquationClass c) {
    switch (c) {
        case EquationClass::complex: return "complex";
        case EquationClass::real: return "real";
        case EquationClass::real_positive_weight: return "real_positive_weight";
    }
    return "complex";
}

/// Coefficients of -nabla(f_n Delta y_n) + q_n y_n = lambda w_n y_n, n in [1, N].
///
/// Accessors take the natural indices: f(n) for n in [0, N], q(n) and w(n) for n in [1, N].
class SLEquation {
   public:
    SLEquation(std::vector<cplx> f, std::vector<cplx> q, std::vector<cplx> w,
               std::optional<EquationClass> cls = std::nullopt)
        : f_(std::move(f)), q_(std::move(q)), w_(std::move(w)) {
        if (q_.size() < 2 || w_.size() != q_.size() || f_.size() != q_.size() + 1) {
            throw Error(ErrorCode::InvalidEquation,
                        "need N >= 2 with |f| = N + 1, |q| = |w| = N (got |f| = " + std::to_string(f_.size()) +
                            ", |q| = " + std::to_string(q_.size()) + ", |w| = " + std::to_string(w_.size()) + ")");
        }
        cls_ = cls ? *cls : infer_class();
    }

    int N() const noexcept { return static_cast<int>(q_.size()); }
    cplx f(int n) const { return f_.at(n); }
    cplx q(int n) const { return q_.at(n - 1); }
    cplx w(int n) const { return w_.at(n - 1); }
    EquationClass eq_class() const noexcept { return cls_; }

    const std::vector<cplx>& f_values() const noexcept { return f_; }
    const std::vector<cplx>& q_values() const noexcept { return q_; }
    const std::vector<cplx>& w_values() const noexcept { return w_; }

    /// Most specific class the coefficients belong to.
    EquationClass infer_class() const {
        auto real = [](const std::vector<cplx>& v) {
            return std::all_of(v.begin(), v.end(), [](cplx x) { return x.imag() == 0.0; });
        };
        if (!(real(f_) && real(q_) && real(w_))) return EquationClass::complex;
        if (std::all_of(w_.begin(), w_.end(), [](cplx x) { return x.real() > 0.0; }))
            return EquationClass::real_positive_weight;
        return EquationClass::real;
    }

    SLEquation with_f(int n, cplx v) const {
        SLEquation e = *this;
        e.f_.at(n) = v;
        e.cls_ = e.infer_class();
        return e;
    }
    SLEquation with_q(int n, cplx v) const {
        SLEquation e = *this;
        e.q_.at(n - 1) = v;
        e.cls_ = e.infer_class();
        return e;
    }
    SLEquation with_w(int n, cplx v) const {
        SLEquation e = *this;
        e.w_.at(n - 1) = v;
        e.cls_ = e.infer_class();
        return e;
    }

    /// Largest coefficient magnitude among 1/f, q, w.
    double coefficient_scale() const {
        double s = 0.0;
        for (auto v : f_) s = std::max(s, 1.0 / std::abs(v));
        for (auto v : q_) s = std::max(s, std::abs(v));
        for (auto v : w_) s = std::max(s, std::abs(v));
        return s;
    }

   private:
    std::vector<cplx> f_, q_, w_;
    EquationClass cls_ = EquationClass::complex;
};

struct Violation {
    enum class Kind { zero_f, zero_w, not_real, nonpositive_w };
    Kind kind;
    std::string field;  // "f", "q" or "w"
    int index;          // natural index (f from 0, q and w from 1)

    std::string describe() const {
        switch (kind) {
            case Kind::zero_f: return "f[" + std::to_string(index) + "] is zero";
            case Kind::zero_w: return "w[" + std::to_string(index) + "] is zero";
            case Kind::not_real:
                return field + "[" + std::to_string(index) + "] has a nonzero imaginary part in a real class";
            case Kind::nonpositive_w:
                return "w[" + std::to_string(index) + "] is not positive (real_positive_weight class)";
        }
        return "";
    }
};

inline std::vector<Violation> validate_equation(const SLEquation& eq) {
    std::vector<Violation> out;
    const int N = eq.N();
    for (int n = 0; n <= N; ++n)
        if (eq.f(n) == cplx{}) out.push_back({Violation::Kind::zero_f, "f", n});
    for (int n = 1; n <= N; ++n)
        if (eq.w(n) == cplx{}) out.push_back({Violation::Kind::zero_w, "w", n});
    if (eq.eq_class() != EquationClass::complex) {
        for (int n = 0; n <= N; ++n)
            if (eq.f(n).imag() != 0.0) out.push_back({Violation::Kind::not_real, "f", n});
        for (int n = 1; n <= N; ++n) {
            if (eq.q(n).imag() != 0.0) out.push_back({Violation::Kind::not_real, "q", n});
            if (eq.w(n).imag() != 0.0) out.push_back({Violation::Kind::not_real, "w", n});
        }
    }
    if (eq.eq_class() == EquationClass::real_positive_weight) {
        for (int n = 1; n <= N; ++n)
            if (eq.w(n).real() <= 0.0 && eq.w(n) != cplx{})
                out.push_back({Violation::Kind::nonpositive_w, "w", n});
    }
    return out;
}

inline void require_valid(const SLEquation& eq) {
    const auto v = validate_equation(eq);
    if (!v.empty()) throw Error(ErrorCode::InvalidEquation, v.front().describe());
}

/// y_0..y_{N+1} together with the quasi-derivatives qd_n = f_n (y_{n+1} - y_n), n in [0, N].
struct SolutionSequence {
    std::vector<cplx> y;
    std::vector<cplx> qd;

    int N() const noexcept { return static_cast<int>(qd.size()) - 1; }
};

}  // namespace dslp
