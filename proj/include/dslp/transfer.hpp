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
#include <vector>

#include "dslp/core.hpp"

namespace dslp {

/// 2x2 matrix with polynomial entries in lambda, row-major.
struct PolyMat2 {
    std::array<Polynomial, 4> e;

    const Polynomial& operator()(int i, int j) const { return e[2 * i + j]; }
    Polynomial& operator()(int i, int j) { return e[2 * i + j]; }

    Mat2 at(cplx lambda) const { return {e[0](lambda), e[1](lambda), e[2](lambda), e[3](lambda)}; }

    double max_abs() const {
        double s = 0.0;
        for (const auto& p : e) s = std::max(s, p.max_abs());
        return s;
    }

    Polynomial det() const { return e[0] * e[3] - e[1] * e[2]; }
};

/// Phi_0, ..., Phi_N for one equation. Column 0 of Phi_n is (phi_n, f_n Delta phi_n),
/// column 1 is (psi_n, f_n Delta psi_n).
class TransferSystem {
   public:
    explicit TransferSystem(SLEquation eq) : eq_(std::move(eq)) {
        require_valid(eq_);
        const int N = eq_.N();
        phi_.reserve(N + 1);
        PolyMat2 cur;
        cur.e = {Polynomial{1.0}, Polynomial{0.0}, Polynomial{0.0}, Polynomial{1.0}};
        phi_.push_back(cur);
        for (int n = 1; n <= N; ++n) {
            // [[1, 1/f], [c, 1 + c/f]] * Phi_{n-1} with c = q_n - lambda w_n
            const cplx g = 1.0 / eq_.f(n - 1);
            const Polynomial c{eq_.q(n), -eq_.w(n)};
            PolyMat2 next;
            for (int j = 0; j < 2; ++j) {
                const Polynomial y = cur(0, j) + cur(1, j) * g;
                next(0, j) = y;
                next(1, j) = cur(1, j) + c * y;
            }
            phi_.push_back(next);
            cur = next;
        }
    }

    const SLEquation& equation() const noexcept { return eq_; }
    int N() const noexcept { return eq_.N(); }
    const PolyMat2& operator[](int n) const { return phi_.at(n); }
    const PolyMat2& final() const { return phi_.back(); }
    Mat2 at(int n, cplx lambda) const { return phi_.at(n).at(lambda); }
    /// Phi_N(lambda) through the numeric recursion, which is better conditioned than
    /// evaluating the expanded polynomials at large |lambda|.
    Mat2 final_at(cplx lambda) const;

   private:
    SLEquation eq_;
    std::vector<PolyMat2> phi_;
};

inline TransferSystem build_transfer(const SLEquation& eq) { return TransferSystem(eq); }

/// Phi_N(lambda) by the numeric recursion, without forming polynomials.
inline Mat2 transfer_matrix_at(const SLEquation& eq, cplx lambda) {
    Mat2 cur = Mat2::identity();
    for (int n = 1; n <= eq.N(); ++n) {
        const cplx g = 1.0 / eq.f(n - 1);
        const cplx c = eq.q(n) - lambda * eq.w(n);
        cur = Mat2{1.0, g, c, 1.0 + c * g} * cur;
    }
    return cur;
}

/// Phi_N(lambda) and its lambda-derivative by the differentiated recursion.
inline std::pair<Mat2, Mat2> transfer_derivative_at(const SLEquation& eq, cplx lambda) {
    Mat2 cur = Mat2::identity(), dcur = Mat2::zero();
    for (int n = 1; n <= eq.N(); ++n) {
        const cplx g = 1.0 / eq.f(n - 1);
        const cplx c = eq.q(n) - lambda * eq.w(n);
        const Mat2 step{1.0, g, c, 1.0 + c * g};
        const Mat2 dstep{0.0, 0.0, -eq.w(n), -eq.w(n) * g};
        dcur = dstep * cur + step * dcur;
        cur = step * cur;
    }
    return {cur, dcur};
}

inline Mat2 TransferSystem::final_at(cplx lambda) const { return transfer_matrix_at(eq_, lambda); }

/// Top coefficients of phi_N, psi_N (degree N-1) and their quasi-derivatives (degree N).
struct LeadingTerms {
    cplx phi, psi, phi_qd, psi_qd;
};

inline LeadingTerms leading_terms(const TransferSystem& ts) {
    const int N = ts.N();
    const auto& P = ts.final();
    return {P(0, 0)[N - 1], P(0, 1)[N - 1], P(1, 0)[N], P(1, 1)[N]};
}

/// The same four numbers from the closed products of w_i / f_i.
inline LeadingTerms leading_terms_closed_form(const SLEquation& eq) {
    const int N = eq.N();
    cplx prod = 1.0;
    for (int i = 1; i <= N - 1; ++i) prod *= eq.w(i) / eq.f(i);
    const double sgn = (N - 1) % 2 == 0 ? 1.0 : -1.0;
    const cplx phi = sgn * prod;
    const cplx phi_qd = -sgn * eq.w(N) * prod;
    return {phi, phi / eq.f(0), phi_qd, phi_qd / eq.f(0)};
}

/// Solution of the recurrence through (y_m, qd_m) = (z, zqd), m in {0, N}.
inline SolutionSequence solve_ivp(const SLEquation& eq, cplx lambda, int m, cplx z, cplx zqd) {
    const int N = eq.N();
    if (m != 0 && m != N) throw Error(ErrorCode::ParamOutOfRange, "initial index must be 0 or N");
    SolutionSequence s;
    s.y.assign(N + 2, cplx{});
    s.qd.assign(N + 1, cplx{});
    s.y[m] = z;
    s.qd[m] = zqd;
    if (m == 0) {
        for (int n = 1; n <= N; ++n) {
            const cplx c = eq.q(n) - lambda * eq.w(n);
            s.y[n] = s.y[n - 1] + s.qd[n - 1] / eq.f(n - 1);
            s.qd[n] = s.qd[n - 1] + c * s.y[n];
        }
    } else {
        for (int n = N; n >= 1; --n) {
            const cplx c = eq.q(n) - lambda * eq.w(n);
            s.y[n - 1] = (1.0 + c / eq.f(n - 1)) * s.y[n] - s.qd[n] / eq.f(n - 1);
            s.qd[n - 1] = s.qd[n] - c * s.y[n];
        }
    }
    s.y[N + 1] = s.y[N] + s.qd[N] / eq.f(N);
    return s;
}

struct FundamentalPair {
    SolutionSequence phi, psi;
};

inline FundamentalPair fundamental_pair(const SLEquation& eq, cplx lambda) {
    return {solve_ivp(eq, lambda, 0, 1.0, 0.0), solve_ivp(eq, lambda, 0, 0.0, 1.0)};
}

/// Largest relative defect of the recurrence and of qd_n = f_n (y_{n+1} - y_n).
inline double ivp_residual(const SLEquation& eq, cplx lambda, const SolutionSequence& s) {
    const int N = eq.N();
    double worst = 0.0;
    auto rel = [](double num, double den) { return den > 0.0 ? num / den : num; };
    for (int n = 0; n <= N; ++n) {
        const cplx fd = eq.f(n) * (s.y[n + 1] - s.y[n]);
        const double den = std::abs(s.qd[n]) + std::abs(eq.f(n)) * (std::abs(s.y[n + 1]) + std::abs(s.y[n]));
        worst = std::max(worst, rel(std::abs(s.qd[n] - fd), den));
    }
    for (int n = 1; n <= N; ++n) {
        const cplx c = eq.q(n) - lambda * eq.w(n);
        const cplx r = -(s.qd[n] - s.qd[n - 1]) + c * s.y[n];
        const double den = std::abs(s.qd[n]) + std::abs(s.qd[n - 1]) + std::abs(c * s.y[n]);
        worst = std::max(worst, rel(std::abs(r), den));
    }
    return worst;
}

}  // namespace dslp
