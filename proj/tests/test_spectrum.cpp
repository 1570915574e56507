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

#include <gtest/gtest.h>

#include "dslp/dslp.hpp"
#include "support/criteria.hpp"

namespace dslp {
namespace {

using fixtures::pi;
using testing::Rng;

const Eigenvalue* find(const SpectrumReport& rep, cplx v, double tol = 1e-8) {
    for (const auto& e : rep.eigenvalues)
        if (std::abs(e.value - v) <= tol) return &e;
    return nullptr;
}

TEST(CharPoly, DoubleRootFamilyAtZero) {
    const auto cp = characteristic_polynomial(fixtures::fourier_equation(), fixtures::double_root_family_bc(0.0));
    EXPECT_EQ(cp.degree, 2);
    EXPECT_LE(testing::proportional_error(cp.gamma, {0.0, 2.0, -1.0}), 1e-14);
    EXPECT_LE(testing::proportional_error(cp.via_cofactor, {0.0, 2.0, -1.0}), 1e-14);
}

TEST(CharPoly, ZeroBBlockGivesConstantDeterminant) {
    const Mat2 A{2.0, 1.0, 1.0, 3.0};
    const auto cp = characteristic_polynomial(fixtures::fourier_equation(), {A, Mat2::zero()});
    EXPECT_EQ(cp.degree, 0);
    EXPECT_FALSE(cp.whole_plane);
    EXPECT_NEAR(std::abs(cp.gamma[0] - A.det()), 0.0, 1e-15);
    EXPECT_TRUE(eigenvalues(fixtures::fourier_equation(), {A, Mat2::zero()}).eigenvalues.empty());
}

TEST(CharPoly, F0FamilyFactorizes) {
    for (double s : {-3.0, -2.0, -0.5}) {
        const auto cp = characteristic_polynomial(fixtures::f0_family_equation(s), fixtures::coefficient_family_bc());
        EXPECT_LE(testing::proportional_error(cp.gamma, {-1.0 / s, (1.0 - s) / s, 1.0}), 1e-12) << s;
    }
}

TEST(CharPoly, PrintedPolynomialsMatchUpToAFactor) {
    const auto v = testing::check_printed_polynomials();
    EXPECT_TRUE(v.pass) << v.summary();
}

TEST(CharPoly, WholePlaneSpectrumIsDetected) {
    const SLEquation eq = fixtures::fourier_equation();
    const BoundaryCondition bc{Mat2{0.0, 1.0, -1.0, 0.0}, Mat2{0.0, -1.0, -1.0, -1.0}};
    ASSERT_EQ(bc_rank(bc), 2);
    const auto cp = characteristic_polynomial(eq, bc);
    EXPECT_TRUE(cp.whole_plane);
    EXPECT_EQ(cp.degree, -1);
    const auto rep = eigenvalues(eq, bc);
    EXPECT_EQ(rep.kind, SpectrumKind::whole_plane);
    EXPECT_THROW(count_in_region(rep, 0.0, 1.0), Error);
    EXPECT_EQ(pencil_oracle(eq, bc).kind, SpectrumKind::whole_plane);
}

TEST(Eigenvalues, DirichletNeumannFourierHasSingleEigenvalueTwo) {
    const auto rep = eigenvalues(fixtures::fourier_equation(), canonical_bc(SeparatedParams{0.0, pi}));
    ASSERT_EQ(rep.eigenvalues.size(), 1u);
    EXPECT_NEAR(std::abs(rep.eigenvalues[0].value - 2.0), 0.0, 1e-12);
    EXPECT_EQ(rep.eigenvalues[0].analytic_mult, 1);
    EXPECT_EQ(rep.eigenvalues[0].geometric_mult, 1);
}

TEST(Eigenvalues, DoubleRootWithOneDimensionalEigenspace) {
    for (cplx c : {cplx(-1.0, 1.0), cplx(-1.0, -1.0)}) {
        const auto rep = eigenvalues(fixtures::fourier_equation(), fixtures::double_root_family_bc(c));
        const Eigenvalue* e = find(rep, 0.0, 1e-7);
        ASSERT_NE(e, nullptr);
        EXPECT_EQ(e->analytic_mult, 2);
        EXPECT_EQ(e->geometric_mult, 1);
        EXPECT_EQ(rep.total_multiplicity(), 2);
    }
}

TEST(Eigenvalues, O14FamilyDoubleEigenvalueAtKink) {
    const auto rep = eigenvalues(fixtures::fourier_equation(), fixtures::o14_family_bc(2.0, 0.0));
    const Eigenvalue* e = find(rep, 0.0, 1e-7);
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->analytic_mult, 2);
    EXPECT_EQ(e->geometric_mult, 2);
    EXPECT_EQ(count_in_region(rep, 0.0, 0.5), 2);
    EXPECT_EQ(geometric_multiplicity(fixtures::fourier_equation(), fixtures::o14_family_bc(2.0, 0.0), 0.0), 2);
}

TEST(Eigenvalues, F0FamilyTwoSimpleEigenvalues) {
    const auto rep = eigenvalues(fixtures::f0_family_equation(-2.0), fixtures::coefficient_family_bc());
    ASSERT_EQ(rep.eigenvalues.size(), 2u);
    EXPECT_NEAR(std::abs(rep.eigenvalues[0].value - 0.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(rep.eigenvalues[1].value - 1.0), 0.0, 1e-12);
    for (const auto& e : rep.eigenvalues) {
        EXPECT_EQ(e.analytic_mult, 1);
        EXPECT_EQ(e.geometric_mult, 1);
    }
}

TEST(Eigenvalues, F0FamilyCrossingIsDouble) {
    const auto rep = eigenvalues(fixtures::f0_family_equation(-1.0), fixtures::coefficient_family_bc());
    const Eigenvalue* e = find(rep, 1.0, 1e-7);
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->analytic_mult, 2);
}

TEST(Eigenvalues, CountInRegion) {
    const auto rep = eigenvalues(fixtures::fourier_equation(), canonical_bc(SeparatedParams{0.0, pi}));
    EXPECT_EQ(count_in_region(rep, 2.0, 0.1), 1);
    EXPECT_EQ(count_in_region(rep, 0.7, 1e-9), 0);
}

TEST(Eigenvalues, LexicographicOrder) {
    Rng rng(401);
    for (int i = 0; i < 50; ++i) {
        const auto rep = eigenvalues(testing::random_complex_equation(rng, rng.integer(2, 8)), testing::random_complex_bc(rng));
        for (std::size_t k = 1; k < rep.eigenvalues.size(); ++k) {
            const cplx a = rep.eigenvalues[k - 1].value, b = rep.eigenvalues[k].value;
            EXPECT_TRUE(a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag()));
        }
    }
}

TEST(Eigenvalues, InvariantUnderChoiceOfRepresentative) {
    Rng rng(402);
    for (int i = 0; i < 100; ++i) {
        const SLEquation eq = testing::random_complex_equation(rng, rng.integer(2, 8));
        const BoundaryCondition bc = testing::random_complex_bc(rng);
        const auto a = eigenvalues(eq, bc);
        const auto b = eigenvalues(eq, bc.left_multiplied(testing::random_invertible(rng)));
        ASSERT_EQ(a.eigenvalues.size(), b.eigenvalues.size()) << i;
        for (std::size_t k = 0; k < a.eigenvalues.size(); ++k) {
            const auto& x = a.eigenvalues[k];
            const auto& y = b.eigenvalues[k];
            EXPECT_LE(std::abs(x.value - y.value), 1e-7 * std::max(1.0, std::abs(x.value))) << i;
            EXPECT_EQ(x.analytic_mult, y.analytic_mult);
            EXPECT_EQ(x.geometric_mult, y.geometric_mult);
        }
    }
}

TEST(Eigenvalues, NonEigenvalueIsRejected) {
    try {
        geometric_multiplicity(fixtures::fourier_equation(), canonical_bc(SeparatedParams{0.0, pi}), 1.0);
        FAIL() << "expected NotAnEigenvalue";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotAnEigenvalue);
    }
}

TEST(MultiplicityLaws, AnalyticAtLeastGeometric) {
    const auto v = testing::check_analytic_ge_geometric();
    EXPECT_TRUE(v.pass) << v.summary();
}

TEST(MultiplicityLaws, SelfAdjointEqualityRealityAndCount) {
    const auto v = testing::check_self_adjoint_laws();
    EXPECT_TRUE(v.pass) << v.summary();
}

TEST(MultiplicityLaws, SeparatedSelfAdjointSpectrumIsSimple) {
    const auto v = testing::check_separated_simple();
    EXPECT_TRUE(v.pass) << v.summary();
}

TEST(Eigenfunctions, SatisfiesEquationAndCondition) {
    const SLEquation eq = fixtures::fourier_equation();
    const auto bc = fixtures::double_root_family_bc(0.0);
    for (double lambda : {0.0, 2.0}) {
        const auto d = eigenfunction(eq, bc, lambda);
        EXPECT_LE(ivp_residual(eq, lambda, d.seq), 1e-12);
        EXPECT_LE(bc_residual(bc, d.seq), 1e-9);
    }
}

TEST(Eigenfunctions, NormalizedForSelfAdjointProblems) {
    Rng rng(403);
    for (int i = 0; i < 50; ++i) {
        const SLEquation eq = testing::random_real_positive_equation(rng, rng.integer(2, 8));
        const auto bc = testing::random_self_adjoint_bc(rng);
        const auto rep = eigenvalues(eq, bc);
        for (const auto& e : rep.eigenvalues) {
            const auto d = eigenfunction(eq, bc, e.value);
            ASSERT_TRUE(d.normalized);
            double s = 0.0;
            for (int n = 1; n <= eq.N(); ++n) s += eq.w(n).real() * std::norm(d.seq.y[n]);
            EXPECT_NEAR(s, 1.0, 1e-12);
            EXPECT_LE(bc_residual(bc, d.seq), 1e-8);
        }
    }
}

TEST(Eigenfunctions, Q1FamilyEigenfunctionConcentratesAtFirstNode) {
    const auto d = eigenfunction(fixtures::q1_family_equation(-0.5), fixtures::coefficient_family_bc(), 0.5);
    EXPECT_NEAR(std::norm(d.seq.y[1]), 1.0, 1e-12);
    EXPECT_NEAR(std::norm(d.seq.y[2]), 0.0, 1e-12);
}

TEST(Eigenfunctions, TwoDimensionalEigenspaceIsReportedAsError) {
    const SLEquation eq = fixtures::fourier_equation();
    const auto bc = fixtures::o14_family_bc(2.0, 0.0);
    try {
        eigenfunction(eq, bc, 0.0);
        FAIL() << "expected GeometricMultiplicityTwo";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GeometricMultiplicityTwo);
    }
    const auto basis = eigenspace_basis(TransferSystem(eq), bc, 0.0);
    ASSERT_EQ(basis.size(), 2u);
    for (const auto& s : basis) EXPECT_LE(bc_residual(bc, s), 1e-12);
}

TEST(SelfAdjointCount, Examples) {
    const SLEquation fe = fixtures::fourier_equation();
    const auto a = self_adjoint_count(fe, canonical_bc(SeparatedParams{0.0, pi}));
    EXPECT_EQ(a.r, 1);
    EXPECT_EQ(a.expected_total, 1);

    // y_1 = 0 and y_N = 0: left row (1, 1/f_0) on (y_0, f_0 Delta y_0).
    const SLEquation eq = SLEquation({2.0, 1.0, 3.0, 1.0}, {0.5, -1.0, 0.0}, {1.0, 2.0, 1.0});
    const BoundaryCondition dir{Mat2{1.0, 0.5, 0.0, 0.0}, Mat2{0.0, 0.0, 1.0, 0.0}};
    const auto b = self_adjoint_count(eq, dir);
    EXPECT_EQ(b.r, 0);
    EXPECT_EQ(b.expected_total, eq.N() - 2);
    EXPECT_EQ(eigenvalues(eq, dir).total_multiplicity(), eq.N() - 2);

    const auto c = self_adjoint_count(fixtures::f0_family_equation(-2.0), fixtures::coefficient_family_bc());
    EXPECT_EQ(c.r, 2);
    EXPECT_EQ(c.expected_total, 2);
}

TEST(SelfAdjointCount, RequiresSelfAdjointProblem) {
    EXPECT_THROW(self_adjoint_count(fixtures::fourier_equation(), fixtures::double_root_family_bc(cplx(0.0, 1.0))), Error);
}

TEST(Oracle, F0FamilyMatches) {
    const auto o = pencil_oracle(fixtures::f0_family_equation(-2.0), fixtures::coefficient_family_bc());
    ASSERT_EQ(o.eigenvalues.size(), 2u);
    EXPECT_NEAR(std::abs(o.eigenvalues[0].value - 0.5), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(o.eigenvalues[1].value - 1.0), 0.0, 1e-10);
}

TEST(Oracle, DoubleRootAtZero) {
    const auto o = pencil_oracle(fixtures::fourier_equation(), fixtures::double_root_family_bc(cplx(-1.0, 1.0)));
    const Eigenvalue* e = find(o, 0.0, 1e-7);
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->analytic_mult, 2);
    EXPECT_EQ(e->geometric_mult, 1);
}

TEST(Oracle, ZeroBBlockHasEmptySpectrum) {
    const Mat2 A{2.0, 1.0, 1.0, 3.0};
    const auto o = pencil_oracle(fixtures::fourier_equation(), {A, Mat2::zero()});
    EXPECT_EQ(o.kind, SpectrumKind::finite);
    EXPECT_EQ(o.char_poly.degree, 0);
    EXPECT_TRUE(o.eigenvalues.empty());
}

TEST(Oracle, SizeLimitIsEnforced) {
    Rng rng(404);
    try {
        pencil_oracle(testing::random_complex_equation(rng, kPencilMaxN + 1), testing::random_complex_bc(rng));
        FAIL() << "expected SizeLimit";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SizeLimit);
    }
}

TEST(Oracle, AgreesWithTransferRouteOnRandomProblems) {
    const auto v = testing::check_oracle();
    EXPECT_TRUE(v.pass) << v.summary();
}

// Coefficients spanning six decades make det(A + B Phi_N) cancel catastrophically near some
// roots; the transfer route must still land on the pencil eigenvalues.
TEST(Oracle, AgreesOnIllScaledProblems) {
    testing::Rng rng(12);
    auto mag = [&] { return (rng.integer(0, 1) ? 1.0 : -1.0) * std::pow(10.0, rng.uniform(-3.0, 3.0)); };
    for (int t = 0; t < 30; ++t) {
        const int N = 12;
        std::vector<cplx> f(N + 1), q(N), w(N);
        for (auto& v : f) v = mag();
        for (auto& v : q) v = mag();
        for (auto& v : w) v = std::abs(mag());
        const SLEquation eq(f, q, w);
        const BoundaryCondition bc{Mat2{mag(), mag(), mag(), mag()}, Mat2{mag(), mag(), mag(), mag()}};
        const auto rep = eigenvalues(eq, bc);
        const auto orc = pencil_oracle(eq, bc);
        ASSERT_EQ(rep.eigenvalues.size(), orc.eigenvalues.size()) << "draw " << t;
        for (const auto& e : rep.eigenvalues) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& o : orc.eigenvalues) best = std::min(best, std::abs(o.value - e.value));
            EXPECT_LE(best / std::max(1.0, std::abs(e.value)), 1e-7) << "draw " << t << " lambda " << e.value;
        }
    }
}

}  // namespace
}  // namespace dslp
