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
#include "support/random_problems.hpp"

namespace dslp {
namespace {

using testing::Rng;

Polynomial random_poly(Rng& rng, int deg) {
    std::vector<cplx> c(deg + 1);
    for (auto& v : c) v = rng.complex(5.0);
    return Polynomial(c);
}

TEST(Polynomial, ProductOfLinearFactors) {
    const Polynomial p = Polynomial{1.0, 1.0} * Polynomial{1.0, -1.0};
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[0], cplx(1.0));
    EXPECT_EQ(p[1], cplx(0.0));
    EXPECT_EQ(p[2], cplx(-1.0));
}

TEST(Polynomial, DerivativeAndEvaluation) {
    const Polynomial p{0.0, 2.0, -1.0};
    const Polynomial d = p.derivative();
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0], cplx(2.0));
    EXPECT_EQ(d[1], cplx(-2.0));
    EXPECT_EQ(p(2.0), cplx(0.0));
    EXPECT_EQ(p.derivative(2)[0], cplx(-2.0));
}

TEST(Polynomial, ProductEvaluatesAsProductOfValues) {
    Rng rng(101);
    for (int i = 0; i < 200; ++i) {
        const Polynomial a = random_poly(rng, rng.integer(0, 8));
        const Polynomial b = random_poly(rng, rng.integer(0, 8));
        const cplx x = rng.complex(2.0);
        const double scale = a.abs_bound(x) * b.abs_bound(x);
        EXPECT_LE(std::abs((a * b)(x) - a(x) * b(x)), 1e-12 * scale);
    }
}

TEST(Polynomial, NumericDegreeIsScaleInvariant) {
    Rng rng(102);
    for (int i = 0; i < 100; ++i) {
        std::vector<cplx> c(6);
        for (auto& v : c) v = rng.complex(1.0);
        c[5] = 1e-14 * c[5];
        const Polynomial p(c);
        const int d = p.numeric_degree(1e-10);
        EXPECT_EQ(d, 4);
        for (double s : {1e-8, 1e8}) EXPECT_EQ((p * cplx(s)).numeric_degree(1e-10), d);
    }
}

TEST(Equation, FourierEquationIsValid) {
    EXPECT_TRUE(validate_equation(fixtures::fourier_equation()).empty());
}

TEST(Equation, ZeroFIsReportedWithItsIndex) {
    const SLEquation eq({1.0, 0.0, 1.0}, {0.0, 0.0}, {1.0, 1.0});
    const auto v = validate_equation(eq);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::zero_f);
    EXPECT_EQ(v[0].index, 1);
    EXPECT_THROW(require_valid(eq), Error);
}

TEST(Equation, NegativeWeightViolatesDeclaredPositiveClass) {
    const SLEquation eq({1.0, 1.0, 1.0}, {0.0, 0.0}, {-1.0, 1.0}, EquationClass::real_positive_weight);
    const auto v = validate_equation(eq);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::nonpositive_w);
    EXPECT_EQ(v[0].index, 1);
}

TEST(Equation, ComplexEntryViolatesDeclaredRealClass) {
    const SLEquation eq({1.0, 1.0, 1.0}, {cplx(0.0, 1.0), 0.0}, {1.0, 1.0}, EquationClass::real);
    const auto v = validate_equation(eq);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::not_real);
    EXPECT_EQ(v[0].field, "q");
}

TEST(Equation, InferredClass) {
    EXPECT_EQ(fixtures::fourier_equation().eq_class(), EquationClass::real_positive_weight);
    EXPECT_EQ(fixtures::fourier_equation(-1.0).eq_class(), EquationClass::real);
    EXPECT_EQ(SLEquation({1.0, 1.0, cplx(1.0, 1.0)}, {0.0, 0.0}, {1.0, 1.0}).eq_class(), EquationClass::complex);
}

TEST(Equation, SizeMismatchThrows) {
    EXPECT_THROW(SLEquation({1.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}), Error);
    EXPECT_THROW(SLEquation({1.0, 1.0, 1.0}, {0.0, 0.0}, {1.0}), Error);
    EXPECT_THROW(SLEquation({1.0, 1.0}, {0.0}, {1.0}), Error);
}

TEST(Mat2, RankExamples) {
    EXPECT_EQ(mat2_rank(Mat2::identity(), 1.0), 2);
    EXPECT_EQ(mat2_rank(Mat2{1.0, 2.0, 0.0, 0.0}, 1.0), 1);
    EXPECT_EQ(mat2_rank(Mat2::zero(), 1.0), 0);
}

TEST(Mat2, RankAtDoubleRootOfDegenerateFamily) {
    const auto bc = fixtures::double_root_family_bc(cplx(-1.0, 1.0));
    const Mat2 phi = transfer_matrix_at(fixtures::fourier_equation(), 0.0);
    const Mat2 M = bc.A + bc.B * phi;
    EXPECT_EQ(mat2_rank(M, bc.A.frobenius() + (bc.B * phi).frobenius()), 1);
}

TEST(Mat2, RankIsScaleInvariant) {
    Rng rng(103);
    for (int i = 0; i < 100; ++i) {
        const Mat2 a = testing::random_complex_mat(rng);
        const Mat2 r1{a(0, 0), a(0, 1), 3.0 * a(0, 0), 3.0 * a(0, 1)};
        for (double s : {1e-6, 1.0, 1e6}) {
            const Mat2 as = a * Mat2{s, 0.0, 0.0, s};
            const Mat2 rs = r1 * Mat2{s, 0.0, 0.0, s};
            EXPECT_EQ(mat2_rank(as, as.frobenius()), mat2_rank(a, a.frobenius()));
            EXPECT_EQ(mat2_rank(rs, rs.frobenius()), 1);
        }
    }
}

TEST(Mat2, SingularValuesMatchDeterminantAndNorm) {
    Rng rng(104);
    for (int i = 0; i < 100; ++i) {
        const Mat2 a = testing::random_complex_mat(rng, 3.0);
        const auto s = singular_values(a);
        EXPECT_GE(s[0], s[1]);
        EXPECT_NEAR(s[0] * s[1], std::abs(a.det()), 1e-12 * s[0] * s[0]);
        EXPECT_NEAR(s[0] * s[0] + s[1] * s[1], a.frobenius() * a.frobenius(), 1e-12 * s[0] * s[0]);
    }
}

TEST(Tolerances, ScaledMultipliesEveryField) {
    const Tolerances t{};
    const Tolerances s = t.scaled(10.0);
    EXPECT_DOUBLE_EQ(s.rank, 10.0 * t.rank);
    EXPECT_DOUBLE_EQ(s.degree, 10.0 * t.degree);
    EXPECT_DOUBLE_EQ(s.eigen_check, 10.0 * t.eigen_check);
}

}  // namespace
}  // namespace dslp
