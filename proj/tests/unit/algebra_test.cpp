#include <gtest/gtest.h>

#include "hoa/boson_algebra.hpp"
#include "hoa/gaussian_rational.hpp"
#include "poly_dsl.hpp"
#include "properties.hpp"

namespace {

using namespace hoa;
using hoa::testing::iq;
using hoa::testing::poly;
using hoa::testing::q;

OperatorPolynomial single(std::initializer_list<hoa::testing::Term> terms) { return poly(1, terms); }

TEST(GaussianRational, ArithmeticIsExact) {
  const GaussianRational a(Rational(1, 3), Rational(2));
  const GaussianRational b(Rational(-1, 6), Rational(1, 2));
  EXPECT_EQ(a + b, GaussianRational(Rational(1, 6), Rational(5, 2)));
  EXPECT_EQ(a - b, GaussianRational(Rational(1, 2), Rational(3, 2)));
  EXPECT_EQ(a * b, GaussianRational(Rational(-1, 18) - 1, Rational(1, 6) - Rational(1, 3)));
  EXPECT_EQ((a / b) * b, a);
  EXPECT_EQ(GaussianRational::i() * GaussianRational::i(), GaussianRational(-1));
  EXPECT_EQ(a.conj(), GaussianRational(Rational(1, 3), Rational(-2)));
}

TEST(GaussianRational, Rendering) {
  EXPECT_EQ(GaussianRational::ratio(3, 2).str(), "(3/2+0i)");
  EXPECT_EQ(iq(-3).str(), "(0-3i)");
  EXPECT_EQ(GaussianRational::ratio(6, 4), GaussianRational::ratio(3, 2));
}

TEST(NormalOrder, SingleCommutation) {
  // a · a† = a†a + 1
  const auto a = OperatorPolynomial::annihilator(1, 0);
  const auto ad = OperatorPolynomial::creator(1, 0);
  EXPECT_EQ(multiply(a, ad), single({{q(1), 0, "A+ A"}, {q(1), 0, ""}}));
}

TEST(NormalOrder, SquaredLadders) {
  // a² · a†² = a†²a² + 4a†a + 2
  const auto a2 = single({{q(1), 0, "A2"}});
  const auto ad2 = single({{q(1), 0, "A+2"}});
  EXPECT_EQ(multiply(a2, ad2), single({{q(1), 0, "A+2 A2"}, {q(4), 0, "A+ A"}, {q(2), 0, ""}}));
}

TEST(NormalOrder, GeneralFormulaMatchesRepeatedCommutation) {
  // a^q a†^p by k!·C(q,k)·C(p,k) against brute repetition of a·a† = a†a + 1.
  for (int qq = 0; qq <= 4; ++qq) {
    for (int p = 0; p <= 4; ++p) {
      OperatorPolynomial brute = OperatorPolynomial::identity(1);
      for (int i = 0; i < qq; ++i) brute = multiply(brute, OperatorPolynomial::annihilator(1, 0));
      for (int i = 0; i < p; ++i) brute = multiply(brute, OperatorPolynomial::creator(1, 0));
      PowerTuple x(1), y(1);
      x[0].annihilate = qq;
      y[0].create = p;
      const auto direct = multiply(OperatorPolynomial::monomial(1, 1, 0, x), OperatorPolynomial::monomial(1, 1, 0, y));
      EXPECT_EQ(direct, brute) << "q=" << qq << " p=" << p;
    }
  }
}

TEST(NormalOrder, DisjointModesAddExponents) {
  const auto x = poly(3, {{q(2), 0, "A+3"}});
  const auto y = poly(3, {{iq(5), 0, "B2 C+2"}});
  EXPECT_EQ(multiply(x, y), poly(3, {{iq(10), 0, "A+3 B2 C+2"}}));
  EXPECT_EQ(multiply(y, x), multiply(x, y));
}

TEST(Polynomial, AdditiveIdentityAndCancellation) {
  const auto n = single({{q(1), 0, "A+ A"}});
  EXPECT_EQ(n + OperatorPolynomial(1), n);
  EXPECT_TRUE(add(n, scale(n, q(-1))).term_map().empty());
  EXPECT_EQ(add(n, scale(n, q(-1))).to_string(), "0");
  EXPECT_EQ(add(single({{q(1), 0, "A+ A"}, {q(1), 0, ""}}), n), single({{q(2), 0, "A+ A"}, {q(1), 0, ""}}));
}

TEST(Polynomial, ZeroCoefficientsAreNeverStored) {
  OperatorPolynomial p(1);
  p.add_term(GaussianRational(0), 0, PowerTuple(1));
  EXPECT_TRUE(p.term_map().empty());
}

TEST(Polynomial, MultiplyByIdentity) {
  const auto x = poly(3, {{q(1), 0, "A"}, {iq(-3), 1, "A+2 B2 C"}});
  EXPECT_EQ(multiply(x, OperatorPolynomial::identity(3)), x);
  EXPECT_EQ(multiply(OperatorPolynomial::identity(3), x), x);
}

TEST(Polynomial, GradeTruncation) {
  const auto g1 = poly(1, {{q(1), 1, "A"}});
  const auto g2 = poly(1, {{q(1), 2, "A+"}});
  EXPECT_TRUE(multiply(g1, g2).term_map().empty());
  EXPECT_EQ(multiply(g1, g1).max_grade(), 2);
  OperatorPolynomial p(1, 2);
  p.add_term(q(1), 3, PowerTuple(1));
  EXPECT_TRUE(p.term_map().empty());
}

TEST(Polynomial, NumberOperatorFromFirstOrderPumpOperator) {
  // (A − 3i(gt)A†²B²C)† (A − 3i(gt)A†²B²C) up to grade 2.
  const auto x = poly(3, {{q(1), 0, "A"}, {iq(-3), 1, "A+2 B2 C"}});
  const auto n = multiply(adjoint(x), x);
  const auto expected = poly(3, {{q(1), 0, "A+ A"},
                                 {iq(-3), 1, "A+3 B2 C"},
                                 {iq(3), 1, "A3 B+2 C+"},
                                 {q(9), 2, "A+2 A2 B+2 B2 C+ C"},
                                 {q(36), 2, "A+ A B+2 B2 C+ C"},
                                 {q(18), 2, "B+2 B2 C+ C"}});
  EXPECT_EQ(n, expected) << n.to_string();
}

TEST(Polynomial, Adjoint) {
  EXPECT_EQ(adjoint(OperatorPolynomial::annihilator(1, 0)), OperatorPolynomial::creator(1, 0));
  const auto x = poly(3, {{q(1), 0, "A"}, {iq(-3), 1, "A+2 B2 C"}});
  EXPECT_EQ(adjoint(x), poly(3, {{q(1), 0, "A+"}, {iq(3), 1, "A2 B+2 C+"}}));
}

TEST(Polynomial, Commutators) {
  EXPECT_EQ(commutator(OperatorPolynomial::annihilator(1, 0), OperatorPolynomial::creator(1, 0)),
            OperatorPolynomial::identity(1));
  EXPECT_EQ(commutator(poly(3, {{q(1), 0, "A+3 B2 C"}}), OperatorPolynomial::annihilator(3, 0)),
            poly(3, {{q(-3), 0, "A+2 B2 C"}}));
  const auto x = poly(2, {{q(2), 0, "A+ B2"}, {iq(1), 1, "A B+"}});
  EXPECT_TRUE(commutator(x, x).term_map().empty());
}

TEST(Polynomial, PowerAndNumberOperator) {
  const auto n = OperatorPolynomial::number(1, 0);
  // (a†a)² = a†²a² + a†a
  EXPECT_EQ(power(n, 2), single({{q(1), 0, "A+2 A2"}, {q(1), 0, "A+ A"}}));
  EXPECT_EQ(power(n, 0), OperatorPolynomial::identity(1));
}

TEST(Polynomial, GoldenRendering) {
  const auto x = poly(3, {{q(1), 0, "C"}, {iq(-1), 1, "A3 B+2"}, {q(-3), 2, "B+2 B2 C"}});
  EXPECT_EQ(x.to_string(), "(1+0i)·C + (0-1i)·(gt)·A^3 B†^2 + (-3+0i)·(gt)^2·B†^2 B^2 C");
}

TEST(Polynomial, StructuralErrors) {
  const auto a1 = OperatorPolynomial::annihilator(1, 0);
  const auto a2 = OperatorPolynomial::annihilator(2, 0);
  EXPECT_THROW(add(a1, a2), StructuralError);
  EXPECT_THROW(multiply(a1, a2), StructuralError);
  EXPECT_THROW(add(a1, OperatorPolynomial::annihilator(1, 0, 3)), StructuralError);
  EXPECT_THROW(OperatorPolynomial(1, -1), StructuralError);
  OperatorPolynomial p(2);
  EXPECT_THROW(p.add_term(q(1), 0, PowerTuple(3)), StructuralError);
  EXPECT_THROW(p.add_term(q(1), -1, PowerTuple(2)), StructuralError);
}

TEST(AlgebraProperties, AdjointInvolutionAndAntihomomorphism) {
  const auto r = hoa::testing::check_adjoint(200, 1);
  EXPECT_TRUE(r.ok()) << r.failures << " failures, first: " << r.first_failure;
}

TEST(AlgebraProperties, CommutatorAntisymmetryAndJacobi) {
  const auto r = hoa::testing::check_commutator(100, 2);
  EXPECT_TRUE(r.ok()) << r.failures << " failures, first: " << r.first_failure;
}

TEST(AlgebraProperties, NormalOrderingMatchesTruncatedMatrices) {
  const auto r = hoa::testing::check_normal_ordering(200, 3);
  EXPECT_EQ(r.cases, 200);
  EXPECT_TRUE(r.ok()) << r.failures << " failures, first: " << r.first_failure;
}

TEST(AlgebraProperties, MultiplicationIsAssociative) {
  hoa::testing::RandomAlgebra gen(4, 2, 2);
  for (int i = 0; i < 50; ++i) {
    const auto x = gen.polynomial();
    const auto y = gen.polynomial();
    const auto z = gen.polynomial();
    EXPECT_EQ(multiply(multiply(x, y), z), multiply(x, multiply(y, z)));
  }
}

}  // namespace
