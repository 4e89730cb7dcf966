#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hoa/fock_oracle.hpp"
#include "hoa/mixing_table.hpp"
#include "poly_dsl.hpp"

namespace {

using namespace hoa;
using hoa::testing::poly;
using hoa::testing::q;

const InteractionSpec& six_wave() { return find_preset("sixwave-321").spec; }
ProductState pump() { return initial_state(InitialCondition::pump_coherent, 3); }

TEST(Ladder, MatrixEntries) {
  const auto [a, ad] = ladder_matrix(4);
  EXPECT_DOUBLE_EQ(a(0, 1).real(), 1.0);
  EXPECT_DOUBLE_EQ(a(1, 2).real(), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(a(2, 3).real(), std::sqrt(3.0));
  const Matrix n = ad * a;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(n(i, i) - double(i)), 0.0, 1e-14);
  const Matrix comm = a * ad - ad * a;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(comm(i, i) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(comm(3, 3).real(), -3.0, 1e-14);
  EXPECT_THROW(ladder_matrix(1), ConfigurationError);
}

TEST(Materialize, NumberOperator) {
  const Matrix n = materialize(OperatorPolynomial::number(1, 0), TruncationSpec{{4}}, 1.0);
  EXPECT_TRUE(n.isApprox(Matrix(Eigen::Vector4cd(0, 1, 2, 3).asDiagonal())));
}

TEST(Materialize, GradeScalesWithGt) {
  const auto x = poly(1, {{q(1), 2, "A+ A"}});
  const Matrix m = materialize(x, TruncationSpec{{3}}, 0.5);
  EXPECT_NEAR(m(2, 2).real(), 0.5, 1e-15);
}

TEST(Materialize, SixWaveHamiltonianIsHermitian) {
  const Matrix h = materialize(interaction_hamiltonian(six_wave()), TruncationSpec{{8, 6, 4}}, 1.0);
  EXPECT_TRUE(h.isApprox(h.adjoint()));
}

TEST(Materialize, SymbolicCommutatorMatchesMatrixCommutatorOnSafeBlock) {
  const auto h = interaction_hamiltonian(six_wave());
  const auto a = OperatorPolynomial::annihilator(3, 0);
  const TruncationSpec trunc{{10, 6, 4}};
  const Matrix hm = materialize(h, trunc, 1.0);
  const Matrix am = materialize(a, trunc, 1.0);
  const Matrix lhs = hm * am - am * hm;
  const Matrix rhs = materialize(commutator(h, a), trunc, 1.0);
  const auto strides = trunc.strides();
  const std::size_t headroom[] = {3, 2, 1};
  for (std::size_t col = 0; col < trunc.total(); ++col) {
    bool safe = true;
    for (std::size_t m = 0; m < 3; ++m) safe = safe && trunc.occupation(col, m, strides) + headroom[m] < trunc.dims[m];
    if (safe) EXPECT_LT((lhs.col(col) - rhs.col(col)).cwiseAbs().maxCoeff(), 1e-12) << col;
  }
}

TEST(Materialize, ModeCountMismatch) {
  EXPECT_THROW(sparse_image(OperatorPolynomial::number(2, 0), TruncationSpec{{4}}, 1.0), StructuralError);
}

TEST(Truncation, Validation) {
  EXPECT_THROW(TruncationSpec{}.validate(), ConfigurationError);
  EXPECT_THROW((TruncationSpec{{1, 4}}).validate(), ConfigurationError);
  EXPECT_THROW((TruncationSpec{{1000, 1000}}).validate(), ConfigurationError);
  EXPECT_NO_THROW((TruncationSpec{{20, 8, 6}}).validate());
}

TEST(CoherentState, VacuumAndTail) {
  const Vector v = coherent_state(0.0, 5);
  EXPECT_NEAR(std::abs(v(0) - 1.0), 0.0, 1e-15);
  EXPECT_LT(coherent_tail_mass(1.0, 20), 1e-18);
  EXPECT_NO_THROW(coherent_state(1.0, 20));
}

TEST(CoherentState, MeanAmplitude) {
  const std::complex<double> alpha(0.8, -0.6);
  const Vector v = coherent_state(alpha, 30);
  const auto [a, ad] = ladder_matrix(30);
  EXPECT_NEAR(std::abs(v.dot(a * v) - alpha), 0.0, 1e-10);
  EXPECT_NEAR(v.norm(), 1.0, 1e-14);
}

TEST(CoherentState, InsufficientTruncationSuggestsDimension) {
  try {
    coherent_state(3.0, 10);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.suggested_dim(), coherent_dim_for(3.0));
    EXPECT_GT(e.suggested_dim(), 10u);
    EXPECT_NE(std::string(e.what()).find("increase dimension"), std::string::npos);
  }
}

TEST(Propagator, ZeroTimeAndDiagonalPhases) {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 1.0;
  h(1, 1) = -2.0;
  h(2, 2) = 0.5;
  const Propagator prop(h);
  Vector psi(3);
  psi << 0.6, cplx(0, 0.8), 0.0;
  EXPECT_TRUE(prop.evolve(psi, 0.0).isApprox(psi));
  const Vector out = prop.evolve(psi, 0.3);
  EXPECT_NEAR(std::abs(out(0) - psi(0) * std::exp(cplx(0, -0.3))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out(1) - psi(1) * std::exp(cplx(0, 0.6))), 0.0, 1e-14);
  EXPECT_EQ(prop.block_count(), 3u);
}

TEST(Propagator, UnitaryForRandomHermitian) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(12, 12);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) m(i, j) = cplx(n(rng), n(rng));
  const Matrix h = m + m.adjoint();
  Vector psi(12);
  for (int i = 0; i < 12; ++i) psi(i) = cplx(n(rng), n(rng));
  psi.normalize();
  const Propagator prop(h);
  for (double t : {0.1, 1.0, 10.0}) EXPECT_NEAR(prop.evolve(psi, t).norm(), 1.0, 1e-12);
  // Composition: U(s)U(t) = U(s + t)
  EXPECT_TRUE(prop.evolve(prop.evolve(psi, 0.4), 0.7).isApprox(prop.evolve(psi, 1.1), 1e-12));
}

TEST(Propagator, RejectsNonHermitian) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(Propagator{h}, NumericalError);
}

TEST(Propagator, BlocksFollowConservedCharges) {
  const TruncationSpec trunc{{10, 6, 4}};
  const Propagator prop(sparse_image(interaction_hamiltonian(six_wave()), trunc, 1.0));
  EXPECT_GT(prop.block_count(), 1u);
  EXPECT_LT(prop.largest_block(), trunc.total());
}

TEST(Oracle, SixWavePumpMatchesLeadingOrder) {
  const std::vector<cplx> amps{1.0, 0.0, 0.0};
  const FockOracle oracle(six_wave(), TruncationSpec{{20, 8, 6}}, 1.0);
  const Vector psi0 = oracle.prepare(pump(), amps);
  EXPECT_NEAR(oracle.numeric_d(psi0, 0, 1, 1e-3), -1.2e-5, 1.2e-7);
  EXPECT_NEAR(oracle.numeric_d(psi0, 1, 1, 1e-3), 4e-6, 4e-8);
  EXPECT_NEAR(oracle.leading_coefficient(psi0, 0, 1, 5e-4, 1e-3).value, -12.0, 0.06);
}

TEST(Oracle, FiveWavePumpSecondOrder) {
  const auto& spec = find_preset("fivewave-32").spec;
  const ProductState s = initial_state(InitialCondition::pump_coherent, 2);
  const std::vector<cplx> amps{1.0, 0.0};
  const auto c = leading_coefficient(spec, 0, 2, s, amps, default_truncation(spec, s, amps), 1.0, 5e-4, 1e-3);
  EXPECT_NEAR(c.value, -48.0, 0.24);
}

TEST(Oracle, SignalMeanPhotonCoefficient) {
  const std::vector<cplx> amps{1.0, 0.0, 0.0};
  const FockOracle oracle(six_wave(), default_truncation(six_wave(), pump(), amps), 1.0);
  const Vector psi0 = oracle.prepare(pump(), amps);
  const auto c = oracle.leading_coefficient_of([&](double t) { return oracle.numeric_mean(psi0, 2, t); }, 5e-4, 1e-3);
  EXPECT_NEAR(c.value, 2.0, 0.01);
}

TEST(Oracle, NoCouplingIsPoissonian) {
  const std::vector<cplx> amps{1.0, 0.0, 0.0};
  const FockOracle oracle(six_wave(), TruncationSpec{{20, 8, 6}}, 0.0);
  const Vector psi0 = oracle.prepare(pump(), amps);
  for (int l : {1, 2, 3}) EXPECT_NEAR(oracle.numeric_d(psi0, 0, l, 1e-3), 0.0, 1e-12);
}

TEST(Oracle, WindowTooLargeIsReported) {
  const std::vector<cplx> amps{1.0, 0.0, 0.0};
  const FockOracle oracle(six_wave(), default_truncation(six_wave(), pump(), amps), 1.0);
  const Vector psi0 = oracle.prepare(pump(), amps);
  EXPECT_THROW(oracle.leading_coefficient(psi0, 0, 1, 0.2, 0.4), NumericalError);
  EXPECT_THROW(oracle.leading_coefficient(psi0, 0, 1, 1e-3, 5e-4), ConfigurationError);
}

TEST(Oracle, DefaultTruncation) {
  const std::vector<cplx> amps{1.0, 0.0, 0.0};
  const auto t = default_truncation(six_wave(), pump(), amps);
  EXPECT_EQ(t.dims, (std::vector<std::size_t>{21, 8, 6}));  // 1 + 8 + 2·6 levels for the pump
  const auto two = find_preset("shg-21").spec.with_mode_count(3);
  EXPECT_EQ(default_truncation(two, pump(), amps).dims[2], 2u);
}

TEST(Oracle, FockInitialState) {
  const ProductState s{{Fock{2}, Vacuum{}, Vacuum{}}};
  const auto t = default_truncation(six_wave(), s, std::vector<cplx>{});
  const FockOracle oracle(six_wave(), t, 1.0);
  const Vector psi0 = oracle.prepare(s, std::vector<cplx>{});
  EXPECT_NEAR(oracle.moment(psi0, 0, 1), 2.0, 1e-14);
  EXPECT_NEAR(oracle.moment(psi0, 0, 2), 2.0, 1e-14);
  EXPECT_NEAR(oracle.moment(psi0, 0, 3), 0.0, 1e-14);
}

}  // namespace
