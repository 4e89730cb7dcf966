#include <gtest/gtest.h>

#include <string>

#include "hoa/heisenberg.hpp"
#include "poly_dsl.hpp"

namespace {

using namespace hoa;
using hoa::testing::iq;
using hoa::testing::poly;
using hoa::testing::q;

const InteractionSpec& six_wave() { return find_preset("sixwave-321").spec; }

TEST(Interaction, SixWaveHamiltonian) {
  EXPECT_EQ(interaction_hamiltonian(six_wave()), poly(3, {{q(1), 1, "A+3 B2 C"}, {q(1), 1, "A3 B+2 C+"}}));
}

TEST(Interaction, TrilinearHamiltonian) {
  EXPECT_EQ(interaction_hamiltonian(find_preset("trilinear-111").spec),
            poly(3, {{q(1), 1, "A+ B C"}, {q(1), 1, "A B+ C+"}}));
}

TEST(Interaction, EveryPresetIsHermitian) {
  for (const auto& p : process_presets()) {
    const auto h = interaction_hamiltonian(p.spec);
    EXPECT_EQ(adjoint(h), h) << p.key;
  }
}

TEST(Interaction, DisplayForm) {
  EXPECT_EQ(six_wave().interaction_string(), "A†³B²C");
  EXPECT_EQ(find_preset("fourwave-211").spec.interaction_string(), "A†²BC");
  EXPECT_EQ(find_preset("thg-31").spec.interaction_string(), "A†³B");
}

TEST(Interaction, PresetTable) {
  ASSERT_EQ(process_presets().size(), 7u);
  EXPECT_EQ(find_preset("sixwave-321").name, "Six wave mixing (new)");
  EXPECT_EQ(find_preset("shg-21").spec.modes(), 2u);
  try {
    find_preset("eightwave");
    FAIL() << "expected ConfigurationError";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("sixwave-321"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("trilinear-111"), std::string::npos);
  }
}

TEST(Interaction, ValidationErrors) {
  InteractionSpec empty;
  EXPECT_THROW(empty.validate(), ConfigurationError);

  InteractionSpec one_sided;
  one_sided.factors = {{0, 1, Role::created}, {1, 1, Role::created}};
  EXPECT_THROW(one_sided.validate(), ConfigurationError);

  InteractionSpec repeated;
  repeated.factors = {{0, 1, Role::created}, {0, 1, Role::annihilated}};
  EXPECT_THROW(repeated.validate(), ConfigurationError);

  InteractionSpec zero_exponent;
  zero_exponent.factors = {{0, 0, Role::created}, {1, 1, Role::annihilated}};
  EXPECT_THROW(zero_exponent.validate(), ConfigurationError);

  EXPECT_THROW(six_wave().with_mode_count(2), ConfigurationError);
}

TEST(Interaction, ResonanceIsEnforcedWhenFrequenciesAreGiven) {
  InteractionSpec s = six_wave();
  s.frequencies = {8.0, 11.0, 2.0};  // 3·8 = 2·11 + 2
  EXPECT_NO_THROW(s.validate());
  s.frequencies = {8.0, 11.0, 3.0};
  try {
    s.validate();
    FAIL() << "expected ConfigurationError";
  } catch (const ConfigurationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("24"), std::string::npos) << msg;
    EXPECT_NE(msg.find("25"), std::string::npos) << msg;
  }
  s.frequencies = {8.0, 11.0};
  EXPECT_THROW(s.validate(), ConfigurationError);
  s.frequencies = {8.0, -11.0, 2.0};
  EXPECT_THROW(s.validate(), ConfigurationError);
}

TEST(Heisenberg, FirstDerivatives) {
  const auto h = interaction_hamiltonian(six_wave());
  EXPECT_EQ(heisenberg_derivative(h, OperatorPolynomial::annihilator(3, 0)), poly(3, {{iq(-3), 1, "A+2 B2 C"}}));
  EXPECT_EQ(heisenberg_derivative(h, OperatorPolynomial::annihilator(3, 1)), poly(3, {{iq(-2), 1, "A3 B+ C+"}}));
  EXPECT_TRUE(heisenberg_derivative(h, OperatorPolynomial::identity(3)).term_map().empty());
}

TEST(Heisenberg, OrderZeroIsTheBareOperator) {
  const auto ev = evolve_mode(six_wave(), 1, 0);
  EXPECT_EQ(ev.series, OperatorPolynomial::annihilator(3, 1, 0));
  EXPECT_FALSE(ev.beyond_validated_order());
  EXPECT_TRUE(evolve_mode(six_wave(), 0, 3).beyond_validated_order());
}

TEST(Heisenberg, PumpOperatorToSecondOrder) {
  const auto bracket = poly(3, {{q(6), 2, "A+ A2 B+2 B2 C+ C"},
                                {q(6), 2, "A B+2 B2 C+ C"},
                                {q(-4), 2, "A+2 A3 B+ B C+ C"},
                                {q(-2), 2, "A+2 A3 C+ C"},
                                {q(-1), 2, "A+2 A3 B+2 B2"},
                                {q(-4), 2, "A+2 A3 B+ B"},
                                {q(-2), 2, "A+2 A3"}});
  const auto expected =
      OperatorPolynomial::annihilator(3, 0) + poly(3, {{iq(-3), 1, "A+2 B2 C"}}) + scale(bracket, q(3, 2));
  EXPECT_EQ(evolve_mode(six_wave(), 0, 2).series, expected);
}

TEST(Heisenberg, SignalOperatorKeepsItsChargeOnEveryTerm) {
  // Every term of C(t) lowers N_A + 3N_C by 3, like C itself.
  const auto c_t = evolve_mode(six_wave(), 2, 2).series;
  for (const auto& [key, coeff] : c_t.term_map()) {
    const auto& p = key.powers;
    const int delta = (p[0].create - p[0].annihilate) + 3 * (p[2].create - p[2].annihilate);
    EXPECT_EQ(delta, -3) << c_t.to_string();
  }
  EXPECT_EQ(c_t.grade_part(2), poly(3, {{q(-3), 2, "B+2 B2 C"},
                                        {q(-9), 2, "A+ A B+2 B2 C"},
                                        {q(-9, 2), 2, "A+2 A2 B+2 B2 C"},
                                        {q(1), 2, "A+3 A3 C"},
                                        {q(2), 2, "A+3 A3 B+ B C"}}));
}

TEST(Heisenberg, StokesNumberOperator) {
  const auto n_b = factorial_moment_operator(evolve_mode(six_wave(), 1, 2), 1);
  const auto expected = poly(3, {{q(1), 0, "B+ B"},
                                 {iq(-2), 1, "A3 B+2 C+"},
                                 {iq(2), 1, "A+3 B2 C"},
                                 {q(2), 2, "A+3 A3 B+2 B2"},
                                 {q(8), 2, "A+3 A3 B+ B C+ C"},
                                 {q(8), 2, "A+3 A3 B+ B"},
                                 {q(4), 2, "A+3 A3 C+ C"},
                                 {q(-18), 2, "A+2 A2 B+2 B2 C+ C"},
                                 {q(-36), 2, "A+ A B+2 B2 C+ C"},
                                 {q(-12), 2, "B+2 B2 C+ C"},
                                 {q(4), 2, "A+3 A3"}});
  EXPECT_EQ(n_b, expected) << n_b.to_string();
}

TEST(Heisenberg, FreeEvolutionLeavesNumberOperator) {
  const OperatorPolynomial no_interaction(2);
  const auto ev = evolve_mode(no_interaction, 0, 2);
  EXPECT_EQ(factorial_moment_operator(ev, 1), OperatorPolynomial::number(2, 0));
}

TEST(Heisenberg, RotatingFrameFreeTermsCommuteWithResonantInteraction) {
  const std::vector<Rational> omegas{Rational(8), Rational(11), Rational(2)};
  const auto h0 = free_hamiltonian(omegas);
  EXPECT_TRUE(commutator(h0, interaction_hamiltonian(six_wave())).term_map().empty());
  const std::vector<Rational> detuned{Rational(8), Rational(11), Rational(3)};
  EXPECT_FALSE(commutator(free_hamiltonian(detuned), interaction_hamiltonian(six_wave())).term_map().empty());
}

TEST(Heisenberg, ConservedChargesCommuteWithH) {
  for (const auto& p : process_presets()) {
    const auto h = interaction_hamiltonian(p.spec);
    const auto charges = conserved_charges(p.spec);
    EXPECT_FALSE(charges.empty()) << p.key;
    for (const auto& c : charges) {
      EXPECT_TRUE(commutator(h, charge_operator(c)).term_map().empty()) << p.key;
    }
  }
  const auto six = conserved_charges(six_wave());
  ASSERT_EQ(six.size(), 2u);
  EXPECT_EQ(six[0].weights, (std::vector<Rational>{2, 3, 0}));
  EXPECT_EQ(six[1].weights, (std::vector<Rational>{1, 0, 3}));
}

TEST(Heisenberg, ArgumentErrors) {
  EXPECT_THROW(evolve_mode(six_wave(), 0, -1), ConfigurationError);
  EXPECT_THROW(evolve_mode(six_wave(), 3, 2), ConfigurationError);
  EXPECT_THROW(factorial_moment_operator(evolve_mode(six_wave(), 0, 1), 0), ConfigurationError);
}

}  // namespace
