#pragma once

// Rotating-frame interaction Hamiltonians H_int = g (G + G†) built from an
// exponent pattern, and their short-time Heisenberg solutions
//
//   X(t) = Σ_k (gt)^k / k! · D^k x,   D(.) = i [H_int, .]
//
// where the grade of each term counts the powers of (gt).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hoa/boson_algebra.hpp"
#include "hoa/errors.hpp"
#include "hoa/text.hpp"

namespace hoa {

enum class Role { created, annihilated };

inline std::string_view to_string(Role r) { return r == Role::created ? "created" : "annihilated"; }

struct ModeFactor {
  std::size_t mode = 0;
  int exponent = 1;
  Role role = Role::created;
};

/// Exponent pattern of G = Π_created a_k†^e_k · Π_annihilated a_k^e_k.
struct InteractionSpec {
  std::vector<ModeFactor> factors;
  /// Optional ω_k per mode; empty means the rotating frame is assumed.
  std::vector<double> frequencies;
  /// Total number of modes; 0 means one past the highest factor index.
  std::size_t mode_count = 0;

  std::size_t modes() const {
    std::size_t n = 0;
    for (const auto& f : factors) n = std::max(n, f.mode + 1);
    return std::max(n, mode_count);
  }

  const ModeFactor* factor(std::size_t mode) const {
    for (const auto& f : factors) {
      if (f.mode == mode) return &f;
    }
    return nullptr;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& f : factors) d += f.exponent;
    return d;
  }

  /// Same interaction embedded in a frame with additional spectator modes.
  InteractionSpec with_mode_count(std::size_t n) const {
    InteractionSpec out = *this;
    if (n < modes()) throw ConfigurationError("cannot shrink the mode frame below the interaction");
    out.mode_count = n;
    if (!out.frequencies.empty()) out.frequencies.resize(n, 1.0);
    return out;
  }

  void validate() const {
    if (factors.empty()) throw ConfigurationError("interaction has no mode factors");
    bool has_created = false;
    bool has_annihilated = false;
    std::vector<bool> seen(modes(), false);
    for (const auto& f : factors) {
      if (f.exponent < 1) {
        throw ConfigurationError("exponent of mode " + text::mode_name(f.mode) + " must be positive");
      }
      if (seen[f.mode]) {
        throw ConfigurationError("mode " + text::mode_name(f.mode) + " appears twice in the interaction");
      }
      seen[f.mode] = true;
      (f.role == Role::created ? has_created : has_annihilated) = true;
    }
    if (!has_created || !has_annihilated) {
      throw ConfigurationError("interaction needs at least one created and one annihilated mode");
    }
    if (frequencies.empty()) return;
    if (frequencies.size() != modes()) {
      throw ConfigurationError("expected " + std::to_string(modes()) + " frequencies, got " +
                               std::to_string(frequencies.size()));
    }
    for (double w : frequencies) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigurationError("frequencies must be positive");
    }
    double created_sum = 0.0;
    double annihilated_sum = 0.0;
    for (const auto& f : factors) {
      (f.role == Role::created ? created_sum : annihilated_sum) += f.exponent * frequencies[f.mode];
    }
    if (std::abs(created_sum - annihilated_sum) > 1e-12 * std::max(created_sum, annihilated_sum)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "resonance violated: sum over created modes of e*omega = " << created_sum
          << " but sum over annihilated modes of e*omega = " << annihilated_sum;
      throw ConfigurationError(msg.str());
    }
  }

  /// Display form of G, e.g. "A†³B²C".
  std::string interaction_string() const {
    std::vector<ModeFactor> sorted = factors;
    std::sort(sorted.begin(), sorted.end(),
              [](const ModeFactor& a, const ModeFactor& b) { return a.mode < b.mode; });
    std::string out;
    for (const auto& f : sorted) {
      out += text::mode_name(f.mode);
      if (f.role == Role::created) out += text::kDagger;
      if (f.exponent != 1) out += text::superscript(f.exponent);
    }
    return out;
  }
};

struct ProcessPreset {
  std::string key;
  std::string name;
  InteractionSpec spec;
};

inline const std::vector<ProcessPreset>& process_presets() {
  static const std::vector<ProcessPreset> presets = [] {
    auto make = [](std::vector<ModeFactor> f) {
      InteractionSpec s;
      s.factors = std::move(f);
      return s;
    };
    using R = Role;
    return std::vector<ProcessPreset>{
        {"sixwave-321", "Six wave mixing (new)",
         make({{0, 3, R::created}, {1, 2, R::annihilated}, {2, 1, R::annihilated}})},
        {"sixwave-231", "Six wave mixing (earlier)",
         make({{0, 2, R::created}, {1, 3, R::annihilated}, {2, 1, R::annihilated}})},
        {"fourwave-211", "Four wave mixing",
         make({{0, 2, R::created}, {1, 1, R::annihilated}, {2, 1, R::annihilated}})},
        {"shg-21", "Second harmonic generation", make({{0, 2, R::created}, {1, 1, R::annihilated}})},
        {"fivewave-32", "Five wave mixing", make({{0, 3, R::created}, {1, 2, R::annihilated}})},
        {"thg-31", "Third harmonic generation", make({{0, 3, R::created}, {1, 1, R::annihilated}})},
        {"trilinear-111", "Tri-linear parametric process",
         make({{0, 1, R::created}, {1, 1, R::annihilated}, {2, 1, R::annihilated}})},
    };
  }();
  return presets;
}

inline std::string preset_names() {
  std::string out;
  for (const auto& p : process_presets()) {
    if (!out.empty()) out += ", ";
    out += p.key;
  }
  return out;
}

inline const ProcessPreset& find_preset(std::string_view key) {
  for (const auto& p : process_presets()) {
    if (p.key == key) return p;
  }
  throw ConfigurationError("unknown preset '" + std::string(key) + "'; available presets: " +
                           preset_names());
}

/// G + G† at grade 1, without the free terms (cancelled by the rotating frame).
inline OperatorPolynomial interaction_hamiltonian(const InteractionSpec& spec,
                                                  int max_order = kDefaultMaxOrder) {
  spec.validate();
  const std::size_t n = spec.modes();
  PowerTuple powers(n);
  for (const auto& f : spec.factors) {
    if (f.role == Role::created) {
      powers[f.mode].create = f.exponent;
    } else {
      powers[f.mode].annihilate = f.exponent;
    }
  }
  OperatorPolynomial g = OperatorPolynomial::monomial(n, GaussianRational(1), 1, powers, max_order);
  return add(g, adjoint(g));
}

/// Σ ω_k a_k†a_k at grade 0, for exact rotating-frame checks.
inline OperatorPolynomial free_hamiltonian(std::span<const Rational> omegas,
                                           int max_order = kDefaultMaxOrder) {
  OperatorPolynomial h(omegas.size(), max_order);
  for (std::size_t m = 0; m < omegas.size(); ++m) {
    PowerTuple powers(omegas.size());
    powers[m] = {1, 1};
    h.add_term(GaussianRational(omegas[m]), 0, std::move(powers));
  }
  return h;
}

/// i [H, X] with ħ = 1 and no explicit time dependence.
inline OperatorPolynomial heisenberg_derivative(const OperatorPolynomial& hamiltonian,
                                                const OperatorPolynomial& x) {
  return scale(commutator(hamiltonian, x), GaussianRational::i());
}

struct EvolvedOperator {
  std::size_t mode = 0;
  OperatorPolynomial series;
  int order = 0;

  /// Orders above two have no published counterpart to compare against.
  bool beyond_validated_order() const { return order > kDefaultMaxOrder; }
};

inline EvolvedOperator evolve_mode(const OperatorPolynomial& hamiltonian, std::size_t mode, int order) {
  if (order < 0) throw ConfigurationError("order must be non-negative");
  if (mode >= hamiltonian.mode_count()) {
    throw ConfigurationError("mode " + text::mode_name(mode) + " is not part of the interaction");
  }
  const OperatorPolynomial h = hamiltonian.with_max_order(order);
  OperatorPolynomial term = OperatorPolynomial::annihilator(h.mode_count(), mode, order);
  OperatorPolynomial series = term;
  for (int k = 1; k <= order; ++k) {
    // D^k x / k! from the previous term.
    term = scale(heisenberg_derivative(h, term), GaussianRational::ratio(1, k));
    series = add(series, term);
  }
  return {mode, std::move(series), order};
}

inline EvolvedOperator evolve_mode(const InteractionSpec& spec, std::size_t mode, int order) {
  return evolve_mode(interaction_hamiltonian(spec, std::max(order, 1)), mode, order);
}

/// X†(t)^k X(t)^k, normal ordered and truncated at the evolution order.
inline OperatorPolynomial factorial_moment_operator(const EvolvedOperator& ev, int k) {
  if (k < 1) throw ConfigurationError("factorial moment order must be positive");
  return multiply(power(adjoint(ev.series), k), power(ev.series, k));
}

/// Weights w with Σ w_k N_k conserved by the interaction.
struct ConservedCharge {
  std::vector<Rational> weights;
};

/// One charge per (created, annihilated) pair: e_k N_j + e_j N_k.
inline std::vector<ConservedCharge> conserved_charges(const InteractionSpec& spec) {
  spec.validate();
  std::vector<ConservedCharge> out;
  for (const auto& j : spec.factors) {
    if (j.role != Role::created) continue;
    for (const auto& k : spec.factors) {
      if (k.role != Role::annihilated) continue;
      ConservedCharge c{std::vector<Rational>(spec.modes(), Rational(0))};
      c.weights[j.mode] = k.exponent;
      c.weights[k.mode] = j.exponent;
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline OperatorPolynomial charge_operator(const ConservedCharge& charge, int max_order = kDefaultMaxOrder) {
  const std::size_t n = charge.weights.size();
  OperatorPolynomial out(n, max_order);
  for (std::size_t m = 0; m < n; ++m) {
    PowerTuple powers(n);
    powers[m] = {1, 1};
    out.add_term(GaussianRational(charge.weights[m]), 0, std::move(powers));
  }
  return out;
}

}  // namespace hoa
