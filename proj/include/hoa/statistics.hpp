#pragma once

// Expectation values of normal-ordered operator polynomials over product
// initial states, and the antibunching criteria built on factorial moments:
//
//   d(l)     = <N^(l+1)> - <N>^(l+1)
//   A_{x,l}  = <N^(l+1)> / (<N^(l)> <N>) - 1
//   R(l, m)  = <N^(l+1)> <N^(m-1)> / (<N^(l)> <N^(m)>) - 1

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hoa/boson_algebra.hpp"
#include "hoa/errors.hpp"
#include "hoa/heisenberg.hpp"
#include "hoa/text.hpp"

namespace hoa {

struct Vacuum {};
struct Coherent {
  std::string label;
};
struct Fock {
  int n = 0;
};

using ModeState = std::variant<Vacuum, Coherent, Fock>;

struct ProductState {
  std::vector<ModeState> modes;

  std::size_t size() const { return modes.size(); }

  /// "|α⟩|0⟩|0⟩"
  std::string ket() const {
    std::string out;
    for (const auto& m : modes) {
      out += "|";
      if (const auto* c = std::get_if<Coherent>(&m)) {
        out += c->label;
      } else if (const auto* f = std::get_if<Fock>(&m)) {
        out += std::to_string(f->n);
      } else {
        out += "0";
      }
      out += "⟩";
    }
    return out;
  }
};

/// The three initial conditions of the mixing tables: one coherent mode, the rest vacuum.
enum class InitialCondition { pump_coherent, stokes_coherent, signal_coherent };

inline constexpr InitialCondition kInitialConditions[] = {
    InitialCondition::pump_coherent, InitialCondition::stokes_coherent,
    InitialCondition::signal_coherent};

inline std::string_view to_string(InitialCondition c) {
  switch (c) {
    case InitialCondition::pump_coherent:
      return "pump-coherent";
    case InitialCondition::stokes_coherent:
      return "stokes-coherent";
    case InitialCondition::signal_coherent:
      return "signal-coherent";
  }
  return "?";
}

inline InitialCondition parse_initial_condition(std::string_view s) {
  for (auto c : kInitialConditions) {
    if (to_string(c) == s) return c;
  }
  throw ConfigurationError("unknown state '" + std::string(s) +
                           "'; expected pump-coherent, stokes-coherent or signal-coherent");
}

inline std::size_t coherent_mode(InitialCondition c) { return static_cast<std::size_t>(c); }

inline ProductState initial_state(InitialCondition c, std::size_t mode_count) {
  const std::size_t m = coherent_mode(c);
  if (m >= mode_count) {
    throw ConfigurationError(std::string(to_string(c)) + " needs mode " + text::mode_name(m) +
                             " but the interaction has " + std::to_string(mode_count) + " modes");
  }
  ProductState s{std::vector<ModeState>(mode_count, Vacuum{})};
  s.modes[m] = Coherent{text::amplitude_label(m)};
  return s;
}

/// Power series in (gt) whose coefficients are polynomials in the coherent
/// amplitudes and their conjugates. In a key, `create` is the exponent of
/// the conjugate amplitude and `annihilate` that of the amplitude itself.
class ExpectationSeries {
 public:
  using TermMap = std::map<MonomialKey, GaussianRational>;

  ExpectationSeries(std::vector<std::string> labels, int max_order)
      : labels_(std::move(labels)), max_order_(max_order) {}

  static ExpectationSeries constant(std::vector<std::string> labels, int max_order,
                                    const GaussianRational& c) {
    ExpectationSeries s(std::move(labels), max_order);
    s.add_term(c, 0, PowerTuple(s.labels_.size()));
    return s;
  }

  std::size_t mode_count() const { return labels_.size(); }
  int max_order() const { return max_order_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const TermMap& term_map() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const GaussianRational& coeff, int grade, PowerTuple powers) {
    if (powers.size() != labels_.size()) throw StructuralError("amplitude monomial has wrong mode count");
    if (grade > max_order_ || coeff.is_zero()) return;
    MonomialKey key{grade, std::move(powers)};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(std::move(key), coeff);
      return;
    }
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }

  ExpectationSeries grade_part(int grade) const {
    ExpectationSeries out(labels_, max_order_);
    for (const auto& [key, coeff] : terms_) {
      if (key.grade == grade) out.terms_.emplace(key, coeff);
    }
    return out;
  }

  /// Lowest grade carrying a term, or -1 for the zero series.
  int lowest_grade() const { return terms_.empty() ? -1 : terms_.begin()->first.grade; }

  /// All coefficients have zero imaginary part.
  bool has_real_coefficients() const {
    for (const auto& [key, coeff] : terms_) {
      if (!coeff.is_real()) return false;
    }
    return true;
  }

  /// Invariant under conjugating coefficients and swapping amplitude/conjugate.
  bool is_self_conjugate() const {
    for (const auto& [key, coeff] : terms_) {
      PowerTuple swapped = key.powers;
      for (auto& p : swapped) std::swap(p.create, p.annihilate);
      auto it = terms_.find(MonomialKey{key.grade, swapped});
      if (it == terms_.end() || !(it->second == coeff.conj())) return false;
    }
    return true;
  }

  std::complex<double> evaluate(std::span<const std::complex<double>> amplitudes, double gt) const {
    std::complex<double> sum = 0.0;
    for (const auto& [key, coeff] : terms_) {
      sum += coeff.to_complex() * std::pow(gt, key.grade) * amplitude_monomial(key.powers, amplitudes);
    }
    return sum;
  }

  /// Σ over the grade-k terms with (gt) set to one.
  std::complex<double> evaluate_grade(int grade, std::span<const std::complex<double>> amplitudes) const {
    std::complex<double> sum = 0.0;
    for (const auto& [key, coeff] : terms_) {
      if (key.grade == grade) sum += coeff.to_complex() * amplitude_monomial(key.powers, amplitudes);
    }
    return sum;
  }

  ExpectationSeries& operator+=(const ExpectationSeries& o) {
    require_compatible(o);
    for (const auto& [key, coeff] : o.terms_) add_term(coeff, key.grade, key.powers);
    return *this;
  }
  ExpectationSeries& operator-=(const ExpectationSeries& o) {
    require_compatible(o);
    for (const auto& [key, coeff] : o.terms_) add_term(-coeff, key.grade, key.powers);
    return *this;
  }
  ExpectationSeries& operator*=(const GaussianRational& s) {
    if (s.is_zero()) terms_.clear();
    for (auto& [key, coeff] : terms_) coeff *= s;
    return *this;
  }

  friend ExpectationSeries operator+(ExpectationSeries a, const ExpectationSeries& b) { return a += b; }
  friend ExpectationSeries operator-(ExpectationSeries a, const ExpectationSeries& b) { return a -= b; }

  /// Product truncated at the working grade.
  friend ExpectationSeries operator*(const ExpectationSeries& a, const ExpectationSeries& b) {
    a.require_compatible(b);
    ExpectationSeries out(a.labels_, a.max_order_);
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        if (ka.grade + kb.grade > out.max_order_) continue;
        PowerTuple powers(ka.powers.size());
        for (std::size_t m = 0; m < powers.size(); ++m) {
          powers[m] = {ka.powers[m].create + kb.powers[m].create,
                       ka.powers[m].annihilate + kb.powers[m].annihilate};
        }
        out.add_term(ca * cb, ka.grade + kb.grade, std::move(powers));
      }
    }
    return out;
  }

  ExpectationSeries pow(int k) const {
    ExpectationSeries out = constant(labels_, max_order_, GaussianRational(1));
    for (int i = 0; i < k; ++i) out = out * *this;
    return out;
  }

  friend bool operator==(const ExpectationSeries& a, const ExpectationSeries& b) {
    return a.labels_.size() == b.labels_.size() && a.terms_ == b.terms_;
  }

  /// Golden text form, e.g. "|α|^2 - 6·(gt)^2·|α|^6".
  std::string to_string() const { return render(false); }

  /// Display form, e.g. "|α|² − 6·(gt)²·|α|⁶".
  std::string pretty() const { return render(true); }

  /// Grouped by grade with a common factor pulled out, e.g. "−12(gt)²(|α|⁶ + 3|α|⁸)".
  std::string compact() const {
    if (terms_.empty()) return "0";
    std::map<int, std::vector<std::pair<PowerTuple, GaussianRational>>> by_grade;
    for (const auto& [key, coeff] : terms_) by_grade[key.grade].emplace_back(key.powers, coeff);

    std::string out;
    bool first = true;
    for (const auto& [grade, entries] : by_grade) {
      bool all_real = true;
      for (const auto& e : entries) all_real = all_real && e.second.is_real();
      Rational factor(1);
      if (all_real) {
        mpz_class num_gcd = 0;
        mpz_class den_lcm = 1;
        for (const auto& e : entries) {
          num_gcd = gcd(num_gcd, mpz_class(abs(e.second.real().get_num())));
          den_lcm = lcm(den_lcm, mpz_class(e.second.real().get_den()));
        }
        factor = Rational(num_gcd, den_lcm);
        factor.canonicalize();
        if (sgn(entries.front().second.real()) < 0) factor = -factor;
      }
      std::string group_sign;
      std::string magnitude;
      if (all_real) {
        group_sign = sgn(factor) < 0 ? "-" : "+";
        Rational mag = abs(factor);
        if (mag != 1) magnitude = mag.get_str();
      } else {
        group_sign = "+";
      }
      std::string powers_part = grade_factor(grade, true);
      std::string inner;
      if (entries.size() == 1 && all_real) {
        inner = amplitude_string(entries.front().first, true);
      } else {
        bool inner_first = true;
        for (const auto& [powers, coeff] : entries) {
          std::string amp = amplitude_string(powers, true);
          if (all_real) {
            Rational c = coeff.real() / factor;
            std::string piece = (abs(c) == 1 && !amp.empty()) ? amp : Rational(abs(c)).get_str() + amp;
            if (inner_first) {
              inner += (sgn(c) < 0 ? std::string(text::kMinus) : "") + piece;
            } else {
              inner += (sgn(c) < 0 ? " − " : " + ") + piece;
            }
          } else {
            if (!inner_first) inner += " + ";
            inner += coeff.str() + amp;
          }
          inner_first = false;
        }
        if (grade > 0 || !magnitude.empty()) inner = "(" + inner + ")";
      }
      std::string body = magnitude + powers_part + inner;
      if (body.empty()) body = "1";
      if (first) {
        out += (group_sign == "-" ? std::string(text::kMinus) : "") + body;
      } else {
        out += (group_sign == "-" ? " − " : " + ") + body;
      }
      first = false;
    }
    return out;
  }

 private:
  void require_compatible(const ExpectationSeries& o) const {
    if (o.labels_.size() != labels_.size()) throw StructuralError("expectation series mode mismatch");
  }

  static std::complex<double> amplitude_monomial(const PowerTuple& powers,
                                                 std::span<const std::complex<double>> amplitudes) {
    std::complex<double> v = 1.0;
    for (std::size_t m = 0; m < powers.size(); ++m) {
      if (powers[m].create == 0 && powers[m].annihilate == 0) continue;
      if (m >= amplitudes.size()) throw ConfigurationError("missing numeric amplitude for mode " + text::mode_name(m));
      v *= std::pow(std::conj(amplitudes[m]), powers[m].create) * std::pow(amplitudes[m], powers[m].annihilate);
    }
    return v;
  }

  static std::string exponent(int e, bool unicode) {
    return unicode ? text::superscript(e) : "^" + std::to_string(e);
  }

  static std::string grade_factor(int grade, bool unicode) {
    if (grade == 0) return "";
    if (grade == 1) return "(gt)";
    return "(gt)" + exponent(grade, unicode);
  }

  std::string amplitude_string(const PowerTuple& powers, bool unicode) const {
    std::string out;
    for (std::size_t m = 0; m < powers.size(); ++m) {
      const auto [p, q] = powers[m];
      if (p == 0 && q == 0) continue;
      const std::string& label = labels_[m].empty() ? text::amplitude_label(m) : labels_[m];
      if (p == q) {
        out += "|" + label + "|" + exponent(2 * p, unicode);
        continue;
      }
      if (p > 0) out += label + "*" + (p == 1 ? "" : exponent(p, unicode));
      if (q > 0) out += label + (q == 1 ? "" : exponent(q, unicode));
    }
    return out;
  }

  std::string render(bool unicode) const {
    if (terms_.empty()) return "0";
    const std::string dot = "·";
    std::string out;
    bool first = true;
    for (const auto& [key, coeff] : terms_) {
      std::vector<std::string> factors;
      std::string g = grade_factor(key.grade, unicode);
      if (!g.empty()) factors.push_back(g);
      std::string amp = amplitude_string(key.powers, unicode);
      if (!amp.empty()) factors.push_back(amp);

      std::string sign = "+";
      std::string c;
      if (coeff.is_real()) {
        sign = sgn(coeff.real()) < 0 ? "-" : "+";
        Rational mag = abs(coeff.real());
        if (mag != 1 || factors.empty()) c = mag.get_str();
      } else {
        c = coeff.str();
      }
      std::string body = c;
      for (const auto& f : factors) body += (body.empty() ? "" : dot) + f;

      const std::string minus = unicode ? std::string(text::kMinus) : "-";
      if (first) {
        out += (sign == "-" ? minus : "") + body;
      } else {
        out += (sign == "-" ? " " + minus + " " : " + ") + body;
      }
      first = false;
    }
    return out;
  }

  std::vector<std::string> labels_;
  int max_order_;
  TermMap terms_;
};

inline std::vector<std::string> amplitude_labels(const ProductState& s) {
  std::vector<std::string> labels;
  labels.reserve(s.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    const auto* c = std::get_if<Coherent>(&s.modes[m]);
    labels.push_back(c ? c->label : text::amplitude_label(m));
  }
  return labels;
}

/// <X> over a product state; each normal-ordered term factorizes over modes.
inline ExpectationSeries expect(const OperatorPolynomial& x, const ProductState& s) {
  if (x.mode_count() != s.size()) {
    throw StructuralError("state has " + std::to_string(s.size()) + " modes, operator has " +
                          std::to_string(x.mode_count()));
  }
  ExpectationSeries out(amplitude_labels(s), x.max_order());
  for (const auto& [key, coeff] : x.term_map()) {
    Rational weight(1);
    PowerTuple amp(s.size());
    bool vanishes = false;
    for (std::size_t m = 0; m < s.size() && !vanishes; ++m) {
      const auto [p, q] = key.powers[m];
      std::visit(
          [&](const auto& st) {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, Vacuum>) {
              vanishes = p != 0 || q != 0;
            } else if constexpr (std::is_same_v<T, Coherent>) {
              amp[m] = {p, q};
            } else {
              if (p != q || q > st.n) {
                vanishes = true;
              } else {
                // n!/(n-q)!
                for (int i = 0; i < q; ++i) weight *= st.n - i;
              }
            }
          },
          s.modes[m]);
    }
    if (!vanishes) out.add_term(coeff * GaussianRational(weight), key.grade, std::move(amp));
  }
  return out;
}

/// Caches the evolved operator and its factorial-moment operators for one mode.
class ModeAnalysis {
 public:
  ModeAnalysis(const OperatorPolynomial& hamiltonian, std::size_t mode, int order)
      : evolved_(evolve_mode(hamiltonian, mode, order)) {}

  ModeAnalysis(const InteractionSpec& spec, std::size_t mode, int order)
      : evolved_(evolve_mode(spec, mode, order)) {}

  const EvolvedOperator& evolved() const { return evolved_; }
  int order() const { return evolved_.order; }
  std::size_t mode() const { return evolved_.mode; }

  /// N^(k)(t) as an operator; k = 1 is the number operator.
  const OperatorPolynomial& moment_operator(int k) {
    auto it = moments_.find(k);
    if (it == moments_.end()) it = moments_.emplace(k, factorial_moment_operator(evolved_, k)).first;
    return it->second;
  }

  /// <N^(k)(t)>, with <N^(0)> = 1.
  ExpectationSeries moment(int k, const ProductState& s) {
    if (k == 0) return ExpectationSeries::constant(amplitude_labels(s), order(), GaussianRational(1));
    return expect(moment_operator(k), s);
  }

  ExpectationSeries hoa_d(int l, const ProductState& s) {
    if (l < 1) throw ConfigurationError("antibunching order l must be >= 1");
    return moment(l + 1, s) - moment(1, s).pow(l + 1);
  }

 private:
  EvolvedOperator evolved_;
  std::map<int, OperatorPolynomial> moments_;
};

inline ExpectationSeries hoa_d(const OperatorPolynomial& hamiltonian, std::size_t mode, int l,
                               const ProductState& s, int order = kDefaultMaxOrder) {
  return ModeAnalysis(hamiltonian, mode, order).hoa_d(l, s);
}

inline ExpectationSeries hoa_d(const InteractionSpec& spec, std::size_t mode, int l, const ProductState& s,
                               int order = kDefaultMaxOrder) {
  return ModeAnalysis(spec, mode, order).hoa_d(l, s);
}

struct NumericPoint {
  std::vector<std::complex<double>> amplitudes;
  double gt = 0.0;
};

namespace detail {

inline double moment_value(ModeAnalysis& analysis, int k, const ProductState& s, const NumericPoint& p) {
  return analysis.moment(k, s).evaluate(p.amplitudes, p.gt).real();
}

inline void require_denominator(double v) {
  if (std::abs(v) < 1e-300) {
    throw DegenerateStateError("factorial moments vanish for this state; the ratio criterion is undefined");
  }
}

}  // namespace detail

inline double lee_R(const InteractionSpec& spec, std::size_t mode, int l, int m, const ProductState& s,
                    const NumericPoint& point, int order = kDefaultMaxOrder) {
  if (m < 1 || l < m) throw ConfigurationError("Lee criterion requires l >= m >= 1");
  ModeAnalysis analysis(spec, mode, order);
  const double den = detail::moment_value(analysis, l, s, point) * detail::moment_value(analysis, m, s, point);
  detail::require_denominator(den);
  const double num =
      detail::moment_value(analysis, l + 1, s, point) * detail::moment_value(analysis, m - 1, s, point);
  return num / den - 1.0;
}

inline double ba_an_A(const InteractionSpec& spec, std::size_t mode, int l, const ProductState& s,
                      const NumericPoint& point, int order = kDefaultMaxOrder) {
  if (l < 1) throw ConfigurationError("antibunching order l must be >= 1");
  ModeAnalysis analysis(spec, mode, order);
  const double den = detail::moment_value(analysis, l, s, point) * detail::moment_value(analysis, 1, s, point);
  detail::require_denominator(den);
  return detail::moment_value(analysis, l + 1, s, point) / den - 1.0;
}

enum class Classification { antibunched, coherent, bunched };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::antibunched:
      return "Antibunched";
    case Classification::coherent:
      return "Coherent";
    case Classification::bunched:
      return "Bunched";
  }
  return "?";
}

/// Sign of the lowest-grade coefficient that survives substitution of the amplitudes.
inline Classification classify(const ExpectationSeries& d, std::span<const std::complex<double>> amplitudes) {
  std::map<int, std::pair<double, double>> per_grade;  // value, scale
  for (const auto& [key, coeff] : d.term_map()) {
    ExpectationSeries single(d.labels(), d.max_order());
    single.add_term(coeff, key.grade, key.powers);
    const double v = single.evaluate_grade(key.grade, amplitudes).real();
    auto& [value, scale] = per_grade[key.grade];
    value += v;
    scale += std::abs(v);
  }
  for (const auto& [grade, vs] : per_grade) {
    const auto [value, scale] = vs;
    if (std::abs(value) <= 1e-12 * scale || value == 0.0) continue;
    return value < 0 ? Classification::antibunched : Classification::bunched;
  }
  return Classification::coherent;
}

}  // namespace hoa
