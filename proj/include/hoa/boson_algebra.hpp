#pragma once

// Exact algebra of multimode bosonic ladder-operator polynomials kept in
// normal order. Every term carries an integer grade, the power of the small
// parameter (g t); products drop terms whose grade exceeds the polynomial's
// truncation order.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hoa/errors.hpp"
#include "hoa/gaussian_rational.hpp"
#include "hoa/text.hpp"

namespace hoa {

inline constexpr int kDefaultMaxOrder = 2;

/// Exponents of a†^create a^annihilate for one mode.
struct ModePower {
  int create = 0;
  int annihilate = 0;

  auto operator<=>(const ModePower&) const = default;
};

using PowerTuple = std::vector<ModePower>;

/// Canonical ordering key: grade first, then per-mode exponent tuples.
struct MonomialKey {
  int grade = 0;
  PowerTuple powers;

  auto operator<=>(const MonomialKey&) const = default;
};

struct NormalMonomial {
  GaussianRational coeff{1};
  int grade = 0;
  PowerTuple powers;

  std::size_t mode_count() const { return powers.size(); }
  MonomialKey key() const { return {grade, powers}; }

  int total_degree() const {
    int d = 0;
    for (const auto& p : powers) d += p.create + p.annihilate;
    return d;
  }
};

class OperatorPolynomial;

OperatorPolynomial normal_order_product(const NormalMonomial& left, const NormalMonomial& right,
                                        int max_order);

class OperatorPolynomial {
 public:
  using TermMap = std::map<MonomialKey, GaussianRational>;

  explicit OperatorPolynomial(std::size_t mode_count, int max_order = kDefaultMaxOrder)
      : mode_count_(mode_count), max_order_(max_order) {
    if (max_order < 0) throw StructuralError("max_order must be non-negative");
  }

  static OperatorPolynomial identity(std::size_t mode_count, int max_order = kDefaultMaxOrder) {
    OperatorPolynomial p(mode_count, max_order);
    p.add_term(GaussianRational(1), 0, PowerTuple(mode_count));
    return p;
  }

  static OperatorPolynomial monomial(std::size_t mode_count, const GaussianRational& coeff, int grade,
                                     PowerTuple powers, int max_order = kDefaultMaxOrder) {
    OperatorPolynomial p(mode_count, max_order);
    p.add_term(coeff, grade, std::move(powers));
    return p;
  }

  /// Bare annihilation operator of `mode`.
  static OperatorPolynomial annihilator(std::size_t mode_count, std::size_t mode,
                                        int max_order = kDefaultMaxOrder) {
    PowerTuple powers(mode_count);
    powers.at(mode).annihilate = 1;
    return monomial(mode_count, GaussianRational(1), 0, std::move(powers), max_order);
  }

  static OperatorPolynomial creator(std::size_t mode_count, std::size_t mode,
                                    int max_order = kDefaultMaxOrder) {
    PowerTuple powers(mode_count);
    powers.at(mode).create = 1;
    return monomial(mode_count, GaussianRational(1), 0, std::move(powers), max_order);
  }

  /// a†a for `mode`.
  static OperatorPolynomial number(std::size_t mode_count, std::size_t mode,
                                   int max_order = kDefaultMaxOrder) {
    PowerTuple powers(mode_count);
    powers.at(mode) = {1, 1};
    return monomial(mode_count, GaussianRational(1), 0, std::move(powers), max_order);
  }

  std::size_t mode_count() const { return mode_count_; }
  int max_order() const { return max_order_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const TermMap& term_map() const { return terms_; }

  /// Accumulates a term; drops it if it vanishes or exceeds the truncation grade.
  void add_term(const GaussianRational& coeff, int grade, PowerTuple powers) {
    if (powers.size() != mode_count_) {
      throw StructuralError("monomial has " + std::to_string(powers.size()) +
                            " modes, polynomial has " + std::to_string(mode_count_));
    }
    if (grade < 0) throw StructuralError("negative grade");
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

  void add_term(const NormalMonomial& m) { add_term(m.coeff, m.grade, m.powers); }

  std::vector<NormalMonomial> terms() const {
    std::vector<NormalMonomial> out;
    out.reserve(terms_.size());
    for (const auto& [key, coeff] : terms_) out.push_back({coeff, key.grade, key.powers});
    return out;
  }

  /// Coefficient of the term with the given key, zero if absent.
  GaussianRational coefficient(int grade, const PowerTuple& powers) const {
    auto it = terms_.find(MonomialKey{grade, powers});
    return it == terms_.end() ? GaussianRational(0) : it->second;
  }

  OperatorPolynomial grade_part(int grade) const {
    OperatorPolynomial out(mode_count_, max_order_);
    for (const auto& [key, coeff] : terms_) {
      if (key.grade == grade) out.terms_.emplace(key, coeff);
    }
    return out;
  }

  /// Copy with a different truncation grade (terms above it are dropped).
  OperatorPolynomial with_max_order(int max_order) const {
    OperatorPolynomial out(mode_count_, max_order);
    for (const auto& [key, coeff] : terms_) {
      if (key.grade <= max_order) out.terms_.emplace(key, coeff);
    }
    return out;
  }

  int max_grade() const {
    int g = -1;
    for (const auto& [key, coeff] : terms_) g = std::max(g, key.grade);
    return g;
  }

  OperatorPolynomial& operator*=(const GaussianRational& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [key, coeff] : terms_) coeff *= s;
    return *this;
  }

  /// Golden-file serialization, e.g. "(1+0i)·A + (0-3i)·(gt)·A†^2 B^2 C".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [key, coeff] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += coeff.str();
      if (key.grade == 1) {
        out += "·(gt)";
      } else if (key.grade > 1) {
        out += "·(gt)^" + std::to_string(key.grade);
      }
      std::string ops = operator_string(key.powers);
      if (!ops.empty()) out += "·" + ops;
    }
    return out;
  }

  static std::string operator_string(const PowerTuple& powers) {
    std::string out;
    auto factor = [&out](const std::string& symbol, int exponent) {
      if (exponent == 0) return;
      if (!out.empty()) out += " ";
      out += symbol;
      if (exponent != 1) out += "^" + std::to_string(exponent);
    };
    for (std::size_t m = 0; m < powers.size(); ++m) {
      const std::string name = text::mode_name(m);
      factor(name + std::string(text::kDagger), powers[m].create);
      factor(name, powers[m].annihilate);
    }
    return out;
  }

  friend bool operator==(const OperatorPolynomial& a, const OperatorPolynomial& b) {
    return a.mode_count_ == b.mode_count_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t mode_count_;
  int max_order_;
  TermMap terms_;
};

namespace detail {

inline void require_same_modes(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  if (x.mode_count() != y.mode_count()) {
    throw StructuralError("mode-set mismatch: " + std::to_string(x.mode_count()) + " vs " +
                          std::to_string(y.mode_count()));
  }
}

inline void require_compatible(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  require_same_modes(x, y);
  if (x.max_order() != y.max_order()) {
    throw StructuralError("truncation mismatch: max_order " + std::to_string(x.max_order()) +
                          " vs " + std::to_string(y.max_order()));
  }
}

inline mpz_class binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

inline mpz_class factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

struct Contraction {
  mpz_class weight;
  ModePower power;
};

/// a†^p1 a^q1 · a†^p2 a^q2 = Σ_k k! C(q1,k) C(p2,k) a†^(p1+p2-k) a^(q1+q2-k)
inline std::vector<Contraction> reorder_mode(const ModePower& left, const ModePower& right) {
  const int kmax = std::min(left.annihilate, right.create);
  std::vector<Contraction> out;
  out.reserve(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    out.push_back({factorial(k) * binomial(left.annihilate, k) * binomial(right.create, k),
                   {left.create + right.create - k, left.annihilate + right.annihilate - k}});
  }
  return out;
}

inline void accumulate_product(const NormalMonomial& left, const NormalMonomial& right,
                               OperatorPolynomial& out) {
  const int grade = left.grade + right.grade;
  if (grade > out.max_order()) return;
  const std::size_t n = left.powers.size();
  std::vector<std::vector<Contraction>> per_mode(n);
  for (std::size_t m = 0; m < n; ++m) per_mode[m] = reorder_mode(left.powers[m], right.powers[m]);

  const GaussianRational base = left.coeff * right.coeff;
  PowerTuple powers(n);
  std::vector<std::size_t> choice(n, 0);
  // Odometer over the per-mode contraction choices.
  while (true) {
    mpz_class weight = 1;
    for (std::size_t m = 0; m < n; ++m) {
      weight *= per_mode[m][choice[m]].weight;
      powers[m] = per_mode[m][choice[m]].power;
    }
    out.add_term(base * GaussianRational(Rational(weight)), grade, powers);
    std::size_t m = 0;
    while (m < n && ++choice[m] == per_mode[m].size()) {
      choice[m] = 0;
      ++m;
    }
    if (m == n) break;
  }
}

}  // namespace detail

inline OperatorPolynomial normal_order_product(const NormalMonomial& left, const NormalMonomial& right,
                                               int max_order) {
  if (left.mode_count() != right.mode_count()) {
    throw StructuralError("mode-set mismatch in normal_order_product");
  }
  OperatorPolynomial out(left.mode_count(), max_order);
  detail::accumulate_product(left, right, out);
  return out;
}

inline OperatorPolynomial add(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  detail::require_compatible(x, y);
  OperatorPolynomial out = x;
  for (const auto& [key, coeff] : y.term_map()) out.add_term(coeff, key.grade, key.powers);
  return out;
}

inline OperatorPolynomial subtract(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  detail::require_compatible(x, y);
  OperatorPolynomial out = x;
  for (const auto& [key, coeff] : y.term_map()) out.add_term(-coeff, key.grade, key.powers);
  return out;
}

inline OperatorPolynomial scale(OperatorPolynomial x, const GaussianRational& s) { return x *= s; }

inline OperatorPolynomial multiply(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  detail::require_compatible(x, y);
  OperatorPolynomial out(x.mode_count(), x.max_order());
  const auto lhs = x.terms();
  const auto rhs = y.terms();
  for (const auto& l : lhs) {
    for (const auto& r : rhs) detail::accumulate_product(l, r, out);
  }
  return out;
}

inline OperatorPolynomial adjoint(const OperatorPolynomial& x) {
  OperatorPolynomial out(x.mode_count(), x.max_order());
  for (const auto& [key, coeff] : x.term_map()) {
    PowerTuple swapped = key.powers;
    for (auto& p : swapped) std::swap(p.create, p.annihilate);
    out.add_term(coeff.conj(), key.grade, std::move(swapped));
  }
  return out;
}

inline OperatorPolynomial commutator(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  return subtract(multiply(x, y), multiply(y, x));
}

/// x^k by repeated multiplication; x^0 is the identity.
inline OperatorPolynomial power(const OperatorPolynomial& x, int k) {
  OperatorPolynomial out = OperatorPolynomial::identity(x.mode_count(), x.max_order());
  for (int i = 0; i < k; ++i) out = multiply(out, x);
  return out;
}

inline OperatorPolynomial operator+(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  return add(x, y);
}
inline OperatorPolynomial operator-(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  return subtract(x, y);
}
inline OperatorPolynomial operator*(const OperatorPolynomial& x, const OperatorPolynomial& y) {
  return multiply(x, y);
}
inline OperatorPolynomial operator*(const GaussianRational& s, OperatorPolynomial x) { return x *= s; }

}  // namespace hoa
