#pragma once

// Exact evolution in a truncated multimode Fock basis. This is the numerical
// ground truth the symbolic short-time results are checked against; it shares
// nothing with the symbolic pipeline except the operator polynomial it is
// asked to materialize.
//
// Basis ordering is row-major over mode indices (mode 0 slowest).

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hoa/boson_algebra.hpp"
#include "hoa/errors.hpp"
#include "hoa/heisenberg.hpp"
#include "hoa/statistics.hpp"

namespace hoa {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr std::size_t kDefaultDimensionCap = 200000;

struct TruncationSpec {
  std::vector<std::size_t> dims;
  std::size_t cap = kDefaultDimensionCap;

  std::size_t modes() const { return dims.size(); }

  std::size_t total() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }

  void validate() const {
    if (dims.empty()) throw ConfigurationError("truncation has no modes");
    std::size_t n = 1;
    for (auto d : dims) {
      if (d < 2) throw ConfigurationError("every truncated mode needs at least 2 Fock levels");
      if (n > cap / d) {
        throw ConfigurationError("truncated basis exceeds the dimension cap of " + std::to_string(cap));
      }
      n *= d;
    }
  }

  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t m = dims.size(); m-- > 1;) s[m - 1] = s[m] * dims[m];
    return s;
  }

  /// Occupation of `mode` in basis state `index`.
  std::size_t occupation(std::size_t index, std::size_t mode, std::span<const std::size_t> stride) const {
    return (index / stride[mode]) % dims[mode];
  }
};

/// Truncated annihilation and creation matrices.
inline std::pair<Matrix, Matrix> ladder_matrix(std::size_t dim) {
  if (dim < 2) throw ConfigurationError("ladder matrices need dim >= 2");
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t n = 1; n < dim; ++n) {
    a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) = std::sqrt(static_cast<double>(n));
  }
  Matrix adag = a.adjoint();
  return {std::move(a), std::move(adag)};
}

/// Matrix image with (gt) replaced by `gt`; each normal-ordered term maps a
/// basis state to at most one basis state.
inline SparseMatrix sparse_image(const OperatorPolynomial& x, const TruncationSpec& trunc, double gt) {
  if (x.mode_count() != trunc.modes()) {
    throw StructuralError("operator has " + std::to_string(x.mode_count()) + " modes, truncation has " +
                          std::to_string(trunc.modes()));
  }
  trunc.validate();
  const std::size_t dim = trunc.total();
  const auto stride = trunc.strides();
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (const auto& [key, coeff] : x.term_map()) {
    const cplx c = coeff.to_complex() * std::pow(gt, key.grade);
    for (std::size_t col = 0; col < dim; ++col) {
      double amp = 1.0;
      std::size_t row = 0;
      bool killed = false;
      for (std::size_t m = 0; m < trunc.modes() && !killed; ++m) {
        const auto n = static_cast<long>(trunc.occupation(col, m, stride));
        const long q = key.powers[m].annihilate;
        const long p = key.powers[m].create;
        if (n < q || n - q + p >= static_cast<long>(trunc.dims[m])) {
          killed = true;
          break;
        }
        for (long i = 0; i < q; ++i) amp *= std::sqrt(static_cast<double>(n - i));
        for (long i = 1; i <= p; ++i) amp *= std::sqrt(static_cast<double>(n - q + i));
        row += static_cast<std::size_t>(n - q + p) * stride[m];
      }
      if (!killed) {
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), c * amp);
      }
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.prune(cplx(0.0, 0.0));
  return out;
}

inline Matrix materialize(const OperatorPolynomial& x, const TruncationSpec& trunc, double gt) {
  return Matrix(sparse_image(x, trunc, gt));
}

/// Σ_{n >= dim} e^{-|α|²} |α|^{2n} / n!, summed from the tail side.
inline double coherent_tail_mass(cplx alpha, std::size_t dim) {
  const double x = std::norm(alpha);
  if (x == 0.0) return 0.0;
  double log_term = -x + static_cast<double>(dim) * std::log(x) - std::lgamma(static_cast<double>(dim) + 1.0);
  double sum = 0.0;
  for (std::size_t n = dim; n < dim + 2000; ++n) {
    const double term = std::exp(log_term);
    sum += term;
    if (static_cast<double>(n) > x && term < 1e-30 * sum) break;
    log_term += std::log(x) - std::log(static_cast<double>(n) + 1.0);
  }
  return sum;
}

inline std::size_t coherent_dim_for(cplx alpha, double tail_tolerance = 1e-10) {
  std::size_t dim = 2;
  while (coherent_tail_mass(alpha, dim) >= tail_tolerance) ++dim;
  return dim;
}

/// e^{-|α|²/2} α^n / √n! for n < dim, renormalized.
inline Vector coherent_state(cplx alpha, std::size_t dim, double tail_tolerance = 1e-10) {
  if (dim < 2) throw ConfigurationError("coherent state needs dim >= 2");
  const double tail = coherent_tail_mass(alpha, dim);
  if (tail >= tail_tolerance) {
    const std::size_t suggested = coherent_dim_for(alpha, tail_tolerance);
    throw TruncationError("coherent amplitude needs a larger truncation: tail mass " + std::to_string(tail) +
                              " at dim " + std::to_string(dim) + "; increase dimension to at least " +
                              std::to_string(suggested),
                          suggested);
  }
  Vector v(static_cast<Eigen::Index>(dim));
  cplx amp = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n < dim; ++n) {
    v(static_cast<Eigen::Index>(n)) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v / v.norm();
}

inline Vector fock_vector(std::size_t n, std::size_t dim) {
  if (n >= dim) throw TruncationError("Fock level outside truncation", n + 1);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(n)) = 1.0;
  return v;
}

/// Tensor product in mode order.
inline Vector product_state(std::span<const Vector> factors) {
  Vector out = Vector::Ones(1);
  for (const auto& f : factors) {
    Vector next(out.size() * f.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * f.size(), f.size()) = out(i) * f;
    out = std::move(next);
  }
  return out;
}

/// Numeric vector for a product state; `amplitudes[m]` is used for coherent modes.
inline Vector prepare_state(const ProductState& s, std::span<const cplx> amplitudes, const TruncationSpec& trunc) {
  if (s.size() != trunc.modes()) throw StructuralError("state and truncation disagree on mode count");
  std::vector<Vector> factors;
  for (std::size_t m = 0; m < s.size(); ++m) {
    const std::size_t dim = trunc.dims[m];
    if (std::holds_alternative<Coherent>(s.modes[m])) {
      if (m >= amplitudes.size()) throw ConfigurationError("missing numeric amplitude for mode " + text::mode_name(m));
      factors.push_back(coherent_state(amplitudes[m], dim));
    } else if (const auto* f = std::get_if<Fock>(&s.modes[m])) {
      factors.push_back(fock_vector(static_cast<std::size_t>(f->n), dim));
    } else {
      factors.push_back(fock_vector(0, dim));
    }
  }
  return product_state(factors);
}

/// exp(-iHt) via Hermitian eigendecomposition of each connected block of H.
class Propagator {
 public:
  explicit Propagator(const SparseMatrix& h) { build(h); }
  explicit Propagator(const Matrix& h) { build(h.sparseView()); }

  std::size_t dimension() const { return dim_; }
  std::size_t block_count() const { return blocks_.size(); }

  std::size_t largest_block() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n = std::max(n, b.indices.size());
    return n;
  }

  Vector evolve(const Vector& psi0, double t) const {
    if (static_cast<std::size_t>(psi0.size()) != dim_) throw StructuralError("state dimension mismatch");
    Vector out(psi0.size());
    for (const auto& b : blocks_) {
      const auto n = static_cast<Eigen::Index>(b.indices.size());
      Vector local(n);
      for (Eigen::Index i = 0; i < n; ++i) local(i) = psi0(static_cast<Eigen::Index>(b.indices[i]));
      Vector coeffs = b.vectors.adjoint() * local;
      for (Eigen::Index i = 0; i < n; ++i) coeffs(i) *= std::exp(cplx(0.0, -b.values(i) * t));
      local = b.vectors * coeffs;
      for (Eigen::Index i = 0; i < n; ++i) out(static_cast<Eigen::Index>(b.indices[i])) = local(i);
    }
    return out;
  }

 private:
  struct Block {
    std::vector<std::size_t> indices;
    Eigen::VectorXd values;
    Matrix vectors;
  };

  void build(const SparseMatrix& h) {
    if (h.rows() != h.cols()) throw NumericalError("Hamiltonian is not square");
    dim_ = static_cast<std::size_t>(h.rows());
    check_hermitian(h);

    std::vector<std::size_t> parent(dim_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (Eigen::Index k = 0; k < h.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
        const auto a = find(static_cast<std::size_t>(it.row()));
        const auto b = find(static_cast<std::size_t>(it.col()));
        if (a != b) parent[a] = b;
      }
    }
    std::vector<std::size_t> block_of(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      const auto root = find(i);
      if (block_of[root] == dim_) {
        block_of[root] = blocks_.size();
        blocks_.emplace_back();
      }
      blocks_[block_of[root]].indices.push_back(i);
    }

    std::vector<std::size_t> local_index(dim_);
    for (auto& b : blocks_) {
      for (std::size_t i = 0; i < b.indices.size(); ++i) local_index[b.indices[i]] = i;
    }
    std::vector<Matrix> dense(blocks_.size());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto n = static_cast<Eigen::Index>(blocks_[bi].indices.size());
      dense[bi] = Matrix::Zero(n, n);
    }
    for (Eigen::Index k = 0; k < h.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
        const auto r = static_cast<std::size_t>(it.row());
        const auto c = static_cast<std::size_t>(it.col());
        dense[block_of[find(r)]](static_cast<Eigen::Index>(local_index[r]),
                                 static_cast<Eigen::Index>(local_index[c])) = it.value();
      }
    }
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(dense[bi]);
      if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigendecomposition failed");
      blocks_[bi].values = solver.eigenvalues();
      blocks_[bi].vectors = solver.eigenvectors();
    }
  }

  static void check_hermitian(const SparseMatrix& h) {
    const SparseMatrix diff = h - SparseMatrix(h.adjoint());
    double scale = 1.0;
    for (Eigen::Index k = 0; k < h.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(h, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    }
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
        if (std::abs(it.value()) > 1e-12 * scale) {
          throw NumericalError("Hamiltonian is not Hermitian (deviation " + std::to_string(std::abs(it.value())) +
                               ")");
        }
      }
    }
  }

  std::size_t dim_ = 0;
  std::vector<Block> blocks_;
};

inline Vector evolve(const Matrix& h, const Vector& psi0, double t) { return Propagator(h).evolve(psi0, t); }

/// <a†^k a^k> for one mode: Σ |ψ_n|² n!/(n-k)!.
inline double factorial_moment(const Vector& psi, const TruncationSpec& trunc, std::size_t mode, int k) {
  const auto stride = trunc.strides();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const auto n = static_cast<double>(trunc.occupation(static_cast<std::size_t>(i), mode, stride));
    double w = 1.0;
    for (int j = 0; j < k; ++j) w *= n - j;
    sum += std::norm(psi(i)) * w;
  }
  return sum;
}

inline cplx expectation(const SparseMatrix& op, const Vector& psi) { return psi.dot(op * psi); }

/// Pump-like coherent modes get max(20, ⌈|α|² + 8|α| + l_max·degree⌉) levels;
/// vacuum modes in the interaction get 2e + 4; spectators get 2.
inline TruncationSpec default_truncation(const InteractionSpec& spec, const ProductState& s,
                                         std::span<const cplx> amplitudes, int l_max = 2) {
  const std::size_t n = spec.modes();
  if (s.size() != n) throw StructuralError("state and interaction disagree on mode count");
  TruncationSpec t;
  t.dims.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const ModeFactor* f = spec.factor(m);
    const std::size_t e = f ? static_cast<std::size_t>(f->exponent) : 0;
    const std::size_t gain = f ? 2 * e + 4 : 0;
    if (std::holds_alternative<Coherent>(s.modes[m])) {
      const double x = m < amplitudes.size() ? std::norm(amplitudes[m]) : 0.0;
      const double want = x + 8.0 * std::sqrt(x) + l_max * spec.total_degree();
      std::size_t dim = std::max<std::size_t>(20, static_cast<std::size_t>(std::ceil(want)));
      if (m < amplitudes.size()) dim = std::max(dim, coherent_dim_for(amplitudes[m]));
      t.dims[m] = dim;
    } else if (const auto* fk = std::get_if<Fock>(&s.modes[m])) {
      t.dims[m] = static_cast<std::size_t>(fk->n) + std::max<std::size_t>(gain, 2);
    } else {
      t.dims[m] = f ? gain : 2;
    }
  }
  return t;
}

struct LeadingCoefficient {
  double value = 0.0;     ///< extrapolated lim f/(gt)²
  double estimate1 = 0.0; ///< f(t1)/(g t1)²
  double estimate2 = 0.0; ///< f(t2)/(g t2)²
};

/// Oracle bound to one Hamiltonian and truncation; the eigendecomposition is
/// computed once and reused for every state, time and observable.
class FockOracle {
 public:
  FockOracle(const OperatorPolynomial& hamiltonian, TruncationSpec trunc, double g = 1.0)
      : trunc_(std::move(trunc)), g_(g), propagator_(build(hamiltonian, trunc_, g)) {}

  FockOracle(const InteractionSpec& spec, TruncationSpec trunc, double g = 1.0)
      : FockOracle(interaction_hamiltonian(spec), std::move(trunc), g) {}

  const TruncationSpec& truncation() const { return trunc_; }
  double coupling() const { return g_; }
  const Propagator& propagator() const { return propagator_; }

  Vector prepare(const ProductState& s, std::span<const cplx> amplitudes) const {
    return prepare_state(s, amplitudes, trunc_);
  }

  Vector evolve(const Vector& psi0, double t) const { return propagator_.evolve(psi0, t); }

  double moment(const Vector& psi, std::size_t mode, int k) const { return factorial_moment(psi, trunc_, mode, k); }

  /// <N^(l+1)> - <N>^(l+1) in the evolved state.
  double numeric_d(const Vector& psi0, std::size_t mode, int l, double t) const {
    const Vector psi = evolve(psi0, t);
    return moment(psi, mode, l + 1) - std::pow(moment(psi, mode, 1), l + 1);
  }

  double numeric_mean(const Vector& psi0, std::size_t mode, double t) const {
    return moment(evolve(psi0, t), mode, 1);
  }

  /// Richardson extrapolation of f = c (gt)² + c4 (gt)⁴ from two times.
  template <typename F>
  LeadingCoefficient leading_coefficient_of(F&& f, double t1, double t2, double rel_tol = 0.05) const {
    if (!(t1 > 0.0) || !(t2 > t1)) throw ConfigurationError("leading coefficient needs 0 < t1 < t2");
    const double x1 = (g_ * t1) * (g_ * t1);
    const double x2 = (g_ * t2) * (g_ * t2);
    const double d1 = f(t1);
    const double d2 = f(t2);
    LeadingCoefficient out;
    out.estimate1 = d1 / x1;
    out.estimate2 = d2 / x2;
    out.value = (x2 * x2 * d1 - x1 * x1 * d2) / (x1 * x2 * (x2 - x1));
    if (std::abs(out.estimate1 - out.estimate2) > rel_tol * std::max(std::abs(out.value), 1.0)) {
      throw NumericalError("short-time window too large: estimates " + std::to_string(out.estimate1) + " and " +
                           std::to_string(out.estimate2) + " disagree");
    }
    return out;
  }

  LeadingCoefficient leading_coefficient(const Vector& psi0, std::size_t mode, int l, double t1, double t2) const {
    return leading_coefficient_of([&](double t) { return numeric_d(psi0, mode, l, t); }, t1, t2);
  }

 private:
  static Propagator build(const OperatorPolynomial& h, const TruncationSpec& trunc, double g) {
    trunc.validate();
    return Propagator(sparse_image(h, trunc, g));
  }

  TruncationSpec trunc_;
  double g_;
  Propagator propagator_;
};

inline double numeric_d(const InteractionSpec& spec, std::size_t mode, int l, const ProductState& s,
                        std::span<const cplx> amplitudes, const TruncationSpec& trunc, double g, double t) {
  FockOracle oracle(spec, trunc, g);
  return oracle.numeric_d(oracle.prepare(s, amplitudes), mode, l, t);
}

inline LeadingCoefficient leading_coefficient(const InteractionSpec& spec, std::size_t mode, int l,
                                              const ProductState& s, std::span<const cplx> amplitudes,
                                              const TruncationSpec& trunc, double g, double t1, double t2) {
  FockOracle oracle(spec, trunc, g);
  return oracle.leading_coefficient(oracle.prepare(s, amplitudes), mode, l, t1, t2);
}

}  // namespace hoa
