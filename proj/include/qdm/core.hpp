#ifndef QDM_CORE_HPP
#define QDM_CORE_HPP

// Dense density-matrix algebra: validation, composition, reduction,
// purification and entropies. All entropies are in bits.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdm/error.hpp"

namespace qdm {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

namespace tol {
inline constexpr double herm = 1e-9;
inline constexpr double psd = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double unitary = 1e-9;
/// Eigenvalues at or below this contribute nothing to entropies.
inline constexpr double eig_floor = 1e-12;
/// Outcome probabilities at or below this are treated as impossible.
inline constexpr double prob_floor = 1e-12;
}  // namespace tol

/// An information quantity in bits. Conditional entropies may be negative.
struct Bits {
  double value = 0.0;

  constexpr Bits() = default;
  constexpr explicit Bits(double v) : value(v) {}

  friend constexpr Bits operator+(Bits a, Bits b) { return Bits{a.value + b.value}; }
  friend constexpr Bits operator-(Bits a, Bits b) { return Bits{a.value - b.value}; }
  friend constexpr Bits operator-(Bits a) { return Bits{-a.value}; }
  friend constexpr auto operator<=>(Bits, Bits) = default;
};

inline int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

namespace detail {

inline std::string dims_string(std::span<const int> dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

inline double hermitian_residual(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline RealVector hermitian_eigenvalues(const Matrix& m) {
  // Symmetrize so tiny anti-Hermitian noise cannot leak into the solver.
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double unitary_residual(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Row-major strides for a multi-index over `dims`.
inline std::vector<int> strides(std::span<const int> dims) {
  std::vector<int> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

/// Index map for reordering tensor factors: new slot k holds old slot perm[k].
/// Returns, for each new flat index, the corresponding old flat index.
inline std::vector<int> permutation_index_map(std::span<const int> dims, std::span<const int> perm) {
  const int n = static_cast<int>(dims.size());
  Dims new_dims(n);
  for (int k = 0; k < n; ++k) new_dims[k] = dims[perm[k]];
  const auto old_strides = strides(dims);
  const int total = product(dims);
  std::vector<int> map(total);
  std::vector<int> digits(n, 0);
  for (int flat = 0; flat < total; ++flat) {
    int old = 0;
    for (int k = 0; k < n; ++k) old += digits[k] * old_strides[perm[k]];
    map[flat] = old;
    for (int k = n - 1; k >= 0; --k) {
      if (++digits[k] < new_dims[k]) break;
      digits[k] = 0;
    }
  }
  return map;
}

inline Matrix permute_matrix(const Matrix& m, std::span<const int> dims, std::span<const int> perm) {
  const auto map = permutation_index_map(dims, perm);
  const int d = static_cast<int>(map.size());
  Matrix out(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) out(i, j) = m(map[i], map[j]);
  return out;
}

inline Dims permute_dims(std::span<const int> dims, std::span<const int> perm) {
  Dims out(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out[k] = dims[perm[k]];
  return out;
}

inline void check_dims(std::span<const int> dims, Eigen::Index size) {
  if (dims.empty()) throw Error(ErrorKind::DimensionMismatch, "empty subsystem dimension list");
  for (int d : dims)
    if (d <= 0) throw Error(ErrorKind::DimensionMismatch, "nonpositive subsystem dimension in " + dims_string(dims));
  if (product(dims) != size)
    throw Error(ErrorKind::DimensionMismatch,
                "product of dims " + dims_string(dims) + " != matrix size " + std::to_string(size),
                std::abs(static_cast<double>(product(dims) - size)));
}

}  // namespace detail

/// Hermitian, positive semidefinite, unit-trace matrix with a tensor-factor layout.
/// Instances are immutable.
class DensityMatrix {
 public:
  /// Checks every invariant and throws qdm::Error naming the first violation.
  static DensityMatrix validate(Matrix data, Dims dims) {
    if (data.rows() != data.cols())
      throw Error(ErrorKind::DimensionMismatch,
                  "matrix is " + std::to_string(data.rows()) + "x" + std::to_string(data.cols()) + ", not square");
    detail::check_dims(dims, data.rows());
    if (!data.allFinite()) throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");
    const double herm = detail::hermitian_residual(data);
    if (herm > tol::herm)
      throw Error(ErrorKind::NotHermitian, "max |M - M^dagger| = " + std::to_string(herm), herm);
    const double tr_res = std::abs(data.trace() - cplx(1.0, 0.0));
    if (tr_res > tol::trace)
      throw Error(ErrorKind::TraceNotOne, "|tr(M) - 1| = " + std::to_string(tr_res), tr_res);
    const double min_eig = detail::hermitian_eigenvalues(data).minCoeff();
    if (min_eig < -tol::psd)
      throw Error(ErrorKind::NotPositive, "min eigenvalue = " + std::to_string(min_eig), -min_eig);
    return DensityMatrix(std::move(data), std::move(dims));
  }

  /// Wraps a matrix that is a density matrix by construction. Only the layout is checked.
  static DensityMatrix assume_valid(Matrix data, Dims dims) {
    detail::check_dims(dims, data.rows());
    return DensityMatrix(std::move(data), std::move(dims));
  }

  const Matrix& data() const { return data_; }
  const Dims& dims() const { return dims_; }
  int dim() const { return static_cast<int>(data_.rows()); }
  int subsystems() const { return static_cast<int>(dims_.size()); }

  /// Eigenvalues of the symmetrized matrix, ascending.
  RealVector eigenvalues() const { return detail::hermitian_eigenvalues(data_); }

  double purity() const { return (data_ * data_).trace().real(); }

 private:
  DensityMatrix(Matrix data, Dims dims) : data_(std::move(data)), dims_(std::move(dims)) {}

  Matrix data_;
  Dims dims_;
};

/// Normalized state vector with a tensor-factor layout.
class PureState {
 public:
  static PureState validate(Vector amplitudes, Dims dims) {
    detail::check_dims(dims, amplitudes.size());
    const double res = std::abs(amplitudes.squaredNorm() - 1.0);
    if (res > tol::trace)
      throw Error(ErrorKind::TraceNotOne, "| ||psi||^2 - 1 | = " + std::to_string(res), res);
    return PureState(std::move(amplitudes), std::move(dims));
  }

  /// Normalizes a nonzero vector.
  static PureState normalized(Vector amplitudes, Dims dims) {
    const double n = amplitudes.norm();
    if (!(n > 0.0)) throw Error(ErrorKind::InvalidParams, "cannot normalize a zero vector");
    amplitudes /= n;
    detail::check_dims(dims, amplitudes.size());
    return PureState(std::move(amplitudes), std::move(dims));
  }

  const Vector& amplitudes() const { return amps_; }
  const Dims& dims() const { return dims_; }
  int dim() const { return static_cast<int>(amps_.size()); }

  DensityMatrix density() const { return DensityMatrix::assume_valid(amps_ * amps_.adjoint(), dims_); }

 private:
  PureState(Vector a, Dims dims) : amps_(std::move(a)), dims_(std::move(dims)) {}

  Vector amps_;
  Dims dims_;
};

// ---------------------------------------------------------------------------

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Matrix k(a.dim() * b.dim(), a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) k.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) = a.data()(i, j) * b.data();
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix::assume_valid(std::move(k), std::move(dims));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

/// Reduced state on the subsystems in `keep`, retained in their original order.
inline DensityMatrix partial_trace(const DensityMatrix& state, std::vector<int> keep) {
  const int n = state.subsystems();
  if (keep.empty()) throw Error(ErrorKind::BadSubsystemIndex, "keep set is empty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int k : keep)
    if (k < 0 || k >= n)
      throw Error(ErrorKind::BadSubsystemIndex,
                  "subsystem " + std::to_string(k) + " out of range for " + std::to_string(n) + " subsystems");
  if (static_cast<int>(keep.size()) == n) return state;

  std::vector<int> perm = keep;
  for (int k = 0; k < n; ++k)
    if (!std::binary_search(keep.begin(), keep.end(), k)) perm.push_back(k);
  const Dims pdims = detail::permute_dims(state.dims(), perm);
  const Matrix p = detail::permute_matrix(state.data(), state.dims(), perm);

  Dims kept(pdims.begin(), pdims.begin() + static_cast<long>(keep.size()));
  const int dk = product(kept);
  const int dt = state.dim() / dk;
  Matrix out = Matrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i)
    for (int j = 0; j < dk; ++j) {
      cplx acc{0.0, 0.0};
      for (int t = 0; t < dt; ++t) acc += p(i * dt + t, j * dt + t);
      out(i, j) = acc;
    }
  return DensityMatrix::assume_valid(std::move(out), std::move(kept));
}

/// Reorders tensor factors: new slot k is old slot perm[k].
inline DensityMatrix permute_subsystems(const DensityMatrix& state, std::span<const int> perm) {
  const int n = state.subsystems();
  std::vector<int> seen(perm.begin(), perm.end());
  std::sort(seen.begin(), seen.end());
  if (static_cast<int>(perm.size()) != n)
    throw Error(ErrorKind::BadSubsystemIndex, "permutation length does not match subsystem count");
  for (int k = 0; k < n; ++k)
    if (seen[k] != k) throw Error(ErrorKind::BadSubsystemIndex, "not a permutation of subsystem indices");
  return DensityMatrix::assume_valid(detail::permute_matrix(state.data(), state.dims(), perm),
                                     detail::permute_dims(state.dims(), perm));
}

/// Shannon entropy in bits of a probability-like vector; entries at or below the floor count as zero.
template <typename Range>
double shannon_bits(const Range& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p <= tol::eig_floor) continue;
    p = std::min(p, 1.0);
    h -= p * std::log2(p);
  }
  return h;
}

inline Bits von_neumann_entropy(const DensityMatrix& state) {
  const RealVector ev = state.eigenvalues();
  return Bits{std::max(0.0, shannon_bits(std::vector<double>(ev.begin(), ev.end())))};
}

/// Purification on dims ++ [r], r = numerical rank of the input.
inline PureState purify(const DensityMatrix& state) {
  const Matrix h = 0.5 * (state.data() + state.data().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  std::vector<int> support;
  for (int i = 0; i < state.dim(); ++i)
    if (es.eigenvalues()(i) > tol::eig_floor) support.push_back(i);
  // Iterate from the largest eigenvalue down so the reference basis is ordered by weight.
  std::reverse(support.begin(), support.end());
  const int r = static_cast<int>(support.size());
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(state.dim()) * r);
  for (int k = 0; k < r; ++k) {
    const double w = std::sqrt(es.eigenvalues()(support[k]));
    const auto v = es.eigenvectors().col(support[k]);
    for (int i = 0; i < state.dim(); ++i) psi(i * r + k) = w * v(i);
  }
  Dims dims = state.dims();
  dims.push_back(r);
  // Renormalize away the weight lost to floored eigenvalues.
  return PureState::normalized(std::move(psi), std::move(dims));
}

/// Conjugates by `u` acting on the listed subsystems (in the listed order), identity elsewhere.
inline DensityMatrix apply_unitary(const DensityMatrix& state, const Matrix& u, std::vector<int> on) {
  const int n = state.subsystems();
  if (on.empty()) throw Error(ErrorKind::BadSubsystemIndex, "unitary target set is empty");
  std::vector<int> sorted = on;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::BadSubsystemIndex, "repeated subsystem in unitary target set");
  for (int k : on)
    if (k < 0 || k >= n) throw Error(ErrorKind::BadSubsystemIndex, "subsystem " + std::to_string(k) + " out of range");
  int dt = 1;
  for (int k : on) dt *= state.dims()[k];
  if (u.rows() != dt || u.cols() != dt)
    throw Error(ErrorKind::DimensionMismatch, "unitary is " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                                                  ", targeted dimension is " + std::to_string(dt));
  const double ures = detail::unitary_residual(u);
  if (ures > tol::unitary) throw Error(ErrorKind::NotUnitary, "max |U^dagger U - I| = " + std::to_string(ures), ures);

  std::vector<int> perm = on;
  for (int k = 0; k < n; ++k)
    if (!std::binary_search(sorted.begin(), sorted.end(), k)) perm.push_back(k);
  const Dims pdims = detail::permute_dims(state.dims(), perm);
  const Matrix p = detail::permute_matrix(state.data(), state.dims(), perm);
  const int rest = state.dim() / dt;
  const Matrix full = kron(u, Matrix::Identity(rest, rest));
  const Matrix rotated = full * p * full.adjoint();

  std::vector<int> inverse(n);
  for (int k = 0; k < n; ++k) inverse[perm[k]] = k;
  return DensityMatrix::assume_valid(detail::permute_matrix(rotated, pdims, inverse), state.dims());
}

/// Removes coherences of one subsystem in its computational basis.
inline DensityMatrix dephase(const DensityMatrix& state, int slot) {
  const int n = state.subsystems();
  if (slot < 0 || slot >= n) throw Error(ErrorKind::BadSubsystemIndex, "subsystem " + std::to_string(slot) + " out of range");
  const auto st = detail::strides(state.dims());
  const int d = state.dims()[slot];
  Matrix out = state.data();
  for (int i = 0; i < state.dim(); ++i)
    for (int j = 0; j < state.dim(); ++j)
      if ((i / st[slot]) % d != (j / st[slot]) % d) out(i, j) = 0.0;
  return DensityMatrix::assume_valid(std::move(out), state.dims());
}

/// Partial transpose of one subsystem in the computational basis. The result need not be PSD.
inline Matrix partial_transpose(const DensityMatrix& state, int slot) {
  const auto st = detail::strides(state.dims());
  const int d = state.dims()[slot];
  Matrix out(state.dim(), state.dim());
  for (int i = 0; i < state.dim(); ++i)
    for (int j = 0; j < state.dim(); ++j) {
      const int di = (i / st[slot]) % d;
      const int dj = (j / st[slot]) % d;
      const int ti = i + (dj - di) * st[slot];
      const int tj = j + (di - dj) * st[slot];
      out(ti, tj) = state.data()(i, j);
    }
  return out;
}

inline DensityMatrix maximally_mixed(Dims dims) {
  const int d = product(dims);
  return DensityMatrix::assume_valid(Matrix::Identity(d, d) / static_cast<double>(d), std::move(dims));
}

/// |k><k| in dimension d.
inline DensityMatrix basis_state(int d, int k) {
  Matrix m = Matrix::Zero(d, d);
  m(k, k) = 1.0;
  return DensityMatrix::assume_valid(std::move(m), {d});
}

/// Matrix square root of a PSD matrix; negative eigenvalues are clipped to zero.
inline Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  const RealVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

/// Entropy of the reduced state on `keep`.
inline Bits subsystem_entropy(const DensityMatrix& state, std::vector<int> keep) {
  return von_neumann_entropy(partial_trace(state, std::move(keep)));
}

inline void require_bipartite(const DensityMatrix& state) {
  if (state.subsystems() != 2)
    throw Error(ErrorKind::DimensionMismatch,
                "expected a bipartite state, got dims " + detail::dims_string(state.dims()));
}

}  // namespace qdm

#endif  // QDM_CORE_HPP
