#ifndef QDM_MEASUREMENT_HPP
#define QDM_MEASUREMENT_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qdm/core.hpp"

namespace qdm {

enum class MeasurementKind { ProjectiveRank1, POVM };

/// POVM on a single subsystem. Elements are PSD and sum to the identity.
class Measurement {
 public:
  static constexpr double tolerance = 1e-9;

  static Measurement validate(std::vector<Matrix> elements, MeasurementKind kind, std::vector<double> params = {}) {
    if (elements.empty()) throw Error(ErrorKind::InvalidParams, "measurement has no elements");
    const auto d = elements.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const Matrix& e = elements[i];
      if (e.rows() != d || e.cols() != d)
        throw Error(ErrorKind::DimensionMismatch, "element " + std::to_string(i) + " has inconsistent shape");
      const double herm = detail::hermitian_residual(e);
      if (herm > tolerance) throw Error(ErrorKind::NotHermitian, "element " + std::to_string(i), herm);
      const double min_eig = detail::hermitian_eigenvalues(e).minCoeff();
      if (min_eig < -tolerance)
        throw Error(ErrorKind::NotPositive, "element " + std::to_string(i) + " min eigenvalue " + std::to_string(min_eig),
                    -min_eig);
      sum += e;
    }
    const double comp = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (comp > tolerance)
      throw Error(ErrorKind::InvalidParams, "elements do not sum to identity, residual " + std::to_string(comp), comp);
    if (kind == MeasurementKind::ProjectiveRank1) {
      for (std::size_t i = 0; i < elements.size(); ++i) {
        const Matrix& e = elements[i];
        const double idem = (e * e - e).cwiseAbs().maxCoeff();
        const double tr = std::abs(e.trace() - cplx(1.0));
        if (idem > tolerance || tr > tolerance)
          throw Error(ErrorKind::InvalidParams, "element " + std::to_string(i) + " is not a rank-1 projector",
                      std::max(idem, tr));
        for (std::size_t j = i + 1; j < elements.size(); ++j) {
          const double overlap = (e * elements[j]).cwiseAbs().maxCoeff();
          if (overlap > tolerance)
            throw Error(ErrorKind::InvalidParams,
                        "elements " + std::to_string(i) + " and " + std::to_string(j) + " are not orthogonal", overlap);
        }
      }
    }
    return Measurement(std::move(elements), kind, std::move(params));
  }

  const std::vector<Matrix>& elements() const { return elements_; }
  MeasurementKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  int outcomes() const { return static_cast<int>(elements_.size()); }
  int dim() const { return static_cast<int>(elements_.front().rows()); }

 private:
  Measurement(std::vector<Matrix> e, MeasurementKind k, std::vector<double> p)
      : elements_(std::move(e)), kind_(k), params_(std::move(p)) {}

  std::vector<Matrix> elements_;
  MeasurementKind kind_;
  std::vector<double> params_;
};

/// Rank-1 projective measurement whose outcome projectors are |b_k><b_k| for the columns of `basis`.
inline Measurement projective_from_basis(const Matrix& basis, std::vector<double> params = {}) {
  if (basis.rows() != basis.cols()) throw Error(ErrorKind::DimensionMismatch, "basis matrix is not square");
  const double res = detail::unitary_residual(basis);
  if (res > Measurement::tolerance) throw Error(ErrorKind::NotUnitary, "basis columns are not orthonormal", res);
  std::vector<Matrix> elements;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) elements.push_back(basis.col(k) * basis.col(k).adjoint());
  return Measurement::validate(std::move(elements), MeasurementKind::ProjectiveRank1, std::move(params));
}

/// Qubit measurement along Bloch direction (sin t cos p, sin t sin p, cos t) and its antipode.
inline Measurement projective_qubit(double theta, double phi) {
  Matrix basis(2, 2);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const cplx e = std::polar(1.0, phi);
  basis << c, -s * std::conj(e),  //
      s * e, c;
  return projective_from_basis(basis, {theta, phi});
}

inline Measurement computational_basis(int d) {
  return projective_from_basis(Matrix::Identity(d, d));
}

/// Number of real parameters of the Givens-rotation unitary on dimension d.
constexpr int givens_param_count(int d) { return d * (d - 1); }

/// Product of complex Givens rotations over all pairs (j < k), each with an angle and a phase.
inline Matrix givens_unitary(std::span<const double> params, int d) {
  if (static_cast<int>(params.size()) != givens_param_count(d))
    throw Error(ErrorKind::InvalidParams, "expected " + std::to_string(givens_param_count(d)) + " Givens parameters");
  Matrix u = Matrix::Identity(d, d);
  std::size_t p = 0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      const double c = std::cos(params[p]);
      const double s = std::sin(params[p]);
      const cplx e = std::polar(1.0, params[p + 1]);
      p += 2;
      Matrix g = Matrix::Identity(d, d);
      g(j, j) = c;
      g(j, k) = -s * std::conj(e);
      g(k, j) = s * e;
      g(k, k) = c;
      u = u * g;
    }
  return u;
}

inline Measurement projective_givens(std::span<const double> params, int d) {
  return projective_from_basis(givens_unitary(params, d), {params.begin(), params.end()});
}

/// Rank-1 POVM E_i = S^{-1/2} v_i v_i^dagger S^{-1/2}, S = sum_i v_i v_i^dagger.
/// `params` packs (re, im) of each v_i consecutively. Throws if the v_i do not span the space.
inline Measurement rank1_povm(std::span<const double> params, int d, int outcomes) {
  if (static_cast<int>(params.size()) != 2 * d * outcomes)
    throw Error(ErrorKind::InvalidParams, "expected " + std::to_string(2 * d * outcomes) + " POVM parameters");
  std::vector<Vector> vs;
  Matrix frame = Matrix::Zero(d, d);
  for (int i = 0; i < outcomes; ++i) {
    Vector v(d);
    for (int a = 0; a < d; ++a) v(a) = cplx(params[2 * (i * d + a)], params[2 * (i * d + a) + 1]);
    frame += v * v.adjoint();
    vs.push_back(std::move(v));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (frame + frame.adjoint()));
  if (es.eigenvalues().minCoeff() <= 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw Error(ErrorKind::InvalidParams, "POVM vectors do not span the measured space");
  const Matrix inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
  std::vector<Matrix> elements;
  for (const auto& v : vs) {
    const Vector w = inv_sqrt * v;
    elements.push_back(w * w.adjoint());
  }
  return Measurement::validate(std::move(elements), MeasurementKind::POVM, {params.begin(), params.end()});
}

// ---------------------------------------------------------------------------
// Neumark dilation

struct NeumarkDilation {
  int ancilla_dim = 0;
  /// Acts on B (x) C with B the more significant factor.
  Matrix unitary;
  std::vector<Matrix> ancilla_projectors;
};

/// Unitary U on B (x) C with (<i|_C) U (|psi>_B |0>_C) = sqrt(E_i) |psi>.
inline NeumarkDilation neumark_extend(const Measurement& m) {
  const int d = m.dim();
  const int n = m.outcomes();
  const int total = d * n;

  // Isometry V: B -> B (x) C, columns are V|j>.
  Matrix iso = Matrix::Zero(total, d);
  for (int i = 0; i < n; ++i) {
    const Matrix kraus = psd_sqrt(m.elements()[i]);
    for (int b = 0; b < d; ++b)
      for (int j = 0; j < d; ++j) iso(b * n + i, j) = kraus(b, j);
  }

  Eigen::JacobiSVD<Matrix> svd(iso, Eigen::ComputeFullU);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (std::abs(smin - 1.0) > 1e-8 || std::abs(smax - 1.0) > 1e-8)
    throw Error(ErrorKind::CompletionFailure,
                "Kraus isometry singular values in [" + std::to_string(smin) + ", " + std::to_string(smax) + "]",
                std::max(std::abs(smin - 1.0), std::abs(smax - 1.0)));
  const Matrix complement = svd.matrixU().rightCols(total - d);

  Matrix u(total, total);
  int next = 0;
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < n; ++c) {
      const int col = b * n + c;
      if (c == 0)
        u.col(col) = iso.col(b);
      else
        u.col(col) = complement.col(next++);
    }
  const double res = detail::unitary_residual(u);
  if (res > 1e-9) throw Error(ErrorKind::CompletionFailure, "completed dilation is not unitary", res);

  NeumarkDilation out;
  out.ancilla_dim = n;
  out.unitary = std::move(u);
  for (int i = 0; i < n; ++i) out.ancilla_projectors.push_back(basis_state(n, i).data());
  return out;
}

// ---------------------------------------------------------------------------
// Measuring B of a bipartite state

struct MeasuredEnsemble {
  std::vector<double> probs;
  /// rho_{A|i}; a maximally mixed placeholder where `negligible[i]` is set.
  std::vector<DensityMatrix> conditional_states;
  std::vector<bool> negligible;
  /// sum_i p_i rho_{A|i} (x) |i><i| with dims [d_A, outcomes].
  DensityMatrix post_joint;
  std::vector<Matrix> outcome_projectors;
};

namespace detail {

/// tr_B((I (x) E) rho) for a bipartite rho.
inline Matrix unnormalized_conditional(const Matrix& rho, int da, int db, const Matrix& e) {
  Matrix out = Matrix::Zero(da, da);
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2) {
      cplx acc{0.0, 0.0};
      for (int b = 0; b < db; ++b)
        for (int b2 = 0; b2 < db; ++b2) acc += e(b, b2) * rho(a * db + b2, a2 * db + b);
      out(a, a2) = acc;
    }
  return out;
}

}  // namespace detail

inline MeasuredEnsemble measure_B(const DensityMatrix& state, const Measurement& m) {
  require_bipartite(state);
  const int da = state.dims()[0];
  const int db = state.dims()[1];
  if (m.dim() != db)
    throw Error(ErrorKind::DimensionMismatch,
                "measurement acts on dimension " + std::to_string(m.dim()) + ", B has " + std::to_string(db));
  const int n = m.outcomes();
  std::vector<double> probs;
  std::vector<DensityMatrix> conds;
  std::vector<bool> negligible;
  Matrix joint = Matrix::Zero(da * n, da * n);
  for (int i = 0; i < n; ++i) {
    Matrix sigma = detail::unnormalized_conditional(state.data(), da, db, m.elements()[i]);
    sigma = 0.5 * (sigma + sigma.adjoint());
    const double p = sigma.trace().real();
    probs.push_back(p);
    for (int a = 0; a < da; ++a)
      for (int a2 = 0; a2 < da; ++a2) joint(a * n + i, a2 * n + i) = sigma(a, a2);
    if (p <= tol::prob_floor) {
      negligible.push_back(true);
      conds.push_back(maximally_mixed({da}));
    } else {
      negligible.push_back(false);
      conds.push_back(DensityMatrix::assume_valid(sigma / p, {da}));
    }
  }
  std::vector<Matrix> projectors;
  for (int i = 0; i < n; ++i) projectors.push_back(basis_state(n, i).data());
  return MeasuredEnsemble{std::move(probs), std::move(conds), std::move(negligible),
                          DensityMatrix::assume_valid(std::move(joint), {da, n}), std::move(projectors)};
}

/// sum_i p_i S(rho_{A|i}), skipping negligible outcomes.
inline Bits conditional_entropy_measured(const MeasuredEnsemble& e) {
  double acc = 0.0;
  for (std::size_t i = 0; i < e.probs.size(); ++i)
    if (!e.negligible[i]) acc += e.probs[i] * von_neumann_entropy(e.conditional_states[i]).value;
  return Bits{acc};
}

struct PostMeasurementInfo {
  /// S(A) - sum_i p_i S(rho_{A|i}).
  Bits value;
  /// S(A') + S(B') - S(A', B') evaluated on the post-measurement joint state.
  Bits via_post_joint;
};

inline PostMeasurementInfo post_measurement_mutual_info(const DensityMatrix& state, const Measurement& m) {
  const MeasuredEnsemble e = measure_B(state, m);
  const Bits sa = subsystem_entropy(state, {0});
  const Bits joint = von_neumann_entropy(e.post_joint);
  const Bits via = subsystem_entropy(e.post_joint, {0}) + subsystem_entropy(e.post_joint, {1}) - joint;
  return {sa - conditional_entropy_measured(e), via};
}

}  // namespace qdm

#endif  // QDM_MEASUREMENT_HPP
