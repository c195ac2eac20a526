#ifndef QDM_MEASURES_HPP
#define QDM_MEASURES_HPP

#include <cmath>

#include "qdm/correlations.hpp"
#include "qdm/core.hpp"
#include "qdm/states.hpp"

namespace qdm {

/// Pure states, two-qubit Bell-diagonal states, and states certified
/// separable by the partial-transpose test when d_A d_B <= 6.
inline SingleCopyClass classify_single_copy(const DensityMatrix& state) {
  require_bipartite(state);
  if (std::abs(state.purity() - 1.0) <= 1e-9) return SingleCopyClass::Pure;
  if (state.dims() == Dims{2, 2}) {
    Matrix bell(4, 4);
    for (int k = 0; k < 4; ++k) bell.col(k) = bell_vector(k);
    const Matrix in_bell = bell.adjoint() * state.data() * bell;
    const Matrix off = in_bell - Matrix(in_bell.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() <= 1e-9) return SingleCopyClass::BellDiagonal;
  }
  if (state.dim() <= 6) {
    const RealVector ev = detail::hermitian_eigenvalues(partial_transpose(state, 1));
    if (ev.minCoeff() >= -1e-12) return SingleCopyClass::Separable;
  }
  return SingleCopyClass::General;
}

constexpr std::string_view to_string(SingleCopyClass c) {
  switch (c) {
    case SingleCopyClass::Pure: return "pure";
    case SingleCopyClass::Separable: return "separable";
    case SingleCopyClass::BellDiagonal: return "bell-diagonal";
    case SingleCopyClass::General: return "general";
  }
  return "general";
}

struct PurityReport {
  double log_dim = 0.0;  // log2 d_AB
  Bits joint_entropy;
  Bits discord_used;
  double kappa = 0.0;
  /// Set when single-copy discord stands in for the regularized one without a known equality.
  bool regularization_caveat = true;
  SingleCopyClass state_class = SingleCopyClass::General;
};

/// kappa(A|B) = log2 d_AB - S(A,B) - D(A|B), with single-copy D.
inline PurityReport local_purity_rate(const DensityMatrix& state, const DiscordResult& d) {
  require_bipartite(state);
  if (state.dims() != d.dims)
    throw Error(ErrorKind::StateResultMismatch,
                "state dims " + detail::dims_string(state.dims()) + " vs result dims " + detail::dims_string(d.dims));
  PurityReport r;
  r.log_dim = std::log2(static_cast<double>(state.dim()));
  r.joint_entropy = von_neumann_entropy(state);
  r.discord_used = d.discord;
  r.kappa = r.log_dim - r.joint_entropy.value - r.discord_used.value;
  r.state_class = classify_single_copy(state);
  r.regularization_caveat = r.state_class == SingleCopyClass::General;
  return r;
}

/// Entropy of entanglement S(rho_A) of a pure bipartite state.
inline Bits pure_state_entanglement(const PureState& psi) {
  if (psi.dims().size() != 2)
    throw Error(ErrorKind::DimensionMismatch, "expected a bipartite pure state, got dims " + detail::dims_string(psi.dims()));
  const DensityMatrix rho = psi.density();
  return subsystem_entropy(rho, {0});
}

/// Density-matrix overload: rejects inputs with purity below 1 - 1e-9.
inline Bits pure_state_entanglement(const DensityMatrix& rho) {
  require_bipartite(rho);
  const double purity = rho.purity();
  if (purity < 1.0 - 1e-9) throw Error(ErrorKind::NotPure, "tr(rho^2) = " + std::to_string(purity), 1.0 - purity);
  return subsystem_entropy(rho, {0});
}

}  // namespace qdm

#endif  // QDM_MEASURES_HPP
