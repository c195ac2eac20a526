#ifndef QDM_MERGING_HPP
#define QDM_MERGING_HPP

// State-merging costs: the classical Slepian-Wolf rate, the quantum
// conditional entropy, and the markup incurred when B's side information
// is measured through an ancilla and the quantum remainder is discarded.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "qdm/core.hpp"
#include "qdm/measurement.hpp"

namespace qdm {

/// Joint distribution p(x, y); rows index X, columns index Y.
class JointPMF {
 public:
  static JointPMF validate(Eigen::MatrixXd probs) {
    if (probs.size() == 0) throw Error(ErrorKind::InvalidPMF, "empty distribution");
    if (!probs.allFinite()) throw Error(ErrorKind::InvalidPMF, "non-finite entry");
    const double min = probs.minCoeff();
    if (min < 0.0) throw Error(ErrorKind::InvalidPMF, "negative entry " + std::to_string(min), -min);
    const double res = std::abs(probs.sum() - 1.0);
    if (res > 1e-12) throw Error(ErrorKind::InvalidPMF, "total probability off by " + std::to_string(res), res);
    return JointPMF(std::move(probs));
  }

  const Eigen::MatrixXd& probs() const { return probs_; }

 private:
  explicit JointPMF(Eigen::MatrixXd p) : probs_(std::move(p)) {}
  Eigen::MatrixXd probs_;
};

namespace detail {
inline double pmf_entropy(const Eigen::MatrixXd& p) {
  return shannon_bits(std::vector<double>(p.data(), p.data() + p.size()));
}
}  // namespace detail

inline Bits entropy_x(const JointPMF& p) {
  const Eigen::VectorXd px = p.probs().rowwise().sum();
  return Bits{detail::pmf_entropy(px)};
}

/// Slepian-Wolf rate H(X|Y) = H(X,Y) - H(Y).
inline Bits classical_merge_cost(const JointPMF& p) {
  const Eigen::VectorXd py = p.probs().colwise().sum().transpose();
  const double h = detail::pmf_entropy(p.probs()) - detail::pmf_entropy(py);
  // H(X|Y) is nonnegative; only rounding can push it below zero.
  return Bits{std::max(0.0, h)};
}

/// Quantum merging cost S(A|B) = S(A,B) - S(B). Negative values are distillable ebits.
inline Bits merge_cost(const DensityMatrix& state) {
  require_bipartite(state);
  return von_neumann_entropy(state) - subsystem_entropy(state, {1});
}

/// S(A|B) - S(A|B,C) for a tripartite state. Strong subadditivity makes this nonnegative.
inline double check_ssa(const DensityMatrix& tripartite) {
  if (tripartite.subsystems() != 3)
    throw Error(ErrorKind::DimensionMismatch,
                "expected a tripartite state, got dims " + detail::dims_string(tripartite.dims()));
  const Bits s_ab = subsystem_entropy(tripartite, {0, 1});
  const Bits s_b = subsystem_entropy(tripartite, {1});
  const Bits s_abc = von_neumann_entropy(tripartite);
  const Bits s_bc = subsystem_entropy(tripartite, {1, 2});
  return ((s_ab - s_b) - (s_abc - s_bc)).value;
}

/// Lowercase hex SHA-256 of the canonical byte form of a complex matrix:
/// rows and cols as little-endian uint64, then row-major (re, im) as little-endian binary64.
inline std::string matrix_sha256(const Matrix& m) {
  std::vector<unsigned char> bytes;
  auto put_u64 = [&](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<unsigned char>(v >> (8 * k)));
  };
  auto put_f64 = [&](double x) {
    if (x == 0.0) x = 0.0;  // collapse -0
    put_u64(std::bit_cast<std::uint64_t>(x));
  };
  put_u64(static_cast<std::uint64_t>(m.rows()));
  put_u64(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(m(i, j).real());
      put_f64(m(i, j).imag());
    }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

/// Measurement on B realized coherently: A (x) B (x) C with C starting in |0>.
struct AncillaSimulation {
  NeumarkDilation dilation;
  /// After the dilation unitary on B (x) C, before dephasing. Dims [d_A, d_B, n].
  DensityMatrix coherent;
  /// After dephasing C in its computational basis.
  DensityMatrix dephased;
  /// A together with the outcome record in C; B's quantum remainder traced out. Dims [d_A, n].
  DensityMatrix post_joint;
  /// Ensemble read off the simulated state.
  MeasuredEnsemble ensemble;
};

inline AncillaSimulation simulate_measurement_via_ancilla(const DensityMatrix& state, const Measurement& m) {
  require_bipartite(state);
  const int da = state.dims()[0];
  const int db = state.dims()[1];
  if (m.dim() != db)
    throw Error(ErrorKind::DimensionMismatch,
                "measurement acts on dimension " + std::to_string(m.dim()) + ", B has " + std::to_string(db));
  NeumarkDilation dil = neumark_extend(m);
  const int n = dil.ancilla_dim;

  DensityMatrix attached = tensor(state, basis_state(n, 0));
  DensityMatrix coherent = apply_unitary(attached, dil.unitary, {1, 2});
  DensityMatrix dephased = dephase(coherent, 2);
  DensityMatrix post = partial_trace(dephased, {0, 2});

  MeasuredEnsemble ens{{}, {}, {}, post, dil.ancilla_projectors};
  for (int i = 0; i < n; ++i) {
    Matrix block(da, da);
    for (int a = 0; a < da; ++a)
      for (int a2 = 0; a2 < da; ++a2) block(a, a2) = post.data()(a * n + i, a2 * n + i);
    const double p = block.trace().real();
    ens.probs.push_back(p);
    const bool tiny = p <= tol::prob_floor;
    ens.negligible.push_back(tiny);
    ens.conditional_states.push_back(tiny ? maximally_mixed({da})
                                          : DensityMatrix::assume_valid(0.5 * (block + block.adjoint()) / p, {da}));
  }
  return AncillaSimulation{std::move(dil), std::move(coherent), std::move(dephased), std::move(post), std::move(ens)};
}

struct MergeTranscript {
  int ancilla_dim = 0;
  std::string unitary_sha256;
  Bits mutual_info_before;       // I(A:B)
  Bits mutual_info_coherent;     // I(A':B'C') before discarding
  Bits mutual_info_after;        // I(A':B') after discarding
  Bits cond_entropy_coherent;    // S(A'|B'C')
};

struct MergeLedger {
  Bits cost_before;  // S(A|B)
  Bits cost_after;   // S(A'|B')
  Bits markup;
  double ebits_distillable_before = 0.0;
  MergeTranscript transcript;
};

/// CostsOnly skips the transcript, for use inside optimizer loops.
enum class LedgerDetail { Full, CostsOnly };

inline MergeLedger merge_markup(const DensityMatrix& state, const Measurement& m,
                                LedgerDetail detail = LedgerDetail::Full) {
  const AncillaSimulation sim = simulate_measurement_via_ancilla(state, m);

  const Bits s_ab = von_neumann_entropy(state);
  const Bits s_b = subsystem_entropy(state, {1});
  const Bits s_post = von_neumann_entropy(sim.post_joint);
  const Bits s_rec = subsystem_entropy(sim.post_joint, {1});

  MergeLedger ledger;
  ledger.cost_before = s_ab - s_b;
  ledger.cost_after = s_post - s_rec;
  ledger.markup = ledger.cost_after - ledger.cost_before;
  ledger.ebits_distillable_before = std::max(0.0, -ledger.cost_before.value);
  if (detail == LedgerDetail::CostsOnly) return ledger;

  // A | BC before the discard. C starts pure, so S(A,B,C) = S(A,B).
  const Bits s_abc = von_neumann_entropy(sim.coherent);
  const Bits s_bc = subsystem_entropy(sim.coherent, {1, 2});

  auto& t = ledger.transcript;
  t.ancilla_dim = sim.dilation.ancilla_dim;
  t.unitary_sha256 = matrix_sha256(sim.dilation.unitary);
  t.mutual_info_before = subsystem_entropy(state, {0}) + s_b - s_ab;
  t.mutual_info_coherent = subsystem_entropy(sim.coherent, {0}) + s_bc - s_abc;
  t.mutual_info_after = subsystem_entropy(sim.post_joint, {0}) + s_rec - s_post;
  t.cond_entropy_coherent = s_abc - s_bc;
  return ledger;
}

}  // namespace qdm

#endif  // QDM_MERGING_HPP
