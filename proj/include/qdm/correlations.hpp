#ifndef QDM_CORRELATIONS_HPP
#define QDM_CORRELATIONS_HPP

// Total correlations, classical correlation J(A|B) optimized over
// measurements on B, and quantum discord D(A|B) = I(A:B) - J(A|B).

#include <optional>
#include <vector>

#include "qdm/core.hpp"
#include "qdm/measurement.hpp"
#include "qdm/merging.hpp"
#include "qdm/optimize.hpp"
#include "qdm/random.hpp"

namespace qdm {

inline Bits mutual_information(const DensityMatrix& state) {
  require_bipartite(state);
  return subsystem_entropy(state, {0}) + subsystem_entropy(state, {1}) - von_neumann_entropy(state);
}

struct ClassicalCorrelation {
  Bits value;
  Measurement measurement;
  /// False when the refinement hit max_iter with objective spread above tol_obj.
  bool converged = true;
  std::vector<TracePoint> trace;
};

/// J(A|B) = max over measurements on B of S(A) - sum_i p_i S(rho_{A|i}).
inline ClassicalCorrelation classical_correlation(const DensityMatrix& state, const OptimizerConfig& cfg,
                                                  bool povm = false, const Measurement* povm_seed = nullptr) {
  require_bipartite(state);
  const Bits s_a = subsystem_entropy(state, {0});
  auto objective = [&state](const Measurement& m) { return conditional_entropy_measured(measure_B(state, m)).value; };
  MeasurementOptimum opt = optimize_measurement(state.dims()[1], objective, cfg, povm, povm_seed);
  for (auto& t : opt.trace) t.objective = s_a.value - t.objective;
  return ClassicalCorrelation{s_a - Bits{opt.value}, std::move(opt.measurement), opt.converged, std::move(opt.trace)};
}

/// Classes of states for which the single-copy discord is known to equal its regularization.
enum class SingleCopyClass { Pure, Separable, BellDiagonal, General };

struct DiscordResult {
  Dims dims;
  Bits mutual_info;
  Bits classical_corr;
  Bits discord;
  Measurement best_measurement;
  /// |D - (S(A'|B') - S(A|B))| at the optimal measurement.
  double markup_check = 0.0;
  bool converged = true;
  std::vector<TracePoint> optimizer_trace;
  /// Rank-1 POVM search, a lower bound on J; present only when requested.
  std::optional<Bits> povm_classical_corr;
  std::optional<Measurement> povm_measurement;
};

inline DiscordResult discord(const DensityMatrix& state, const OptimizerConfig& cfg) {
  require_bipartite(state);
  const Bits mi = mutual_information(state);
  ClassicalCorrelation j = classical_correlation(state, cfg);

  DiscordResult r{state.dims(), mi, j.value, mi - j.value, j.measurement, 0.0, j.converged, std::move(j.trace), {}, {}};

  // Conditional-entropy form of the same quantity on the post-measurement joint state.
  const MeasuredEnsemble e = measure_B(state, r.best_measurement);
  const Bits after = von_neumann_entropy(e.post_joint) - subsystem_entropy(e.post_joint, {1});
  const Bits before = von_neumann_entropy(state) - subsystem_entropy(state, {1});
  r.markup_check = std::abs(r.discord.value - (after - before).value);

  if (cfg.povm) {
    ClassicalCorrelation jp = classical_correlation(state, cfg, true, &r.best_measurement);
    r.povm_classical_corr = jp.value;
    r.povm_measurement = std::move(jp.measurement);
  }
  return r;
}

struct MarkupOptimum {
  Bits value;
  Measurement measurement;
  MergeLedger ledger;
  bool converged = true;
};

/// Minimum over measurements on B of the merging markup S(A'|B') - S(A|B),
/// each markup computed by simulating the measurement with an ancilla.
inline MarkupOptimum discord_via_markup(const DensityMatrix& state, const OptimizerConfig& cfg) {
  require_bipartite(state);
  auto objective = [&state](const Measurement& m) { return merge_markup(state, m, LedgerDetail::CostsOnly).markup.value; };
  MeasurementOptimum opt = optimize_measurement(state.dims()[1], objective, cfg);
  MergeLedger ledger = merge_markup(state, opt.measurement);
  return MarkupOptimum{ledger.markup, std::move(opt.measurement), std::move(ledger), opt.converged};
}

struct ZeroDiscordTest {
  bool zero_discord = false;
  /// Columns form the B basis in which the state is classical on B.
  Matrix witness;
  /// Largest off-diagonal B-block entry in the witness basis.
  double residual = 0.0;
  bool degenerate = false;
};

/// Structural test: zero discord iff rho_AB = sum_i p_i rho_{A|i} (x) |e_i><e_i|
/// for an orthonormal basis {e_i} of B, necessarily an eigenbasis of rho_B.
/// Within degenerate eigenspaces the basis is found by jointly diagonalizing the
/// Hermitian parts of the B-blocks.
inline ZeroDiscordTest is_zero_discord(const DensityMatrix& state, double tol = 1e-8) {
  require_bipartite(state);
  const int da = state.dims()[0];
  const int db = state.dims()[1];
  const DensityMatrix rho_b = partial_trace(state, {1});
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_b.data() + rho_b.data().adjoint()));
  const Matrix eig = es.eigenvectors();
  const RealVector lam = es.eigenvalues();

  // Group nearly equal eigenvalues; merging too eagerly is harmless because the
  // joint diagonalization below still includes rho_B itself.
  constexpr double cluster_gap = 1e-6;
  std::vector<std::pair<int, int>> clusters;  // [begin, end)
  for (int i = 0; i < db;) {
    int j = i + 1;
    while (j < db && lam(j) - lam(j - 1) <= cluster_gap) ++j;
    clusters.emplace_back(i, j);
    i = j;
  }

  // rho in A (x) eigenbasis(B).
  const Matrix rot = kron(Matrix::Identity(da, da), eig);
  const Matrix rho_e = rot.adjoint() * state.data() * rot;
  auto block_entry = [&](const Matrix& rho, int a, int m, int b, int n) { return rho(a * db + m, b * db + n); };

  Matrix basis = Matrix::Identity(db, db);
  bool degenerate = false;
  SplitMix64 rng(0x5eedULL);
  for (auto [lo, hi] : clusters) {
    const int m = hi - lo;
    if (m == 1) continue;
    degenerate = true;
    Matrix g = Matrix::Zero(m, m);
    for (int a = 0; a < da; ++a)
      for (int b = a; b < da; ++b) {
        Matrix n_ab(m, m);
        Matrix n_ba(m, m);
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            n_ab(k, l) = block_entry(rho_e, a, lo + k, b, lo + l);
            n_ba(k, l) = block_entry(rho_e, b, lo + k, a, lo + l);
          }
        const double c1 = 0.5 + rng.uniform();
        const double c2 = 0.5 + rng.uniform();
        g += c1 * (n_ab + n_ba) + c2 * cplx(0.0, 1.0) * (n_ab - n_ba);
      }
    Eigen::SelfAdjointEigenSolver<Matrix> gs(0.5 * (g + g.adjoint()));
    basis.block(lo, lo, m, m) = gs.eigenvectors();
  }

  const Matrix witness = eig * basis;
  const Matrix rot2 = kron(Matrix::Identity(da, da), basis);
  const Matrix rho_w = rot2.adjoint() * rho_e * rot2;
  double residual = 0.0;
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < da; ++b)
      for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
          if (k != l) residual = std::max(residual, std::abs(block_entry(rho_w, a, k, b, l)));

  if (degenerate && residual > tol && residual < 10.0 * tol)
    throw Error(ErrorKind::DegenerateUndecided,
                "joint diagonalization residual " + std::to_string(residual) + " inside (tol, 10 tol)", residual);
  return ZeroDiscordTest{residual <= tol, witness, residual, degenerate};
}

}  // namespace qdm

#endif  // QDM_CORRELATIONS_HPP
