#ifndef QDM_VERIFY_HPP
#define QDM_VERIFY_HPP

// Randomized invariant suites. Instance i of a suite uses seed root_seed + i;
// results come back in instance order whatever the thread schedule.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qdm/correlations.hpp"
#include "qdm/io.hpp"
#include "qdm/measures.hpp"
#include "qdm/merging.hpp"
#include "qdm/states.hpp"

namespace qdm {

/// Calls fn(i) for i in [0, n) on a small worker pool; returns results in index order.
template <typename T>
std::vector<T> parallel_map(int n, const std::function<T(int)>& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(n, 1)));
  std::vector<T> out(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) out[static_cast<std::size_t>(i)] = fn(i);
  };
  if (threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return out;
}

struct CaseOutcome {
  std::uint64_t seed = 0;
  double residual = 0.0;
  bool pass = true;
  std::string note;
  std::string state_json;  // filled on failure only
};

struct SuiteReport {
  std::string name;
  int n = 0;
  int passed = 0;
  /// Largest violation-direction residual; see suite descriptions.
  double worst_residual = 0.0;
  std::uint64_t worst_seed = 0;
  std::vector<CaseOutcome> failures;

  bool ok() const { return passed == n; }
};

namespace verify_detail {

inline CaseOutcome fail_with_state(CaseOutcome c, const DensityMatrix& rho, std::string note) {
  c.pass = false;
  c.note = std::move(note);
  c.state_json = io::to_json(rho).dump();
  return c;
}

/// S(A|B) - S(A|BC) >= -1e-8 on three-qubit Ginibre states. Worst = smallest residual.
inline CaseOutcome ssa_case(std::uint64_t seed, const OptimizerConfig&) {
  const DensityMatrix rho = random_ginibre_state({2, 2, 2}, 0, seed);
  CaseOutcome c{seed, check_ssa(rho), true, {}, {}};
  if (c.residual < -1e-8) return fail_with_state(c, rho, "strong subadditivity violated");
  return c;
}

/// |min markup - D| <= 1e-6 plus the ancilla monotonicity chains. Worst = largest gap.
inline CaseOutcome markup_case(std::uint64_t seed, const OptimizerConfig& cfg) {
  const DensityMatrix rho = random_ginibre_state({2, 2}, 0, seed);
  const DiscordResult d = discord(rho, cfg);
  const MarkupOptimum mk = discord_via_markup(rho, cfg);
  CaseOutcome c{seed, std::abs(mk.value.value - d.discord.value), true, {}, {}};
  const auto& t = mk.ledger.transcript;
  if (c.residual > 1e-6) return fail_with_state(c, rho, "markup and discord disagree");
  if (std::abs(t.mutual_info_coherent.value - t.mutual_info_before.value) > 1e-8)
    return fail_with_state(c, rho, "I(A':B'C') != I(A:B)");
  if (t.mutual_info_after.value > t.mutual_info_before.value + 1e-8)
    return fail_with_state(c, rho, "I(A':B') > I(A:B)");
  if (std::abs(t.cond_entropy_coherent.value - mk.ledger.cost_before.value) > 1e-8)
    return fail_with_state(c, rho, "S(A'|B'C') != S(A|B)");
  if (mk.ledger.cost_after.value < mk.ledger.cost_before.value - 1e-8)
    return fail_with_state(c, rho, "S(A'|B') < S(A|B)");
  return c;
}

/// -1e-7 <= D <= S(B) + 1e-7. Residual = max(-D, D - S(B)); worst = largest.
inline CaseOutcome bounds_case(std::uint64_t seed, const OptimizerConfig& cfg) {
  const DensityMatrix rho = random_ginibre_state({2, 2}, 0, seed);
  const DiscordResult d = discord(rho, cfg);
  const double sb = subsystem_entropy(rho, {1}).value;
  CaseOutcome c{seed, std::max(-d.discord.value, d.discord.value - sb), true, {}, {}};
  if (c.residual > 1e-7) return fail_with_state(c, rho, "discord outside [0, S(B)]");
  return c;
}

/// |D - S(A)| <= 1e-5 on pure states, ledger costs -S(A) and 0. Worst = largest deviation.
inline CaseOutcome purestate_case(std::uint64_t seed, const OptimizerConfig& cfg) {
  const DensityMatrix rho = random_pure_state({2, 2}, seed).density();
  const DiscordResult d = discord(rho, cfg);
  const double sa = subsystem_entropy(rho, {0}).value;
  const MergeLedger l = merge_markup(rho, d.best_measurement);
  CaseOutcome c{seed, std::abs(d.discord.value - sa), true, {}, {}};
  if (c.residual > 1e-5) return fail_with_state(c, rho, "discord differs from entanglement entropy");
  if (std::abs(l.cost_before.value + sa) > 1e-8) return fail_with_state(c, rho, "cost_before != -S(A)");
  if (std::abs(l.cost_after.value) > 1e-6) return fail_with_state(c, rho, "cost_after != 0");
  return c;
}

/// Classical-quantum states: D <= 1e-5, structural test true, witness markup <= 1e-7. Worst = largest D.
inline CaseOutcome zerodiscord_case(std::uint64_t seed, const OptimizerConfig& cfg) {
  const DensityMatrix rho = make(StateSpec{random_classical_quantum(2, 2, seed)});
  const DiscordResult d = discord(rho, cfg);
  CaseOutcome c{seed, d.discord.value, true, {}, {}};
  if (c.residual > 1e-5) return fail_with_state(c, rho, "classical-quantum state has discord");
  ZeroDiscordTest z;
  try {
    z = is_zero_discord(rho);
  } catch (const Error& e) {
    return fail_with_state(c, rho, e.what());
  }
  if (!z.zero_discord) return fail_with_state(c, rho, "structural test rejected a classical-quantum state");
  const MergeLedger l = merge_markup(rho, projective_from_basis(z.witness));
  if (l.markup.value > 1e-7) return fail_with_state(c, rho, "nonzero markup in witness basis");
  return c;
}

}  // namespace verify_detail

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"ssa", "markup", "bounds", "purestate", "zerodiscord"};
  return names;
}

inline SuiteReport run_suite(const std::string& name, int n, std::uint64_t root_seed, const OptimizerConfig& cfg) {
  using Case = CaseOutcome (*)(std::uint64_t, const OptimizerConfig&);
  Case fn = nullptr;
  bool worst_is_min = false;
  if (name == "ssa") {
    fn = verify_detail::ssa_case;
    worst_is_min = true;
  } else if (name == "markup") {
    fn = verify_detail::markup_case;
  } else if (name == "bounds") {
    fn = verify_detail::bounds_case;
  } else if (name == "purestate") {
    fn = verify_detail::purestate_case;
  } else if (name == "zerodiscord") {
    fn = verify_detail::zerodiscord_case;
  } else {
    throw Error(ErrorKind::InvalidParams, "unknown suite \"" + name + "\"");
  }
  if (n < 1) throw Error(ErrorKind::InvalidParams, "suite size must be >= 1");

  const auto cases = parallel_map<CaseOutcome>(
      n, [&](int i) { return fn(root_seed + static_cast<std::uint64_t>(i), cfg); });

  SuiteReport r{name, n, 0, cases.front().residual, cases.front().seed, {}};
  for (const auto& c : cases) {
    if (c.pass) ++r.passed;
    else r.failures.push_back(c);
    const bool worse = worst_is_min ? c.residual < r.worst_residual : c.residual > r.worst_residual;
    if (worse) {
      r.worst_residual = c.residual;
      r.worst_seed = c.seed;
    }
  }
  return r;
}

/// Runs one suite, or every suite for "all".
inline std::vector<SuiteReport> run_verify(const std::string& suite, int n, std::uint64_t root_seed,
                                           const OptimizerConfig& cfg) {
  std::vector<SuiteReport> out;
  if (suite == "all")
    for (const auto& s : verify_suite_names()) out.push_back(run_suite(s, n, root_seed, cfg));
  else
    out.push_back(run_suite(suite, n, root_seed, cfg));
  return out;
}

/// Plain-text summary; byte-identical for identical inputs.
inline std::string format_report(const std::vector<SuiteReport>& reports) {
  std::string out;
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%-12s %s  passed %d/%d  worst residual %.12g (seed %llu)\n", r.name.c_str(),
                  r.ok() ? "PASS" : "FAIL", r.passed, r.n, r.worst_residual,
                  static_cast<unsigned long long>(r.worst_seed));
    out += buf;
    for (const auto& f : r.failures) {
      std::snprintf(buf, sizeof buf, "  violation seed %llu residual %.12g: ", static_cast<unsigned long long>(f.seed),
                    f.residual);
      out += buf;
      out += f.note + "\n  state " + f.state_json + "\n";
    }
  }
  return out;
}

}  // namespace qdm

#endif  // QDM_VERIFY_HPP
