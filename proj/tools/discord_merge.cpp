// discord-merge: quantum discord, merging ledgers and invariant sweeps from the command line.
//
//   discord-merge compute --family werner --p 0.5 --all
//   discord-merge compute --matrix state.json
//   discord-merge sweep --family werner --from 0 --to 1 --steps 11
//   discord-merge verify all -n 200 --seed 7
//
// Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 optimizer did not converge.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdm/correlations.hpp"
#include "qdm/io.hpp"
#include "qdm/measures.hpp"
#include "qdm/merging.hpp"
#include "qdm/states.hpp"
#include "qdm/verify.hpp"

namespace {

using qdm::io::json;

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_invalid = 2;
constexpr int exit_not_converged = 3;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::string grid;
  int multistarts = 8;
  bool povm = false;
  bool verbose = false;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("DISCORD_MERGE_SEED")) {
      try {
        return std::stoull(env);
      } catch (const std::exception&) {
        throw qdm::Error(qdm::ErrorKind::InvalidParams, "DISCORD_MERGE_SEED is not an unsigned integer");
      }
    }
    return 0;
  }

  qdm::OptimizerConfig config() const {
    qdm::OptimizerConfig cfg;
    if (!grid.empty()) {
      const auto x = grid.find_first_of("x,");
      if (x == std::string::npos) throw qdm::Error(qdm::ErrorKind::InvalidParams, "--grid expects THETAxPHI");
      cfg.grid_theta = std::stoi(grid.substr(0, x));
      cfg.grid_phi = std::stoi(grid.substr(x + 1));
    }
    cfg.multistarts = multistarts;
    cfg.povm = povm;
    cfg.seed = static_cast<unsigned>(resolved_seed());
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--seed", o.seed, "Root seed (falls back to DISCORD_MERGE_SEED, then 0)");
  app->add_option("--grid", o.grid, "Coarse measurement grid as THETAxPHI (default 24x48)");
  app->add_option("--multistarts", o.multistarts, "Refined starts taken from the grid")->check(CLI::PositiveNumber);
  app->add_flag("--povm", o.povm, "Also search rank-1 POVMs (reported alongside, a lower bound on J)");
  app->add_flag("--verbose", o.verbose, "Include the optimizer trace");
}

struct StateInput {
  std::string family;
  std::string matrix_path;
  std::string spec_path;
  std::optional<double> p;
  std::string params;  // JSON object text
};

void add_state_input(CLI::App* app, StateInput& in) {
  app->add_option("--family", in.family,
                  "bell, bell-diagonal, werner, random-ginibre, random-pure (see README for params)");
  app->add_option("--matrix", in.matrix_path, "Density matrix JSON file {\"dims\",\"re\",\"im\"}");
  app->add_option("--spec", in.spec_path, "State specification JSON file {\"family\",\"params\",\"seed\"}");
  app->add_option("--p", in.p, "Werner mixing parameter");
  app->add_option("--params", in.params, "Family parameters as a JSON object, e.g. '{\"p\":[0.4,0.3,0.2,0.1]}'");
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qdm::Error(qdm::ErrorKind::ParseError, "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw qdm::Error(qdm::ErrorKind::ParseError, path + ": " + e.what());
  }
}

qdm::StateSpec resolve_spec(const StateInput& in, std::uint64_t seed) {
  const int sources = !in.family.empty() + !in.matrix_path.empty() + !in.spec_path.empty();
  if (sources != 1) throw qdm::Error(qdm::ErrorKind::InvalidParams, "give exactly one of --family, --matrix, --spec");
  if (!in.matrix_path.empty())
    return qdm::StateSpec{qdm::family::Custom{qdm::io::density_from_json(read_json_file(in.matrix_path))}};
  json doc;
  if (!in.spec_path.empty()) {
    doc = read_json_file(in.spec_path);
  } else {
    doc["family"] = in.family;
    json params = json::object();
    if (!in.params.empty()) {
      try {
        params = json::parse(in.params);
      } catch (const json::exception& e) {
        throw qdm::Error(qdm::ErrorKind::ParseError, std::string("--params: ") + e.what());
      }
    }
    if (in.p) params["p"] = *in.p;
    doc["params"] = std::move(params);
  }
  if (!doc.contains("seed")) doc["seed"] = seed;
  return qdm::io::state_spec_from_json(doc);
}

std::string fmt12(double x) {
  if (x == 0.0) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// ---------------------------------------------------------------------------

struct ComputeFlags {
  bool all = false;
  bool discord = false;
  bool ledger = false;
  bool kappa = false;
  bool json_out = false;
  bool csv_out = false;
  bool no_timing = false;
};

struct Computed {
  qdm::DensityMatrix state;
  qdm::DiscordResult discord;
  qdm::MergeLedger ledger;
  qdm::PurityReport purity;
};

Computed compute_all(const qdm::DensityMatrix& rho, const qdm::OptimizerConfig& cfg) {
  qdm::DiscordResult d = qdm::discord(rho, cfg);
  qdm::MergeLedger l = qdm::merge_markup(rho, d.best_measurement);
  qdm::PurityReport p = qdm::local_purity_rate(rho, d);
  return Computed{rho, std::move(d), std::move(l), p};
}

const char* csv_header = "param,I,J,D,S_A_given_B,markup,kappa,status";

std::string csv_row(const std::string& param, const Computed& c) {
  return param + "," + fmt12(c.discord.mutual_info.value) + "," + fmt12(c.discord.classical_corr.value) + "," +
         fmt12(c.discord.discord.value) + "," + fmt12(c.ledger.cost_before.value) + "," +
         fmt12(c.ledger.markup.value) + "," + fmt12(c.purity.kappa) + "," +
         (c.discord.converged ? "ok" : "not-converged");
}

int run_compute(const StateInput& in, const ComputeFlags& flags, const CommonOptions& common) {
  const auto t0 = std::chrono::steady_clock::now();
  const qdm::OptimizerConfig cfg = common.config();
  const qdm::StateSpec spec = resolve_spec(in, common.resolved_seed());
  const qdm::DensityMatrix rho = qdm::make(spec);
  qdm::require_bipartite(rho);

  const Computed c = compute_all(rho, cfg);
  const bool pick_any = flags.discord || flags.ledger || flags.kappa;
  const bool want_discord = flags.all || !pick_any || flags.discord;
  const bool want_ledger = flags.all || !pick_any || flags.ledger;
  const bool want_kappa = flags.all || !pick_any || flags.kappa;

  if (flags.csv_out) {
    std::cout << csv_header << "\n" << csv_row(std::string(qdm::to_string(spec.family())), c) << "\n";
    return c.discord.converged ? exit_ok : exit_not_converged;
  }

  json results = json::object();
  if (want_discord) results["discord"] = qdm::io::to_json(c.discord, common.verbose);
  if (want_ledger) results["merge_ledger"] = qdm::io::to_json(c.ledger);
  if (want_kappa) results["local_purity"] = qdm::io::to_json(c.purity);
  if (want_discord)
    results["quantum_deficit"] = json{{"value", c.discord.discord.value},
                                      {"note", "taken equal to discord; the two coincide asymptotically, "
                                               "no independent finite-copy deficit is computed"}};

  json caveats = json::array();
  if (c.purity.regularization_caveat)
    caveats.push_back("single-copy discord reported; the regularized (many-copy) value may be smaller");
  else
    caveats.push_back("single-copy discord equals its regularization for " +
                      std::string(qdm::to_string(c.purity.state_class)) + " states");
  if (rho.dims()[1] > 2)
    caveats.push_back("measurement search over projective measurements on d_B > 2 gives a lower bound on J");
  if (!c.discord.converged) caveats.push_back("optimizer did not converge within max_iter; results are partial");

  json env;
  env["schema"] = qdm::io::schema_version;
  env["tool_version"] = QDM_VERSION;
  env["input_spec"] = qdm::io::to_json(spec);
  env["state_class"] = std::string(qdm::to_string(c.purity.state_class));
  env["rng"] = qdm::SplitMix64::description;
  env["results"] = std::move(results);
  env["caveats"] = std::move(caveats);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  env["timing_ms"] = flags.no_timing ? 0.0 : ms;
  if (!qdm::io::all_finite(env)) throw std::runtime_error("report contains non-finite numbers");
  std::cout << env.dump(2) << "\n";
  return c.discord.converged ? exit_ok : exit_not_converged;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  std::string param;
  double from = 0.0;
  double to = 1.0;
  int steps = 11;
  std::string values;
};

std::vector<double> sweep_values(const SweepOptions& o) {
  std::vector<double> v;
  if (!o.values.empty()) {
    std::stringstream ss(o.values);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
  }
  if (o.steps < 1) throw qdm::Error(qdm::ErrorKind::InvalidParams, "--steps must be >= 1");
  for (int i = 0; i < o.steps; ++i)
    v.push_back(o.steps == 1 ? o.from : o.from + (o.to - o.from) * static_cast<double>(i) / (o.steps - 1));
  return v;
}

int run_sweep(const StateInput& in, const SweepOptions& so, const CommonOptions& common) {
  const qdm::OptimizerConfig cfg = common.config();
  const std::vector<double> values = sweep_values(so);

  json base = json::object();
  if (!in.params.empty()) base = json::parse(in.params);
  std::function<qdm::StateSpec(double)> spec_at;
  if (in.family == "werner") {
    spec_at = [](double p) { return qdm::StateSpec{qdm::family::Werner{p}}; };
  } else if (in.family == "bell-diagonal") {
    // Straight line between two points of the simplex, parameter t in [0, 1].
    const auto a = base.value("from", std::array<double, 4>{1, 0, 0, 0});
    const auto b = base.value("to", std::array<double, 4>{0, 1, 0, 0});
    spec_at = [a, b](double t) {
      qdm::family::BellDiagonal f;
      for (std::size_t k = 0; k < 4; ++k) f.p[k] = (1.0 - t) * a[k] + t * b[k];
      return qdm::StateSpec{f};
    };
  } else {
    throw qdm::Error(qdm::ErrorKind::InvalidParams, "sweep supports --family werner or bell-diagonal");
  }

  const auto rows = qdm::parallel_map<std::string>(static_cast<int>(values.size()), [&](int i) {
    const std::string label = fmt12(values[static_cast<std::size_t>(i)]);
    try {
      const qdm::DensityMatrix rho = qdm::make(spec_at(values[static_cast<std::size_t>(i)]));
      return csv_row(label, compute_all(rho, cfg));
    } catch (const qdm::Error& e) {
      return label + ",,,,,,," + std::string(qdm::to_string(e.kind()));
    }
  });
  std::cout << csv_header << "\n";
  bool all_ok = true;
  for (const auto& r : rows) {
    std::cout << r << "\n";
    if (!r.ends_with(",ok")) all_ok = false;
  }
  return all_ok ? exit_ok : exit_not_converged;
}

// ---------------------------------------------------------------------------

int run_verify_cmd(const std::string& suite, int n, const CommonOptions& common) {
  const qdm::OptimizerConfig cfg = common.config();
  const auto reports = qdm::run_verify(suite, n, common.resolved_seed(), cfg);
  std::cout << qdm::format_report(reports);
  for (const auto& r : reports)
    if (!r.ok()) return exit_verify_failed;
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum discord and state-merging markup calculator"};
  app.set_version_flag("--version", QDM_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  StateInput input;

  ComputeFlags cflags;
  auto* compute = app.add_subcommand("compute", "Discord, merging ledger and local purity rate for one state");
  add_state_input(compute, input);
  add_common(compute, common);
  compute->add_flag("--all", cflags.all, "Report every quantity (default when no subset is chosen)");
  compute->add_flag("--discord", cflags.discord, "Report I, J, D");
  compute->add_flag("--ledger", cflags.ledger, "Report the merging ledger");
  compute->add_flag("--kappa", cflags.kappa, "Report the local purity rate");
  compute->add_flag("--json", cflags.json_out, "JSON envelope output (default)");
  compute->add_flag("--csv", cflags.csv_out, "Single CSV row output");
  compute->add_flag("--no-timing", cflags.no_timing, "Write timing_ms as 0 for byte-stable output");

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "CSV rows over a one-parameter state family");
  add_state_input(sweep, input);
  add_common(sweep, common);
  sweep->add_option("--param", sweep_opts.param, "Swept parameter name (p for werner, t for bell-diagonal)");
  sweep->add_option("--from", sweep_opts.from, "First parameter value");
  sweep->add_option("--to", sweep_opts.to, "Last parameter value");
  sweep->add_option("--steps", sweep_opts.steps, "Number of evenly spaced values");
  sweep->add_option("--values", sweep_opts.values, "Explicit comma-separated values (overrides range)");
  sweep->add_flag("--csv", "CSV output (the only sweep format)");

  std::string suite = "all";
  int n = 100;
  auto* verify = app.add_subcommand("verify", "Randomized invariant suites");
  verify->add_option("suite", suite, "ssa, markup, bounds, purestate, zerodiscord or all")
      ->check(CLI::IsMember({"ssa", "markup", "bounds", "purestate", "zerodiscord", "all"}));
  verify->add_option("-n", n, "Instances per suite")->check(CLI::PositiveNumber);
  add_common(verify, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests are successes; every other parse failure is invalid input.
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_invalid;
  }

  try {
    if (*compute) return run_compute(input, cflags, common);
    if (*sweep) return run_sweep(input, sweep_opts, common);
    return run_verify_cmd(suite, n, common);
  } catch (const qdm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invalid;
  }
}
