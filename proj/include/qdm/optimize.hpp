#ifndef QDM_OPTIMIZE_HPP
#define QDM_OPTIMIZE_HPP

// Search over measurements on B: coarse grid, then Nelder-Mead refinement
// from the best grid cells, best objective wins.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "qdm/core.hpp"
#include "qdm/measurement.hpp"
#include "qdm/random.hpp"

namespace qdm {

struct OptimizerConfig {
  int grid_theta = 24;
  int grid_phi = 48;
  /// Simplex restarts per start point, each with a smaller initial simplex.
  int refinements = 3;
  int multistarts = 8;
  double tol_obj = 1e-7;
  int max_iter = 500;
  unsigned seed = 0;
  /// Also search rank-1 POVMs. The result is reported next to the projective one.
  bool povm = false;
  /// POVM outcome count; 0 means d_B^2.
  int povm_outcomes = 0;

  void validate() const {
    if (grid_theta < 2 || grid_phi < 2) throw Error(ErrorKind::InvalidParams, "grid counts must be >= 2");
    if (!(tol_obj > 0.0)) throw Error(ErrorKind::InvalidParams, "tol_obj must be positive");
    if (refinements < 1) throw Error(ErrorKind::InvalidParams, "refinements must be >= 1");
    if (multistarts < 1) throw Error(ErrorKind::InvalidParams, "multistarts must be >= 1");
    if (max_iter < 1) throw Error(ErrorKind::InvalidParams, "max_iter must be >= 1");
    if (povm_outcomes < 0) throw Error(ErrorKind::InvalidParams, "povm_outcomes must be >= 0");
  }
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization. Stops when the vertex values agree within `ftol`
/// and the simplex has collapsed below `xtol`, or after `max_iter` iterations;
/// in the latter case `converged` reports whether the spread is within `tol_obj`.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                 const std::vector<double>& step, int max_iter, double tol_obj,
                                 double ftol = 1e-13, double xtol = 1e-7) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = std::move(pts[order[i]]);
      v2[i] = vals[order[i]];
    }
    pts = std::move(p2);
    vals = std::move(v2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) d = std::max(d, std::abs(pts[i][k] - pts[0][k]));
    return d;
  };
  auto along = [&](const std::vector<double>& c, double t) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + t * (pts[n][k] - c[k]);
    return x;
  };

  int it = 0;
  sort_simplex();
  for (; it < max_iter; ++it) {
    if (vals[n] - vals[0] <= ftol && diameter() <= xtol) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);

    const auto xr = along(centroid, -1.0);
    const double fr = f(xr);
    if (fr < vals[0]) {
      const auto xe = along(centroid, -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const bool outside = fr < vals[n];
      const auto xc = along(centroid, outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc <= (outside ? fr : vals[n])) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
          vals[i] = f(pts[i]);
        }
      }
    }
    sort_simplex();
  }
  SimplexResult r;
  r.x = pts[0];
  r.value = vals[0];
  r.iterations = it;
  r.converged = it < max_iter || (vals[n] - vals[0]) <= tol_obj;
  return r;
}

struct TracePoint {
  std::vector<double> params;
  double objective = 0.0;
};

struct MeasurementOptimum {
  Measurement measurement;
  double value = 0.0;  // minimized objective
  bool converged = true;
  std::vector<TracePoint> trace;
};

namespace detail {

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

/// Maps Bloch angles to theta in [0, pi/2], phi in [0, 2 pi). Antipodal directions
/// describe the same measurement up to outcome order.
inline std::vector<double> canonical_qubit_params(double theta, double phi) {
  constexpr double pi = std::numbers::pi;
  theta = wrap_angle(theta);
  if (theta > pi) {
    theta = 2.0 * pi - theta;
    phi += pi;
  }
  if (theta > pi / 2.0) {
    theta = pi - theta;
    phi += pi;
  }
  phi = wrap_angle(phi);
  if (theta == 0.0) phi = 0.0;
  return {theta, phi};
}

/// Objective wrapper that maps invalid parameter points to +inf.
template <typename Build>
double guarded(const std::function<double(const Measurement&)>& objective, Build build) {
  try {
    return objective(build());
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct Start {
  std::vector<double> x;
  double value;
};

inline std::vector<Start> best_starts(std::vector<Start> cand, int k) {
  std::stable_sort(cand.begin(), cand.end(), [](const Start& a, const Start& b) { return a.value < b.value; });
  if (static_cast<int>(cand.size()) > k) cand.resize(static_cast<std::size_t>(k));
  return cand;
}

}  // namespace detail

/// Minimizes `objective` over measurements on a subsystem of dimension `db`.
/// Qubits use Bloch angles on a grid; larger subsystems use Givens angles from
/// seeded random samples. With `povm`, rank-1 POVMs are searched instead,
/// seeded from `povm_seed` when given.
inline MeasurementOptimum optimize_measurement(int db, const std::function<double(const Measurement&)>& objective,
                                               const OptimizerConfig& cfg, bool povm = false,
                                               const Measurement* povm_seed = nullptr) {
  cfg.validate();
  constexpr double pi = std::numbers::pi;
  SplitMix64 rng(cfg.seed);

  std::function<Measurement(const std::vector<double>&)> build;
  std::function<std::vector<double>(std::vector<double>)> canonical = [](std::vector<double> x) { return x; };
  std::vector<detail::Start> candidates;
  double cell = 0.5;
  int max_iter = cfg.max_iter;

  if (povm) {
    const int n = cfg.povm_outcomes > 0 ? cfg.povm_outcomes : db * db;
    if (n < db) throw Error(ErrorKind::InvalidParams, "POVM needs at least d_B outcomes");
    build = [db, n](const std::vector<double>& x) { return rank1_povm(x, db, n); };
    const int np = 2 * db * n;
    max_iter = cfg.max_iter * std::max(1, np / 2);
    auto eval = [&](const std::vector<double>& x) {
      return detail::guarded(objective, [&] { return build(x); });
    };
    if (povm_seed != nullptr) {
      // Projective optimum padded with small extra vectors.
      std::vector<double> x(static_cast<std::size_t>(np), 0.0);
      for (int i = 0; i < n; ++i)
        for (int a = 0; a < db; ++a) {
          cplx v = 0.0;
          if (i < povm_seed->outcomes()) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(povm_seed->elements()[i]);
            v = es.eigenvectors()(a, db - 1) * std::sqrt(std::max(0.0, es.eigenvalues()(db - 1)));
          } else {
            v = cplx(1e-3 * rng.normal(), 1e-3 * rng.normal());
          }
          x[2 * (i * db + a)] = v.real();
          x[2 * (i * db + a) + 1] = v.imag();
        }
      candidates.push_back({x, eval(x)});
    }
    const int samples = cfg.grid_theta * cfg.grid_phi;
    for (int s = 0; s < samples; ++s) {
      std::vector<double> x(static_cast<std::size_t>(np));
      for (auto& v : x) v = rng.normal();
      candidates.push_back({x, eval(x)});
    }
  } else if (db == 2) {
    build = [](const std::vector<double>& x) { return projective_qubit(x[0], x[1]); };
    canonical = [](std::vector<double> x) { return detail::canonical_qubit_params(x[0], x[1]); };
    // Upper hemisphere suffices: antipodes give the same measurement.
    const double dt = (pi / 2.0) / cfg.grid_theta;
    const double dp = 2.0 * pi / cfg.grid_phi;
    cell = std::min(dt, dp);
    for (int i = 0; i < cfg.grid_theta; ++i)
      for (int j = 0; j < cfg.grid_phi; ++j) {
        std::vector<double> x{(i + 0.5) * dt, j * dp};
        candidates.push_back({x, detail::guarded(objective, [&] { return build(x); })});
      }
  } else {
    const int np = givens_param_count(db);
    build = [db](const std::vector<double>& x) { return projective_givens(x, db); };
    canonical = [](std::vector<double> x) {
      for (auto& v : x) v = detail::wrap_angle(v);
      return x;
    };
    std::vector<double> zero(static_cast<std::size_t>(np), 0.0);
    candidates.push_back({zero, detail::guarded(objective, [&] { return build(zero); })});
    const int samples = cfg.grid_theta * cfg.grid_phi;
    for (int s = 0; s < samples; ++s) {
      std::vector<double> x(static_cast<std::size_t>(np));
      for (auto& v : x) v = 2.0 * pi * rng.uniform();
      candidates.push_back({x, detail::guarded(objective, [&] { return build(x); })});
    }
  }

  const auto starts = detail::best_starts(std::move(candidates), cfg.multistarts);
  std::function<double(const std::vector<double>&)> f = [&](const std::vector<double>& x) {
    return detail::guarded(objective, [&] { return build(x); });
  };

  std::vector<TracePoint> trace;
  std::vector<SimplexResult> finals;
  for (const auto& s : starts) {
    trace.push_back({s.x, s.value});
    SimplexResult r{s.x, s.value, 0, true};
    double scale = 0.5 * cell;
    bool converged = true;
    for (int k = 0; k < cfg.refinements; ++k) {
      std::vector<double> step(r.x.size(), scale);
      SimplexResult next = nelder_mead(f, r.x, step, max_iter, cfg.tol_obj);
      converged = next.converged;
      if (next.value <= r.value) r = std::move(next);
      scale *= 0.1;
    }
    r.converged = converged;
    r.x = canonical(r.x);
    trace.push_back({r.x, r.value});
    finals.push_back(std::move(r));
  }

  // Best objective wins; ties within tol_obj go to the lexicographically smallest parameters.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : finals) best = std::min(best, r.value);
  const SimplexResult* pick = nullptr;
  for (const auto& r : finals) {
    if (r.value > best + cfg.tol_obj) continue;
    if (pick == nullptr || std::lexicographical_compare(r.x.begin(), r.x.end(), pick->x.begin(), pick->x.end()))
      pick = &r;
  }
  Measurement m = build(pick->x);
  return MeasurementOptimum{std::move(m), pick->value, pick->converged, std::move(trace)};
}

}  // namespace qdm

#endif  // QDM_OPTIMIZE_HPP
