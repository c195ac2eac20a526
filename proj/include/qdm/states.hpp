#ifndef QDM_STATES_HPP
#define QDM_STATES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qdm/core.hpp"
#include "qdm/random.hpp"

namespace qdm {

enum class Family { Bell, BellDiagonal, Werner, Product, ClassicalQuantum, RandomGinibre, RandomPure, Custom };

constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::Bell: return "bell";
    case Family::BellDiagonal: return "bell-diagonal";
    case Family::Werner: return "werner";
    case Family::Product: return "product";
    case Family::ClassicalQuantum: return "classical-quantum";
    case Family::RandomGinibre: return "random-ginibre";
    case Family::RandomPure: return "random-pure";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

namespace family {

/// index: 0 = Phi+, 1 = Phi-, 2 = Psi+, 3 = Psi-.
struct Bell {
  int index = 0;
};
/// Weights on (Phi+, Phi-, Psi+, Psi-).
struct BellDiagonal {
  std::array<double, 4> p{0.25, 0.25, 0.25, 0.25};
};
/// p Phi+ + (1 - p) I/4.
struct Werner {
  double p = 0.0;
};
struct Product {
  DensityMatrix a;
  DensityMatrix b;
};
/// sum_i q_i rho_{A|i} (x) |b_i><b_i|, b_i the columns of `basis`.
struct ClassicalQuantum {
  std::vector<double> q;
  std::vector<DensityMatrix> conditionals;
  Matrix basis;
};
/// G G^dagger / tr(G G^dagger), G a d x rank complex Gaussian matrix. rank 0 means full rank.
struct RandomGinibre {
  Dims dims{2, 2};
  int rank = 0;
  std::uint64_t seed = 0;
};
struct RandomPure {
  Dims dims{2, 2};
  std::uint64_t seed = 0;
};
struct Custom {
  DensityMatrix state;
};

}  // namespace family

struct StateSpec {
  std::variant<family::Bell, family::BellDiagonal, family::Werner, family::Product, family::ClassicalQuantum,
               family::RandomGinibre, family::RandomPure, family::Custom>
      params;

  Family family() const { return static_cast<Family>(params.index()); }
  bool is_random() const { return family() == Family::RandomGinibre || family() == Family::RandomPure; }
};

/// Bell basis vectors in the fixed order (Phi+, Phi-, Psi+, Psi-).
inline Vector bell_vector(int index) {
  if (index < 0 || index > 3) throw Error(ErrorKind::InvalidParams, "Bell index must be in 0..3");
  const double r = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (index) {
    case 0: v(0) = r; v(3) = r; break;
    case 1: v(0) = r; v(3) = -r; break;
    case 2: v(1) = r; v(2) = r; break;
    default: v(1) = r; v(2) = -r; break;
  }
  return v;
}

inline Matrix ginibre_matrix(int rows, int cols, SplitMix64& rng) {
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = cplx(rng.normal(), rng.normal());
  return g;
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
inline Matrix random_unitary(int d, SplitMix64& rng) {
  const Matrix g = ginibre_matrix(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const cplx rk = r(k, k);
    const double a = std::abs(rk);
    if (a > 0.0) q.col(k) *= rk / a;
  }
  return q;
}

inline PureState random_pure_state(Dims dims, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int d = product(dims);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(rng.normal(), rng.normal());
  return PureState::normalized(std::move(v), std::move(dims));
}

inline DensityMatrix random_ginibre_state(Dims dims, int rank, std::uint64_t seed) {
  const int d = product(dims);
  if (rank == 0) rank = d;
  if (rank < 1 || rank > d) throw Error(ErrorKind::InvalidParams, "Ginibre rank must be in 1..d");
  SplitMix64 rng(seed);
  const Matrix g = ginibre_matrix(d, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix::assume_valid(std::move(rho), std::move(dims));
}

namespace detail {

inline void check_simplex(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0)
      throw Error(ErrorKind::InvalidParams, std::string(what) + ": weights must be finite and nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidParams, std::string(what) + ": weights must sum to 1", std::abs(sum - 1.0));
}

}  // namespace detail

inline DensityMatrix make(const StateSpec& spec) {
  return std::visit(
      [](const auto& f) -> DensityMatrix {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Bell>) {
          const Vector v = bell_vector(f.index);
          return DensityMatrix::assume_valid(v * v.adjoint(), {2, 2});
        } else if constexpr (std::is_same_v<T, family::BellDiagonal>) {
          detail::check_simplex(f.p, "bell-diagonal");
          Matrix rho = Matrix::Zero(4, 4);
          for (int k = 0; k < 4; ++k) {
            const Vector v = bell_vector(k);
            rho += f.p[static_cast<std::size_t>(k)] * v * v.adjoint();
          }
          return DensityMatrix::assume_valid(std::move(rho), {2, 2});
        } else if constexpr (std::is_same_v<T, family::Werner>) {
          if (!(f.p >= 0.0 && f.p <= 1.0)) throw Error(ErrorKind::InvalidParams, "werner: p must lie in [0, 1]");
          const Vector v = bell_vector(0);
          Matrix rho = f.p * (v * v.adjoint()) + (1.0 - f.p) * Matrix::Identity(4, 4) / 4.0;
          return DensityMatrix::assume_valid(std::move(rho), {2, 2});
        } else if constexpr (std::is_same_v<T, family::Product>) {
          return tensor(f.a, f.b);
        } else if constexpr (std::is_same_v<T, family::ClassicalQuantum>) {
          detail::check_simplex(f.q, "classical-quantum");
          if (f.q.size() != f.conditionals.size() || f.q.empty())
            throw Error(ErrorKind::InvalidParams, "classical-quantum: need one conditional state per weight");
          const int db = static_cast<int>(f.basis.rows());
          if (f.basis.cols() != db || static_cast<int>(f.q.size()) > db)
            throw Error(ErrorKind::InvalidParams, "classical-quantum: basis must be square with at least one column per weight");
          const double ures = detail::unitary_residual(f.basis);
          if (ures > 1e-9) throw Error(ErrorKind::InvalidParams, "classical-quantum: basis is not orthonormal", ures);
          const int da = f.conditionals.front().dim();
          Matrix rho = Matrix::Zero(da * db, da * db);
          for (std::size_t i = 0; i < f.q.size(); ++i) {
            if (f.conditionals[i].dim() != da)
              throw Error(ErrorKind::InvalidParams, "classical-quantum: conditional states differ in dimension");
            const Matrix proj = f.basis.col(static_cast<Eigen::Index>(i)) * f.basis.col(static_cast<Eigen::Index>(i)).adjoint();
            rho += f.q[i] * kron(f.conditionals[i].data(), proj);
          }
          return DensityMatrix::assume_valid(0.5 * (rho + rho.adjoint()), {da, db});
        } else if constexpr (std::is_same_v<T, family::RandomGinibre>) {
          return random_ginibre_state(f.dims, f.rank, f.seed);
        } else if constexpr (std::is_same_v<T, family::RandomPure>) {
          return random_pure_state(f.dims, f.seed).density();
        } else {
          return f.state;
        }
      },
      spec.params);
}

/// Item i uses seed root_seed + i.
inline std::vector<DensityMatrix> sample_batch(StateSpec spec, int n, std::uint64_t root_seed) {
  if (n < 1) throw Error(ErrorKind::InvalidParams, "batch size must be >= 1");
  if (!spec.is_random()) throw Error(ErrorKind::InvalidParams, "sample_batch needs a random family");
  std::vector<DensityMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::visit(
        [&](auto& f) {
          if constexpr (requires { f.seed; }) f.seed = root_seed + static_cast<std::uint64_t>(i);
        },
        spec.params);
    out.push_back(make(spec));
  }
  return out;
}

/// A zero-discord state: random weights, random conditional states on A,
/// random orthonormal basis on B.
inline family::ClassicalQuantum random_classical_quantum(int da, int db, std::uint64_t seed) {
  SplitMix64 rng(seed);
  family::ClassicalQuantum cq;
  double total = 0.0;
  for (int i = 0; i < db; ++i) {
    cq.q.push_back(-std::log(1.0 - rng.uniform()));  // exponential draws give a uniform simplex point
    total += cq.q.back();
  }
  for (auto& x : cq.q) x /= total;
  for (int i = 0; i < db; ++i) cq.conditionals.push_back(random_ginibre_state({da}, 0, rng.next()));
  cq.basis = random_unitary(db, rng);
  return cq;
}

}  // namespace qdm

#endif  // QDM_STATES_HPP
