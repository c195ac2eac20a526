#ifndef QDM_RANDOM_HPP
#define QDM_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qdm {

/// SplitMix64: a counter-based 64-bit generator. Stream k of seed s is
/// mix(mix(s) + (k + 1) * golden). Gaussian deviates use Box-Muller, so a
/// stream is reproducible wherever std::log, std::sqrt and std::cos agree.
class SplitMix64 {
 public:
  static constexpr const char* description = "splitmix64 counter stream, box-muller normals";

  explicit SplitMix64(std::uint64_t seed) : state_(mix(seed)) {}

  std::uint64_t next() {
    state_ += golden;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qdm

#endif  // QDM_RANDOM_HPP
