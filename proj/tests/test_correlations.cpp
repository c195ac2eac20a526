#include <gtest/gtest.h>

#include "oracle/bloch_grid_oracle.hpp"
#include "test_support.hpp"

using namespace qdm;
using namespace fixtures;

namespace {

oracle::Mat4 to_oracle(const DensityMatrix& rho) {
  oracle::Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = rho.data()(i, j);
  return m;
}

DensityMatrix swap_sides(const DensityMatrix& rho) {
  const std::vector<int> perm{1, 0};
  return permute_subsystems(rho, perm);
}

Vector plus() {
  Vector v(2);
  v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  return v;
}
Vector zero() {
  Vector v = Vector::Zero(2);
  v(0) = 1;
  return v;
}
Vector one() {
  Vector v = Vector::Zero(2);
  v(1) = 1;
  return v;
}

DensityMatrix mix(const Vector& a0, const Vector& b0, const Vector& a1, const Vector& b1) {
  const Vector k0 = kron(a0, b0), k1 = kron(a1, b1);
  return DensityMatrix::assume_valid(0.5 * (k0 * k0.adjoint() + k1 * k1.adjoint()), {2, 2});
}

}  // namespace

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(mutual_information(tensor(ginibre(1, {2}), ginibre(2, {2}))).value, 0.0, 1e-12);
  EXPECT_NEAR(mutual_information(bell()).value, 2.0, 1e-12);
  EXPECT_NEAR(mutual_information(classically_correlated()).value, 1.0, 1e-12);
}

TEST(ClassicalCorrelation, Examples) {
  EXPECT_NEAR(classical_correlation(bell(), default_cfg()).value.value, 1.0, 1e-9);
  EXPECT_NEAR(classical_correlation(tensor(ginibre(1, {2}), ginibre(2, {2})), default_cfg()).value.value, 0.0, 1e-9);
}

TEST(ClassicalCorrelation, WernerHalfMatchesDenseGrid) {
  const auto rho = werner(0.5);
  const double grid = oracle::max_j(to_oracle(rho)).j;
  EXPECT_NEAR(classical_correlation(rho, default_cfg()).value.value, grid, 1e-4);
}

TEST(ClassicalCorrelation, RandomStatesNeverBelowDenseGrid) {
  // The optimizer refines continuously, so it should reach the grid maximum or beat it slightly.
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto rho = ginibre(500 + s);
    const double grid = oracle::max_j(to_oracle(rho), 120, 240).j;
    const double j = classical_correlation(rho, default_cfg()).value.value;
    EXPECT_GE(j, grid - 1e-9) << "seed " << 500 + s;
    EXPECT_LE(j, grid + 1e-3) << "seed " << 500 + s;
  }
}

TEST(ClassicalCorrelation, DeterministicGivenSeed) {
  const auto rho = ginibre(3);
  const auto a = classical_correlation(rho, default_cfg());
  const auto b = classical_correlation(rho, default_cfg());
  EXPECT_EQ(a.value.value, b.value.value);
  EXPECT_EQ(a.measurement.params(), b.measurement.params());
}

TEST(Discord, Examples) {
  const auto d = discord(bell(), default_cfg());
  EXPECT_NEAR(d.discord.value, 1.0, 1e-9);
  EXPECT_NEAR(d.mutual_info.value - d.classical_corr.value, d.discord.value, 1e-12);
  EXPECT_LE(d.markup_check, 1e-6);
  for (std::uint64_t s = 0; s < 10; ++s)
    EXPECT_LE(discord(make(StateSpec{random_classical_quantum(2, 2, s)}), default_cfg()).discord.value, 1e-5);
}

TEST(Discord, WernerHalfAgainstDenseGrid) {
  const auto rho = werner(0.5);
  const double expect = mutual_information(rho).value - oracle::max_j(to_oracle(rho)).j;
  EXPECT_NEAR(discord(rho, default_cfg()).discord.value, expect, 1e-4);
}

TEST(Discord, BoundsAndMarkupCheck) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto rho = ginibre(s);
    const auto d = discord(rho, default_cfg());
    EXPECT_GE(d.discord.value, -1e-7);
    EXPECT_LE(d.discord.value, subsystem_entropy(rho, {1}).value + 1e-7);
    EXPECT_LE(d.markup_check, 1e-6);
    EXPECT_TRUE(d.converged);
  }
}

TEST(Discord, PureStateReducesToEntanglement) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto rho = pure(s);
    EXPECT_NEAR(discord(rho, default_cfg()).discord.value, subsystem_entropy(rho, {0}).value, 1e-5);
  }
}

TEST(Discord, QutritMeasuredSideUsesGivensSearch) {
  // Pure 2x3: J = S(A) via the Schmidt basis; classical-quantum 2x3: zero discord.
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto rho = pure(s, {2, 3});
    EXPECT_NEAR(discord(rho, default_cfg()).discord.value, subsystem_entropy(rho, {0}).value, 1e-5);
    const auto cq = make(StateSpec{random_classical_quantum(2, 3, s)});
    EXPECT_LE(discord(cq, default_cfg()).discord.value, 1e-5);
  }
}

TEST(Discord, PovmOptionIsReportedAndConsistent) {
  OptimizerConfig cfg;
  cfg.povm = true;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto rho = ginibre(s);
    const auto d = discord(rho, cfg);
    ASSERT_TRUE(d.povm_classical_corr.has_value());
    ASSERT_TRUE(d.povm_measurement.has_value());
    EXPECT_EQ(d.povm_measurement->kind(), MeasurementKind::POVM);
    EXPECT_GE(d.povm_classical_corr->value, d.classical_corr.value - 1e-6);
    EXPECT_LE(d.povm_classical_corr->value, subsystem_entropy(rho, {0}).value + 1e-9);
  }
  EXPECT_FALSE(discord(bell(), default_cfg()).povm_classical_corr.has_value());
}

TEST(DiscordViaMarkup, Examples) {
  EXPECT_NEAR(discord_via_markup(bell(), default_cfg()).value.value, 1.0, 1e-9);
  EXPECT_NEAR(discord_via_markup(tensor(ginibre(1, {2}), ginibre(2, {2})), default_cfg()).value.value, 0.0, 1e-9);
}

TEST(DiscordViaMarkup, AgreesWithDefinition) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto rho = ginibre(2000 + s);
    EXPECT_NEAR(discord_via_markup(rho, default_cfg()).value.value, discord(rho, default_cfg()).discord.value, 1e-6);
  }
}

TEST(ZeroDiscord, ClassicalQuantumWitnessIsConstructionBasis) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto cq = random_classical_quantum(2, 2, s);
    const auto z = is_zero_discord(make(StateSpec{cq}));
    ASSERT_TRUE(z.zero_discord) << "seed " << s;
    // Same basis up to phases and order: |<w_i|b_j>| is a permutation matrix.
    const Matrix overlap = z.witness.adjoint() * cq.basis;
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(overlap.row(i).cwiseAbs().maxCoeff(), 1.0, 1e-6);
  }
}

TEST(ZeroDiscord, DegenerateMarginal) {
  auto cq = random_classical_quantum(2, 2, 7);
  cq.q = {0.5, 0.5};
  const auto z = is_zero_discord(make(StateSpec{cq}));
  EXPECT_TRUE(z.zero_discord);
  EXPECT_TRUE(z.degenerate);
  EXPECT_TRUE(is_zero_discord(tensor(ginibre(1, {2}), maximally_mixed({2}))).zero_discord);
}

TEST(ZeroDiscord, QutritClassicalQuantum) {
  for (std::uint64_t s = 0; s < 20; ++s)
    EXPECT_TRUE(is_zero_discord(make(StateSpec{random_classical_quantum(2, 3, s)})).zero_discord);
}

TEST(ZeroDiscord, BellIsNotClassical) { EXPECT_FALSE(is_zero_discord(bell()).zero_discord); }

TEST(ZeroDiscord, NonorthogonalComponents) {
  const auto rho = mix(zero(), zero(), plus(), plus());
  EXPECT_FALSE(is_zero_discord(rho).zero_discord);
  EXPECT_GT(discord(rho, default_cfg()).discord.value, 1e-3);
}

TEST(ZeroDiscord, AsymmetryWitness) {
  // Classical on B, nonorthogonal on A.
  const auto rho = mix(zero(), zero(), plus(), one());
  EXPECT_LE(discord(rho, default_cfg()).discord.value, 1e-5);
  EXPECT_GT(discord(swap_sides(rho), default_cfg()).discord.value, 0.01);
}
