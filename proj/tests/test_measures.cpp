#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace qdm;
using namespace fixtures;

namespace {

PurityReport kappa_of(const DensityMatrix& rho) { return local_purity_rate(rho, discord(rho, default_cfg())); }

}  // namespace

TEST(LocalPurity, Examples) {
  const auto zz = tensor(basis_state(2, 0), basis_state(2, 0));
  EXPECT_NEAR(kappa_of(zz).kappa, 2.0, 1e-6);
  EXPECT_NEAR(kappa_of(maximally_mixed({2, 2})).kappa, 0.0, 1e-6);
  EXPECT_NEAR(kappa_of(bell()).kappa, 1.0, 1e-6);
}

TEST(LocalPurity, FormulaAndBound) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto rho = ginibre(s);
    const auto r = kappa_of(rho);
    EXPECT_NEAR(r.kappa, r.log_dim - r.joint_entropy.value - r.discord_used.value, 1e-9);
    EXPECT_LE(r.kappa, r.log_dim + 1e-9);
    EXPECT_DOUBLE_EQ(r.log_dim, 2.0);
  }
}

TEST(LocalPurity, ReproducibleFromSameResult) {
  const auto rho = ginibre(6);
  const auto d = discord(rho, default_cfg());
  EXPECT_EQ(local_purity_rate(rho, d).kappa, local_purity_rate(rho, d).kappa);
}

TEST(LocalPurity, ZeroDiscordStates) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto rho = make(StateSpec{random_classical_quantum(2, 2, s)});
    EXPECT_NEAR(kappa_of(rho).kappa, 2.0 - von_neumann_entropy(rho).value, 1e-5);
  }
}

TEST(LocalPurity, CaveatFlag) {
  EXPECT_FALSE(kappa_of(bell()).regularization_caveat);
  EXPECT_EQ(kappa_of(bell()).state_class, SingleCopyClass::Pure);
  EXPECT_EQ(kappa_of(werner(0.5)).state_class, SingleCopyClass::BellDiagonal);
  EXPECT_EQ(kappa_of(tensor(ginibre(1, {2}), ginibre(2, {2}))).state_class, SingleCopyClass::Separable);
  // Entangled, not Bell-diagonal, not pure.
  Matrix m = 0.9 * bell().data() + 0.1 * tensor(basis_state(2, 0), basis_state(2, 1)).data();
  const auto r = kappa_of(DensityMatrix::validate(m, {2, 2}));
  EXPECT_EQ(r.state_class, SingleCopyClass::General);
  EXPECT_TRUE(r.regularization_caveat);
}

TEST(LocalPurity, MismatchedResult) {
  const auto d = discord(bell(), default_cfg());
  try {
    local_purity_rate(pure(1, {2, 3}), d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StateResultMismatch);
  }
}

TEST(PureEntanglement, Examples) {
  Vector zz = Vector::Zero(4);
  zz(0) = 1;
  EXPECT_NEAR(pure_state_entanglement(PureState::validate(zz, {2, 2})).value, 0.0, 1e-12);
  EXPECT_NEAR(pure_state_entanglement(PureState::validate(bell_vector(0), {2, 2})).value, 1.0, 1e-12);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto psi = random_pure_state({2, 2}, s);
    EXPECT_NEAR(pure_state_entanglement(psi).value, discord(psi.density(), default_cfg()).discord.value, 1e-5);
  }
}

TEST(PureEntanglement, RejectsMixed) {
  try {
    pure_state_entanglement(werner(0.9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPure);
  }
  EXPECT_NEAR(pure_state_entanglement(bell()).value, 1.0, 1e-12);
}
