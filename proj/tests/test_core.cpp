#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace qdm;
using namespace fixtures;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

}  // namespace

TEST(Validate, MaximallyMixedQubit) {
  const auto rho = DensityMatrix::validate(Matrix::Identity(2, 2) / 2.0, {2});
  EXPECT_NEAR(rho.purity(), 0.5, 1e-15);
}

TEST(Validate, PlusProjector) {
  const auto rho = DensityMatrix::validate(mat2(0.5, 0.5, 0.5, 0.5), {2});
  EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
}

TEST(Validate, TraceNotOneCarriesResidual) {
  try {
    DensityMatrix::validate(mat2(1, 0, 0, 0.1), {2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TraceNotOne);
    EXPECT_NEAR(e.residual(), 0.1, 1e-12);
  }
}

TEST(Validate, ErrorKinds) {
  EXPECT_EQ(kind_of([] { DensityMatrix::validate(mat2(0.5, 0.1, 0.2, 0.5), {2}); }), ErrorKind::NotHermitian);
  EXPECT_EQ(kind_of([] { DensityMatrix::validate(mat2(1.5, 0, 0, -0.5), {2}); }), ErrorKind::NotPositive);
  EXPECT_EQ(kind_of([] { DensityMatrix::validate(Matrix::Identity(4, 4) / 4.0, {2, 3}); }),
            ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([] { DensityMatrix::validate(Matrix::Zero(2, 3), {2}); }), ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([] { partial_trace(bell(), {2}); }), ErrorKind::BadSubsystemIndex);
  EXPECT_EQ(kind_of([] { apply_unitary(bell(), mat2(1, 1, 0, 1), {0}); }), ErrorKind::NotUnitary);
  EXPECT_EQ(kind_of([] { apply_unitary(bell(), Matrix::Identity(4, 4), {0}); }), ErrorKind::DimensionMismatch);
}

TEST(Validate, ErrorMessageNamesKind) {
  try {
    DensityMatrix::validate(mat2(1, 0, 0, 0.1), {2});
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("TraceNotOne", 0), 0u);
  }
}

TEST(Tensor, MixedTimesMixed) {
  const auto r = tensor(maximally_mixed({2}), maximally_mixed({2}));
  EXPECT_EQ(r.dims(), (Dims{2, 2}));
  EXPECT_LT(max_diff(r.data(), Matrix::Identity(4, 4) / 4.0), 1e-15);
}

TEST(Tensor, ZeroZero) {
  const auto r = tensor(basis_state(2, 0), basis_state(2, 0));
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 1;
  EXPECT_LT(max_diff(r.data(), expect), 1e-15);
}

TEST(Tensor, RoundTripThroughPartialTrace) {
  const auto rho = ginibre(3, {2});
  const auto back = partial_trace(tensor(rho, basis_state(2, 0)), {0});
  EXPECT_LT(max_diff(back.data(), rho.data()), 1e-14);
}

TEST(PartialTrace, BellMarginal) {
  EXPECT_LT(max_diff(partial_trace(bell(), {0}).data(), Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, ProductMarginals) {
  const auto a = ginibre(1, {2});
  const auto b = ginibre(2, {3});
  const auto ab = tensor(a, b);
  EXPECT_LT(max_diff(partial_trace(ab, {0}).data(), a.data()), 1e-14);
  EXPECT_LT(max_diff(partial_trace(ab, {1}).data(), b.data()), 1e-14);
}

TEST(PartialTrace, ComposesAndPreservesTraceAndPositivity) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto rho = ginibre(s, {2, 3, 2});
    const auto direct = partial_trace(rho, {0});
    const auto staged = partial_trace(partial_trace(rho, {0, 1}), {0});
    EXPECT_LT(max_diff(direct.data(), staged.data()), 1e-13);
    EXPECT_NEAR(direct.data().trace().real(), 1.0, 1e-12);
    EXPECT_GE(direct.eigenvalues().minCoeff(), -1e-12);
    // Non-adjacent keep set.
    const auto ac = partial_trace(rho, {0, 2});
    EXPECT_EQ(ac.dims(), (Dims{2, 2}));
    EXPECT_LT(max_diff(partial_trace(ac, {0}).data(), direct.data()), 1e-13);
  }
}

TEST(PartialTrace, KeepOrderIsSorted) {
  const auto rho = ginibre(9, {2, 3});
  EXPECT_LT(max_diff(partial_trace(rho, {1, 0}).data(), rho.data()), 1e-15);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(von_neumann_entropy(maximally_mixed({2})).value, 1.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(bell()).value, 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(pure(5)).value, 0.0, 1e-10);
  EXPECT_NEAR(von_neumann_entropy(maximally_mixed({2, 2})).value, 2.0, 1e-12);
}

TEST(Entropy, ShannonBits) {
  EXPECT_NEAR(shannon_bits(std::vector<double>{0.5, 0.5}), 1.0, 1e-15);
  EXPECT_NEAR(shannon_bits(std::vector<double>{1.0, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(shannon_bits(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 2.0, 1e-15);
}

TEST(Entropy, UnitaryInvariance) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    SplitMix64 rng(1000 + s);
    const auto rho = ginibre(s);
    const Matrix u = random_unitary(4, rng);
    const auto moved = apply_unitary(rho, u, {0, 1});
    EXPECT_NEAR(von_neumann_entropy(moved).value, von_neumann_entropy(rho).value, 1e-9);
  }
}

TEST(Entropy, Subadditivity) {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto rho = ginibre(s);
    EXPECT_LE(von_neumann_entropy(rho).value,
              subsystem_entropy(rho, {0}).value + subsystem_entropy(rho, {1}).value + 1e-9);
  }
}

TEST(Purify, PureInputKeepsTrivialReference) {
  const auto rho = pure(11);
  const PureState psi = purify(rho);
  EXPECT_EQ(psi.dims(), (Dims{2, 2, 1}));
  EXPECT_LT(max_diff(partial_trace(psi.density(), {0, 1}).data(), rho.data()), 1e-9);
}

TEST(Purify, MixedQubitGivesMaximallyEntangled) {
  const PureState psi = purify(maximally_mixed({2}));
  EXPECT_EQ(psi.dims(), (Dims{2, 2}));
  // Schmidt coefficients sqrt(1/2): both marginals maximally mixed.
  EXPECT_NEAR(subsystem_entropy(psi.density(), {1}).value, 1.0, 1e-12);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-14);
}

TEST(Purify, RankThree) {
  const auto rho = ginibre(21, {4}, 3);
  const PureState psi = purify(rho);
  EXPECT_EQ(psi.dims(), (Dims{4, 3}));
  EXPECT_LT(max_diff(partial_trace(psi.density(), {0}).data(), rho.data()), 1e-9);
}

TEST(Purify, RandomRoundTrips) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto rho = ginibre(s, {2, 2}, 1 + static_cast<int>(s % 4));
    const PureState psi = purify(rho);
    EXPECT_EQ(psi.dims().back(), 1 + static_cast<int>(s % 4));
    EXPECT_LT(max_diff(partial_trace(psi.density(), {0, 1}).data(), rho.data()), 1e-9);
  }
}

TEST(ApplyUnitary, IdentityLeavesStateUnchanged) {
  const auto rho = ginibre(4);
  EXPECT_LT(max_diff(apply_unitary(rho, Matrix::Identity(2, 2), {1}).data(), rho.data()), 1e-15);
}

TEST(ApplyUnitary, SwapExchangesFactors) {
  const auto a = ginibre(1, {2});
  const auto b = ginibre(2, {2});
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
  EXPECT_LT(max_diff(apply_unitary(tensor(a, b), swap, {0, 1}).data(), tensor(b, a).data()), 1e-15);
}

TEST(ApplyUnitary, LocalUnitaryOnMiddleFactor) {
  SplitMix64 rng(77);
  const Matrix u = random_unitary(3, rng);
  const auto rho = ginibre(8, {2, 3, 2});
  const Matrix full = kron(kron(Matrix::Identity(2, 2), u), Matrix::Identity(2, 2));
  const Matrix expect = full * rho.data() * full.adjoint();
  EXPECT_LT(max_diff(apply_unitary(rho, u, {1}).data(), expect), 1e-13);
}

TEST(Helpers, PermuteSubsystems) {
  const auto a = ginibre(1, {2});
  const auto b = ginibre(2, {3});
  const std::vector<int> perm{1, 0};
  const auto p = permute_subsystems(tensor(a, b), perm);
  EXPECT_EQ(p.dims(), (Dims{3, 2}));
  EXPECT_LT(max_diff(p.data(), tensor(b, a).data()), 1e-15);
}

TEST(Helpers, DephaseKillsCoherence) {
  const auto d = dephase(bell(), 1);
  EXPECT_LT(max_diff(d.data(), classically_correlated().data()), 1e-15);
}

TEST(Helpers, BitsArithmetic) {
  const Bits a{1.5}, b{0.5};
  EXPECT_DOUBLE_EQ((a - b).value, 1.0);
  EXPECT_DOUBLE_EQ((a + b).value, 2.0);
  EXPECT_DOUBLE_EQ((-a).value, -1.5);
  EXPECT_TRUE(b < a);
}
