#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "declab/operators.hpp"
#include "declab/random.hpp"
#include "oracles.hpp"

using namespace declab;

namespace {

ComplexMatrix diag(std::initializer_list<Complex> values) {
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (auto x : values) v(i++) = x;
  return v.asDiagonal();
}

}  // namespace

TEST(HermitianEig, DiagonalInputSortedDescending) {
  const HermitianEig eig = hermitian_eig(diag({1.0, 2.0}));
  EXPECT_DOUBLE_EQ(eig.eigenvalues(0), 2.0);
  EXPECT_DOUBLE_EQ(eig.eigenvalues(1), 1.0);
  EXPECT_NEAR(std::abs(eig.eigenvectors(1, 0)), 1.0, 1e-15);
}

TEST(HermitianEig, PauliX) {
  const HermitianEig eig = hermitian_eig(pauli::x());
  EXPECT_NEAR(eig.eigenvalues(0), 1.0, 1e-15);
  EXPECT_NEAR(eig.eigenvalues(1), -1.0, 1e-15);
  // Leading components are real positive after phase fixing.
  EXPECT_NEAR(eig.eigenvectors(0, 0).imag(), 0.0, 1e-15);
  EXPECT_GT(eig.eigenvectors(0, 0).real(), 0.0);
}

TEST(HermitianEig, ReconstructionRandomUpTo64) {
  Rng rng(11);
  for (Eigen::Index n : {1, 2, 3, 8, 17, 32, 64}) {
    const ComplexMatrix m = random_hermitian(rng, n);
    const HermitianEig eig = hermitian_eig(m);
    const ComplexMatrix rebuilt = spectral_apply(eig, [](double e) { return Complex(e, 0.0); });
    EXPECT_LT((rebuilt - m).norm(), 1e-12 * m.norm()) << "n=" << n;
    EXPECT_LT((eig.eigenvectors.adjoint() * eig.eigenvectors - ComplexMatrix::Identity(n, n)).norm(), 1e-12);
    for (Eigen::Index j = 1; j < n; ++j) EXPECT_GE(eig.eigenvalues(j - 1), eig.eigenvalues(j));
  }
}

TEST(HermitianEig, DegenerateGroupIsDeterministic) {
  // Identity has one fully degenerate group: the canonical order is e_0, e_1, e_2.
  const HermitianEig eig = hermitian_eig(ComplexMatrix::Identity(3, 3));
  EXPECT_LT((eig.eigenvectors - ComplexMatrix::Identity(3, 3)).norm(), 1e-14);

  // Rotate a degenerate diagonal matrix by a fixed unitary; two runs agree bitwise.
  Rng rng(5);
  const ComplexMatrix u = haar_unitary(rng, 4);
  const ComplexMatrix m = u * diag({2.0, 2.0, -1.0, 0.5}) * u.adjoint();
  const HermitianEig a = hermitian_eig(m);
  const HermitianEig b = hermitian_eig(m);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
  for (Eigen::Index j = 0; j < 4; ++j) {
    const ComplexVector v = a.eigenvectors.col(j);
    Eigen::Index k = 0;
    while (std::abs(v(k)) <= 1e-10) ++k;
    EXPECT_GT(v(k).real(), 0.0);
    EXPECT_NEAR(v(k).imag(), 0.0, 1e-14);
  }
  const double lead0 = std::abs(a.eigenvectors(0, 0));
  const double lead1 = std::abs(a.eigenvectors(0, 1));
  EXPECT_GE(lead0 + 1e-12, lead1);
}

TEST(HermitianEig, RejectsNonHermitian) {
  ComplexMatrix m(2, 2);
  m << 1, 2, 0, 1;
  try {
    hermitian_eig(m);
    FAIL() << "expected NotHermitian";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(HermitianEig, SymmetrizesWithinTolerance) {
  ComplexMatrix m = pauli::x();
  m(0, 1) += Complex(1e-13, 0.0);
  EXPECT_NO_THROW(hermitian_eig(m));
}

TEST(HermitianEig, RejectsNonFiniteAndNonSquare) {
  ComplexMatrix m = pauli::z();
  m(0, 0) = std::nan("");
  try {
    hermitian_eig(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
  EXPECT_THROW(hermitian_eig(ComplexMatrix::Zero(2, 3)), Error);
}

TEST(Propagator, ZeroTimeIsIdentity) {
  Rng rng(3);
  const ComplexMatrix h = random_hermitian(rng, 5);
  EXPECT_LT((propagator(h, 0.0) - ComplexMatrix::Identity(5, 5)).norm(), 1e-14);
}

TEST(Propagator, PauliZQuarterTurn) {
  const ComplexMatrix u = propagator(pauli::z(), std::numbers::pi / 2);
  EXPECT_NEAR(std::abs(u(0, 0) - Complex(0, -1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(0, 1)), 0.0, 1e-15);
}

TEST(Propagator, UnitaryAndMatchesSeriesExponential) {
  Rng rng(7);
  for (Eigen::Index n : {2, 4, 9, 16}) {
    const ComplexMatrix h = random_hermitian(rng, n);
    const ComplexMatrix u = propagator(h, 1.3);
    EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm(), 1e-12);
    const ComplexMatrix ref = oracle::expm_series(Complex(0.0, -1.3) * h);
    EXPECT_LT((u - ref).norm(), 1e-11) << "n=" << n;
  }
}

TEST(Propagator, GroupProperty) {
  Rng rng(8);
  std::uniform_real_distribution<double> ut(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const ComplexMatrix h = random_hermitian(rng, n);
    const double t = ut(rng);
    const double s = ut(rng);
    EXPECT_LT((propagator(h, t) * propagator(h, s) - propagator(h, t + s)).norm(), 1e-11);
  }
}

TEST(SchattenNorms, DiagonalCase) {
  const SchattenNorms n = schatten_norms(diag({3.0, -4.0}));
  EXPECT_NEAR(n.op_norm, 4.0, 1e-14);
  EXPECT_NEAR(n.hs_norm, 5.0, 1e-14);
  EXPECT_NEAR(n.trace_norm, 7.0, 1e-14);
}

TEST(SchattenNorms, RankOneProjector) {
  ComplexVector psi(3);
  psi << Complex(1, 1), 2.0, Complex(0, -1);
  psi.normalize();
  const SchattenNorms n = schatten_norms(psi * psi.adjoint());
  EXPECT_NEAR(n.op_norm, 1.0, 1e-14);
  EXPECT_NEAR(n.hs_norm, 1.0, 1e-14);
  EXPECT_NEAR(n.trace_norm, 1.0, 1e-14);
}

TEST(SchattenNorms, OrderingAndGramOracle) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix a = random_hermitian(rng, 16);
    const SchattenNorms n = schatten_norms(a);
    EXPECT_LE(n.op_norm, n.hs_norm);
    EXPECT_LE(n.hs_norm, n.trace_norm);
    const Eigen::VectorXd s = oracle::singular_values_via_gram(a);
    EXPECT_NEAR(n.trace_norm, s.sum(), 1e-9);
    EXPECT_NEAR(n.op_norm, s.maxCoeff(), 1e-9);
    EXPECT_NEAR(n.hs_norm, a.norm(), 1e-11);
  }
}

TEST(TensorProduct, Identities) {
  EXPECT_EQ(tensor_product(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)),
            ComplexMatrix(ComplexMatrix::Identity(6, 6)));
  const ComplexMatrix k = tensor_product(pauli::z(), diag({0.3, -1.7}));
  EXPECT_EQ(k, diag({0.3, -1.7, -0.3, 1.7}));
}

TEST(TensorProduct, MixedProduct) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_ginibre(rng, 2), b = random_ginibre(rng, 2);
    const ComplexMatrix c = random_ginibre(rng, 2), d = random_ginibre(rng, 2);
    const ComplexMatrix lhs = tensor_product(a, b) * tensor_product(c, d);
    const ComplexMatrix rhs = tensor_product(a * c, b * d);
    EXPECT_LT((lhs - rhs).norm(), 1e-13);
  }
}

TEST(TensorProduct, TooLarge) {
  try {
    tensor_product(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(513, 513));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionTooLarge);
  }
}

TEST(PartialTrace, FactorizedState) {
  Rng rng(19);
  const ComplexMatrix rho = random_density_matrix(rng, 3);
  const ComplexMatrix omega = random_density_matrix(rng, 4);
  EXPECT_LT((partial_trace_env(tensor_product(rho, omega), 3, 4) - rho).norm(), 1e-14);
}

TEST(PartialTrace, MaximallyEntangled) {
  ComplexVector psi = ComplexVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const ComplexMatrix rho = partial_trace_env(psi * psi.adjoint(), 2, 2);
  EXPECT_LT((rho - 0.5 * ComplexMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(PartialTrace, DefiningPropertyAndTrace) {
  Rng rng(23);
  const Eigen::Index ds = 3, de = 5;
  const ComplexMatrix w = random_density_matrix(rng, ds * de);
  const ComplexMatrix rho = partial_trace_env(w, ds, de);
  EXPECT_NEAR(std::abs(rho.trace() - w.trace()), 0.0, 1e-12);
  for (int k = 0; k < 10; ++k) {
    const ComplexMatrix a = random_ginibre(rng, ds);
    const Complex lhs = (rho * a).trace();
    const Complex rhs = (w * tensor_product(a, ComplexMatrix::Identity(de, de))).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  }
}

TEST(PartialTrace, DimensionMismatch) {
  try {
    partial_trace_env(ComplexMatrix::Identity(6, 6), 4, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}
