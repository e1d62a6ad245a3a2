#ifndef DECLAB_RANDOM_HPP
#define DECLAB_RANDOM_HPP

// Seeded generators for random test and demo inputs: Haar unitaries, Hermitian
// matrices, density operators, Bloch vectors and sector splits.

#include <cmath>
#include <cstdint>
#include <random>

#include "declab/operators.hpp"

namespace declab {

using Rng = std::mt19937_64;

inline ComplexMatrix random_ginibre(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// phases of R's diagonal folded back into Q.
inline ComplexMatrix haar_unitary(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = random_ginibre(rng, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = random_ginibre(rng, n);
  return (g + g.adjoint()) * 0.5;
}

/// Hilbert-Schmidt-ensemble density matrix of dimension n.
inline ComplexMatrix random_density_matrix(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = random_ginibre(rng, n);
  ComplexMatrix w = g * g.adjoint();
  w /= w.trace().real();
  return (w + w.adjoint()) * 0.5;
}

/// Uniform point in the closed unit ball.
inline Eigen::Vector3d random_ball_point(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Eigen::Vector3d p(u(rng), u(rng), u(rng));
    if (p.squaredNorm() <= 1.0) return p;
  }
}

inline Eigen::Vector3d random_unit_vector(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Eigen::Vector3d p(gauss(rng), gauss(rng), gauss(rng));
    const double n = p.norm();
    if (n > 1e-8) return p / n;
  }
}

}  // namespace declab

#endif  // DECLAB_RANDOM_HPP
