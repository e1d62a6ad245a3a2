#ifndef DECLAB_STATES_HPP
#define DECLAB_STATES_HPP

// The state space: density operators, the Bloch-ball parameterization of
// qubit states, pure-state decompositions and their non-uniqueness, and the
// unique point-mass decomposition of classical distributions.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "declab/error.hpp"
#include "declab/operators.hpp"

namespace declab {

inline constexpr double kStateTolerance = 1e-10;

/// Eigenvalues below this threshold are dropped from pure-state decompositions.
inline constexpr double kDropEigenvalue = 1e-12;

/// Hermitian, positive semidefinite, unit trace (each within 1e-10).
/// The stored matrix is exactly Hermitian after construction.
class DensityOperator {
 public:
  explicit DensityOperator(const ComplexMatrix& m) : matrix_(validated(m)) {}

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  static DensityOperator maximally_mixed(Eigen::Index n) {
    return DensityOperator(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
  }

  /// Projector onto span{psi}; psi need not be normalized.
  static DensityOperator pure(const ComplexVector& psi) {
    const double n2 = psi.squaredNorm();
    if (!(n2 > 0.0)) throw Error(ErrorCode::NotAState, "pure state from a zero vector");
    return DensityOperator(psi * psi.adjoint() / n2);
  }

 private:
  static ComplexMatrix validated(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
      throw Error(ErrorCode::NotAState, "density operator must be a non-empty square matrix");
    if (!all_finite(m)) throw Error(ErrorCode::NotAState, "density operator has non-finite entries");
    if (m.rows() > kMaxDimension)
      throw Error(ErrorCode::DimensionTooLarge, "density operator dimension exceeds limit");
    if (!is_hermitian(m, kStateTolerance))
      throw Error(ErrorCode::NotAState, "density operator is not Hermitian");
    ComplexMatrix h = (m + m.adjoint()) * 0.5;
    const double tr = h.trace().real();
    if (std::abs(tr - 1.0) > kStateTolerance)
      throw Error(ErrorCode::NotAState, "density operator trace is " + std::to_string(tr));
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (min_eig < -kStateTolerance)
      throw Error(ErrorCode::NotAState, "density operator has eigenvalue " + std::to_string(min_eig));
    return h;
  }

  ComplexMatrix matrix_;
};

/// Polarization vector p in the closed unit ball.
class BlochVector {
 public:
  BlochVector() = default;
  BlochVector(double x, double y, double z) : BlochVector(Eigen::Vector3d(x, y, z)) {}
  explicit BlochVector(const Eigen::Vector3d& p) : p_(p) {
    if (!p.allFinite()) throw Error(ErrorCode::OutsideBall, "Bloch vector has non-finite entries");
    if (p.norm() > 1.0 + 1e-12)
      throw Error(ErrorCode::OutsideBall, "Bloch vector length " + std::to_string(p.norm()) + " > 1");
  }

  const Eigen::Vector3d& vec() const noexcept { return p_; }
  double norm() const { return p_.norm(); }

 private:
  Eigen::Vector3d p_ = Eigen::Vector3d::Zero();
};

struct PureStateDecomposition {
  std::vector<double> weights;
  std::vector<DensityOperator> projectors;

  ComplexMatrix reconstruct() const {
    ComplexMatrix acc = ComplexMatrix::Zero(projectors.front().dim(), projectors.front().dim());
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * projectors[i].matrix();
    return acc;
  }
};

class ClassicalDistribution {
 public:
  explicit ClassicalDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
    if (p_.empty()) throw Error(ErrorCode::BadWeights, "empty distribution");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0)) throw Error(ErrorCode::BadWeights, "negative or non-finite probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw Error(ErrorCode::BadWeights, "probabilities sum to " + std::to_string(sum));
  }

  std::span<const double> probabilities() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

struct ClassicalDecomposition {
  std::vector<double> weights;
  std::vector<std::size_t> vertex_indices;
};

/// rho(p) = (1 + sigma.p) / 2.
inline DensityOperator bloch_to_density(const BlochVector& p) {
  const Eigen::Vector3d& v = p.vec();
  ComplexMatrix m = 0.5 * (pauli::identity() + v.x() * pauli::x() + v.y() * pauli::y() + v.z() * pauli::z());
  return DensityOperator(m);
}

/// Unchecked variant for vectors already known to lie in the ball.
inline ComplexMatrix bloch_matrix(const Eigen::Vector3d& v) {
  return 0.5 * (pauli::identity() + v.x() * pauli::x() + v.y() * pauli::y() + v.z() * pauli::z());
}

/// p_i = tr(rho sigma_i).
inline BlochVector density_to_bloch(const DensityOperator& rho) {
  if (rho.dim() != 2)
    throw Error(ErrorCode::DimensionMismatch,
                "density_to_bloch needs a 2x2 state, got dimension " + std::to_string(rho.dim()));
  const ComplexMatrix& m = rho.matrix();
  // Hermitian m: tr(m sigma_x) = 2 Re m01, tr(m sigma_y) = -2 Im m01.
  const double px = 2.0 * m(0, 1).real();
  const double py = -2.0 * m(0, 1).imag();
  const double pz = (m(0, 0) - m(1, 1)).real();
  Eigen::Vector3d p(px, py, pz);
  // PSD 2x2 states have |p| <= 1 up to the state tolerance; pull back roundoff overshoot.
  const double n = p.norm();
  if (n > 1.0 && n <= 1.0 + 1e-9) p /= n;
  return BlochVector(p);
}

inline double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::DimensionMismatch, "trace_distance between dimensions " +
                                                  std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  return trace_norm(a.matrix() - b.matrix());
}

/// Eigen-decomposition of W as a mixture of its eigenprojectors (weights descending).
inline PureStateDecomposition spectral_decomposition(const DensityOperator& w) {
  const HermitianEig eig = hermitian_eig(w.matrix());
  PureStateDecomposition out;
  for (Eigen::Index j = 0; j < eig.eigenvalues.size(); ++j) {
    if (eig.eigenvalues(j) < kDropEigenvalue) continue;
    out.weights.push_back(eig.eigenvalues(j));
    out.projectors.push_back(DensityOperator::pure(eig.eigenvectors.col(j)));
  }
  return out;
}

/// Decomposition built from psi_i = sum_j U_ij sqrt(lambda_j) phi_j over the
/// spectral data of W. Any unitary U with at least rank(W) rows yields a valid
/// mixture; U = identity gives back the spectral decomposition.
inline PureStateDecomposition alternate_decomposition(const DensityOperator& w, const ComplexMatrix& u) {
  if (u.rows() != u.cols() || u.rows() == 0)
    throw Error(ErrorCode::NotUnitary, "unitary parameter must be square");
  if (!is_unitary(u)) throw Error(ErrorCode::NotUnitary, "parameter fails ||U^dagger U - I||_2 <= 1e-10");

  const HermitianEig eig = hermitian_eig(w.matrix());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < eig.eigenvalues.size(); ++j)
    if (eig.eigenvalues(j) >= kDropEigenvalue) kept.push_back(j);
  const auto rank = static_cast<Eigen::Index>(kept.size());
  if (u.rows() < rank)
    throw Error(ErrorCode::DimensionMismatch, "unitary has " + std::to_string(u.rows()) +
                                                  " rows, state rank is " + std::to_string(rank));

  // Columns: sqrt(lambda_j) phi_j for the retained eigenpairs.
  ComplexMatrix scaled(w.dim(), rank);
  for (Eigen::Index c = 0; c < rank; ++c)
    scaled.col(c) = std::sqrt(eig.eigenvalues(kept[static_cast<std::size_t>(c)])) *
                    eig.eigenvectors.col(kept[static_cast<std::size_t>(c)]);

  PureStateDecomposition out;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    ComplexVector psi = scaled * u.row(i).head(rank).transpose();
    const double weight = psi.squaredNorm();
    if (weight < kDropEigenvalue) continue;
    out.weights.push_back(weight);
    out.projectors.push_back(DensityOperator::pure(psi));
  }
  return out;
}

inline DensityOperator mix(std::span<const DensityOperator> states, std::span<const double> weights) {
  if (states.empty() || states.size() != weights.size())
    throw Error(ErrorCode::BadWeights, "mix needs one weight per state");
  double sum = 0.0;
  for (double v : weights) {
    if (!(v >= 0.0)) throw Error(ErrorCode::BadWeights, "negative or non-finite weight");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStateTolerance)
    throw Error(ErrorCode::BadWeights, "weights sum to " + std::to_string(sum));
  const Eigen::Index n = states.front().dim();
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != n)
      throw Error(ErrorCode::DimensionMismatch, "mix over states of different dimension");
    acc += weights[i] * states[i].matrix();
  }
  return DensityOperator(acc);
}

/// A distribution on a finite set is a unique mixture of point masses.
inline ClassicalDecomposition classical_decompose(const ClassicalDistribution& d) {
  ClassicalDecomposition out;
  const auto p = d.probabilities();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    out.weights.push_back(p[i]);
    out.vertex_indices.push_back(i);
  }
  return out;
}

/// Second-largest eigenvalue below 1e-10.
inline bool is_rank_one(const DensityOperator& rho) {
  if (rho.dim() == 1) return true;
  const RealVector ev =
      Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rho.matrix(), Eigen::EigenvaluesOnly).eigenvalues();
  return ev(ev.size() - 2) < kStateTolerance;
}

}  // namespace declab

#endif  // DECLAB_STATES_HPP
