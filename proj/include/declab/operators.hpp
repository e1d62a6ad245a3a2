#ifndef DECLAB_OPERATORS_HPP
#define DECLAB_OPERATORS_HPP

// Dense complex linear algebra used throughout the library: Hermitian
// eigendecomposition, unitary propagators, Schatten norms, Kronecker products
// and the partial trace over the environment factor.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "declab/error.hpp"

namespace declab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest matrix dimension any operation in the library accepts.
inline constexpr Eigen::Index kMaxDimension = 1024;

/// Relative tolerance for Hermiticity checks (Hilbert-Schmidt norm).
inline constexpr double kHermitianTolerance = 1e-10;

/// Relative eigenvalue gap below which eigenvalues count as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-10;

struct HermitianEig {
  RealVector eigenvalues;      // descending
  ComplexMatrix eigenvectors;  // columns, unitary
};

struct SchattenNorms {
  double op_norm = 0.0;
  double hs_norm = 0.0;
  double trace_norm = 0.0;
};

inline double hs_norm(const ComplexMatrix& a) { return a.norm(); }

inline bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

inline void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be a non-empty square matrix, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  if (a.rows() > kMaxDimension)
    throw Error(ErrorCode::DimensionTooLarge,
                std::string(what) + " dimension " + std::to_string(a.rows()) +
                    " exceeds " + std::to_string(kMaxDimension));
  if (!all_finite(a)) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

inline bool is_hermitian(const ComplexMatrix& a, double rel_tol = kHermitianTolerance) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= rel_tol * std::max(a.norm(), 1e-300);
}

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-10) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

/// Checks Hermiticity within the relative tolerance and returns (A + A^dagger)/2.
inline ComplexMatrix symmetrized(const ComplexMatrix& a, const char* what = "matrix") {
  require_square(a, what);
  if (!is_hermitian(a))
    throw Error(ErrorCode::NotHermitian,
                std::string(what) + " is not Hermitian: ||A - A^dagger||_2 = " +
                    std::to_string((a - a.adjoint()).norm()));
  return (a + a.adjoint()) * 0.5;
}

namespace detail {

// Index of the first component with non-negligible magnitude.
inline Eigen::Index leading_index(const ComplexVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-10) return i;
  return v.size();
}

// Rotate the global phase so the leading component is real positive.
inline void fix_phase(Eigen::Ref<ComplexVector> v) {
  const Eigen::Index k = leading_index(v);
  if (k == v.size()) return;
  const Complex phase = v(k) / std::abs(v(k));
  v /= phase;
  v(k) = Complex(std::abs(v(k)), 0.0);
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix with eigenvalues in descending
/// order. Eigenvectors are phase-fixed (leading component real positive) and,
/// inside a degenerate group, ordered by descending magnitude of their leading
/// component, ties broken by the position of that component.
inline HermitianEig hermitian_eig(const ComplexMatrix& m) {
  const ComplexMatrix h = symmetrized(m, "hermitian_eig input");
  const Eigen::Index n = h.rows();

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::ConvergenceFailure, "self-adjoint eigensolver did not converge");

  const RealVector& ascending = solver.eigenvalues();
  const ComplexMatrix& vecs = solver.eigenvectors();

  HermitianEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues(j) = ascending(n - 1 - j);
    out.eigenvectors.col(j) = vecs.col(n - 1 - j);
    detail::fix_phase(out.eigenvectors.col(j));
  }

  const double scale = std::max(h.norm(), 1e-300);
  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && out.eigenvalues(end - 1) - out.eigenvalues(end) < kDegeneracyTolerance * scale)
      ++end;
    if (end - begin > 1) {
      std::vector<Eigen::Index> order(static_cast<std::size_t>(end - begin));
      std::iota(order.begin(), order.end(), begin);
      auto key = [&](Eigen::Index j) {
        const ComplexVector& v = out.eigenvectors.col(j);
        const Eigen::Index k = detail::leading_index(v);
        return std::pair<double, Eigen::Index>(k < n ? std::abs(v(k)) : 0.0, k);
      };
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        const auto kx = key(x);
        const auto ky = key(y);
        if (std::abs(kx.first - ky.first) > 1e-12) return kx.first > ky.first;
        return kx.second < ky.second;
      });
      ComplexMatrix block(n, end - begin);
      RealVector vals(end - begin);
      for (std::size_t i = 0; i < order.size(); ++i) {
        block.col(static_cast<Eigen::Index>(i)) = out.eigenvectors.col(order[i]);
        vals(static_cast<Eigen::Index>(i)) = out.eigenvalues(order[i]);
      }
      out.eigenvectors.middleCols(begin, end - begin) = block;
      out.eigenvalues.segment(begin, end - begin) = vals;
    }
    begin = end;
  }
  return out;
}

/// U diag(f(lambda)) U^dagger for a spectral decomposition.
template <typename F>
ComplexMatrix spectral_apply(const HermitianEig& eig, F&& f) {
  const Eigen::Index n = eig.eigenvalues.size();
  ComplexVector diag(n);
  for (Eigen::Index j = 0; j < n; ++j) diag(j) = f(eig.eigenvalues(j));
  return eig.eigenvectors * diag.asDiagonal() * eig.eigenvectors.adjoint();
}

/// exp(-i H t) computed through the eigendecomposition of H.
inline ComplexMatrix propagator(const ComplexMatrix& h, double t) {
  const HermitianEig eig = hermitian_eig(h);
  return spectral_apply(eig, [t](double e) { return std::exp(Complex(0.0, -e * t)); });
}

inline SchattenNorms schatten_norms(const ComplexMatrix& a) {
  require_square(a, "schatten_norms input");
  const RealVector s = Eigen::BDCSVD<ComplexMatrix>(a).singularValues();
  SchattenNorms out;
  out.op_norm = s.size() > 0 ? s.maxCoeff() : 0.0;
  out.hs_norm = s.norm();
  out.trace_norm = s.sum();
  return out;
}

inline double trace_norm(const ComplexMatrix& a) { return schatten_norms(a).trace_norm; }

/// Kronecker product A (x) B, system factor first.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxDimension || cols > kMaxDimension)
    throw Error(ErrorCode::DimensionTooLarge,
                "tensor product dimension " + std::to_string(std::max(rows, cols)) + " exceeds " +
                    std::to_string(kMaxDimension));
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// tr_E W for W acting on C^dim_s (x) C^dim_e.
inline ComplexMatrix partial_trace_env(const ComplexMatrix& w, Eigen::Index dim_s, Eigen::Index dim_e) {
  if (dim_s <= 0 || dim_e <= 0 || w.rows() != w.cols() || w.rows() != dim_s * dim_e)
    throw Error(ErrorCode::DimensionMismatch,
                "partial_trace_env: matrix is " + std::to_string(w.rows()) + "x" +
                    std::to_string(w.cols()) + ", expected square of size " +
                    std::to_string(dim_s) + "*" + std::to_string(dim_e));
  ComplexMatrix rho = ComplexMatrix::Zero(dim_s, dim_s);
  for (Eigen::Index i = 0; i < dim_s; ++i)
    for (Eigen::Index j = 0; j < dim_s; ++j) {
      Complex acc(0.0, 0.0);
      for (Eigen::Index k = 0; k < dim_e; ++k) acc += w(i * dim_e + k, j * dim_e + k);
      rho(i, j) = acc;
    }
  return rho;
}

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace pauli

}  // namespace declab

#endif  // DECLAB_OPERATORS_HPP
