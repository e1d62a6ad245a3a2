#ifndef DECLAB_MODELS_HPP
#define DECLAB_MODELS_HPP

// Exactly solvable system + environment models with a coupling V_S (x) V_E:
//
//  * the dephasing model, where H_S commutes with V_S = sum_m lambda_m P_m and
//    the reduced state keeps its sector blocks while the coherence between
//    sectors m, n is multiplied by chi((lambda_m - lambda_n) t);
//  * the spin-1/2 model h(x) = a.sigma + lambda x sigma_3 over a continuous
//    position variable x, whose reduced Bloch vector is an x-average of
//    rotations and approaches M p for a symmetric contraction M;
//  * a brute-force oracle that assembles the joint Hamiltonian on a discretized
//    environment, exponentiates it and traces out the environment.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "declab/error.hpp"
#include "declab/operators.hpp"
#include "declab/quadrature.hpp"
#include "declab/spectral_density.hpp"
#include "declab/states.hpp"
#include "declab/superselection.hpp"

namespace declab {

// ---------------------------------------------------------------------------
// Dephasing (Araki-Zurek) model

struct ArakiZurekModel {
  SectorStructure sectors;
  std::vector<double> lambdas;  // eigenvalue of V_S on each sector
  ComplexMatrix h_s;
  SpectralDensity env;
  double delta = 0.0;  // lower bound on |lambda_m - lambda_n|, m != n

  Eigen::Index dim() const { return h_s.rows(); }

  /// V_S = sum_m lambda_m P_m.
  ComplexMatrix v_s() const {
    ComplexMatrix v = ComplexMatrix::Zero(dim(), dim());
    for (std::size_t m = 0; m < lambdas.size(); ++m) v += lambdas[m] * sectors.projectors[m];
    return v;
  }
};

/// Builds a model after checking: sectors valid, one lambda per sector,
/// H_S Hermitian and commuting with every P_m, and |lambda_m - lambda_n| >= delta > 0.
inline ArakiZurekModel make_araki_zurek(SectorStructure sectors, std::vector<double> lambdas, ComplexMatrix h_s,
                                        SpectralDensity env, double delta) {
  sectors = validate_sectors(std::move(sectors));
  if (lambdas.size() != sectors.size())
    throw Error(ErrorCode::InvalidModel, "need one coupling eigenvalue per sector");
  h_s = symmetrized(h_s, "system Hamiltonian");
  if (h_s.rows() != sectors.dim())
    throw Error(ErrorCode::DimensionMismatch, "system Hamiltonian and sectors differ in dimension");
  const double scale = std::max(1.0, h_s.norm());
  for (std::size_t m = 0; m < sectors.size(); ++m) {
    const ComplexMatrix& p = sectors.projectors[m];
    if ((h_s * p - p * h_s).norm() > 1e-10 * scale)
      throw Error(ErrorCode::InvalidModel, "system Hamiltonian does not commute with projector " + std::to_string(m));
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidModel, "eigenvalue gap delta must be positive");
  for (std::size_t m = 0; m < lambdas.size(); ++m)
    for (std::size_t n = m + 1; n < lambdas.size(); ++n)
      if (std::abs(lambdas[m] - lambdas[n]) < delta)
        throw Error(ErrorCode::InvalidModel, "eigenvalues " + std::to_string(m) + "," + std::to_string(n) +
                                                 " are closer than delta");
  return ArakiZurekModel{std::move(sectors), std::move(lambdas), std::move(h_s), std::move(env), delta};
}

/// Largest |lambda_m - lambda_n|; zero for a single sector.
inline double max_coupling_gap(const ArakiZurekModel& model) {
  double out = 0.0;
  for (double a : model.lambdas)
    for (double b : model.lambdas) out = std::max(out, std::abs(a - b));
  return out;
}

namespace detail {

// e^{-i H_S t} [ sum_{m,n} chi_env((lambda_m - lambda_n) t) P_m rho P_n ] e^{i H_S t}
// applied to an arbitrary (not necessarily positive) operator rho.
inline ComplexMatrix dephase(const ArakiZurekModel& model, const ComplexMatrix& rho, const SpectralDensity& env,
                             double t) {
  const std::size_t k = model.sectors.size();
  ComplexMatrix acc = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t m = 0; m < k; ++m) {
    const ComplexMatrix& pm = model.sectors.projectors[m];
    acc += pm * rho * pm;
    for (std::size_t n = m + 1; n < k; ++n) {
      const ComplexMatrix& pn = model.sectors.projectors[n];
      const Complex chi = decoherence_function(env, (model.lambdas[m] - model.lambdas[n]) * t);
      acc += chi * (pm * rho * pn);
      acc += std::conj(chi) * (pn * rho * pm);
    }
  }
  const ComplexMatrix u = propagator(model.h_s, t);
  return u * acc * u.adjoint();
}

}  // namespace detail

/// Reduced state at time t for the factorized initial state rho0 (x) omega.
inline DensityOperator az_evolve(const ArakiZurekModel& model, const DensityOperator& rho0, double t) {
  if (rho0.dim() != model.dim())
    throw Error(ErrorCode::DimensionMismatch, "initial state dimension " + std::to_string(rho0.dim()) +
                                                  " != model dimension " + std::to_string(model.dim()));
  return DensityOperator(detail::dephase(model, rho0.matrix(), model.env, t));
}

/// Initial state sum_mu rho_mu (x) omega_mu. The rho_mu are Hermitian but need
/// not be positive; their sum must be a density operator.
struct CorrelatedInitialState {
  struct Term {
    ComplexMatrix rho;
    SpectralDensity env;
  };
  std::vector<Term> terms;

  ComplexMatrix reduced() const {
    ComplexMatrix acc = ComplexMatrix::Zero(terms.front().rho.rows(), terms.front().rho.cols());
    for (const auto& term : terms) acc += term.rho;
    return acc;
  }
};

inline void validate_correlated(const CorrelatedInitialState& w0, Eigen::Index dim) {
  if (w0.terms.empty()) throw Error(ErrorCode::NotAState, "correlated state has no terms");
  for (std::size_t mu = 0; mu < w0.terms.size(); ++mu) {
    const ComplexMatrix& r = w0.terms[mu].rho;
    if (r.rows() != dim || r.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "term " + std::to_string(mu) + " has wrong dimension");
    if (!all_finite(r) || !is_hermitian(r, kStateTolerance))
      throw Error(ErrorCode::NotAState, "term " + std::to_string(mu) + " is not Hermitian");
  }
  try {
    DensityOperator check(w0.reduced());
  } catch (const Error& e) {
    throw Error(ErrorCode::NotAState, std::string("sum of terms is not a state (") + e.what() + ")");
  }
}

inline DensityOperator az_evolve_correlated(const ArakiZurekModel& model, const CorrelatedInitialState& w0,
                                            double t) {
  validate_correlated(w0, model.dim());
  ComplexMatrix acc = ComplexMatrix::Zero(model.dim(), model.dim());
  for (const auto& term : w0.terms) acc += detail::dephase(model, term.rho, term.env, t);
  return DensityOperator(acc);
}

// ---------------------------------------------------------------------------
// Spin-1/2 model

struct SpinModel {
  Eigen::Vector3d a = Eigen::Vector3d(0.0, 0.0, 1.0);
  double b = 1.0;
  double lam = 1.0;
  SpectralDensity env_diag = SpectralDensity::gaussian(1.0);
};

inline SpinModel make_spin_model(const Eigen::Vector3d& a, double b, double lam, SpectralDensity env_diag) {
  if (!a.allFinite() || !std::isfinite(lam)) throw Error(ErrorCode::InvalidModel, "non-finite spin model parameters");
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidModel, "environment coefficient b must be positive");
  return SpinModel{a, b, lam, std::move(env_diag)};
}

struct RotationAxis {
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
  double omega = 0.0;  // angular velocity of the Bloch vector
};

/// Axis and angular velocity of the Bloch rotation generated by
/// h(x) = a.sigma + lambda x sigma_3: exp(-i h t) turns Bloch vectors about
/// h/|h| by the angle 2|h| t. A vanishing field gives omega = 0, n = e_3.
inline RotationAxis rotation_axis(const SpinModel& model, double x) {
  const Eigen::Vector3d field(model.a.x(), model.a.y(), model.a.z() + model.lam * x);
  const double len = field.norm();
  if (len == 0.0) return {};
  return {field / len, 2.0 * len};
}

/// Rodrigues rotation of p about unit axis n by angle theta (right-handed).
inline Eigen::Vector3d rotate(const Eigen::Vector3d& p, const Eigen::Vector3d& n, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return p * c + n.cross(p) * s + n * (n.dot(p) * (1.0 - c));
}

namespace detail {

inline Eigen::Vector3d rotated_bloch(const SpinModel& model, const Eigen::Vector3d& p, double x, double t) {
  const RotationAxis axis = rotation_axis(model, x);
  return rotate(p, axis.n, axis.omega * t);
}

// Bloch vectors that overshoot the unit sphere by at most quadrature error are
// pulled back onto it.
inline Eigen::Vector3d clamp_to_ball(Eigen::Vector3d q) {
  const double n = q.norm();
  if (n > 1.0) {
    if (n > 1.0 + 1e-8)
      throw Error(ErrorCode::QuadratureFailure, "averaged Bloch vector has length " + std::to_string(n));
    q /= n;
  }
  return q;
}

}  // namespace detail

/// Reduced Bloch vector at time t: the env_diag-weighted average of R_x(t) p.
inline Eigen::Vector3d spin_bloch_at(const SpinModel& model, const BlochVector& p, double t) {
  const Eigen::Vector3d& v = p.vec();
  if (t == 0.0) return v;
  if (model.env_diag.is_discrete()) {
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (const auto& pt : model.env_diag.points()) acc += pt.w * detail::rotated_bloch(model, v, pt.v, t);
    return detail::clamp_to_ball(acc);
  }
  const auto [lo, hi] = model.env_diag.support();
  // The rotation angle changes with x at rate up to 2|lambda| t.
  const AdaptiveOptions opts = oscillatory_options(2.0 * std::abs(model.lam * t));
  const Eigen::Vector3d q = integrate_adaptive(
      [&](double x) -> Eigen::Vector3d { return model.env_diag.pdf(x) * detail::rotated_bloch(model, v, x, t); }, lo,
      hi, opts);
  return detail::clamp_to_ball(q);
}

inline DensityOperator spin_evolve(const SpinModel& model, const BlochVector& p, double t) {
  return DensityOperator(bloch_matrix(spin_bloch_at(model, p, t)));
}

/// M = integral env_diag(x) n(x) n(x)^T dx, the map from initial to asymptotic
/// Bloch vector.
inline Eigen::Matrix3d asymptotic_map(const SpinModel& model) {
  auto projector = [&model](double x) -> Eigen::Matrix3d {
    const Eigen::Vector3d n = rotation_axis(model, x).n;
    return n * n.transpose();
  };
  if (model.env_diag.is_discrete()) {
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for (const auto& pt : model.env_diag.points()) acc += pt.w * projector(pt.v);
    return acc;
  }
  const auto [lo, hi] = model.env_diag.support();
  AdaptiveOptions opts;
  opts.abs_tol = 1e-12;
  const Eigen::Matrix3d m = integrate_adaptive(
      [&](double x) -> Eigen::Matrix3d { return model.env_diag.pdf(x) * projector(x); }, lo, hi, opts);
  return 0.5 * (m + m.transpose());
}

/// Trace distances || rho(t) - rho(M p) ||_1 along t_grid.
inline std::vector<TimeSample> spin_asymptotics(const SpinModel& model, const BlochVector& p,
                                                std::span<const double> t_grid) {
  const Eigen::Matrix3d m = asymptotic_map(model);
  const DensityOperator limit(bloch_matrix(detail::clamp_to_ball(m * p.vec())));
  std::vector<TimeSample> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back({t, trace_distance(spin_evolve(model, p, t), limit)});
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force joint evolution

namespace detail {

inline void require_oracle_size(Eigen::Index dim_s, int n_grid) {
  if (n_grid < 2) throw Error(ErrorCode::InvalidModel, "oracle grid needs at least two points");
  if (dim_s * n_grid > kMaxDimension)
    throw Error(ErrorCode::DimensionTooLarge, "joint dimension " + std::to_string(dim_s * n_grid) + " exceeds " +
                                                  std::to_string(kMaxDimension));
}

// Reduced states tr_E e^{-iHt} (rho0 (x) omega) e^{iHt} for every t, with a
// single diagonalization of H shared by all times.
inline std::vector<DensityOperator> evolve_and_reduce(const ComplexMatrix& h, const ComplexMatrix& rho0,
                                                      const ComplexMatrix& omega, std::span<const double> times) {
  const HermitianEig eig = hermitian_eig(h);
  const ComplexMatrix& v = eig.eigenvectors;
  const ComplexMatrix w0 = v.adjoint() * tensor_product(rho0, omega) * v;
  const Eigen::Index n = w0.rows();
  std::vector<DensityOperator> out;
  out.reserve(times.size());
  ComplexMatrix wt(n, n);
  ComplexVector phase(n);
  for (double t : times) {
    for (Eigen::Index j = 0; j < n; ++j) phase(j) = std::exp(Complex(0.0, -eig.eigenvalues(j) * t));
    wt = phase.asDiagonal() * w0 * phase.conjugate().asDiagonal();
    out.emplace_back(partial_trace_env(v * wt * v.adjoint(), rho0.rows(), omega.rows()));
  }
  return out;
}

inline ComplexMatrix diagonal(const std::vector<SpectralPoint>& pts, double (*f)(const SpectralPoint&)) {
  ComplexMatrix d = ComplexMatrix::Zero(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j)
    d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = f(pts[j]);
  return d;
}

}  // namespace detail

/// tr_E exp(-iHt) (rho0 (x) omega) exp(iHt) with H = H_S (x) I + V_S (x) diag(v)
/// on the environment discretized to n_grid points, for each t in times.
inline std::vector<DensityOperator> full_simulation_oracle(const ArakiZurekModel& model, const DensityOperator& rho0,
                                                           std::span<const double> times, int n_grid) {
  detail::require_oracle_size(model.dim(), n_grid);
  if (rho0.dim() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "initial state dimension mismatch");
  const SpectralDensity env = discretize(model.env, n_grid);
  const auto& pts = env.points();
  const Eigen::Index ne = n_grid;
  const ComplexMatrix v_e = detail::diagonal(pts, [](const SpectralPoint& p) { return p.v; });
  const ComplexMatrix omega = detail::diagonal(pts, [](const SpectralPoint& p) { return p.w; });
  const ComplexMatrix h = tensor_product(model.h_s, ComplexMatrix::Identity(ne, ne)) + tensor_product(model.v_s(), v_e);
  return detail::evolve_and_reduce(h, rho0.matrix(), omega, times);
}

inline DensityOperator full_simulation_oracle(const ArakiZurekModel& model, const DensityOperator& rho0, double t,
                                              int n_grid) {
  const double times[] = {t};
  return full_simulation_oracle(model, rho0, times, n_grid).front();
}

/// Same construction for the spin model with H = (a.sigma) (x) I + I (x) b x^2
/// + lambda sigma_3 (x) x on the n_grid-point environment. The b x^2 term
/// commutes with everything else and drops out of the reduced state.
inline std::vector<DensityOperator> full_simulation_oracle(const SpinModel& model, const DensityOperator& rho0,
                                                           std::span<const double> times, int n_grid) {
  detail::require_oracle_size(2, n_grid);
  if (rho0.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "spin model needs a 2x2 initial state");
  const SpectralDensity env = discretize(model.env_diag, n_grid);
  const auto& pts = env.points();
  const Eigen::Index ne = n_grid;
  ComplexMatrix x = detail::diagonal(pts, [](const SpectralPoint& p) { return p.v; });
  ComplexMatrix h_e = model.b * x * x;
  const ComplexMatrix omega = detail::diagonal(pts, [](const SpectralPoint& p) { return p.w; });
  const ComplexMatrix h_s = model.a.x() * pauli::x() + model.a.y() * pauli::y() + model.a.z() * pauli::z();
  const ComplexMatrix h = tensor_product(h_s, ComplexMatrix::Identity(ne, ne)) +
                          tensor_product(pauli::identity(), h_e) + model.lam * tensor_product(pauli::z(), x);
  return detail::evolve_and_reduce(h, rho0.matrix(), omega, times);
}

inline DensityOperator full_simulation_oracle(const SpinModel& model, const DensityOperator& rho0, double t,
                                              int n_grid) {
  const double times[] = {t};
  return full_simulation_oracle(model, rho0, times, n_grid).front();
}

}  // namespace declab

#endif  // DECLAB_MODELS_HPP
