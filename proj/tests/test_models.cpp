#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "declab/models.hpp"
#include "declab/random.hpp"
#include "oracles.hpp"

using namespace declab;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no declab::Error thrown";
  return ErrorCode::InvalidModel;
}

ArakiZurekModel qubit_dephasing(const ComplexMatrix& h_s, SpectralDensity env) {
  const std::vector<Eigen::Index> dims{1, 1};
  return make_araki_zurek(coordinate_sectors(dims), {1.0, -1.0}, h_s, std::move(env), 2.0);
}

// Three sectors of dimensions 1, 2, 1 with a block-diagonal Hamiltonian.
ArakiZurekModel four_level(Rng& rng, SpectralDensity env) {
  const std::vector<Eigen::Index> dims{1, 2, 1};
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  h(0, 0) = 0.4;
  h.block(1, 1, 2, 2) = random_hermitian(rng, 2);
  h(3, 3) = -0.9;
  return make_araki_zurek(coordinate_sectors(dims), {1.0, -0.5, 2.5}, h, std::move(env), 1.0);
}

}  // namespace

TEST(ArakiZurek, ModelValidation) {
  const std::vector<Eigen::Index> dims{1, 1};
  EXPECT_EQ(code_of([&] {
              make_araki_zurek(coordinate_sectors(dims), {1.0, -1.0}, pauli::x(), SpectralDensity::gaussian(1), 1.0);
            }),
            ErrorCode::InvalidModel);
  EXPECT_EQ(code_of([&] {
              make_araki_zurek(coordinate_sectors(dims), {1.0, 0.5}, pauli::z(), SpectralDensity::gaussian(1), 1.0);
            }),
            ErrorCode::InvalidModel);
  EXPECT_EQ(code_of([&] {
              make_araki_zurek(coordinate_sectors(dims), {1.0}, pauli::z(), SpectralDensity::gaussian(1), 1.0);
            }),
            ErrorCode::InvalidModel);
  const ArakiZurekModel m = qubit_dephasing(pauli::z(), SpectralDensity::gaussian(1));
  EXPECT_LT((m.v_s() - pauli::z()).norm(), 1e-16);
}

TEST(ArakiZurek, ZeroTimeIsIdentityMap) {
  Rng rng(1);
  const ArakiZurekModel m = four_level(rng, SpectralDensity::gaussian(1.0));
  const DensityOperator rho0(random_density_matrix(rng, 4));
  EXPECT_LT((az_evolve(m, rho0, 0.0).matrix() - rho0.matrix()).norm(), 1e-14);
}

TEST(ArakiZurek, BlockDiagonalStateIsStationary) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = 0.3;
  h(1, 1) = -1.1;
  const ArakiZurekModel m = qubit_dephasing(h, SpectralDensity::gaussian(1.0));
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.35;
  d(1, 1) = 0.65;
  const DensityOperator rho0(d);
  for (double t : {0.5, 2.0, 7.0}) EXPECT_LT((az_evolve(m, rho0, t).matrix() - d).norm(), 1e-14);
}

TEST(ArakiZurek, GaussianDephasingClosedForm) {
  const ArakiZurekModel m = qubit_dephasing(ComplexMatrix::Zero(2, 2), SpectralDensity::gaussian(1.0));
  const DensityOperator rho0 = bloch_to_density({0.6, -0.3, 0.2});
  for (double t : {0.1, 0.25, 0.5, 1.0, 1.5}) {
    const ComplexMatrix rt = az_evolve(m, rho0, t).matrix();
    const Complex expected = rho0.matrix()(0, 1) * std::exp(-2.0 * t * t);
    EXPECT_LT(std::abs(rt(0, 1) - expected), 1e-10) << t;
    EXPECT_NEAR(rt(0, 0).real(), rho0.matrix()(0, 0).real(), 1e-14);
  }
}

TEST(ArakiZurek, ProbabilitiesConstantAndCoherenceFactorizes) {
  Rng rng(2);
  const SpectralDensity env = SpectralDensity::uniform(-1.0, 1.0);
  const ArakiZurekModel m = four_level(rng, env);
  const DensityOperator rho0(random_density_matrix(rng, 4));
  const auto p0 = sector_probabilities(rho0, m.sectors);
  for (double t : {0.3, 1.7, 4.0}) {
    const DensityOperator rt = az_evolve(m, rho0, t);
    const auto pt = sector_probabilities(rt, m.sectors);
    for (std::size_t k = 0; k < p0.size(); ++k) EXPECT_NEAR(pt[k], p0[k], 1e-10);
    // Each off-diagonal block shrinks by exactly |chi(delta_lambda t)| in HS norm.
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        const ComplexMatrix& pa = m.sectors.projectors[a];
        const ComplexMatrix& pb = m.sectors.projectors[b];
        const double before = (pa * rho0.matrix() * pb).norm();
        const double after = (pa * rt.matrix() * pb).norm();
        const double chi = std::abs(oracle::uniform_chi(-1.0, 1.0, (m.lambdas[a] - m.lambdas[b]) * t));
        EXPECT_NEAR(after, chi * before, 1e-10);
      }
  }
}

TEST(ArakiZurek, TwoSectorOffDiagonalNormFactorizes) {
  Rng rng(3);
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h.block(0, 0, 2, 2) = random_hermitian(rng, 2);
  h(2, 2) = 0.7;
  const std::vector<Eigen::Index> dims{2, 1};
  const ArakiZurekModel m =
      make_araki_zurek(coordinate_sectors(dims), {0.5, -1.0}, h, SpectralDensity::gaussian(0.8), 1.5);
  const DensityOperator rho0(random_density_matrix(rng, 3));
  const double before = off_diagonal_norms(rho0, m.sectors).hs;
  for (double t : {0.2, 0.9, 2.2}) {
    const double after = off_diagonal_norms(az_evolve(m, rho0, t), m.sectors).hs;
    EXPECT_NEAR(after, oracle::gaussian_chi(0.8, 1.5 * t) * before, 1e-10);
  }
}

// One decay bound, fitted to the slowest coherence factor, holds for every
// initial state (sampled, not proven).
TEST(ArakiZurek, DecayBoundIndependentOfInitialState) {
  Rng rng(21);
  const ArakiZurekModel m = four_level(rng, SpectralDensity::uniform(-1.0, 1.0));
  std::vector<TimeSample> slowest;
  for (int i = 0; i <= 600; ++i) {
    const double t = 0.1 * i;
    double worst = 0.0;
    for (std::size_t a = 0; a < m.lambdas.size(); ++a)
      for (std::size_t b = a + 1; b < m.lambdas.size(); ++b)
        worst = std::max(worst, std::abs(decoherence_function(m.env, (m.lambdas[a] - m.lambdas[b]) * t)));
    slowest.push_back({t, worst});
  }
  const DecayFit fit = fit_power_law_decay(slowest, m.delta, FitWindow{10.0, 60.0});
  EXPECT_GT(fit.gamma, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator rho0(random_density_matrix(rng, 4));
    for (double t = 10.0; t <= 60.0; t += 1.7)
      EXPECT_LE(off_diagonal_norms(az_evolve(m, rho0, t), m.sectors).hs, fit.bound(t)) << trial << " t=" << t;
  }
}

TEST(ArakiZurek, DimensionMismatch) {
  const ArakiZurekModel m = qubit_dephasing(pauli::z(), SpectralDensity::gaussian(1.0));
  EXPECT_EQ(code_of([&] { az_evolve(m, DensityOperator::maximally_mixed(3), 1.0); }), ErrorCode::DimensionMismatch);
}

TEST(ArakiZurekCorrelated, SingleTermMatchesFactorized) {
  Rng rng(4);
  const ArakiZurekModel m = four_level(rng, SpectralDensity::gaussian(1.0));
  const DensityOperator rho0(random_density_matrix(rng, 4));
  CorrelatedInitialState w0{{{rho0.matrix(), m.env}}};
  for (double t : {0.0, 0.4, 1.3})
    EXPECT_LT((az_evolve_correlated(m, w0, t).matrix() - az_evolve(m, rho0, t).matrix()).norm(), 1e-14);
}

TEST(ArakiZurekCorrelated, TwoTermsWithOppositeCoherences) {
  const ArakiZurekModel m = qubit_dephasing(ComplexMatrix::Zero(2, 2), SpectralDensity::gaussian(1.0));
  // rho_1 and rho_2 carry opposite-sign coherences; rho_2 alone is not positive.
  ComplexMatrix r1(2, 2), r2(2, 2);
  r1 << 0.3, 0.25, 0.25, 0.2;
  r2 << 0.2, -0.1, -0.1, 0.3;
  const SpectralDensity e1 = SpectralDensity::gaussian(1.0);
  const SpectralDensity e2 = SpectralDensity::uniform(-2.0, 2.0);
  CorrelatedInitialState w0{{{r1, e1}, {r2, e2}}};
  EXPECT_LT((az_evolve_correlated(m, w0, 0.0).matrix() - (r1 + r2)).norm(), 1e-15);
  const SectorStructure& s = m.sectors;
  for (double t : {0.3, 0.8, 2.0, 5.0}) {
    const double norm = off_diagonal_norms(az_evolve_correlated(m, w0, t), s).hs;
    const double bound = std::abs(decoherence_function(e1, 2.0 * t)) * off_diagonal_norms(r1, s).hs +
                         std::abs(decoherence_function(e2, 2.0 * t)) * off_diagonal_norms(r2, s).hs;
    EXPECT_LE(norm, bound + 1e-10) << t;
  }
}

TEST(ArakiZurekCorrelated, RejectsNonState) {
  const ArakiZurekModel m = qubit_dephasing(ComplexMatrix::Zero(2, 2), SpectralDensity::gaussian(1.0));
  ComplexMatrix r(2, 2);
  r << 0.9, 0.0, 0.0, 0.4;
  CorrelatedInitialState w0{{{r, m.env}}};
  EXPECT_EQ(code_of([&] { az_evolve_correlated(m, w0, 1.0); }), ErrorCode::NotAState);
}

// ---------------------------------------------------------------------------

TEST(RotationAxis, Examples) {
  const SpinModel m1 = make_spin_model({0, 0, 1}, 1.0, 0.0, SpectralDensity::gaussian(1));
  RotationAxis r = rotation_axis(m1, 0.7);
  EXPECT_LT((r.n - Eigen::Vector3d::UnitZ()).norm(), 1e-16);
  EXPECT_DOUBLE_EQ(r.omega, 2.0);

  const SpinModel m2 = make_spin_model({0, 0, 0}, 1.0, 1.0, SpectralDensity::gaussian(1));
  r = rotation_axis(m2, 2.0);
  EXPECT_LT((r.n - Eigen::Vector3d::UnitZ()).norm(), 1e-16);
  EXPECT_DOUBLE_EQ(r.omega, 4.0);
  r = rotation_axis(m2, 0.0);
  EXPECT_EQ(r.omega, 0.0);
  EXPECT_EQ(r.n, Eigen::Vector3d::UnitZ());

  const SpinModel m3 = make_spin_model({1, 0, 1}, 1.0, 1.0, SpectralDensity::gaussian(1));
  r = rotation_axis(m3, 1.0);
  EXPECT_LT((r.n - Eigen::Vector3d(1, 0, 2) / std::sqrt(5.0)).norm(), 1e-15);
  EXPECT_NEAR(r.omega, 2.0 * std::sqrt(5.0), 1e-14);
}

TEST(RotationAxis, MatchesSeriesExponential) {
  Rng rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const SpinModel m = make_spin_model({u(rng), u(rng), u(rng)}, 0.5, u(rng), SpectralDensity::gaussian(1));
    const double x = u(rng), t = u(rng);
    const Eigen::Vector3d p = random_ball_point(rng);
    const RotationAxis r = rotation_axis(m, x);
    const Eigen::Vector3d field(m.a.x(), m.a.y(), m.a.z() + m.lam * x);
    EXPECT_LT((rotate(p, r.n, r.omega * t) - oracle::bloch_after_series(field, p, t)).norm(), 1e-12);
  }
}

TEST(SpinModel, Validation) {
  EXPECT_EQ(code_of([] { make_spin_model({1, 0, 0}, 0.0, 1.0, SpectralDensity::gaussian(1)); }),
            ErrorCode::InvalidModel);
}

TEST(SpinEvolve, ZeroTime) {
  const SpinModel m = make_spin_model({1, 0, 2}, 0.3, 1.0, SpectralDensity::gaussian(1));
  const BlochVector p(0.2, 0.5, -0.4);
  EXPECT_LT((spin_evolve(m, p, 0.0).matrix() - bloch_to_density(p).matrix()).norm(), 1e-16);
}

TEST(SpinEvolve, LongitudinalFieldReducesToDephasing) {
  // a = a3 e3 gives h(x) = (a3 + lambda x) sigma_3: the dephasing model with
  // V_S = lambda sigma_3, H_S = a3 sigma_3 and V_E = x.
  const double a3 = 0.8, lam = 0.6;
  const SpectralDensity env = SpectralDensity::gaussian(1.0);
  const SpinModel spin = make_spin_model({0, 0, a3}, 0.3, lam, env);
  const std::vector<Eigen::Index> dims{1, 1};
  const ArakiZurekModel az = make_araki_zurek(coordinate_sectors(dims), {lam, -lam}, a3 * pauli::z(), env, 2.0 * lam);
  const BlochVector p(0.5, -0.3, 0.6);
  for (double t : {0.4, 1.1, 3.0, 6.0}) {
    const Eigen::Vector3d q = spin_bloch_at(spin, p, t);
    EXPECT_NEAR(q.z(), 0.6, 1e-12);
    const double transverse = std::hypot(q.x(), q.y());
    EXPECT_NEAR(transverse, std::hypot(0.5, 0.3) * oracle::gaussian_chi(1.0, 2.0 * lam * t), 1e-9);
    EXPECT_LT(trace_distance(spin_evolve(spin, p, t), az_evolve(az, bloch_to_density(p), t)), 1e-9) << t;
  }
}

TEST(SpinEvolve, MatchesOracleOnSharedGrid) {
  const SpectralDensity env = SpectralDensity::gaussian(1.0);
  const SpinModel continuous = make_spin_model({1, 0, 2}, 0.3, 1.0, env);
  const SpinModel gridded = make_spin_model({1, 0, 2}, 0.3, 1.0, discretize(env, 41));
  const BlochVector p(0.48, 0.6, 0.64);
  const std::vector<double> times{0.0, 0.7, 2.5, 6.0, 10.0};
  const auto oracle_states = full_simulation_oracle(continuous, bloch_to_density(p), times, 41);
  for (std::size_t i = 0; i < times.size(); ++i)
    EXPECT_LT(trace_distance(spin_evolve(gridded, p, times[i]), oracle_states[i]), 1e-10) << times[i];
}

TEST(SpinEvolve, ContinuousCloseToFineGrid) {
  const SpectralDensity env = SpectralDensity::gaussian(1.0);
  const SpinModel continuous = make_spin_model({1, 0, 2}, 0.3, 1.0, env);
  const SpinModel gridded = make_spin_model({1, 0, 2}, 0.3, 1.0, discretize(env, 400));
  const BlochVector p(0.48, 0.6, 0.64);
  for (double t : {1.0, 5.0}) EXPECT_LT((spin_bloch_at(continuous, p, t) - spin_bloch_at(gridded, p, t)).norm(), 1e-9);
}

TEST(AsymptoticMap, LongitudinalFieldIsZProjector) {
  const SpinModel m = make_spin_model({0, 0, 1.3}, 0.3, 1.0, SpectralDensity::gaussian(1));
  Eigen::Matrix3d e3e3 = Eigen::Matrix3d::Zero();
  e3e3(2, 2) = 1.0;
  EXPECT_LT((asymptotic_map(m) - e3e3).norm(), 1e-10);
}

TEST(AsymptoticMap, NoCouplingIsFieldProjector) {
  const Eigen::Vector3d a(0.3, -1.2, 0.5);
  const SpinModel m = make_spin_model(a, 0.3, 0.0, SpectralDensity::uniform(-1, 1));
  const Eigen::Vector3d n = a.normalized();
  EXPECT_LT((asymptotic_map(m) - n * n.transpose()).norm(), 1e-12);
}

TEST(AsymptoticMap, ContractionAndTrapezoidOracle) {
  const SpinModel m = make_spin_model({1, 0, 1}, 0.3, 1.0, SpectralDensity::gaussian(1));
  const Eigen::Matrix3d mm = asymptotic_map(m);
  const Eigen::Matrix3d ref = oracle::trapezoid(
      [&](double x) -> Eigen::Matrix3d {
        const Eigen::Vector3d f(1.0, 0.0, 1.0 + x);
        const Eigen::Vector3d n = f.normalized();
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * n * n.transpose();
      },
      -12.0, 12.0, 200000);
  EXPECT_LT((mm - ref).norm(), 1e-8);
  EXPECT_LT((mm - mm.transpose()).norm(), 1e-15);
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d p = random_ball_point(rng);
    EXPECT_LT((mm * p).norm(), p.norm());
  }
}

TEST(SpinAsymptotics, FixedPoints) {
  const std::vector<double> grid{0.0, 1.0, 5.0, 20.0};
  const SpinModel generic = make_spin_model({1, 0, 2}, 0.3, 1.0, SpectralDensity::gaussian(1));
  for (const auto& s : spin_asymptotics(generic, BlochVector(0, 0, 0), grid)) EXPECT_LT(s.value, 1e-15);
  const SpinModel longitudinal = make_spin_model({0, 0, 2}, 0.3, 1.0, SpectralDensity::gaussian(1));
  for (const auto& s : spin_asymptotics(longitudinal, BlochVector(0, 0, 0.7), grid)) EXPECT_LT(s.value, 1e-10);
}

TEST(SpinAsymptotics, GenericModelDecays) {
  const SpinModel m = make_spin_model({1, 0, 2}, 0.3, 1.0, SpectralDensity::gaussian(1));
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.1 * i);
  const auto d = spin_asymptotics(m, BlochVector(0.48, 0.6, 0.64), grid);
  EXPECT_GT(d.front().value, 0.1);
  EXPECT_LT(d.back().value, 0.5 * d[50].value);
  const DecayFit fit = fit_power_law_decay(d, 1.0);
  EXPECT_GT(fit.gamma, 0.0);
}

// ---------------------------------------------------------------------------

TEST(Oracle, ZeroTimeAndSizeLimit) {
  const SpinModel m = make_spin_model({1, 0, 2}, 0.3, 1.0, SpectralDensity::gaussian(1));
  const DensityOperator rho0 = bloch_to_density({0.1, 0.2, 0.3});
  EXPECT_LT(trace_distance(full_simulation_oracle(m, rho0, 0.0, 16), rho0), 1e-13);
  EXPECT_EQ(code_of([&] { full_simulation_oracle(m, rho0, 1.0, 513); }), ErrorCode::DimensionTooLarge);
  EXPECT_EQ(code_of([&] { full_simulation_oracle(m, rho0, 1.0, 1); }), ErrorCode::InvalidModel);
}

TEST(Oracle, ArakiZurekMatchesClosedFormOnDiscreteSpectrum) {
  Rng rng(7);
  const SpectralDensity env = SpectralDensity::gaussian(1.0);
  const ArakiZurekModel m = four_level(rng, env);
  ArakiZurekModel discrete = m;
  discrete.env = discretize(env, 24);
  const DensityOperator rho0(random_density_matrix(rng, 4));
  const std::vector<double> times{0.0, 0.3, 0.9, 1.6};
  const auto states = full_simulation_oracle(m, rho0, times, 24);
  for (std::size_t i = 0; i < times.size(); ++i)
    EXPECT_LT(trace_distance(states[i], az_evolve(discrete, rho0, times[i])), 1e-10) << times[i];
}
