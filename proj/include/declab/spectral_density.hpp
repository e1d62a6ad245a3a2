#ifndef DECLAB_SPECTRAL_DENSITY_HPP
#define DECLAB_SPECTRAL_DENSITY_HPP

// Environment spectral densities g(v) over the spectrum of the coupling
// operator, and the decoherence function chi(t) = integral g(v) exp(-i v t) dv.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "declab/error.hpp"
#include "declab/quadrature.hpp"

namespace declab {

struct SpectralPoint {
  double v = 0.0;
  double w = 0.0;
};

/// Gaussian density of width s centred at zero.
struct GaussianDensity {
  double s = 1.0;
};

struct UniformDensity {
  double a = -1.0;
  double b = 1.0;
};

/// Normalized exp(-k / (1 - u^2)) with u the affine image of [a, b] on
/// [-1, 1]. Smooth with every derivative vanishing at the endpoints; k sets
/// the steepness.
struct BumpDensity {
  double a = -1.0;
  double b = 1.0;
  double k = 1.0;
  double norm = 1.0;  // integral of the unnormalized profile over [a, b]
};

struct DiscreteDensity {
  std::vector<SpectralPoint> points;
};

inline constexpr double kDensityTolerance = 1e-10;

/// Gaussian support is truncated at this many widths for quadrature.
inline constexpr double kGaussianCutoff = 10.0;

class SpectralDensity {
 public:
  using Kind = std::variant<GaussianDensity, UniformDensity, BumpDensity, DiscreteDensity>;

  static SpectralDensity gaussian(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidModel, "gaussian width must be positive");
    return SpectralDensity(GaussianDensity{s});
  }

  static SpectralDensity uniform(double a, double b) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
      throw Error(ErrorCode::InvalidModel, "uniform support needs a < b");
    return SpectralDensity(UniformDensity{a, b});
  }

  static SpectralDensity bump(double a, double b, double k = 1.0) {
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
      throw Error(ErrorCode::InvalidModel, "bump support needs a < b");
    if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorCode::InvalidModel, "bump steepness must be positive");
    BumpDensity d{a, b, k, 1.0};
    const double z = integrate_adaptive([k](double u) { return bump_profile(u, k); }, -1.0, 1.0,
                                        AdaptiveOptions{.abs_tol = 1e-14});
    d.norm = 0.5 * (b - a) * z;
    return SpectralDensity(d);
  }

  /// Points must be sorted by v, distinct, with nonnegative weights summing to one.
  static SpectralDensity discrete(std::vector<SpectralPoint> points) {
    if (points.empty()) throw Error(ErrorCode::InvalidModel, "discrete density needs at least one point");
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!std::isfinite(points[i].v) || !(points[i].w >= 0.0) || !std::isfinite(points[i].w))
        throw Error(ErrorCode::InvalidModel, "discrete point " + std::to_string(i) + " is invalid");
      if (i > 0 && !(points[i].v > points[i - 1].v))
        throw Error(ErrorCode::InvalidModel, "discrete points must be sorted and distinct");
      sum += points[i].w;
    }
    if (std::abs(sum - 1.0) > kDensityTolerance)
      throw Error(ErrorCode::InvalidModel, "discrete weights sum to " + std::to_string(sum));
    return SpectralDensity(DiscreteDensity{std::move(points)});
  }

  /// Same as discrete() but rescales the weights to unit sum first.
  static SpectralDensity discrete_normalized(std::vector<SpectralPoint> points) {
    double sum = 0.0;
    for (const auto& p : points) sum += p.w;
    if (!(sum > 0.0)) throw Error(ErrorCode::InvalidModel, "discrete weights have zero total");
    for (auto& p : points) p.w /= sum;
    return discrete(std::move(points));
  }

  /// Equal weights on start, start + spacing, ..., count points.
  static SpectralDensity lattice(double start, double spacing, std::size_t count) {
    if (count == 0 || !(spacing > 0.0)) throw Error(ErrorCode::InvalidModel, "lattice needs count >= 1, spacing > 0");
    std::vector<SpectralPoint> pts(count);
    for (std::size_t j = 0; j < count; ++j) pts[j] = {start + spacing * static_cast<double>(j), 1.0 / count};
    return discrete_normalized(std::move(pts));
  }

  const Kind& kind() const noexcept { return kind_; }
  bool is_discrete() const noexcept { return std::holds_alternative<DiscreteDensity>(kind_); }

  const std::vector<SpectralPoint>& points() const {
    if (!is_discrete()) throw Error(ErrorCode::NotDiscrete, "density has no point spectrum");
    return std::get<DiscreteDensity>(kind_).points;
  }

  std::string name() const {
    return std::visit(
        [](const auto& d) -> std::string {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, GaussianDensity>) return "gaussian";
          else if constexpr (std::is_same_v<T, UniformDensity>) return "uniform";
          else if constexpr (std::is_same_v<T, BumpDensity>) return "bump";
          else return "discrete";
        },
        kind_);
  }

  /// Integration interval for continuous kinds (Gaussian truncated).
  std::pair<double, double> support() const {
    return std::visit(
        [](const auto& d) -> std::pair<double, double> {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, GaussianDensity>) return {-kGaussianCutoff * d.s, kGaussianCutoff * d.s};
          else if constexpr (std::is_same_v<T, DiscreteDensity>) return {d.points.front().v, d.points.back().v};
          else return {d.a, d.b};
        },
        kind_);
  }

  /// Density value g(v); only meaningful for continuous kinds.
  double pdf(double v) const {
    return std::visit(
        [v](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, GaussianDensity>) {
            const double z = v / d.s;
            return std::exp(-0.5 * z * z) / (d.s * std::sqrt(2.0 * std::numbers::pi));
          } else if constexpr (std::is_same_v<T, UniformDensity>) {
            return (v >= d.a && v <= d.b) ? 1.0 / (d.b - d.a) : 0.0;
          } else if constexpr (std::is_same_v<T, BumpDensity>) {
            const double u = (2.0 * v - d.a - d.b) / (d.b - d.a);
            return bump_profile(u, d.k) / d.norm;
          } else {
            throw Error(ErrorCode::NotDiscrete, "pdf is undefined for a point spectrum");
          }
        },
        kind_);
  }

  static double bump_profile(double u, double k) {
    const double r = 1.0 - u * u;
    return r > 0.0 ? std::exp(-k / r) : 0.0;
  }

 private:
  explicit SpectralDensity(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

/// Adaptive options for an integrand oscillating like exp(-i v t): the initial
/// panels are at most one period wide.
inline AdaptiveOptions oscillatory_options(double frequency) {
  AdaptiveOptions opts;
  if (frequency > 0.0) opts.max_initial_width = 2.0 * std::numbers::pi / frequency;
  return opts;
}

/// chi(t) = integral g(v) exp(-i v t) dv, or the weighted sum for a point spectrum.
inline std::complex<double> decoherence_function(const SpectralDensity& env, double t) {
  if (t == 0.0) return {1.0, 0.0};
  if (env.is_discrete()) {
    std::complex<double> acc(0.0, 0.0);
    for (const auto& p : env.points()) acc += p.w * std::exp(std::complex<double>(0.0, -p.v * t));
    return acc;
  }
  const auto [lo, hi] = env.support();
  return integrate_adaptive(
      [&env, t](double v) { return env.pdf(v) * std::exp(std::complex<double>(0.0, -v * t)); }, lo, hi,
      oscillatory_options(std::abs(t)));
}

/// Replaces a continuous density by n Gauss-Legendre nodes on its support with
/// weights g(v_j) w_j, renormalized. A discrete density with exactly n points
/// is returned unchanged.
inline SpectralDensity discretize(const SpectralDensity& env, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidModel, "discretization needs n >= 1");
  if (env.is_discrete()) {
    if (env.points().size() != static_cast<std::size_t>(n))
      throw Error(ErrorCode::DimensionMismatch, "discrete density has " + std::to_string(env.points().size()) +
                                                    " points, requested grid of " + std::to_string(n));
    return env;
  }
  const auto [lo, hi] = env.support();
  const QuadratureRule rule = gauss_legendre(n, lo, hi);
  std::vector<SpectralPoint> pts(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < pts.size(); ++j) pts[j] = {rule.nodes[j], env.pdf(rule.nodes[j]) * rule.weights[j]};
  return SpectralDensity::discrete_normalized(std::move(pts));
}

/// Time up to which a point-spectrum chi(t) is guaranteed not to have revived:
/// 2 pi / (largest gap between adjacent points). Exact revival time for an
/// equally spaced lattice; infinite for a single point.
inline double recurrence_window(const SpectralDensity& env) {
  if (!env.is_discrete()) throw Error(ErrorCode::NotDiscrete, "recurrence window needs a point spectrum");
  const auto& pts = env.points();
  if (pts.size() < 2) return std::numeric_limits<double>::infinity();
  double max_gap = 0.0;
  for (std::size_t j = 1; j < pts.size(); ++j) max_gap = std::max(max_gap, pts[j].v - pts[j - 1].v);
  return 2.0 * std::numbers::pi / max_gap;
}

}  // namespace declab

#endif  // DECLAB_SPECTRAL_DENSITY_HPP
