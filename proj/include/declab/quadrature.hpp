#ifndef DECLAB_QUADRATURE_HPP
#define DECLAB_QUADRATURE_HPP

// Gauss-Legendre rules and an adaptive panel integrator for smooth, possibly
// oscillatory integrands. The integrand may return any value type with vector
// space operations (double, std::complex<double>, Eigen fixed-size vectors).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "declab/error.hpp"

namespace declab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InsufficientData, "Gauss-Legendre rule needs n >= 1");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/// The rule mapped affinely onto [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

struct AdaptiveOptions {
  double abs_tol = 1e-9;
  int order = 20;
  int max_panels = 1 << 14;
  /// Initial panel width cap, e.g. one oscillation period. Zero means no cap.
  double max_initial_width = 0.0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

template <typename T>
T zero_like(const T& sample) {
  return sample * 0.0;
}

}  // namespace detail

/// Integrates f over [a, b] with Gauss-Legendre panels. A panel is accepted
/// when its single-panel and bisected estimates agree to within its share of
/// abs_tol (proportional to width); otherwise it is split. Throws
/// QuadratureFailure when the accepted plus pending panels exceed max_panels.
/// Panels are summed left to right so the result is deterministic.
template <typename F>
auto integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opts = {}) {
  using T = std::decay_t<decltype(f(a))>;
  if (!(b > a)) {
    T zero = detail::zero_like(f(a));
    return zero;
  }
  const QuadratureRule ref = gauss_legendre(opts.order);
  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    T acc = (ref.weights[0] * half) * f(mid + half * ref.nodes[0]);
    for (std::size_t i = 1; i < ref.nodes.size(); ++i) acc += (ref.weights[i] * half) * f(mid + half * ref.nodes[i]);
    return acc;
  };

  int initial = 1;
  if (opts.max_initial_width > 0.0)
    initial = std::max(1, static_cast<int>(std::ceil((b - a) / opts.max_initial_width)));
  if (initial > opts.max_panels)
    throw Error(ErrorCode::QuadratureFailure,
                "initial panel count " + std::to_string(initial) + " exceeds limit " +
                    std::to_string(opts.max_panels));

  struct Pending {
    double lo, hi;
    T whole;
  };
  // Depth-first stack processed so that panels are consumed left to right.
  std::vector<Pending> stack;
  stack.reserve(64);
  const double width = (b - a) / initial;
  for (int k = initial - 1; k >= 0; --k) {
    const double lo = a + width * k;
    const double hi = (k == initial - 1) ? b : a + width * (k + 1);
    stack.push_back({lo, hi, panel(lo, hi)});
  }

  T total = detail::zero_like(stack.back().whole);
  int accepted = 0;
  while (!stack.empty()) {
    Pending p = std::move(stack.back());
    stack.pop_back();
    const double mid = 0.5 * (p.lo + p.hi);
    T left = panel(p.lo, mid);
    T right = panel(mid, p.hi);
    T refined = left + right;
    const double err = detail::magnitude(T(refined - p.whole));
    const double share = opts.abs_tol * (p.hi - p.lo) / (b - a);
    if (err <= share || (p.hi - p.lo) <= 1e-14 * std::max(1.0, std::abs(mid))) {
      total += refined;
      ++accepted;
    } else {
      stack.push_back({mid, p.hi, std::move(right)});
      stack.push_back({p.lo, mid, std::move(left)});
    }
    if (accepted + static_cast<int>(stack.size()) > opts.max_panels)
      throw Error(ErrorCode::QuadratureFailure,
                  "adaptive quadrature exceeded " + std::to_string(opts.max_panels) +
                      " panels without reaching tolerance " + std::to_string(opts.abs_tol));
  }
  return total;
}

}  // namespace declab

#endif  // DECLAB_QUADRATURE_HPP
