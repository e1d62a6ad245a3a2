#ifndef DECLAB_SUPERSELECTION_HPP
#define DECLAB_SUPERSELECTION_HPP

// Sector structures (complete orthogonal projector families), the projection
// W -> sum_m P_m W P_m, off-diagonal coherence norms, sector probabilities,
// and the power-law envelope fit C (1 + delta t)^(-gamma).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "declab/error.hpp"
#include "declab/operators.hpp"
#include "declab/states.hpp"

namespace declab {

inline constexpr double kSectorTolerance = 1e-10;

struct SectorStructure {
  std::vector<ComplexMatrix> projectors;
  std::vector<std::string> labels;

  Eigen::Index dim() const { return projectors.empty() ? 0 : projectors.front().rows(); }
  std::size_t size() const { return projectors.size(); }
};

/// Returns the structure unchanged when the projectors are Hermitian,
/// idempotent, pairwise orthogonal and sum to the identity. Failures name the
/// offending index (or index pair).
inline SectorStructure validate_sectors(SectorStructure s) {
  if (s.projectors.empty()) throw Error(ErrorCode::NotComplete, "empty projector family");
  if (s.labels.empty())
    for (std::size_t m = 0; m < s.projectors.size(); ++m) s.labels.push_back(std::to_string(m));
  if (s.labels.size() != s.projectors.size())
    throw Error(ErrorCode::DimensionMismatch, "one label per projector required");

  const Eigen::Index n = s.projectors.front().rows();
  for (std::size_t m = 0; m < s.projectors.size(); ++m) {
    const ComplexMatrix& p = s.projectors[m];
    if (p.rows() != n || p.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "projector " + std::to_string(m) + " has wrong shape");
    if ((p - p.adjoint()).norm() > kSectorTolerance || (p * p - p).norm() > kSectorTolerance)
      throw Error(ErrorCode::NotIdempotent,
                  "projector (" + std::to_string(m) + "," + std::to_string(m) + ") is not a Hermitian idempotent");
  }
  for (std::size_t m = 0; m < s.projectors.size(); ++m)
    for (std::size_t k = m + 1; k < s.projectors.size(); ++k)
      if ((s.projectors[m] * s.projectors[k]).norm() >= kSectorTolerance)
        throw Error(ErrorCode::NotOrthogonal,
                    "projectors (" + std::to_string(m) + "," + std::to_string(k) + ") overlap");
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& p : s.projectors) sum += p;
  if ((sum - ComplexMatrix::Identity(n, n)).norm() >= kSectorTolerance)
    throw Error(ErrorCode::NotComplete, "projectors (0," + std::to_string(s.projectors.size() - 1) +
                                            ") do not sum to the identity");
  return s;
}

/// Sectors spanned by consecutive blocks of computational basis vectors.
inline SectorStructure coordinate_sectors(std::span<const Eigen::Index> block_dims) {
  Eigen::Index n = 0;
  for (auto d : block_dims) {
    if (d <= 0) throw Error(ErrorCode::DimensionMismatch, "sector dimension must be positive");
    n += d;
  }
  SectorStructure s;
  Eigen::Index offset = 0;
  for (std::size_t m = 0; m < block_dims.size(); ++m) {
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    p.block(offset, offset, block_dims[m], block_dims[m]).setIdentity();
    offset += block_dims[m];
    s.projectors.push_back(std::move(p));
    s.labels.push_back(std::to_string(m));
  }
  return validate_sectors(std::move(s));
}

inline void require_sector_dim(const ComplexMatrix& w, const SectorStructure& s) {
  if (s.projectors.empty() || w.rows() != s.dim())
    throw Error(ErrorCode::DimensionMismatch, "state dimension " + std::to_string(w.rows()) +
                                                  " does not match sector dimension " + std::to_string(s.dim()));
}

/// sum_m P_m W P_m on an arbitrary square matrix.
inline ComplexMatrix sector_project(const ComplexMatrix& w, const SectorStructure& s) {
  require_sector_dim(w, s);
  ComplexMatrix out = ComplexMatrix::Zero(w.rows(), w.cols());
  for (const auto& p : s.projectors) out += p * w * p;
  return out;
}

inline DensityOperator sector_project(const DensityOperator& w, const SectorStructure& s) {
  return DensityOperator(sector_project(w.matrix(), s));
}

struct OffDiagonalNorms {
  double hs = 0.0;
  double trace = 0.0;
};

/// Schatten norms of W - sum_m P_m W P_m, the coherences between sectors.
inline OffDiagonalNorms off_diagonal_norms(const ComplexMatrix& w, const SectorStructure& s) {
  const ComplexMatrix off = w - sector_project(w, s);
  const SchattenNorms norms = schatten_norms(off);
  return {norms.hs_norm, norms.trace_norm};
}

inline OffDiagonalNorms off_diagonal_norms(const DensityOperator& w, const SectorStructure& s) {
  return off_diagonal_norms(w.matrix(), s);
}

/// (tr W P_m)_m.
inline std::vector<double> sector_probabilities(const ComplexMatrix& w, const SectorStructure& s) {
  require_sector_dim(w, s);
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& p : s.projectors) out.push_back((w * p).trace().real());
  return out;
}

inline std::vector<double> sector_probabilities(const DensityOperator& w, const SectorStructure& s) {
  return sector_probabilities(w.matrix(), s);
}

// ---------------------------------------------------------------------------
// Power-law envelope fit

struct TimeSample {
  double t = 0.0;
  double value = 0.0;
};

struct DecayFit {
  double C = 0.0;
  double delta = 1.0;
  double gamma = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double residual = 0.0;          // RMS of log-space regression residuals
  std::size_t envelope_points = 0;
  bool super_polynomial = false;  // gamma > 20: bound only, not tight

  double bound(double t) const { return C * std::pow(1.0 + delta * std::abs(t), -gamma); }
};

inline constexpr double kSuperPolynomialGamma = 20.0;
inline constexpr std::size_t kMinEnvelopePoints = 8;

struct FitWindow {
  double t_min;
  double t_max;
};

/// Envelope points of |value|: interior local maxima. A window with fewer than
/// two interior maxima is treated as its own envelope (all positive samples).
inline std::vector<TimeSample> envelope_points(std::span<const TimeSample> window) {
  std::vector<TimeSample> peaks;
  for (std::size_t i = 1; i + 1 < window.size(); ++i) {
    const double v = std::abs(window[i].value);
    if (v > 0.0 && v >= std::abs(window[i - 1].value) && v >= std::abs(window[i + 1].value))
      peaks.push_back({window[i].t, v});
  }
  if (peaks.size() >= 2) return peaks;
  peaks.clear();
  for (const auto& s : window)
    if (std::abs(s.value) > 0.0) peaks.push_back({s.t, std::abs(s.value)});
  return peaks;
}

/// Fits an upper bound C (1 + delta t)^(-gamma) to the tail of a decaying
/// series. gamma and log C come from least squares of log(envelope) against
/// log(1 + delta t); C is then raised just enough that the bound dominates
/// every sample in the window. The default window is the last half of the
/// sampled time range.
inline DecayFit fit_power_law_decay(std::span<const TimeSample> samples, double delta,
                                    std::optional<FitWindow> window = std::nullopt) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InsufficientData, "delta must be positive");
  if (samples.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].t) || !std::isfinite(samples[i].value) || samples[i].t < 0.0 ||
        samples[i].value < 0.0)
      throw Error(ErrorCode::InsufficientData, "sample " + std::to_string(i) + " is negative or non-finite");
    if (i > 0 && !(samples[i].t > samples[i - 1].t))
      throw Error(ErrorCode::InsufficientData, "sample times must be strictly increasing");
  }
  const FitWindow win = window.value_or(
      FitWindow{samples.front().t + 0.5 * (samples.back().t - samples.front().t), samples.back().t});

  std::vector<TimeSample> in_window;
  for (const auto& s : samples)
    if (s.t >= win.t_min && s.t <= win.t_max) in_window.push_back(s);

  const std::vector<TimeSample> env = envelope_points(in_window);
  if (env.size() < kMinEnvelopePoints)
    throw Error(ErrorCode::InsufficientData, "only " + std::to_string(env.size()) +
                                                 " envelope points in window, need " +
                                                 std::to_string(kMinEnvelopePoints));

  double sx = 0.0, sy = 0.0;
  for (const auto& e : env) {
    sx += std::log1p(delta * e.t);
    sy += std::log(e.value);
  }
  const double n = static_cast<double>(env.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& e : env) {
    const double dx = std::log1p(delta * e.t) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e.value) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "envelope points span zero log-time");
  const double slope = sxy / sxx;
  if (slope >= 0.0) throw Error(ErrorCode::NonDecaying, "envelope slope " + std::to_string(slope) + " >= 0");

  DecayFit fit;
  fit.delta = delta;
  fit.gamma = -slope;
  fit.C = std::exp(my - slope * mx);
  fit.t_min = win.t_min;
  fit.t_max = win.t_max;
  fit.envelope_points = env.size();

  double ss = 0.0;
  for (const auto& e : env) {
    const double r = std::log(e.value) - (my + slope * (std::log1p(delta * e.t) - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);

  double inflate = 1.0;
  for (const auto& s : in_window) {
    const double b = fit.bound(s.t);
    if (b > 0.0) inflate = std::max(inflate, s.value / b);
  }
  if (inflate > 1.0) fit.C *= inflate * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
  fit.super_polynomial = fit.gamma > kSuperPolynomialGamma;
  return fit;
}

}  // namespace declab

#endif  // DECLAB_SUPERSELECTION_HPP
