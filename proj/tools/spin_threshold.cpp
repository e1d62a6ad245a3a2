// Regenerates tests/fixtures/spin_asymptotics_threshold.json.
//
// Evaluates || rho(t) - rho(M p) ||_1 for the generic Gaussian spin model on
// the acceptance grid with twice the quadrature resolution used by the
// library (order 40 instead of 20, half-width initial panels, tighter
// tolerance) and prints the envelope of local maxima together with the
// threshold derived from its final value.
//
//   build/tools/declab_spin_threshold > tests/fixtures/spin_asymptotics_threshold.json

#include <cmath>
#include <iostream>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "declab/models.hpp"
#include "declab/superselection.hpp"

using namespace declab;

int main() {
  const SpinModel model = make_spin_model({1.0, 0.0, 2.0}, 0.3, 1.0, SpectralDensity::gaussian(1.0));
  const Eigen::Vector3d p(0.48, 0.6, 0.64);
  const double t_lo = 5.0, t_hi = 50.0;
  const int count = 901;
  const double margin = 1e-6;

  AdaptiveOptions map_opts;
  map_opts.abs_tol = 1e-14;
  map_opts.order = 40;
  const auto [lo, hi] = model.env_diag.support();
  const Eigen::Matrix3d m = integrate_adaptive(
      [&](double x) -> Eigen::Matrix3d {
        const Eigen::Vector3d n = rotation_axis(model, x).n;
        return model.env_diag.pdf(x) * (n * n.transpose());
      },
      lo, hi, map_opts);
  const DensityOperator limit(bloch_matrix(m * p));

  std::vector<TimeSample> samples;
  for (int i = 0; i < count; ++i) {
    const double t = i == count - 1 ? t_hi : t_lo + (t_hi - t_lo) * i / (count - 1);
    AdaptiveOptions opts;
    opts.abs_tol = 1e-12;
    opts.order = 40;
    opts.max_initial_width = std::numbers::pi / std::abs(2.0 * model.lam * t);
    const Eigen::Vector3d q = integrate_adaptive(
        [&](double x) -> Eigen::Vector3d {
          const RotationAxis axis = rotation_axis(model, x);
          return model.env_diag.pdf(x) * rotate(p, axis.n, axis.omega * t);
        },
        lo, hi, opts);
    samples.push_back({t, trace_norm(bloch_matrix(q) - limit.matrix())});
  }
  const std::vector<TimeSample> env = envelope_points(samples);

  nlohmann::ordered_json j;
  j["description"] = "trace distance to the asymptotic state, generic Gaussian spin model";
  j["generated_by"] = "build/tools/declab_spin_threshold > tests/fixtures/spin_asymptotics_threshold.json";
  j["model"] = {{"a", {1.0, 0.0, 2.0}}, {"b", 0.3}, {"lambda", 1.0}, {"env", "gaussian s=1"}, {"p", {0.48, 0.6, 0.64}}};
  j["grid"] = {{"start", t_lo}, {"stop", t_hi}, {"count", count}};
  j["quadrature"] = {{"order", 40}, {"abs_tol", 1e-12}, {"initial_panel", "half period"}};
  j["envelope_points"] = env.size();
  j["final_envelope_t"] = env.back().t;
  j["final_envelope_value"] = env.back().value;
  j["margin"] = margin;
  j["threshold"] = env.back().value + margin;
  std::cout << j.dump(2) << "\n";
}
