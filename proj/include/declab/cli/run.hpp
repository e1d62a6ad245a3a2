#ifndef DECLAB_CLI_RUN_HPP
#define DECLAB_CLI_RUN_HPP

// Runs a parsed scenario: evaluates the requested experiment on its time
// grid, writes the CSV series and a JSON run report. Both files are written
// to a temporary name first and renamed into place.
//
// Requires the single-header nlohmann/json (vendor/json.hpp) on the include path.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "declab/cli/config.hpp"
#include "declab/error.hpp"
#include "declab/models.hpp"
#include "declab/random.hpp"
#include "declab/spectral_density.hpp"
#include "declab/states.hpp"
#include "declab/superselection.hpp"

#ifndef DECLAB_VERSION
#define DECLAB_VERSION "unknown"
#endif

namespace declab::cli {

struct ColumnSummary {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  double final = 0.0;
};

struct RunReport {
  Experiment experiment = Experiment::AzEvolution;
  std::filesystem::path csv_path;
  std::filesystem::path report_path;
  std::vector<std::string> columns;
  std::size_t rows = 0;
  std::vector<ColumnSummary> summary;
  std::optional<DecayFit> fit;
  double wall_time_s = 0.0;
  nlohmann::ordered_json json;
};

/// A table of doubles with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    for (std::size_t j = 0; j < row.size(); ++j)
      if (!std::isfinite(row[j]))
        throw Error(ErrorCode::NonFinite, "non-finite value in column " + columns[j] + " at row " +
                                              std::to_string(rows.size()));
    rows.push_back(std::move(row));
  }

  std::string csv() const {
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + columns[j];
    out += '\n';
    char buf[40];
    for (const auto& row : rows) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", row[j]);
        if (j) out += ',';
        out += buf;
      }
      out += '\n';
    }
    return out;
  }

  std::vector<ColumnSummary> summary() const {
    std::vector<ColumnSummary> out;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      ColumnSummary s{columns[j], std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                      0.0};
      for (const auto& row : rows) {
        s.min = std::min(s.min, row[j]);
        s.max = std::max(s.max, row[j]);
      }
      if (!rows.empty()) s.final = rows.back()[j];
      out.push_back(s);
    }
    return out;
  }
};

namespace detail {

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline SpectralDensity make_env(const EnvConfig& cfg) {
  SpectralDensity env = SpectralDensity::gaussian(1.0);
  if (cfg.kind == "gaussian") {
    env = SpectralDensity::gaussian(cfg.s);
  } else if (cfg.kind == "uniform") {
    env = SpectralDensity::uniform(cfg.a, cfg.b);
  } else if (cfg.kind == "bump") {
    env = SpectralDensity::bump(cfg.a, cfg.b, cfg.k);
  } else {
    std::vector<std::pair<double, double>> sorted = cfg.points;
    std::sort(sorted.begin(), sorted.end());
    std::vector<SpectralPoint> pts;
    for (const auto& [v, w] : sorted) pts.push_back({v, w});
    env = SpectralDensity::discrete_normalized(std::move(pts));
  }
  if (cfg.grid > 0) env = discretize(env, cfg.grid);
  return env;
}

inline DensityOperator initial_state(const ScenarioConfig& cfg) {
  if (cfg.bloch) return bloch_to_density(BlochVector(*cfg.bloch));
  return DensityOperator(*cfg.state_matrix);
}

inline std::vector<TimeSample> column_samples(const Table& table, std::size_t col) {
  std::vector<TimeSample> out;
  for (const auto& row : table.rows) out.push_back({row[0], row[col]});
  return out;
}

inline DecayFit fit_column(const ScenarioConfig& cfg, const Table& table, std::size_t col, double default_delta) {
  const auto samples = column_samples(table, col);
  std::optional<FitWindow> window;
  if (cfg.fit.t_min || cfg.fit.t_max)
    window = FitWindow{cfg.fit.t_min.value_or(samples.front().t), cfg.fit.t_max.value_or(samples.back().t)};
  return fit_power_law_decay(samples, cfg.fit.delta.value_or(default_delta), window);
}

inline ArakiZurekModel make_az_model(const ScenarioConfig& cfg) {
  std::vector<Eigen::Index> dims(cfg.sector_dims.begin(), cfg.sector_dims.end());
  SectorStructure sectors = coordinate_sectors(dims);
  ComplexMatrix h_s = ComplexMatrix::Zero(sectors.dim(), sectors.dim());
  for (std::size_t i = 0; i < cfg.h_s_diag.size(); ++i)
    h_s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = cfg.h_s_diag[i];
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < cfg.lambdas.size(); ++m)
    for (std::size_t n = m + 1; n < cfg.lambdas.size(); ++n)
      delta = std::min(delta, std::abs(cfg.lambdas[m] - cfg.lambdas[n]));
  return make_araki_zurek(std::move(sectors), cfg.lambdas, h_s, make_env(cfg.env), cfg.delta.value_or(delta));
}

inline Table run_az(const ScenarioConfig& cfg, std::optional<DecayFit>& fit) {
  const ArakiZurekModel model = make_az_model(cfg);
  const DensityOperator rho0 = initial_state(cfg);
  Table table;
  table.columns = {"t", "offdiag_hs", "offdiag_tr"};
  for (std::size_t m = 0; m < model.sectors.size(); ++m) table.columns.push_back("prob_" + std::to_string(m));
  table.columns.push_back("chi_re");
  table.columns.push_back("chi_im");
  for (double t : cfg.t_grid->values()) {
    const DensityOperator rho = az_evolve(model, rho0, t);
    const OffDiagonalNorms off = off_diagonal_norms(rho, model.sectors);
    std::vector<double> row{t, off.hs, off.trace};
    for (double p : sector_probabilities(rho, model.sectors)) row.push_back(p);
    const auto chi = decoherence_function(model.env, (model.lambdas[0] - model.lambdas[1]) * t);
    row.push_back(chi.real());
    row.push_back(chi.imag());
    table.add(std::move(row));
  }
  if (cfg.fit.enabled) fit = fit_column(cfg, table, 2, model.delta);
  return table;
}

inline SpinModel make_spin(const ScenarioConfig& cfg) {
  return make_spin_model(cfg.spin_a, cfg.spin_b, cfg.spin_lambda, make_env(cfg.env));
}

inline Table run_spin(const ScenarioConfig& cfg) {
  const SpinModel model = make_spin(cfg);
  const BlochVector p(*cfg.bloch);
  Table table;
  table.columns = {"t", "p_x", "p_y", "p_z"};
  for (double t : cfg.t_grid->values()) {
    const Eigen::Vector3d q = spin_bloch_at(model, p, t);
    table.add({t, q.x(), q.y(), q.z()});
  }
  return table;
}

inline Table run_spin_asymptotics(const ScenarioConfig& cfg, std::optional<DecayFit>& fit) {
  const SpinModel model = make_spin(cfg);
  const BlochVector p(*cfg.bloch);
  const std::vector<double> times = cfg.t_grid->values();
  Table table;
  table.columns = {"t", "trace_dist"};
  for (const TimeSample& s : spin_asymptotics(model, p, times)) table.add({s.t, s.value});
  if (cfg.fit.enabled) fit = fit_column(cfg, table, 1, 1.0);
  return table;
}

inline Table run_chi_scan(const ScenarioConfig& cfg, std::optional<DecayFit>& fit) {
  const SpectralDensity env = make_env(cfg.env);
  Table table;
  table.columns = {"t", "chi_re", "chi_im", "chi_abs"};
  for (double t : cfg.t_grid->values()) {
    const auto chi = decoherence_function(env, t);
    table.add({t, chi.real(), chi.imag(), std::abs(chi)});
  }
  if (cfg.fit.enabled) fit = fit_column(cfg, table, 3, 1.0);
  return table;
}

// Decomposition 0 is the spectral one; decompositions 1..trials use Haar
// unitaries drawn from the seeded generator. Each row is one pure state of a
// decomposition, with the distance to the nearest spectral projector.
inline Table run_decompose(const ScenarioConfig& cfg) {
  Rng rng(*cfg.seed);
  const Eigen::Index n = cfg.decompose_dim;
  const DensityOperator w = cfg.bloch || cfg.state_matrix ? initial_state(cfg)
                                                          : DensityOperator(random_density_matrix(rng, n));
  const PureStateDecomposition spectral = spectral_decomposition(w);
  Table table;
  table.columns = {"decomposition", "element", "weight", "reconstruction_hs", "distance_to_spectral"};
  auto emit = [&](int index, const PureStateDecomposition& d) {
    const double err = hs_norm(d.reconstruct() - w.matrix());
    for (std::size_t e = 0; e < d.weights.size(); ++e) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& proj : spectral.projectors) nearest = std::min(nearest, trace_distance(d.projectors[e], proj));
      table.add({static_cast<double>(index), static_cast<double>(e), d.weights[e], err, nearest});
    }
  };
  emit(0, spectral);
  for (int trial = 1; trial <= cfg.decompose_trials; ++trial)
    emit(trial, alternate_decomposition(w, haar_unitary(rng, w.dim())));
  return table;
}

inline nlohmann::ordered_json fit_json(const DecayFit& fit) {
  return {{"C", fit.C},
          {"delta", fit.delta},
          {"gamma", fit.gamma},
          {"t_min", fit.t_min},
          {"t_max", fit.t_max},
          {"residual", fit.residual},
          {"envelope_points", fit.envelope_points},
          {"super_polynomial", fit.super_polynomial},
          {"label", fit.super_polynomial ? "bound only, not tight" : "power law"}};
}

}  // namespace detail

/// Output locations: the configured paths, or their file names inside out_dir.
inline std::pair<std::filesystem::path, std::filesystem::path> output_paths(
    const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  std::filesystem::path csv = cfg.csv_path, report = cfg.report_path;
  if (out_dir) {
    csv = *out_dir / csv.filename();
    report = *out_dir / report.filename();
  }
  return {csv, report};
}

/// Evaluates the scenario and writes both output files. Model errors
/// (declab::Error) and I/O failures propagate to the caller.
inline RunReport run_scenario(const ScenarioConfig& cfg,
                              const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
  const auto started = std::chrono::steady_clock::now();
  RunReport report;
  report.experiment = cfg.experiment;
  std::tie(report.csv_path, report.report_path) = output_paths(cfg, out_dir);

  Table table;
  switch (cfg.experiment) {
    case Experiment::AzEvolution: table = detail::run_az(cfg, report.fit); break;
    case Experiment::Spin: table = detail::run_spin(cfg); break;
    case Experiment::SpinAsymptotics: table = detail::run_spin_asymptotics(cfg, report.fit); break;
    case Experiment::ChiScan: table = detail::run_chi_scan(cfg, report.fit); break;
    case Experiment::DecomposeDemo: table = detail::run_decompose(cfg); break;
  }
  report.columns = table.columns;
  report.rows = table.rows.size();
  report.summary = table.summary();
  detail::write_atomic(report.csv_path, table.csv());
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  nlohmann::ordered_json j;
  j["version"] = DECLAB_VERSION;
  j["experiment"] = std::string(to_string(cfg.experiment));
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.entries) echo[k] = v;
  j["scenario"] = echo;
  j["csv"] = report.csv_path.string();
  j["columns"] = report.columns;
  j["rows"] = report.rows;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& s : report.summary) summary[s.name] = {{"min", s.min}, {"max", s.max}, {"final", s.final}};
  j["summary"] = summary;
  j["fit"] = report.fit ? detail::fit_json(*report.fit) : nlohmann::ordered_json(nullptr);
  j["wall_time_s"] = report.wall_time_s;
  report.json = j;
  detail::write_atomic(report.report_path, j.dump(2) + "\n");
  return report;
}

}  // namespace declab::cli

#endif  // DECLAB_CLI_RUN_HPP
