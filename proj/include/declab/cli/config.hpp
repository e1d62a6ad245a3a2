#ifndef DECLAB_CLI_CONFIG_HPP
#define DECLAB_CLI_CONFIG_HPP

// Scenario files: flat "key = value" lines with dotted key paths, '#'
// comments and blank lines. Lists are comma separated; matrix rows are
// separated by ';' and complex entries are written as 0.5, -0.25i or 0.5-0.25i.
// See docs/scenario-format.md for the full schema.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace declab::cli {

enum class Experiment { AzEvolution, Spin, SpinAsymptotics, ChiScan, DecomposeDemo };

inline std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::AzEvolution: return "araki_zurek";
    case Experiment::Spin: return "spin";
    case Experiment::SpinAsymptotics: return "spin_asymptotics";
    case Experiment::ChiScan: return "chi_scan";
    case Experiment::DecomposeDemo: return "decompose_demo";
  }
  return "unknown";
}

/// Parse errors (malformed lines) and validation errors (bad or missing
/// values) both carry the dotted key path and the 1-based line, when known.
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Parse, Validation };

  ConfigError(Kind kind, std::string key, int line, const std::string& message)
      : std::runtime_error(format(kind, key, line, message)), kind_(kind), key_(std::move(key)), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(Kind kind, const std::string& key, int line, const std::string& message) {
    std::string out = kind == Kind::Parse ? "ParseError" : "ValidationError";
    out += "(" + key + ")";
    if (line > 0) out += " at line " + std::to_string(line);
    return out + ": " + message;
  }

  Kind kind_;
  std::string key_;
  int line_;
};

struct TimeGrid {
  double start = 0.0;
  double stop = 1.0;
  int count = 2;

  std::vector<double> values() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] = i == count - 1 ? stop : start + (stop - start) * i / (count - 1);
    return out;
  }
};

struct EnvConfig {
  std::string kind = "gaussian";
  double s = 1.0;
  double a = -1.0;
  double b = 1.0;
  double k = 1.0;
  std::vector<std::pair<double, double>> points;  // (v, w)
  int grid = 0;                                   // > 0: discretize to this many nodes
};

struct FitConfig {
  bool enabled = false;
  std::optional<double> delta;
  std::optional<double> t_min;
  std::optional<double> t_max;
};

struct ScenarioConfig {
  Experiment experiment = Experiment::AzEvolution;
  std::optional<TimeGrid> t_grid;
  std::optional<std::uint64_t> seed;
  std::string csv_path;
  std::string report_path;

  EnvConfig env;
  FitConfig fit;

  // Initial state: a Bloch triple or an explicit matrix.
  std::optional<Eigen::Vector3d> bloch;
  std::optional<Eigen::MatrixXcd> state_matrix;

  // Dephasing model.
  std::vector<int> sector_dims;
  std::vector<double> lambdas;
  std::vector<double> h_s_diag;
  std::optional<double> delta;

  // Spin model.
  Eigen::Vector3d spin_a = Eigen::Vector3d(1.0, 0.0, 2.0);
  double spin_b = 0.3;
  double spin_lambda = 1.0;

  // Decomposition demo.
  int decompose_dim = 4;
  int decompose_trials = 5;

  /// Key/value pairs as written, in file order, for the run report.
  std::vector<std::pair<std::string, std::string>> entries;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return key.find("..") == std::string_view::npos;
}

// Accepts the longest prefix that parses as a double; returns chars consumed.
inline std::size_t parse_double_prefix(std::string_view s, double& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc()) return 0;
  return static_cast<std::size_t>(res.ptr - s.data());
}

}  // namespace detail

/// Raw key/value view of a scenario file with typed accessors that raise
/// ValidationError naming the key.
class KeyValues {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValues parse(std::string_view text) {
    KeyValues kv;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = text.find('\n', pos);
      std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
      ++line_no;
      pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const std::size_t hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      const std::string trimmed = detail::trim(line);
      if (trimmed.empty()) continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(ConfigError::Kind::Parse, "<line>", line_no, "expected 'key = value'");
      const std::string key = detail::trim(std::string_view(trimmed).substr(0, eq));
      const std::string value = detail::trim(std::string_view(trimmed).substr(eq + 1));
      if (!detail::valid_key(key))
        throw ConfigError(ConfigError::Kind::Parse, key.empty() ? "<line>" : key, line_no, "malformed key");
      if (kv.entries_.count(key))
        throw ConfigError(ConfigError::Kind::Parse, key, line_no,
                          "duplicate key (first set at line " + std::to_string(kv.entries_[key].line) + ")");
      kv.entries_[key] = {value, line_no};
      kv.order_.push_back(key);
    }
    return kv;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  int line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const std::vector<std::string>& keys() const noexcept { return order_; }

  const std::string& raw(const std::string& key) const {
    used_.insert(key);
    return entries_.at(key).value;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(ConfigError::Kind::Validation, key, line(key), message);
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
  }

  std::string require_string(const std::string& key) const {
    if (!has(key)) fail(key, "required key is missing");
    return raw(key);
  }

  double to_double(const std::string& key, std::string_view text) const {
    double v = 0.0;
    const std::string t = detail::trim(text);
    if (t.empty() || detail::parse_double_prefix(t, v) != t.size() || !std::isfinite(v))
      fail(key, "expected a finite number, got '" + t + "'");
    return v;
  }

  std::optional<double> get_double(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return to_double(key, raw(key));
  }

  double get_double(const std::string& key, double fallback) const { return get_double(key).value_or(fallback); }

  std::optional<long long> get_int(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const std::string& t = raw(key);
    long long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) fail(key, "expected an integer, got '" + t + "'");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& t = raw(key);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    fail(key, "expected true or false, got '" + t + "'");
  }

  std::vector<double> get_doubles(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    for (const auto& item : detail::split(raw(key), ',')) out.push_back(to_double(key, item));
    return out;
  }

  std::complex<double> to_complex(const std::string& key, const std::string& item) const {
    std::string t;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) fail(key, "empty matrix entry");
    if (t.back() != 'i') return {to_double(key, t), 0.0};
    t.pop_back();
    // Split "a+b" / "a-b" at the last sign that is not an exponent sign or the leading sign.
    std::size_t split = std::string::npos;
    for (std::size_t j = t.size(); j-- > 1;)
      if ((t[j] == '+' || t[j] == '-') && t[j - 1] != 'e' && t[j - 1] != 'E') {
        split = j;
        break;
      }
    auto imag_part = [&](std::string s) {
      if (s.empty() || s == "+") return 1.0;
      if (s == "-") return -1.0;
      if (s.front() == '+') s.erase(0, 1);
      return to_double(key, s);
    };
    if (split == std::string::npos) return {0.0, imag_part(t)};
    return {to_double(key, t.substr(0, split)), imag_part(t.substr(split))};
  }

  std::optional<Eigen::MatrixXcd> get_matrix(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const auto rows = detail::split(raw(key), ';');
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto cells = detail::split(rows[static_cast<std::size_t>(i)], ',');
      if (static_cast<Eigen::Index>(cells.size()) != n)
        fail(key, "row " + std::to_string(i) + " has " + std::to_string(cells.size()) + " entries, expected " +
                      std::to_string(n));
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = to_complex(key, cells[static_cast<std::size_t>(j)]);
    }
    return m;
  }

  /// Keys present in the file that no accessor consumed.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& k : order_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  mutable std::set<std::string> used_;
};

namespace detail {

inline EnvConfig read_env(const KeyValues& kv) {
  EnvConfig env;
  env.kind = kv.get_string("env.kind", "gaussian");
  if (env.kind == "gaussian") {
    env.s = kv.get_double("env.s", 1.0);
    if (!(env.s > 0.0)) kv.fail("env.s", "width must be positive");
  } else if (env.kind == "uniform" || env.kind == "bump") {
    env.a = kv.get_double("env.a", -1.0);
    env.b = kv.get_double("env.b", 1.0);
    if (!(env.b > env.a)) kv.fail("env.b", "support needs env.a < env.b");
    if (env.kind == "bump") {
      env.k = kv.get_double("env.k", 1.0);
      if (!(env.k > 0.0)) kv.fail("env.k", "steepness must be positive");
    }
  } else if (env.kind == "discrete") {
    if (kv.has("env.points")) {
      for (const auto& item : split(kv.raw("env.points"), ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) kv.fail("env.points", "expected 'v:w' pairs, got '" + item + "'");
        env.points.emplace_back(kv.to_double("env.points", parts[0]), kv.to_double("env.points", parts[1]));
      }
    } else if (kv.has("env.lattice.count")) {
      const double start = kv.get_double("env.lattice.start", 0.0);
      const auto spacing = kv.get_double("env.lattice.spacing");
      const auto count = kv.get_int("env.lattice.count");
      if (!spacing || !(*spacing > 0.0)) kv.fail("env.lattice.spacing", "positive spacing required");
      if (*count < 1 || *count > 100000) kv.fail("env.lattice.count", "count must be in [1, 100000]");
      for (long long j = 0; j < *count; ++j)
        env.points.emplace_back(start + *spacing * static_cast<double>(j), 1.0 / static_cast<double>(*count));
    } else {
      kv.fail("env.points", "discrete environment needs env.points or env.lattice.*");
    }
  } else {
    kv.fail("env.kind", "unknown kind '" + env.kind + "' (gaussian, uniform, bump, discrete)");
  }
  if (const auto grid = kv.get_int("env.grid")) {
    if (*grid < 2 || *grid > 512) kv.fail("env.grid", "grid must be in [2, 512]");
    env.grid = static_cast<int>(*grid);
  }
  return env;
}

}  // namespace detail

/// Parses and validates a scenario file. Unknown keys are rejected so typos
/// never silently fall back to defaults.
inline ScenarioConfig parse_config(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  ScenarioConfig cfg;

  const std::string exp = kv.require_string("experiment");
  if (exp == "araki_zurek") cfg.experiment = Experiment::AzEvolution;
  else if (exp == "spin") cfg.experiment = Experiment::Spin;
  else if (exp == "spin_asymptotics") cfg.experiment = Experiment::SpinAsymptotics;
  else if (exp == "chi_scan") cfg.experiment = Experiment::ChiScan;
  else if (exp == "decompose_demo") cfg.experiment = Experiment::DecomposeDemo;
  else kv.fail("experiment", "unknown experiment '" + exp + "'");

  const bool timed = cfg.experiment != Experiment::DecomposeDemo;
  if (timed || kv.has("t_grid.count")) {
    TimeGrid g;
    g.start = kv.get_double("t_grid.start", 0.0);
    const auto stop = kv.get_double("t_grid.stop");
    const auto count = kv.get_int("t_grid.count");
    if (!count) kv.fail("t_grid.count", "required key is missing");
    if (*count < 2) kv.fail("t_grid.count", "count must be >= 2");
    if (*count > 1000000) kv.fail("t_grid.count", "count must be <= 1000000");
    if (!stop) kv.fail("t_grid.stop", "required key is missing");
    if (g.start < 0.0) kv.fail("t_grid.start", "start must be >= 0");
    if (!(*stop > g.start)) kv.fail("t_grid.stop", "stop must be > start");
    g.stop = *stop;
    g.count = static_cast<int>(*count);
    cfg.t_grid = g;
  }

  if (const auto seed = kv.get_int("seed")) {
    if (*seed < 0) kv.fail("seed", "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }

  const std::string name(to_string(cfg.experiment));
  cfg.csv_path = kv.get_string("output.csv", name + ".csv");
  cfg.report_path = kv.get_string("output.report", name + "_report.json");
  if (cfg.csv_path.empty()) kv.fail("output.csv", "path must not be empty");
  if (cfg.report_path.empty()) kv.fail("output.report", "path must not be empty");

  if (const auto b = kv.get_doubles("state.bloch"); !b.empty()) {
    if (b.size() != 3) kv.fail("state.bloch", "expected three components");
    cfg.bloch = Eigen::Vector3d(b[0], b[1], b[2]);
    if (cfg.bloch->norm() > 1.0 + 1e-12) kv.fail("state.bloch", "Bloch vector lies outside the unit ball");
  }
  cfg.state_matrix = kv.get_matrix("state.matrix");
  if (cfg.bloch && cfg.state_matrix) kv.fail("state.matrix", "give either state.bloch or state.matrix, not both");

  if (cfg.experiment != Experiment::DecomposeDemo) cfg.env = detail::read_env(kv);

  cfg.fit.enabled = kv.get_bool("fit.enabled", cfg.experiment == Experiment::SpinAsymptotics);
  cfg.fit.delta = kv.get_double("fit.delta");
  if (cfg.fit.delta && !(*cfg.fit.delta > 0.0)) kv.fail("fit.delta", "delta must be positive");
  cfg.fit.t_min = kv.get_double("fit.t_min");
  cfg.fit.t_max = kv.get_double("fit.t_max");
  if (cfg.fit.t_min && cfg.fit.t_max && !(*cfg.fit.t_max > *cfg.fit.t_min))
    kv.fail("fit.t_max", "fit window needs t_min < t_max");

  switch (cfg.experiment) {
    case Experiment::AzEvolution: {
      for (double d : kv.get_doubles("az.sector_dims")) {
        if (d != std::floor(d) || d < 1) kv.fail("az.sector_dims", "sector dimensions must be positive integers");
        cfg.sector_dims.push_back(static_cast<int>(d));
      }
      if (cfg.sector_dims.empty()) cfg.sector_dims = {1, 1};
      if (cfg.sector_dims.size() < 2) kv.fail("az.sector_dims", "need at least two sectors");
      int dim = 0;
      for (int d : cfg.sector_dims) dim += d;
      if (dim > 64) kv.fail("az.sector_dims", "total dimension must be <= 64");
      cfg.lambdas = kv.get_doubles("az.lambdas");
      if (cfg.lambdas.empty()) kv.fail("az.lambdas", "required key is missing");
      if (cfg.lambdas.size() != cfg.sector_dims.size()) kv.fail("az.lambdas", "need one value per sector");
      cfg.h_s_diag = kv.get_doubles("az.h_s.diag");
      if (cfg.h_s_diag.empty()) cfg.h_s_diag.assign(static_cast<std::size_t>(dim), 0.0);
      if (static_cast<int>(cfg.h_s_diag.size()) != dim) kv.fail("az.h_s.diag", "need one value per basis state");
      cfg.delta = kv.get_double("az.delta");
      if (!cfg.bloch && !cfg.state_matrix) kv.fail("state.matrix", "initial state required");
      if (cfg.bloch && dim != 2) kv.fail("state.bloch", "Bloch vectors describe two-dimensional systems only");
      if (cfg.state_matrix && cfg.state_matrix->rows() != dim)
        kv.fail("state.matrix", "state dimension does not match the sectors");
      break;
    }
    case Experiment::Spin:
    case Experiment::SpinAsymptotics: {
      if (const auto a = kv.get_doubles("spin.a"); !a.empty()) {
        if (a.size() != 3) kv.fail("spin.a", "expected three components");
        cfg.spin_a = Eigen::Vector3d(a[0], a[1], a[2]);
      }
      cfg.spin_b = kv.get_double("spin.b", cfg.spin_b);
      if (!(cfg.spin_b > 0.0)) kv.fail("spin.b", "b must be positive");
      cfg.spin_lambda = kv.get_double("spin.lambda", cfg.spin_lambda);
      if (!cfg.bloch) kv.fail("state.bloch", "initial Bloch vector required");
      break;
    }
    case Experiment::ChiScan:
      break;
    case Experiment::DecomposeDemo: {
      cfg.decompose_dim = static_cast<int>(kv.get_int("decompose.dim").value_or(4));
      if (cfg.decompose_dim < 2 || cfg.decompose_dim > 64) kv.fail("decompose.dim", "dimension must be in [2, 64]");
      cfg.decompose_trials = static_cast<int>(kv.get_int("decompose.trials").value_or(5));
      if (cfg.decompose_trials < 1 || cfg.decompose_trials > 10000)
        kv.fail("decompose.trials", "trials must be in [1, 10000]");
      if (!cfg.seed) kv.fail("seed", "decompose_demo draws random unitaries and needs a seed");
      if (cfg.bloch) cfg.decompose_dim = 2;
      if (cfg.state_matrix) cfg.decompose_dim = static_cast<int>(cfg.state_matrix->rows());
      break;
    }
  }

  if (const auto extra = kv.unused(); !extra.empty()) kv.fail(extra.front(), "unknown key for this experiment");

  for (const auto& k : kv.keys()) cfg.entries.emplace_back(k, kv.raw(k));
  return cfg;
}

}  // namespace declab::cli

#endif  // DECLAB_CLI_CONFIG_HPP
