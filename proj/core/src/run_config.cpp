#include "fnls/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fnls {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Evolve:
      return "evolve";
    case ExperimentKind::Convergence:
      return "convergence";
    case ExperimentKind::SolverBench:
      return "solver-bench";
    case ExperimentKind::InvariantDrift:
      return "drift";
    case ExperimentKind::RhoDemo:
      return "rho-demo";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::Evolve, ExperimentKind::Convergence, ExperimentKind::SolverBench,
                 ExperimentKind::InvariantDrift, ExperimentKind::RhoDemo}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

void set_value(RunConfig& c, const std::string& key, const std::string& v) {
  try {
    if (key == "experiment") c.experiment = parse_experiment(v);
    else if (key == "L") c.length = to_double(key, v);
    else if (key == "N") c.points = to_long(key, v);
    else if (key == "alpha") c.alpha = to_double(key, v);
    else if (key == "rho") c.rho = static_cast<int>(to_long(key, v));
    else if (key == "dt") c.dt = to_double(key, v);
    else if (key == "t_end") c.t_end = to_double(key, v);
    else if (key == "ic.amplitude") c.initial.amplitude = to_double(key, v);
    else if (key == "ic.wavenumber") c.initial.wavenumber = to_double(key, v);
    else if (key == "ic.width") c.initial.width = to_double(key, v);
    else if (key == "ic.center") c.initial.center = to_double(key, v);
    else if (key == "strategy") c.strategy = parse_strategy(v);
    else if (key == "rel_tol") c.rel_tol = to_double(key, v);
    else if (key == "max_iters") c.max_iters = static_cast<int>(to_long(key, v));
    else if (key == "jacobi") c.jacobi = to_bool(key, v);
    else if (key == "starter.nl_tol") c.starter_nl_tol = to_double(key, v);
    else if (key == "starter.nl_max") c.starter_nl_max = static_cast<int>(to_long(key, v));
    else if (key == "starter.rel_tol") c.starter_rel_tol = to_double(key, v);
    else if (key == "out") c.output_dir = v;
    else if (key == "snapshot_every") c.snapshot_every = to_long(key, v);
    else if (key == "convergence.dt_list") {
      c.dt_list.clear();
      for (const auto& item : split_list(v)) c.dt_list.push_back(to_double(key, item));
    } else if (key == "convergence.ref_N") c.ref_points = to_long(key, v);
    else if (key == "convergence.ref_dt") c.ref_dt = to_double(key, v);
    else if (key == "bench.strategies") {
      c.strategies.clear();
      for (const auto& item : split_list(v)) c.strategies.push_back(parse_strategy(item));
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  const auto key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key in '" + std::string(assignment) + "'");
  set_value(cfg, key, trim(assignment.substr(eq + 1)));
}

RunConfig parse_config_text(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      apply_override(cfg, t);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  o << "experiment = " << to_string(c.experiment) << "\n"
    << "L = " << format_double(c.length) << "\n"
    << "N = " << c.points << "\n"
    << "alpha = " << format_double(c.alpha) << "\n"
    << "rho = " << c.rho << "\n"
    << "dt = " << format_double(c.dt) << "\n"
    << "t_end = " << format_double(c.t_end) << "\n"
    << "ic.amplitude = " << format_double(c.initial.amplitude) << "\n"
    << "ic.wavenumber = " << format_double(c.initial.wavenumber) << "\n"
    << "ic.width = " << format_double(c.initial.width) << "\n"
    << "ic.center = " << format_double(c.initial.center) << "\n"
    << "strategy = " << to_string(c.strategy) << "\n"
    << "rel_tol = " << format_double(c.rel_tol) << "\n"
    << "max_iters = " << c.max_iters << "\n"
    << "jacobi = " << (c.jacobi ? "true" : "false") << "\n"
    << "starter.nl_tol = " << format_double(c.starter_nl_tol) << "\n"
    << "starter.nl_max = " << c.starter_nl_max << "\n"
    << "starter.rel_tol = " << format_double(c.starter_rel_tol) << "\n"
    << "out = " << c.output_dir << "\n"
    << "snapshot_every = " << c.snapshot_every << "\n"
    << "convergence.dt_list = " << join(c.dt_list, format_double) << "\n"
    << "convergence.ref_N = " << c.ref_points << "\n"
    << "convergence.ref_dt = " << format_double(c.ref_dt) << "\n"
    << "bench.strategies = " << join(c.strategies, [](Strategy s) { return std::string(to_string(s)); }) << "\n";
  return o.str();
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(length > 0.0)) fail("L must be positive");
  if (points < 1 || points % 2 == 0) fail("N must be a positive odd integer");
  if (!(alpha > 1.0 && alpha <= 2.0)) fail("alpha must lie in (1, 2]");
  if (rho < 1) fail("rho must be >= 1");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(t_end >= dt * (1.0 - 1e-12))) fail("t_end must be >= dt");
  if (!(rel_tol > 0.0)) fail("rel_tol must be positive");
  if (max_iters < 1) fail("max_iters must be >= 1");
  if (!(starter_nl_tol > 0.0) || starter_nl_max < 1 || !(starter_rel_tol > 0.0)) fail("invalid starter settings");
  if (snapshot_every < 0) fail("snapshot_every must be >= 0");
  if (output_dir.empty()) fail("out must not be empty");
  if (experiment == ExperimentKind::Convergence) {
    if (dt_list.size() < 2) fail("convergence.dt_list needs at least two entries");
    for (double h : dt_list) {
      if (!(h > 0.0)) fail("convergence.dt_list entries must be positive");
    }
    if (ref_points < points || ref_points % points != 0 || (ref_points / points) % 2 == 0) {
      fail("convergence.ref_N must be an odd multiple of N so that grid nodes coincide");
    }
    if (!(ref_dt > 0.0)) fail("convergence.ref_dt must be positive");
  }
  if (experiment == ExperimentKind::SolverBench && strategies.empty()) fail("bench.strategies must not be empty");
}

ProblemSpec problem_spec(const RunConfig& c) {
  c.validate();
  return ProblemSpec{Grid(c.length, static_cast<std::size_t>(c.points)), c.alpha, c.rho, c.dt, c.t_end, c.initial};
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.rel_tol = c.rel_tol;
  s.max_iters = c.max_iters;
  s.method = method_of(c.strategy);
  s.preconditioned = is_transformed(c.strategy) || c.jacobi;
  return s;
}

StarterConfig starter_config(const RunConfig& c) {
  StarterConfig s;
  s.nl_tol = c.starter_nl_tol;
  s.nl_max = c.starter_nl_max;
  s.inner.rel_tol = c.starter_rel_tol;
  return s;
}

}  // namespace fnls
