#pragma once

// Flat `key = value` run configuration shared by the CLI and the result manifests.
//
// Lines starting with '#' and blank lines are ignored; unknown keys are errors.
// Every field has a default, so an empty file is a valid configuration.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fnls/schemes.hpp"

namespace fnls {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Evolve, Convergence, SolverBench, InvariantDrift, RhoDemo };

const char* to_string(ExperimentKind kind);
/// Accepts the CLI subcommand names: evolve, convergence, solver-bench, drift, rho-demo.
ExperimentKind parse_experiment(const std::string& name);

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Evolve;

  // problem
  double length = 20.0;
  long points = 101;
  double alpha = 2.0;
  int rho = 1;
  double dt = 0.02;
  double t_end = 1.0;
  ModulatedSech initial{};

  // linear solver
  Strategy strategy = Strategy::OriginalCocg;
  double rel_tol = 1e-10;
  int max_iters = 1000;
  /// Jacobi preconditioning for the original-system strategies.
  bool jacobi = false;

  // starter
  double starter_nl_tol = 1e-10;
  int starter_nl_max = 100;
  double starter_rel_tol = 1e-12;

  // output
  std::string output_dir = "out";
  long snapshot_every = 25;

  // convergence study
  std::vector<double> dt_list{0.02, 0.01, 0.005, 0.0025};
  long ref_points = 303;
  double ref_dt = 0.001;

  // solver bench
  std::vector<Strategy> strategies{Strategy::OriginalCocg, Strategy::OriginalCocr, Strategy::OriginalBiCgStab,
                                   Strategy::TransformedPrecondBiCgStab, Strategy::TransformedPrecondCocg};

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Range checks on every field; throws ConfigError.
  void validate() const;
};

RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Applies one `key=value` assignment.
void apply_override(RunConfig& cfg, std::string_view assignment);
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
/// Serialises every field; parse_config_text(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& cfg);

ProblemSpec problem_spec(const RunConfig& cfg);
SolverConfig solver_config(const RunConfig& cfg);
StarterConfig starter_config(const RunConfig& cfg);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace fnls
