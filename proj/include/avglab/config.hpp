#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "avglab/bounds.hpp"
#include "avglab/experiments.hpp"

namespace avglab {

struct ForcingEntry {
  std::vector<int> k;
  /// Real and imaginary parts per component.
  std::vector<double> re;
  std::vector<double> im;
  Profile profile = Profile::constant;
  double omega_slow = 0.0;
  double phase = 0.0;

  bool operator==(const ForcingEntry&) const = default;
};

struct IbpConfig {
  std::vector<std::vector<double>> A;
  std::vector<double> v0;
  std::vector<double> v1;
  double t0 = 0.0;
  double h = 1.0;
  std::vector<double> omegas;

  bool operator==(const IbpConfig&) const = default;
};

/// Everything a run needs. Defaults are filled in by parse_config.
struct RunConfig {
  /// toy_ode, averaging_gap, burgers_scaling, attraction_rate, nse2d, ibp_identity, trajectory
  std::string scenario;
  ModelKind model = ModelKind::burgers;
  double nu = 1.0;
  /// Mean-velocity magnitude for single-alpha scenarios.
  double alpha = 0.0;
  std::vector<double> alphas;
  std::array<double, 2> alpha_dir{1.0, 1.4142135623730951};
  int m = 16;
  Frame frame = Frame::moving;
  std::vector<ForcingEntry> forcing;
  double s_V = 6.0;

  Method method = Method::if_rk4;
  /// <= 0: automatic.
  double dt = 0.0;
  double sample_every = 0.05;
  /// <= 0: scenario default.
  double t_end = 0.0;

  double h0 = 0.0;
  int ic_pairs = 3;
  double ic_C = 0.5;
  double ic_s = 2.0;
  double initial_energy = 0.0;
  double E_tilde = 0.0;
  double s_abs = 2.0;
  double C_hat = -1.0;
  IbpConfig ibp;

  std::string output = "results";
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates a JSON document; throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& config);

SimParams make_params(const RunConfig& config);
ForcingSpec make_forcing(const RunConfig& config);
ScenarioOptions make_options(const RunConfig& config);

ScenarioResult run_scenario(const RunConfig& config);
/// Closed-form and estimated constants for the configured system; no integration.
BoundsReport make_bounds_report(const RunConfig& config);

/// Runs the scenario and writes <out>/<scenario>.json, .csv and (if any) _series.csv.
/// Returns 0 when every hard check passed, 1 otherwise, 2 on configuration or runtime errors.
int dispatch(const RunConfig& config, const std::string& out_dir, std::ostream& log,
             std::ostream& err);

/// Writes a gnuplot script next to a result JSON and returns its path.
std::string emit_plot_script(const std::string& result_path);

}  // namespace avglab
