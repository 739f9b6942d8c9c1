#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "avglab/bounds.hpp"
#include "avglab/integrator.hpp"

namespace avglab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// A pass/fail criterion with its accepted interval [lower, upper].
/// Soft checks are reported but do not affect the verdict.
struct Check {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool hard = true;
  bool passed = false;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool empty() const { return rows.empty(); }
  std::vector<double> column(const std::string& name) const;
  void write_csv(std::ostream& os) const;
};

struct ScenarioResult {
  std::string scenario;
  std::vector<std::pair<std::string, double>> parameters;
  /// One row per grid point.
  Table metrics;
  /// Optional time series (distance decay, gap profiles).
  Table series;
  std::vector<std::pair<std::string, LineFit>> fits;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool passed() const;
  void add_check(std::string name, double value, double lower, double upper, bool hard = true);
  const Check& check(const std::string& name) const;
  const LineFit& fit(const std::string& name) const;
  /// Summary document; csv names are recorded so plots can find the tables.
  std::string to_json(const std::string& metrics_csv = "", const std::string& series_csv = "") const;
};

/// Worker count: hardware concurrency, capped by AVGLAB_THREADS when set.
unsigned worker_count();
/// Runs body(i) for i in [0, n) on worker threads; rethrows the first failure.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

struct InequalityMonitor {
  /// Largest (difference quotient - right side - tolerance); <= 0 when the inequality holds.
  double max_excess = 0.0;
  double worst_time = 0.0;
  bool holds = true;
};

/// Checks dQ/dt <= -2 nu Q + 2 sqrt(F) sqrt(Q) + tol (1 + Q) between consecutive samples,
/// with the right side evaluated at the mean of the two samples.
InequalityMonitor check_dissipation_inequality(const std::vector<double>& t,
                                               const std::vector<double>& q, double nu,
                                               double forcing_sup, double tol = 1e-3);

struct ScenarioOptions {
  IntegratorConfig integrator;
  /// <= 0 selects the scenario default.
  double t_end = 0.0;
  std::uint64_t seed = 1;
  /// Direction of alpha for 2D runs (normalized internally).
  std::array<double, 2> alpha_dir{1.0, 1.4142135623730951};
  /// Energy level of the absorbing set used for the default nonlinearity constant; <= 0: 1.1 E0.
  double E_tilde = 0.0;
  /// Envelope exponent of that absorbing set.
  double s_abs = 2.0;
  /// Nonlinearity constant; < 0 selects D(s_abs) sqrt(E_tilde).
  double C_hat = -1.0;
  /// Random initial data: energy of the starting state (0 starts from rest).
  double initial_energy = 0.0;
  /// Envelope (C, s) for random initial data.
  EnvelopeBound ic_envelope{0.5, 2.0};
};

ScenarioResult run_toy_ode(double nu, const std::vector<double>& alphas,
                           const ScenarioOptions& opt = {});

ScenarioResult run_averaging_gap(const SimParams& params, const ForcingSpec& forcing,
                                 const std::vector<double>& alphas, double h0,
                                 const ScenarioOptions& opt = {});

ScenarioResult run_burgers_scaling(double nu, const ForcingSpec& forcing,
                                   const std::vector<double>& alphas, int m,
                                   const ScenarioOptions& opt = {});

ScenarioResult run_attraction_rate(const SimParams& params, const ForcingSpec& forcing,
                                   double alpha, int ic_pairs, const ScenarioOptions& opt = {});

ScenarioResult run_nse2d(double nu, const ForcingSpec& forcing, const std::vector<double>& alphas,
                         int m, const ScenarioOptions& opt = {});

/// x' = A x + cos(omega t) v(t) with v(t) = v0 + v1 t.
struct LinearSystemSpec {
  Eigen::MatrixXd A;
  Eigen::VectorXd v0;
  Eigen::VectorXd v1;
  double t0 = 0.0;
};

struct OscillatoryIntegral {
  Eigen::VectorXd direct;
  Eigen::VectorXd by_parts;
  /// (C(v)(1 + e^(lh)) + (C(Av) + C(v'))(e^(lh) - 1)/l) / |omega| with l = mu(A).
  double bound = 0.0;
};

/// Computes the oscillatory integral over [t0, t0 + h] by quadrature and by the
/// integrated-by-parts form.
OscillatoryIntegral oscillatory_integral(const LinearSystemSpec& spec, double omega, double h);

ScenarioResult run_ibp_identity(const LinearSystemSpec& spec, const std::vector<double>& omegas,
                                double h);

}  // namespace avglab
