#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "avglab/model.hpp"

namespace avglab {

enum class Method { if_rk4, rk4 };

std::string to_string(Method m);

struct IntegratorConfig {
  Method method = Method::if_rk4;
  /// Nominal step; <= 0 selects the automatic step.
  double dt = 0.0;
  double sample_every = 0.05;
  /// Absolute end time.
  double t_end = 1.0;
  bool keep_states = false;
  /// When set, each sample records max_k |a_k| / (C/|k|^s).
  std::optional<EnvelopeBound> envelope;
};

inline constexpr double kDissipativeStepFactor = 0.5;
inline constexpr double kOscillationStepFactor = 0.05;
inline constexpr double kMaxStep = 0.01;
/// Largest allowed phase advance dt * |alpha| * J_max of the fastest forced mode.
inline constexpr double kMaxPhasePerStep = 0.1;
inline constexpr double kBlowUpFactor = 1e6;

/// min(0.5/(nu m^2) [plain RK4 only], 0.05/(1 + |alpha| J_max), 0.01).
double auto_time_step(Method method, const SimParams& params, const ForcingSpec& forcing);

class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> enstrophy;
  std::vector<double> l2norm;
  std::vector<double> gradbound;
  std::vector<double> reality_defect;
  std::vector<double> envelope_ratio;
  std::vector<double> gap;
  std::vector<SpectralState> states;
  SpectralState final_state;
  /// Largest step actually taken.
  double dt = 0.0;
  std::size_t steps = 0;

  std::size_t size() const { return t.size(); }
  void write_csv(std::ostream& os) const;
};

/// Fixed-step integrator over one model; reuses its stage buffers.
class Stepper {
 public:
  Stepper(GalerkinModel& model, Method method);
  void step(double t, double dt, SpectralState& u);

 private:
  GalerkinModel& model_;
  Method method_;
  double cached_dt_ = -1.0;
  std::vector<cplx> full_, half_;
  SpectralState k1_, k2_, k3_, k4_, w_;
  void refresh(double dt);
};

/// Integrates from t0 to config.t_end, sampling every config.sample_every.
TrajectoryRecord integrate(const SpectralState& initial, double t0, const IntegratorConfig& config,
                           const SimParams& params, const ForcingSpec& forcing, Frame frame);

struct GapProfile {
  std::vector<double> t;
  std::vector<double> gap;
  /// Both runs, with states kept at every sample.
  TrajectoryRecord x;
  TrajectoryRecord y;
  double sup() const;
};

/// Runs x with forcing_full and y with forcing_reduced in the moving frame from
/// the same state over [t0, t0 + h] and records |x - y|. Both use the step of x.
GapProfile integrate_pair(const SpectralState& initial, double t0, double h,
                          const IntegratorConfig& config, const SimParams& params,
                          const ForcingSpec& forcing_full, const ForcingSpec& forcing_reduced);

}  // namespace avglab
