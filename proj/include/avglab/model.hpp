#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "avglab/forcing.hpp"
#include "avglab/spectral.hpp"

namespace avglab {

enum class ModelKind { burgers, nse2d };
enum class Frame { lab, moving };
enum class FrameDirection { to_moving, to_lab };

std::string to_string(ModelKind m);
std::string to_string(Frame f);

struct SimParams {
  ModelKind model = ModelKind::burgers;
  double nu = 1.0;
  /// Mean velocity; only the first dim() entries are used.
  std::array<double, 3> alpha{0.0, 0.0, 0.0};
  int cutoff = 16;
  /// false drops the quadratic term (linear tests).
  bool nonlinear = true;

  int dim() const { return model == ModelKind::burgers ? 1 : 2; }
  int components() const { return model == ModelKind::burgers ? 1 : 2; }
  double alpha_norm() const;
  void validate() const;
  void validate(const ForcingSpec& forcing) const;
};

/// Zero state with the mean the frame expects (alpha in the lab frame, 0 when moving).
SpectralState make_state(const SimParams& params, Frame frame,
                         SpectralState::Storage storage = SpectralState::Storage::half);

/// v - k (v.k)/|k|^2.
Amplitude leray_project(const ModeIndex& k, const Amplitude& v);

/// -(ik/2) sum u_{k1} u_{k-k1} over retained k1, k-k1, both nonzero.
SpectralState burgers_nonlinearity(const SpectralState& u);
/// -i P_k sum (u_{k1}.k) u_{k-k1} over retained nonzero k1, k-k1 (direct vector form).
SpectralState nse2d_nonlinearity(const SpectralState& u);

/// Lab frame: u_k' = (-nu|k|^2 - i k.alpha) u_k + N_k + f_k(t).
/// Moving frame: a_k' = -nu|k|^2 a_k + N_k + f_k(t) exp(i k.alpha t).
SpectralState rhs(double t, const SpectralState& u, const SimParams& params,
                  const ForcingSpec& forcing, Frame frame);

/// Moving coordinates a_k = u_k exp(i k.alpha t) with mean shifted by -alpha.
SpectralState frame_transform(const SpectralState& u, const std::array<double, 3>& alpha,
                              double t, FrameDirection direction);

/// Number of real coordinates of the reduced phase space.
std::size_t reduced_size(const SimParams& params);
/// Real coordinates: (Re, Im) of the scalar amplitude of each canonical mode.
/// Vector fields use the stream amplitude psi_k = e_k . u_k with e_k = (-k2, k1)/|k|.
Eigen::VectorXd to_reduced(const SpectralState& u);
SpectralState from_reduced(const Eigen::VectorXd& x, const SpectralState& like);

/// Analytic Jacobian of rhs in the reduced real coordinates.
Eigen::MatrixXd jacobian(double t, const SpectralState& u, const SimParams& params,
                         const ForcingSpec& forcing, Frame frame);

/// Evaluator with preallocated buffers, used by the time steppers.
///
/// Splits the vector field into a diagonal linear part and the rest so the
/// integrating-factor scheme can treat the linear part exactly.
class GalerkinModel {
 public:
  GalerkinModel(SimParams params, ForcingSpec forcing, Frame frame,
                SpectralState::Storage storage = SpectralState::Storage::half);

  const SimParams& params() const { return params_; }
  const ForcingSpec& forcing() const { return forcing_; }
  Frame frame() const { return frame_; }
  SpectralState zero_state() const;

  /// Diagonal linear rate for every raw coefficient of a state.
  const std::vector<cplx>& linear_rates() const { return rates_; }
  /// out = N(u) + forcing term.
  void nonlinear_part(double t, const SpectralState& u, SpectralState& out);
  /// out = full vector field.
  void evaluate(double t, const SpectralState& u, SpectralState& out);

 private:
  SimParams params_;
  ForcingSpec forcing_;
  Frame frame_;
  SpectralState::Storage storage_;
  std::shared_ptr<const ModeSet> modes_;
  std::vector<cplx> rates_;
  std::vector<int> forced_slot_;

  // Burgers buffers
  std::vector<double> ar_, ai_;
  // 2D stream-amplitude kernel: unordered pairs (a, b) with a + b = target
  std::vector<double> pr_, pi_;
  std::vector<std::int32_t> pair_start_, pair_a_, pair_b_;
  std::vector<double> pair_c_;
  std::vector<std::array<double, 2>> unit_;

  void build_pair_tables();
  void burgers_kernel(const SpectralState& u, SpectralState& out);
  void nse_kernel(const SpectralState& u, SpectralState& out);
  void add_forcing(double t, SpectralState& out) const;
};

}  // namespace avglab
