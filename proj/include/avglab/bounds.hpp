#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "avglab/forcing.hpp"
#include "avglab/model.hpp"

namespace avglab {

/// Named constants with the result they come from and the inputs used.
struct BoundsEntry {
  std::string name;
  double value = 0.0;
  std::string origin;
  std::vector<std::pair<std::string, double>> inputs;
};

class BoundsReport {
 public:
  void add(std::string name, double value, std::string origin,
           std::vector<std::pair<std::string, double>> inputs = {});
  const std::vector<BoundsEntry>& entries() const { return entries_; }
  /// Throws if absent.
  const BoundsEntry& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  /// JSON list of {name, value, origin, inputs}.
  std::string to_json() const;

 private:
  std::vector<BoundsEntry> entries_;
};

/// 2^(s-1/2) + 2^(s-1)/sqrt(2s-1).
double burgers_D(double s);

struct BurgersTrapping {
  double E0 = 0.0;
  double D = 0.0;
  double N = 0.0;
  double C_min = 0.0;
  /// nu sqrt|k| - (D sqrt(E~) + sup|k|^(s-3/2)|f_k| / C_min) at |k| = ceil(N) + 1; positive.
  double margin = 0.0;
};

/// Energy-and-envelope trapping region constants for the forced Burgers ladder.
BurgersTrapping burgers_trapping_constants(double E_tilde, double s, double nu,
                                           const ForcingSpec& forcing);

struct AbsorbingStep {
  int i = 2;
  double s = 1.0;
  double C = 0.0;
  double D = 0.0;
  /// max(C_i, sqrt(E~) N^s_i): the envelope constant of a forward invariant absorbing set.
  double C_W = 0.0;
};

std::vector<AbsorbingStep> burgers_absorbing_sequence(double E_tilde, double nu,
                                                      const ForcingSpec& forcing, int i_max,
                                                      double eps);

/// Largest eigenvalue of (J + J^T)/2.
double log_norm_euclidean(const Eigen::MatrixXd& J);
/// max_i S_ii + sum_{j != i} |S_ij| with S = (J + J^T)/2.
double gershgorin_log_norm(const Eigen::MatrixXd& J);

struct RadiusSearch {
  int samples = 200;
  int bisections = 40;
  double E_floor = 1e-8;
  std::uint64_t seed = 1;
};

struct RadiusEstimate {
  bool found = false;
  double E_minus = 0.0;
  /// Sampled maximum of the log norm at E_minus.
  double mu_at_E_minus = 0.0;
  /// Sampled maximum of the log norm at E_floor.
  double mu_at_floor = 0.0;
  double E_envelope = 0.0;
  int samples = 0;
};

/// Sampled search for the largest energy E such that every sampled state of
/// {energy <= E, |a_k| <= C/|k|^s} has a Jacobian with negative log norm.
/// A floating-point estimate, not a proof.
RadiusEstimate find_negative_lognorm_radius(const SimParams& params, const ForcingSpec& forcing,
                                            double C, double s, const RadiusSearch& search = {});

/// (e^(l t) - 1)/l, continuous across l = 0.
double growth_factor(double l, double t);

/// C_v C_G (1 + e^(lt)) + C_G (C_DzFv + C_dvdt + C_DzvF)(e^(lt) - 1)/l.
double bk_profile(double Cv, double CG, double CDzFv, double Cdvdt, double CDzvF, double l,
                  double t);
/// sup over [0, h] of bk_profile; the profile is monotone so this is an endpoint value.
double bk_sup(double Cv, double CG, double CDzFv, double Cdvdt, double CDzvF, double l, double h);

/// Default nonlinearity constant D(s) sqrt(E~) of the absorbing set W(E~, C, s).
double default_nonlinearity_constant(double E_tilde, double s);

/// Sum over forced +-k of sup_[0,h0] b_k / |k.alpha| for the Burgers ladder
/// (p = 2, r = 1, C_G = 1, C_DzvF = 0).
double averaging_delta(const ForcingSpec& forcing, double l, double h0,
                       const std::array<double, 3>& alpha, const SimParams& params,
                       double C_hat);

/// Bound on sqrt(E_1) for step h0 (h0 <= 0 means 1/nu).
double burgers_E1(double A_V, double B_V, double s_V, double nu, double alpha, double C_hat,
                  double h0 = 0.0);

/// Attracting solution amplitude of z' = -nu z + e^(i alpha t): 1/(nu + i alpha).
std::complex<double> toy_ode_attractor(double nu, double alpha);

/// max(2 A_gamma/nu, (4 C^2 V0^(1 + 1/(2 gamma - 2)) / nu^2)^(gamma - 1)); requires V0 > V_star.
double nse2d_trapping_D(double V0, double gamma, double nu, double C_conv, double A_gamma,
                        double V_star = 0.0);

/// Sampled sup of |N_k(u)| |k|^(gamma-1-eps) / (sqrt(V0) D) over admissible 2D states.
double estimate_ns_nonlinearity_constant(double gamma, double eps, double V0, double D_env,
                                         int sample_size, int cutoff = 16, std::uint64_t seed = 1);

/// nu / C2(3, s) with the convolution constant estimated up to radius K.
double ns3d_trap_C(double nu, double s, int K = 0);
/// Smallest integer |k| with |k|^(s_V - s + 1)(|k| - 1) > A_V/(C nu).
int ns3d_K0(double C, double nu, double s, double s_V, double A_V);
/// (E1 - E2)/(sqrt(E1) sup_t sqrt(E(f))).
double ns3d_time_step(double E1, double E2, double forcing_norm_sup);

struct EnstrophyDelta {
  int n = 0;
  double tail = 0.0;
  double delta = 0.0;
};

/// Smallest n with sum_{|k|>n} C^2 |k|^(2-2s) < eps^2/4 (upper tail bound), delta = eps/(sqrt2 n).
EnstrophyDelta enstrophy_energy_delta(double C, double s, int d, double eps);

struct ResonanceScan {
  double min_value = 0.0;
  ModeIndex argmin;
};

/// min over 0 < |k| <= K of |k.alpha| in 2D; argmin in canonical form.
ResonanceScan nonresonance_scan(const std::array<double, 2>& alpha, int K);

}  // namespace avglab
