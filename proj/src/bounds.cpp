#include "avglab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "avglab/lattice.hpp"
#include "json.hpp"

namespace avglab {

void BoundsReport::add(std::string name, double value, std::string origin,
                       std::vector<std::pair<std::string, double>> inputs) {
  if (!std::isfinite(value)) throw std::runtime_error("bound '" + name + "' is not finite");
  if (origin.empty()) throw std::runtime_error("bound '" + name + "' has no origin");
  entries_.push_back({std::move(name), value, std::move(origin), std::move(inputs)});
}

const BoundsEntry& BoundsReport::at(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw std::out_of_range("no bound named '" + name + "'");
}

bool BoundsReport::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const BoundsEntry& e) { return e.name == name; });
}

std::string BoundsReport::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [k, v] : e.inputs) inputs[k] = v;
    out.push_back({{"name", e.name}, {"value", e.value}, {"origin", e.origin}, {"inputs", inputs}});
  }
  return out.dump(2);
}

double burgers_D(double s) {
  if (!(s > 0.5)) throw PreconditionError("D(s) needs s > 1/2");
  return std::pow(2.0, s - 0.5) + std::pow(2.0, s - 1.0) / std::sqrt(2.0 * s - 1.0);
}

namespace {

void require_energy_above_forcing(double E_tilde, double nu, const ForcingSpec& forcing) {
  if (!(nu > 0.0)) throw PreconditionError("nu must be positive");
  const double E0 = forcing.sup_energy() / (nu * nu);
  if (!(E_tilde > E0)) {
    std::ostringstream os;
    os << "energy level " << E_tilde << " must exceed E0 = sup energy(f)/nu^2 = " << E0;
    throw PreconditionError(os.str());
  }
}

}  // namespace

BurgersTrapping burgers_trapping_constants(double E_tilde, double s, double nu,
                                           const ForcingSpec& forcing) {
  require_energy_above_forcing(E_tilde, nu, forcing);
  BurgersTrapping r;
  r.E0 = forcing.sup_energy() / (nu * nu);
  r.D = burgers_D(s);
  const double root = std::sqrt(E_tilde);
  r.N = std::pow((root * r.D + 1.0) / nu, 2);
  const double fsup = forcing.sup_weighted(s - 1.5);
  r.C_min = std::max(root * std::pow(r.N, s), fsup);
  const double k = std::ceil(r.N) + 1.0;
  r.margin = nu * std::sqrt(k) - (r.D * root + fsup / r.C_min);
  if (!(r.margin > 0.0))
    throw std::logic_error("trapping inequality fails at |k| = ceil(N) + 1");
  return r;
}

std::vector<AbsorbingStep> burgers_absorbing_sequence(double E_tilde, double nu,
                                                      const ForcingSpec& forcing, int i_max,
                                                      double eps) {
  require_energy_above_forcing(E_tilde, nu, forcing);
  if (i_max < 2) throw PreconditionError("absorbing sequence needs i_max >= 2");
  if (eps < 0.0) throw PreconditionError("eps must be nonnegative");
  const double root = std::sqrt(E_tilde);
  const double N = std::pow((root * burgers_D(2.0) + 1.0) / nu, 2);
  std::vector<AbsorbingStep> out;
  for (int i = 2; i <= i_max; ++i) {
    AbsorbingStep st;
    st.i = i;
    st.s = 0.5 * i;
    st.D = burgers_D(st.s);
    if (i == 2) {
      st.C = eps + (0.5 * E_tilde + forcing.sup_weighted(-1.0)) / nu;
    } else {
      const auto& prev = out.back();
      st.C = eps + (prev.C * root * prev.D + forcing.sup_weighted(st.s - 2.0)) / nu;
    }
    st.C_W = std::max(st.C, root * std::pow(N, st.s));
    out.push_back(st);
  }
  return out;
}

double log_norm_euclidean(const Eigen::MatrixXd& J) {
  if (J.rows() != J.cols() || J.rows() == 0) throw PreconditionError("log norm needs a square matrix");
  const Eigen::MatrixXd S = 0.5 * (J + J.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double gershgorin_log_norm(const Eigen::MatrixXd& J) {
  if (J.rows() != J.cols() || J.rows() == 0) throw PreconditionError("log norm needs a square matrix");
  const Eigen::MatrixXd S = 0.5 * (J + J.transpose());
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    double r = S(i, i);
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      if (j != i) r += std::abs(S(i, j));
    best = std::max(best, r);
  }
  return best;
}

RadiusEstimate find_negative_lognorm_radius(const SimParams& params, const ForcingSpec& forcing,
                                            double C, double s, const RadiusSearch& search) {
  params.validate(forcing);
  if (!(C > 0.0)) throw PreconditionError("envelope constant C must be positive");
  if (search.samples < 1) throw PreconditionError("need at least one sample");
  const Frame frame = Frame::moving;
  std::mt19937_64 rng(search.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Sample {
    SpectralState base;
    double energy;
    double shrink;
  };
  std::vector<Sample> pool;
  for (int i = 0; i < search.samples; ++i) {
    SpectralState b = random_state(params.dim(), params.cutoff, params.components(), {C, s}, rng,
                                   i % 2 == 0 ? 1.0 : 0.0);
    // even samples sit on the energy sphere, odd ones inside it
    const double shrink = i % 2 == 0 ? 1.0 : 0.3 + 0.7 * unit(rng);
    pool.push_back({b, energy(b), shrink});
  }
  RadiusEstimate out;
  out.samples = search.samples;
  {
    SpectralState env(params.dim(), params.cutoff, params.components());
    double e = 0.0;
    for (const auto& k : env.modes().canonical()) e += 2.0 * std::pow(C / std::pow(k.norm(), s), 2);
    out.E_envelope = e;
  }
  auto worst_mu = [&](double E) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : pool) {
      const double scale = p.energy > 0.0 ? std::min(1.0, std::sqrt(E / p.energy)) * p.shrink : 0.0;
      SpectralState a = p.base;
      for (auto& v : a.data()) v *= scale;
      worst = std::max(worst, log_norm_euclidean(jacobian(0.0, a, params, forcing, frame)));
    }
    return worst;
  };
  out.mu_at_floor = worst_mu(search.E_floor);
  if (!(out.mu_at_floor < 0.0)) return out;
  out.found = true;
  const double mu_top = worst_mu(out.E_envelope);
  if (mu_top < 0.0) {
    out.E_minus = out.E_envelope;
    out.mu_at_E_minus = mu_top;
    return out;
  }
  double lo = std::log(search.E_floor), hi = std::log(out.E_envelope);
  double mu_lo = out.mu_at_floor;
  for (int it = 0; it < search.bisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double mu = worst_mu(std::exp(mid));
    if (mu < 0.0) {
      lo = mid;
      mu_lo = mu;
    } else {
      hi = mid;
    }
  }
  out.E_minus = std::exp(lo);
  out.mu_at_E_minus = mu_lo;
  return out;
}

double growth_factor(double l, double t) {
  const double x = l * t;
  if (std::abs(x) < 1e-8) return t * (1.0 + 0.5 * x);
  return std::expm1(x) / l;
}

double bk_profile(double Cv, double CG, double CDzFv, double Cdvdt, double CDzvF, double l,
                  double t) {
  if (t < 0.0) throw PreconditionError("b_k profile needs t >= 0");
  return Cv * CG * (1.0 + std::exp(l * t)) + CG * (CDzFv + Cdvdt + CDzvF) * growth_factor(l, t);
}

double bk_sup(double Cv, double CG, double CDzFv, double Cdvdt, double CDzvF, double l, double h) {
  return std::max(bk_profile(Cv, CG, CDzFv, Cdvdt, CDzvF, l, 0.0),
                  bk_profile(Cv, CG, CDzFv, Cdvdt, CDzvF, l, h));
}

double default_nonlinearity_constant(double E_tilde, double s) {
  return burgers_D(s) * std::sqrt(E_tilde);
}

double averaging_delta(const ForcingSpec& forcing, double l, double h0,
                       const std::array<double, 3>& alpha, const SimParams& params,
                       double C_hat) {
  params.validate(forcing);
  if (!(h0 > 0.0)) throw PreconditionError("h0 must be positive");
  const auto& env = forcing.envelope();
  constexpr double p = 2.0;
  constexpr double r = 1.0;
  const int d = params.dim();
  const double S = sum_S(d, env.s_V - r).upper;
  double total = 0.0;
  for (const auto& fm : forcing.modes()) {
    const double omega = dot(fm.k, alpha);
    if (omega == 0.0)
      throw PreconditionError("forced mode " + fm.k.str() + " is resonant: k.alpha = 0");
    const double kn = fm.k.norm();
    const double Cv = env.A_V / std::pow(kn, env.s_V);
    const double Cdvdt = env.B_V / std::pow(kn, env.s_V);
    const double CDzFv = env.A_V / std::pow(kn, env.s_V - p) * (params.nu + C_hat * S);
    // +k and -k contribute equally
    total += 2.0 * bk_sup(Cv, 1.0, CDzFv, Cdvdt, 0.0, l, h0) / std::abs(omega);
  }
  return total;
}

double burgers_E1(double A_V, double B_V, double s_V, double nu, double alpha, double C_hat,
                  double h0) {
  constexpr double p = 2.0;
  constexpr double r = 1.0;
  if (!(s_V > 5.0)) throw PreconditionError("the E1 bound needs s_V > d + p + r + 1 = 5");
  if (alpha == 0.0) throw PreconditionError("the E1 bound needs alpha != 0");
  if (!(nu > 0.0)) throw PreconditionError("nu must be positive");
  if (h0 <= 0.0) h0 = 1.0 / nu;
  const double S_a = sum_S(1, s_V + 1.0).upper;
  const double S_b = sum_S(1, s_V - p + 1.0).upper;
  const double S_c = sum_S(1, s_V - r).upper;
  const double num = 3.0 * A_V * S_a + 1.5 * (A_V * S_b * (nu + C_hat * S_c) + B_V * S_a) * h0;
  return num / (std::abs(alpha) * (-std::expm1(-nu * h0)));
}

std::complex<double> toy_ode_attractor(double nu, double alpha) {
  if (!(nu > 0.0)) throw PreconditionError("nu must be positive");
  return 1.0 / std::complex<double>(nu, alpha);
}

double nse2d_trapping_D(double V0, double gamma, double nu, double C_conv, double A_gamma,
                        double V_star) {
  if (!(gamma > 1.0)) throw PreconditionError("gamma must exceed 1");
  if (!(nu > 0.0)) throw PreconditionError("nu must be positive");
  if (!(V0 > V_star)) throw PreconditionError("V0 must exceed V* = sup V(f)/nu^2");
  const double first = 2.0 * A_gamma / nu;
  const double second =
      std::pow(4.0 * C_conv * C_conv * std::pow(V0, 1.0 + 1.0 / (2.0 * gamma - 2.0)) / (nu * nu),
               gamma - 1.0);
  return std::max(first, second);
}

double estimate_ns_nonlinearity_constant(double gamma, double eps, double V0, double D_env,
                                         int sample_size, int cutoff, std::uint64_t seed) {
  if (!(V0 > 0.0) || !(D_env > 0.0)) throw PreconditionError("V0 and D must be positive");
  if (sample_size < 1) throw PreconditionError("need at least one sample");
  SimParams params;
  params.model = ModelKind::nse2d;
  params.cutoff = cutoff;
  GalerkinModel model(params, ForcingSpec::none(2, 2), Frame::moving);
  SpectralState n = model.zero_state();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double norm = std::sqrt(V0) * D_env;
  double best = 0.0;
  for (int i = 0; i < sample_size; ++i) {
    SpectralState u = random_state(2, cutoff, 2, {D_env, gamma}, rng, 0.0);
    const double v = enstrophy(u);
    const double scale = v > 0.0 ? std::min(1.0, std::sqrt(V0 / v)) * (0.5 + 0.5 * unit(rng)) : 0.0;
    for (auto& x : u.data()) x *= scale;
    model.nonlinear_part(0.0, u, n);
    for (std::size_t s = 0; s < n.slots(); ++s) {
      const double mag = std::hypot(std::abs(n.canonical(s)[0]), std::abs(n.canonical(s)[1]));
      best = std::max(best, mag * std::pow(n.modes().mode(s).norm(), gamma - 1.0 - eps) / norm);
    }
  }
  return best;
}

double ns3d_trap_C(double nu, double s, int K) {
  if (!(s > 3.0)) throw PreconditionError("3D trapping needs s > 3");
  if (!(nu > 0.0)) throw PreconditionError("nu must be positive");
  return nu / estimate_C2(3, s, K);
}

int ns3d_K0(double C, double nu, double s, double s_V, double A_V) {
  if (!(C > 0.0) || !(nu > 0.0)) throw PreconditionError("C and nu must be positive");
  if (s_V < s) throw PreconditionError("s_V must be at least s");
  if (A_V < 0.0) throw PreconditionError("A_V must be nonnegative");
  const double rhs = A_V / (C * nu);
  for (int k = 1; k < 1000000; ++k)
    if (std::pow(k, s_V - s + 1.0) * (k - 1.0) > rhs) return k;
  throw std::runtime_error("K0 search exceeded 10^6");
}

double ns3d_time_step(double E1, double E2, double forcing_norm_sup) {
  if (!(E1 > E2) || !(E2 > 0.0)) throw PreconditionError("need E1 > E2 > 0");
  if (!(forcing_norm_sup > 0.0)) throw PreconditionError("forcing norm must be positive");
  return (E1 - E2) / (std::sqrt(E1) * forcing_norm_sup);
}

EnstrophyDelta enstrophy_energy_delta(double C, double s, int d, double eps) {
  if (!(s > d + 1.0)) throw PreconditionError("need s > d + 1");
  if (!(eps > 0.0) || !(C >= 0.0)) throw PreconditionError("need eps > 0 and C >= 0");
  const double target = 0.25 * eps * eps;
  EnstrophyDelta out;
  for (int n = 1; n < 10000000; ++n) {
    const double tail = C * C * lattice_tail(d, 2.0 * s - 2.0, static_cast<double>(n)).upper;
    if (tail < target) {
      out.n = n;
      out.tail = tail;
      out.delta = eps / (std::sqrt(2.0) * n);
      return out;
    }
  }
  throw std::runtime_error("no truncation radius found");
}

ResonanceScan nonresonance_scan(const std::array<double, 2>& alpha, int K) {
  if (K < 1) throw PreconditionError("scan radius must be at least 1");
  ResonanceScan out;
  out.min_value = std::numeric_limits<double>::infinity();
  const long long K2 = static_cast<long long>(K) * K;
  for (int a = 0; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const ModeIndex k(a, b);
      if (!k.is_canonical() || static_cast<long long>(k.norm2()) > K2) continue;
      const double v = std::abs(a * alpha[0] + b * alpha[1]);
      const bool better = v < out.min_value ||
                          (v == out.min_value && k.norm2() < out.argmin.norm2());
      if (better) {
        out.min_value = v;
        out.argmin = k;
      }
    }
  return out;
}

}  // namespace avglab
