#include "avglab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace avglab {

std::string to_string(Method m) { return m == Method::if_rk4 ? "if_rk4" : "rk4"; }

double auto_time_step(Method method, const SimParams& params, const ForcingSpec& forcing) {
  double dt = std::min(kMaxStep, kOscillationStepFactor /
                                     (1.0 + params.alpha_norm() * forcing.max_wavenumber()));
  if (method == Method::rk4)
    dt = std::min(dt, kDissipativeStepFactor /
                          (params.nu * static_cast<double>(params.cutoff) * params.cutoff));
  return dt;
}

void TrajectoryRecord::write_csv(std::ostream& os) const {
  const bool with_gap = !gap.empty();
  const bool with_env = !envelope_ratio.empty();
  os << "t,energy,enstrophy,l2norm,gradbound,reality_defect";
  if (with_gap) os << ",gap";
  if (with_env) os << ",envelope_ratio";
  os << '\n';
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t[i] << ',' << energy[i] << ',' << enstrophy[i] << ',' << l2norm[i] << ','
       << gradbound[i] << ',' << reality_defect[i];
    if (with_gap) os << ',' << gap[i];
    if (with_env) os << ',' << envelope_ratio[i];
    os << '\n';
  }
  os.precision(old);
}

Stepper::Stepper(GalerkinModel& model, Method method)
    : model_(model),
      method_(method),
      k1_(model.zero_state()),
      k2_(model.zero_state()),
      k3_(model.zero_state()),
      k4_(model.zero_state()),
      w_(model.zero_state()) {}

void Stepper::refresh(double dt) {
  if (dt == cached_dt_) return;
  const auto& L = model_.linear_rates();
  full_.resize(L.size());
  half_.resize(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) {
    full_[i] = std::exp(L[i] * dt);
    half_[i] = std::exp(L[i] * (0.5 * dt));
  }
  cached_dt_ = dt;
}

void Stepper::step(double t, double dt, SpectralState& u) {
  auto& x = u.data();
  auto& a = k1_.data();
  auto& b = k2_.data();
  auto& c = k3_.data();
  auto& d = k4_.data();
  auto& w = w_.data();
  const std::size_t n = x.size();
  w_.mean() = u.mean();
  const double h2 = 0.5 * dt;
  if (method_ == Method::rk4) {
    model_.evaluate(t, u, k1_);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + h2 * a[i];
    model_.evaluate(t + h2, w_, k2_);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + h2 * b[i];
    model_.evaluate(t + h2, w_, k3_);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + dt * c[i];
    model_.evaluate(t + dt, w_, k4_);
    for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (a[i] + 2.0 * (b[i] + c[i]) + d[i]);
    return;
  }
  refresh(dt);
  const cplx* E = full_.data();
  const cplx* E2 = half_.data();
  model_.nonlinear_part(t, u, k1_);
  for (std::size_t i = 0; i < n; ++i) w[i] = E2[i] * (x[i] + h2 * a[i]);
  model_.nonlinear_part(t + h2, w_, k2_);
  for (std::size_t i = 0; i < n; ++i) w[i] = E2[i] * x[i] + h2 * b[i];
  model_.nonlinear_part(t + h2, w_, k3_);
  for (std::size_t i = 0; i < n; ++i) w[i] = E[i] * x[i] + dt * E2[i] * c[i];
  model_.nonlinear_part(t + dt, w_, k4_);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = E[i] * x[i] + dt / 6.0 * (E[i] * a[i] + 2.0 * E2[i] * (b[i] + c[i]) + d[i]);
}

namespace {

void record_sample(TrajectoryRecord& rec, double t, const SpectralState& u,
                   const IntegratorConfig& config) {
  rec.t.push_back(t);
  const double e = energy(u);
  rec.energy.push_back(e);
  rec.enstrophy.push_back(enstrophy(u));
  rec.l2norm.push_back(std::sqrt(e));
  rec.gradbound.push_back(grad_supnorm_bound(u));
  rec.reality_defect.push_back(reality_defect(u));
  if (config.envelope) rec.envelope_ratio.push_back(envelope_ratio(u, *config.envelope));
  if (config.keep_states) rec.states.push_back(u);
}

double resolve_step(const IntegratorConfig& config, const SimParams& params,
                    const ForcingSpec& forcing) {
  const double dt = config.dt > 0.0 ? config.dt : auto_time_step(config.method, params, forcing);
  const double phase = dt * params.alpha_norm() * forcing.max_wavenumber();
  if (phase > kMaxPhasePerStep * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " advances the fastest forcing phase by " << phase
       << " rad per step; at most " << kMaxPhasePerStep << " is allowed";
    throw PreconditionError(os.str());
  }
  if (!(config.sample_every > 0.0)) throw PreconditionError("sample_every must be positive");
  return dt;
}

}  // namespace

TrajectoryRecord integrate(const SpectralState& initial, double t0, const IntegratorConfig& config,
                           const SimParams& params, const ForcingSpec& forcing, Frame frame) {
  if (!(config.t_end >= t0)) throw PreconditionError("t_end must not precede the start time");
  GalerkinModel model(params, forcing, frame, initial.storage());
  if (!initial.same_shape(model.zero_state()))
    throw PreconditionError("initial state shape does not match the model parameters");
  for (int j = 0; j < initial.components(); ++j) {
    const double expected = model.zero_state().mean()[j];
    if (std::abs(initial.mean()[j] - expected) > 1e-12 * (1.0 + std::abs(expected)))
      throw PreconditionError("initial state mean does not match the " + to_string(frame) + " frame");
  }
  const double dt_nominal = resolve_step(config, params, model.forcing());
  Stepper stepper(model, config.method);

  TrajectoryRecord rec;
  SpectralState u = initial;
  const double e_initial = energy(u);
  const double blow_up =
      kBlowUpFactor * std::max({e_initial, model.forcing().sup_energy() / (params.nu * params.nu), 1.0});
  record_sample(rec, t0, u, config);

  const double span = config.t_end - t0;
  const auto intervals = static_cast<std::size_t>(std::ceil(span / config.sample_every - 1e-9));
  for (std::size_t j = 0; j < intervals; ++j) {
    const double a = t0 + static_cast<double>(j) * config.sample_every;
    const double b = j + 1 == intervals ? config.t_end
                                        : t0 + static_cast<double>(j + 1) * config.sample_every;
    const double len = b - a;
    if (len <= 0.0) continue;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(len / dt_nominal - 1e-9)));
    const double h = len / static_cast<double>(steps);
    rec.dt = std::max(rec.dt, h);
    for (std::size_t s = 0; s < steps; ++s) stepper.step(a + static_cast<double>(s) * h, h, u);
    rec.steps += steps;
    record_sample(rec, b, u, config);
    const double e = rec.energy.back();
    if (!std::isfinite(e) || e > blow_up) {
      std::ostringstream os;
      os << "blow-up at t = " << b << ": energy " << e << " exceeds " << blow_up
         << " (initial energy " << e_initial << ", step " << h << ")";
      throw BlowUpError(os.str());
    }
  }
  rec.final_state = u;
  return rec;
}

double GapProfile::sup() const {
  double s = 0.0;
  for (double g : gap) s = std::max(s, g);
  return s;
}

GapProfile integrate_pair(const SpectralState& initial, double t0, double h,
                          const IntegratorConfig& config, const SimParams& params,
                          const ForcingSpec& forcing_full, const ForcingSpec& forcing_reduced) {
  if (!(h > 0.0)) throw PreconditionError("pair horizon h must be positive");
  IntegratorConfig cfg = config;
  cfg.t_end = t0 + h;
  cfg.sample_every = std::min(config.sample_every, h / 200.0);
  cfg.keep_states = true;
  cfg.envelope.reset();
  const double dt_x = config.dt > 0.0 ? config.dt : auto_time_step(cfg.method, params, forcing_full);
  cfg.dt = dt_x;
  GapProfile out;
  out.x = integrate(initial, t0, cfg, params, forcing_full, Frame::moving);
  out.y = integrate(initial, t0, cfg, params, forcing_reduced, Frame::moving);
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    out.t.push_back(out.x.t[i] - t0);
    out.gap.push_back(distance(out.x.states[i], out.y.states[i]));
  }
  return out;
}

}  // namespace avglab
