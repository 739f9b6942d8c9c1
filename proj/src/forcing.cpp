#include "avglab/forcing.hpp"

#include <algorithm>
#include <cmath>

#include "avglab/model.hpp"

namespace avglab {

double ForcedMode::shape(double t) const {
  return profile == Profile::constant ? 1.0 : std::cos(omega_slow * t + phase);
}

double ForcedMode::shape_rate(double t) const {
  return profile == Profile::constant ? 0.0 : -omega_slow * std::sin(omega_slow * t + phase);
}

double ForcedMode::magnitude(int components) const {
  double s = 0.0;
  for (int j = 0; j < components; ++j) s += std::norm(amplitude[j]);
  return std::sqrt(s);
}

ForcingSpec::ForcingSpec(int dim, int components, std::vector<ForcedMode> modes, double s_V)
    : dim_(dim), components_(components) {
  if (dim < 1 || dim > 3) throw PreconditionError("forcing dimension must be 1, 2 or 3");
  if (components < 1 || components > 3) throw PreconditionError("forcing components must be 1 to 3");
  for (auto fm : modes) {
    if (fm.k.dim != dim)
      throw PreconditionError("forced mode " + fm.k.str() + " has the wrong dimension");
    if (fm.k.is_zero()) throw PreconditionError("forcing of the zero mode must vanish");
    if (fm.profile == Profile::constant) {
      fm.omega_slow = 0.0;
      fm.phase = 0.0;
    }
    if (!fm.k.is_canonical()) {
      fm.k = -fm.k;
      for (auto& a : fm.amplitude) a = std::conj(a);
    }
    for (int j = components; j < 3; ++j) fm.amplitude[j] = 0.0;
    if (components > 1) fm.amplitude = leray_project(fm.k, fm.amplitude);
    auto same = std::find_if(modes_.begin(), modes_.end(),
                             [&](const ForcedMode& o) { return o.k == fm.k; });
    if (same != modes_.end()) {
      bool match = same->profile == fm.profile && same->omega_slow == fm.omega_slow &&
                   same->phase == fm.phase;
      for (int j = 0; j < components; ++j)
        match = match && std::abs(same->amplitude[j] - fm.amplitude[j]) <=
                             1e-14 * (1.0 + std::abs(fm.amplitude[j]));
      if (!match)
        throw PreconditionError("forced mode " + fm.k.str() +
                                " is listed twice with inconsistent entries");
      continue;
    }
    modes_.push_back(fm);
  }
  envelope_.s_V = s_V;
  for (const auto& fm : modes_) {
    const double w = std::pow(fm.k.norm(), s_V) * fm.magnitude(components_);
    envelope_.A_V = std::max(envelope_.A_V, w);
    envelope_.B_V = std::max(envelope_.B_V, w * std::abs(fm.omega_slow));
  }
}

Amplitude ForcingSpec::value(std::size_t i, double t) const {
  const auto& fm = modes_[i];
  const double g = fm.shape(t);
  Amplitude a{};
  for (int j = 0; j < components_; ++j) a[j] = fm.amplitude[j] * g;
  return a;
}

Amplitude ForcingSpec::rate(std::size_t i, double t) const {
  const auto& fm = modes_[i];
  const double g = fm.shape_rate(t);
  Amplitude a{};
  for (int j = 0; j < components_; ++j) a[j] = fm.amplitude[j] * g;
  return a;
}

double ForcingSpec::max_wavenumber() const {
  double j = 0.0;
  for (const auto& fm : modes_) j = std::max(j, fm.k.norm());
  return j;
}

double ForcingSpec::sup_energy() const {
  double s = 0.0;
  for (const auto& fm : modes_) s += 2.0 * std::pow(fm.magnitude(components_), 2);
  return s;
}

double ForcingSpec::sup_enstrophy() const {
  double s = 0.0;
  for (const auto& fm : modes_) s += 2.0 * fm.k.norm2() * std::pow(fm.magnitude(components_), 2);
  return s;
}

double ForcingSpec::sup_weighted(double e) const {
  double s = 0.0;
  for (const auto& fm : modes_) s = std::max(s, std::pow(fm.k.norm(), e) * fm.magnitude(components_));
  return s;
}

ForcingSpec ForcingSpec::scaled(double factor) const {
  auto modes = modes_;
  for (auto& fm : modes)
    for (auto& a : fm.amplitude) a *= factor;
  return ForcingSpec(dim_, components_, std::move(modes), envelope_.s_V);
}

ForcingSpec ForcingSpec::with_decay_exponent(double s_V) const {
  return ForcingSpec(dim_, components_, modes_, s_V);
}

}  // namespace avglab
