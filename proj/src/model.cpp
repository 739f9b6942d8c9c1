#include "avglab/model.hpp"

#include <cmath>
#include <stdexcept>

namespace avglab {

std::string to_string(ModelKind m) { return m == ModelKind::burgers ? "burgers" : "nse2d"; }
std::string to_string(Frame f) { return f == Frame::lab ? "lab" : "moving"; }

double SimParams::alpha_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += alpha[i] * alpha[i];
  return std::sqrt(s);
}

void SimParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw PreconditionError("nu must be positive");
  if (cutoff < 1) throw PreconditionError("cutoff m must be at least 1");
  for (int i = 0; i < dim(); ++i)
    if (!std::isfinite(alpha[i])) throw PreconditionError("alpha must be finite");
}

void SimParams::validate(const ForcingSpec& forcing) const {
  validate();
  if (!forcing.empty() && (forcing.dim() != dim() || forcing.components() != components()))
    throw PreconditionError("forcing shape does not match the model");
  for (const auto& fm : forcing.modes())
    if (fm.k.norm2() > cutoff * cutoff)
      throw PreconditionError("forced mode " + fm.k.str() + " lies beyond the cutoff m = " +
                              std::to_string(cutoff));
}

SpectralState make_state(const SimParams& params, Frame frame, SpectralState::Storage storage) {
  SpectralState s(params.dim(), params.cutoff, params.components(), storage);
  if (frame == Frame::lab)
    for (int j = 0; j < params.components(); ++j) s.mean()[j] = params.alpha[j];
  return s;
}

Amplitude leray_project(const ModeIndex& k, const Amplitude& v) {
  if (k.is_zero()) throw PreconditionError("projection direction k must be nonzero");
  cplx d = 0.0;
  for (int j = 0; j < k.dim; ++j) d += v[j] * static_cast<double>(k.c[j]);
  Amplitude out = v;
  const double k2 = static_cast<double>(k.norm2());
  for (int j = 0; j < k.dim; ++j) out[j] -= static_cast<double>(k.c[j]) * d / k2;
  return out;
}

namespace {

std::array<double, 2> stream_direction(const ModeIndex& k) {
  const double n = k.norm();
  return {-k.c[1] / n, k.c[0] / n};
}

// Mode of a doubled index: [0, M) canonical, [M, 2M) mirrors.
ModeIndex doubled_mode(const ModeSet& ms, std::size_t i) {
  const std::size_t M = ms.size();
  return i < M ? ms.mode(i) : -ms.mode(i - M);
}

int doubled_index(const ModeSet& ms, const ModeIndex& k) {
  const int code = ms.lookup(k);
  if (code == 0) return -1;
  return code > 0 ? code - 1 : static_cast<int>(ms.size()) + (-code - 1);
}

void require_frame_mean(const SpectralState& u, const SimParams& params, Frame frame) {
  for (int j = 0; j < u.components(); ++j) {
    const double expected = frame == Frame::lab ? params.alpha[j] : 0.0;
    if (std::abs(u.mean()[j] - expected) > 1e-12 * (1.0 + std::abs(expected)))
      throw PreconditionError("state mean does not match the " + to_string(frame) + " frame");
  }
}

void require_shape(const SpectralState& u, const SimParams& params) {
  if (u.dim() != params.dim() || u.components() != params.components() ||
      u.cutoff() != params.cutoff)
    throw PreconditionError("state shape does not match the model parameters");
}

// Interaction coefficient c(k, a, b) so that N_k = -i sum_{a+b=k} c phi_a phi_b.
double interaction(ModelKind model, const ModeIndex& k, const ModeIndex& a, const ModeIndex& b) {
  if (model == ModelKind::burgers) return 0.5 * k.c[0];
  const auto ea = stream_direction(a);
  const auto ek = stream_direction(k);
  const auto eb = stream_direction(b);
  return (ea[0] * k.c[0] + ea[1] * k.c[1]) * (ek[0] * eb[0] + ek[1] * eb[1]);
}

}  // namespace

SpectralState burgers_nonlinearity(const SpectralState& u) {
  if (u.dim() != 1 || u.components() != 1)
    throw PreconditionError("Burgers nonlinearity needs a scalar 1D state");
  SimParams p;
  p.model = ModelKind::burgers;
  p.cutoff = u.cutoff();
  GalerkinModel model(p, ForcingSpec::none(1, 1), Frame::moving, u.storage());
  SpectralState out = u;
  out.mean() = {0.0, 0.0, 0.0};
  SpectralState in = u;
  in.mean() = {0.0, 0.0, 0.0};
  model.nonlinear_part(0.0, in, out);
  return out;
}

SpectralState nse2d_nonlinearity(const SpectralState& u) {
  if (u.dim() != 2 || u.components() != 2)
    throw PreconditionError("2D Navier-Stokes nonlinearity needs a 2-component 2D state");
  const ModeSet& ms = u.modes();
  const std::size_t M = ms.size();
  std::vector<Amplitude> amp(2 * M);
  for (std::size_t i = 0; i < 2 * M; ++i) amp[i] = u.amplitude(doubled_mode(ms, i));
  SpectralState out(u.mode_set(), 2, u.storage());
  const std::size_t targets = u.storage() == SpectralState::Storage::full ? 2 * M : M;
  for (std::size_t t = 0; t < targets; ++t) {
    const ModeIndex k = doubled_mode(ms, t);
    Amplitude acc{};
    for (std::size_t a = 0; a < 2 * M; ++a) {
      const int b = doubled_index(ms, k - doubled_mode(ms, a));
      if (b < 0) continue;
      const cplx flux = amp[a][0] * static_cast<double>(k.c[0]) + amp[a][1] * static_cast<double>(k.c[1]);
      acc[0] += flux * amp[b][0];
      acc[1] += flux * amp[b][1];
    }
    Amplitude n = leray_project(k, acc);
    n[0] *= cplx(0.0, -1.0);
    n[1] *= cplx(0.0, -1.0);
    cplx* dst = t < M ? out.canonical(t) : out.mirror(t - M);
    dst[0] = n[0];
    dst[1] = n[1];
  }
  return out;
}

SpectralState rhs(double t, const SpectralState& u, const SimParams& params,
                  const ForcingSpec& forcing, Frame frame) {
  params.validate(forcing);
  require_shape(u, params);
  require_frame_mean(u, params, frame);
  GalerkinModel model(params, forcing, frame, u.storage());
  SpectralState out(u.mode_set(), u.components(), u.storage());
  model.evaluate(t, u, out);
  return out;
}

SpectralState frame_transform(const SpectralState& u, const std::array<double, 3>& alpha,
                              double t, FrameDirection direction) {
  SpectralState out = u;
  const double sign = direction == FrameDirection::to_moving ? 1.0 : -1.0;
  const ModeSet& ms = u.modes();
  const int n = u.components();
  for (std::size_t s = 0; s < ms.size(); ++s) {
    const double phase = sign * dot(ms.mode(s), alpha) * t;
    const cplx rot = std::polar(1.0, phase);
    for (int j = 0; j < n; ++j) out.canonical(s)[j] *= rot;
    if (u.storage() == SpectralState::Storage::full)
      for (int j = 0; j < n; ++j) out.mirror(s)[j] *= std::conj(rot);
  }
  for (int j = 0; j < n; ++j) out.mean()[j] -= sign * alpha[j];
  return out;
}

std::size_t reduced_size(const SimParams& params) {
  return 2 * ModeSet::make(params.dim(), params.cutoff)->size();
}

Eigen::VectorXd to_reduced(const SpectralState& u) {
  const ModeSet& ms = u.modes();
  Eigen::VectorXd x(2 * ms.size());
  for (std::size_t s = 0; s < ms.size(); ++s) {
    cplx phi = u.canonical(s)[0];
    if (u.components() == 2) {
      const auto e = stream_direction(ms.mode(s));
      phi = e[0] * u.canonical(s)[0] + e[1] * u.canonical(s)[1];
    }
    x(2 * s) = phi.real();
    x(2 * s + 1) = phi.imag();
  }
  return x;
}

SpectralState from_reduced(const Eigen::VectorXd& x, const SpectralState& like) {
  SpectralState out(like.mode_set(), like.components(), like.storage());
  out.mean() = like.mean();
  const ModeSet& ms = like.modes();
  if (static_cast<std::size_t>(x.size()) != 2 * ms.size())
    throw PreconditionError("reduced vector has the wrong length");
  for (std::size_t s = 0; s < ms.size(); ++s) {
    const cplx phi(x(2 * s), x(2 * s + 1));
    Amplitude v{};
    if (like.components() == 2) {
      const auto e = stream_direction(ms.mode(s));
      v[0] = e[0] * phi;
      v[1] = e[1] * phi;
    } else {
      v[0] = phi;
    }
    out.set_pair(ms.mode(s), v);
  }
  return out;
}

Eigen::MatrixXd jacobian(double t, const SpectralState& u, const SimParams& params,
                         const ForcingSpec& forcing, Frame frame) {
  (void)t;
  params.validate(forcing);
  require_shape(u, params);
  const ModeSet& ms = u.modes();
  const std::size_t M = ms.size();
  const Eigen::VectorXd x = to_reduced(u);
  // Scalar amplitudes on both halves; the stream amplitude is odd under k -> -k.
  const double mirror_sign = params.components() == 2 ? -1.0 : 1.0;
  std::vector<cplx> phi(2 * M);
  for (std::size_t s = 0; s < M; ++s) {
    phi[s] = cplx(x(2 * s), x(2 * s + 1));
    phi[M + s] = mirror_sign * std::conj(phi[s]);
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * M, 2 * M);
  for (std::size_t r = 0; r < M; ++r) {
    const ModeIndex& k = ms.mode(r);
    cplx L(-params.nu * k.norm2(), 0.0);
    if (frame == Frame::lab) L += cplx(0.0, -dot(k, params.alpha));
    J(2 * r, 2 * r) += L.real();
    J(2 * r, 2 * r + 1) -= L.imag();
    J(2 * r + 1, 2 * r) += L.imag();
    J(2 * r + 1, 2 * r + 1) += L.real();
    if (!params.nonlinear) continue;
    for (std::size_t s = 0; s < M; ++s) {
      const ModeIndex& j = ms.mode(s);
      cplx A = 0.0, B = 0.0;
      const ModeIndex kmj = k - j;
      const int ia = doubled_index(ms, kmj);
      if (ia >= 0)
        A = cplx(0.0, -1.0) * phi[static_cast<std::size_t>(ia)] *
            (interaction(params.model, k, j, kmj) + interaction(params.model, k, kmj, j));
      const ModeIndex kpj = k + j;
      const int ib = doubled_index(ms, kpj);
      if (ib >= 0)
        B = mirror_sign * cplx(0.0, -1.0) * phi[static_cast<std::size_t>(ib)] *
            (interaction(params.model, k, -j, kpj) + interaction(params.model, k, kpj, -j));
      const cplx dx = A + B;
      const cplx dy = cplx(0.0, 1.0) * (A - B);
      J(2 * r, 2 * s) += dx.real();
      J(2 * r, 2 * s + 1) += dy.real();
      J(2 * r + 1, 2 * s) += dx.imag();
      J(2 * r + 1, 2 * s + 1) += dy.imag();
    }
  }
  return J;
}

GalerkinModel::GalerkinModel(SimParams params, ForcingSpec forcing, Frame frame,
                             SpectralState::Storage storage)
    : params_(params), forcing_(std::move(forcing)), frame_(frame), storage_(storage) {
  if (forcing_.empty()) forcing_ = ForcingSpec::none(params_.dim(), params_.components());
  params_.validate(forcing_);
  modes_ = ModeSet::make(params_.dim(), params_.cutoff);
  const std::size_t M = modes_->size();
  const int n = params_.components();
  const std::size_t halves = storage_ == SpectralState::Storage::full ? 2 : 1;
  rates_.resize(halves * M * static_cast<std::size_t>(n));
  for (std::size_t h = 0; h < halves; ++h)
    for (std::size_t s = 0; s < M; ++s) {
      const ModeIndex k = h == 0 ? modes_->mode(s) : -modes_->mode(s);
      cplx L(-params_.nu * k.norm2(), 0.0);
      if (frame_ == Frame::lab) L += cplx(0.0, -dot(k, params_.alpha));
      for (int j = 0; j < n; ++j) rates_[(h * M + s) * n + j] = L;
    }
  for (const auto& fm : forcing_.modes()) forced_slot_.push_back(modes_->lookup(fm.k) - 1);
  if (params_.model == ModelKind::burgers) {
    ar_.assign(2 * params_.cutoff + 1, 0.0);
    ai_.assign(2 * params_.cutoff + 1, 0.0);
  } else if (params_.nonlinear) {
    build_pair_tables();
  }
}

SpectralState GalerkinModel::zero_state() const {
  SpectralState s(modes_, params_.components(), storage_);
  if (frame_ == Frame::lab)
    for (int j = 0; j < params_.components(); ++j) s.mean()[j] = params_.alpha[j];
  return s;
}

void GalerkinModel::build_pair_tables() {
  const ModeSet& ms = *modes_;
  const std::size_t M = ms.size();
  unit_.resize(2 * M);
  for (std::size_t i = 0; i < 2 * M; ++i) unit_[i] = stream_direction(doubled_mode(ms, i));
  pr_.assign(2 * M, 0.0);
  pi_.assign(2 * M, 0.0);
  const std::size_t targets = storage_ == SpectralState::Storage::full ? 2 * M : M;
  pair_start_.assign(targets + 1, 0);
  for (std::size_t t = 0; t < targets; ++t) {
    const ModeIndex k = doubled_mode(ms, t);
    for (std::size_t a = 0; a < 2 * M; ++a) {
      const ModeIndex ka = doubled_mode(ms, a);
      const int b = doubled_index(ms, k - ka);
      if (b < 0 || static_cast<std::size_t>(b) < a) continue;
      const ModeIndex kb = k - ka;
      double c = interaction(ModelKind::nse2d, k, ka, kb);
      if (static_cast<std::size_t>(b) != a) c += interaction(ModelKind::nse2d, k, kb, ka);
      if (c == 0.0) continue;
      pair_a_.push_back(static_cast<std::int32_t>(a));
      pair_b_.push_back(b);
      pair_c_.push_back(c);
    }
    pair_start_[t + 1] = static_cast<std::int32_t>(pair_a_.size());
  }
}

void GalerkinModel::burgers_kernel(const SpectralState& u, SpectralState& out) {
  const int m = params_.cutoff;
  const bool full = storage_ == SpectralState::Storage::full;
  double* ar = ar_.data() + m;
  double* ai = ai_.data() + m;
  for (int k = 1; k <= m; ++k) {
    const cplx p = u.canonical(static_cast<std::size_t>(k - 1))[0];
    const cplx q = full ? u.mirror(static_cast<std::size_t>(k - 1))[0] : std::conj(p);
    ar[k] = p.real();
    ai[k] = p.imag();
    ar[-k] = q.real();
    ai[-k] = q.imag();
  }
  auto conv = [&](int k) {
    double sr = 0.0, si = 0.0;
    const int lo = std::max(-m, k - m);
    const int hi = std::min(m, k + m);
    for (int j = lo; j <= hi; ++j) {
      const int l = k - j;
      sr += ar[j] * ar[l] - ai[j] * ai[l];
      si += ar[j] * ai[l] + ai[j] * ar[l];
    }
    // -(ik/2) (sr + i si)
    return cplx(0.5 * k * si, -0.5 * k * sr);
  };
  for (int k = 1; k <= m; ++k) {
    out.canonical(static_cast<std::size_t>(k - 1))[0] = conv(k);
    if (full) out.mirror(static_cast<std::size_t>(k - 1))[0] = conv(-k);
  }
}

void GalerkinModel::nse_kernel(const SpectralState& u, SpectralState& out) {
  const ModeSet& ms = *modes_;
  const std::size_t M = ms.size();
  const bool full = storage_ == SpectralState::Storage::full;
  for (std::size_t s = 0; s < M; ++s) {
    const cplx* p = u.canonical(s);
    const auto& e = unit_[s];
    const cplx psi = e[0] * p[0] + e[1] * p[1];
    pr_[s] = psi.real();
    pi_[s] = psi.imag();
    if (full) {
      const cplx* q = u.mirror(s);
      const auto& f = unit_[M + s];
      const cplx phm = f[0] * q[0] + f[1] * q[1];
      pr_[M + s] = phm.real();
      pi_[M + s] = phm.imag();
    } else {
      pr_[M + s] = -psi.real();
      pi_[M + s] = psi.imag();
    }
  }
  const std::size_t targets = full ? 2 * M : M;
  const double* pr = pr_.data();
  const double* pi = pi_.data();
  for (std::size_t t = 0; t < targets; ++t) {
    double sr = 0.0, si = 0.0;
    const std::int32_t end = pair_start_[t + 1];
    for (std::int32_t q = pair_start_[t]; q < end; ++q) {
      const std::int32_t a = pair_a_[q];
      const std::int32_t b = pair_b_[q];
      const double c = pair_c_[q];
      sr += c * (pr[a] * pr[b] - pi[a] * pi[b]);
      si += c * (pr[a] * pi[b] + pi[a] * pr[b]);
    }
    const cplx n(si, -sr);  // -i S
    const auto& e = unit_[t];
    cplx* dst = t < M ? out.canonical(t) : out.mirror(t - M);
    dst[0] = e[0] * n;
    dst[1] = e[1] * n;
  }
}

void GalerkinModel::add_forcing(double t, SpectralState& out) const {
  const int n = params_.components();
  const bool full = storage_ == SpectralState::Storage::full;
  for (std::size_t i = 0; i < forcing_.modes().size(); ++i) {
    const std::size_t slot = static_cast<std::size_t>(forced_slot_[i]);
    Amplitude f = forcing_.value(i, t);
    if (frame_ == Frame::moving) {
      const cplx rot = std::polar(1.0, dot(forcing_.modes()[i].k, params_.alpha) * t);
      for (int j = 0; j < n; ++j) f[j] *= rot;
    }
    for (int j = 0; j < n; ++j) out.canonical(slot)[j] += f[j];
    if (full)
      for (int j = 0; j < n; ++j) out.mirror(slot)[j] += std::conj(f[j]);
  }
}

void GalerkinModel::nonlinear_part(double t, const SpectralState& u, SpectralState& out) {
  if (!params_.nonlinear) {
    std::fill(out.data().begin(), out.data().end(), cplx(0.0, 0.0));
  } else if (params_.model == ModelKind::burgers) {
    burgers_kernel(u, out);
  } else {
    nse_kernel(u, out);
  }
  out.mean() = {0.0, 0.0, 0.0};
  add_forcing(t, out);
}

void GalerkinModel::evaluate(double t, const SpectralState& u, SpectralState& out) {
  nonlinear_part(t, u, out);
  const auto& in = u.data();
  auto& dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += rates_[i] * in[i];
}

}  // namespace avglab
