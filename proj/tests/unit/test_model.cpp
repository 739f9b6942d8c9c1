#include <doctest.h>

#include <cmath>
#include <random>

#include "avglab/bounds.hpp"
#include "avglab/integrator.hpp"
#include "avglab/model.hpp"
#include "support/oracles.hpp"

using namespace avglab;

namespace {

SimParams burgers(int m, double nu = 1.0, double alpha = 0.0) {
  SimParams p;
  p.model = ModelKind::burgers;
  p.cutoff = m;
  p.nu = nu;
  p.alpha = {alpha, 0.0, 0.0};
  return p;
}

SimParams nse(int m, double nu = 1.0) {
  SimParams p;
  p.model = ModelKind::nse2d;
  p.cutoff = m;
  p.nu = nu;
  return p;
}

double inner_real(const SpectralState& u, const SpectralState& n) {
  double s = 0.0;
  u.for_each_mode([&](const ModeIndex& k, const Amplitude& a) {
    const auto b = n.amplitude(k);
    for (int j = 0; j < u.components(); ++j) s += (std::conj(a[j]) * b[j]).real();
  });
  return s;
}

}  // namespace

TEST_CASE("Burgers nonlinearity by hand") {
  SpectralState u(1, 4, 1);
  u.set_pair(ModeIndex(1), {cplx(1.0)});
  const SpectralState n = burgers_nonlinearity(u);
  CHECK(std::abs(n.amplitude(ModeIndex(2), 0) - cplx(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(n.amplitude(ModeIndex(-2), 0) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(n.amplitude(ModeIndex(1), 0)) < 1e-15);
  CHECK(energy(burgers_nonlinearity(SpectralState(1, 4, 1))) == 0.0);
}

TEST_CASE("Burgers nonlinearity matches the grid product") {
  std::mt19937_64 rng(17);
  const SpectralState u = random_state(1, 8, 1, {1.0, 1.0}, rng);
  const SpectralState n = burgers_nonlinearity(u);
  for (int k = 1; k <= 8; ++k)
    CHECK(std::abs(n.amplitude(ModeIndex(k), 0) - oracle::burgers_term_by_grid(u, k)) < 1e-12);
}

TEST_CASE("2D nonlinearity matches the grid product") {
  std::mt19937_64 rng(23);
  const SpectralState u = random_state(2, 4, 2, {1.0, 1.0}, rng);
  const SpectralState n = nse2d_nonlinearity(u);
  for (const auto& k : u.modes().canonical()) {
    const auto ref = oracle::nse_term_by_grid(u, k[0], k[1]);
    const auto got = n.amplitude(k);
    CHECK(std::abs(got[0] - ref[0]) < 1e-11);
    CHECK(std::abs(got[1] - ref[1]) < 1e-11);
  }
}

TEST_CASE("a single Fourier pair does not interact with itself in 2D") {
  SpectralState u(2, 4, 2);
  u.set_pair(ModeIndex(1, 0), {cplx(0.0), cplx(0.7, 0.2)});
  CHECK(energy(nse2d_nonlinearity(u)) < 1e-30);
}

TEST_CASE("fast and reference nonlinear kernels agree") {
  std::mt19937_64 rng(29);
  for (auto storage : {SpectralState::Storage::half, SpectralState::Storage::full}) {
    const SimParams p = nse(6);
    GalerkinModel model(p, ForcingSpec::none(2, 2), Frame::moving, storage);
    const SpectralState u = random_state(2, 6, 2, {1.0, 1.0}, rng, 0.0, true, storage);
    SpectralState out = model.zero_state();
    model.nonlinear_part(0.0, u, out);
    CHECK(distance(out, nse2d_nonlinearity(u)) < 1e-12);

    const SimParams q = burgers(12);
    GalerkinModel bm(q, ForcingSpec::none(1, 1), Frame::moving, storage);
    const SpectralState w = random_state(1, 12, 1, {1.0, 1.0}, rng, 0.0, true, storage);
    SpectralState bo = bm.zero_state();
    bm.nonlinear_part(0.0, w, bo);
    CHECK(distance(bo, burgers_nonlinearity(w)) < 1e-12);
  }
}

TEST_CASE("nonlinear terms are energy neutral") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralState u = random_state(1, 16, 1, {2.0, 1.0}, rng);
    const double e = energy(u);
    CHECK(std::abs(inner_real(u, burgers_nonlinearity(u))) <= 1e-10 * std::pow(1.0 + e, 1.5));
    const SpectralState v = random_state(2, 6, 2, {2.0, 1.0}, rng);
    const SpectralState n = nse2d_nonlinearity(v);
    CHECK(std::abs(inner_real(v, n)) <= 1e-10 * std::pow(1.0 + energy(v), 1.5));
    CHECK(divergence_defect(n) <= 1e-12);
  }
}

TEST_CASE("the right side preserves reality and divergence") {
  std::mt19937_64 rng(37);
  const SimParams p = nse(5);
  const ForcingSpec f(2, 2, {ForcedMode{ModeIndex(1, 1), {cplx(1.0), cplx(-1.0)}}});
  const SpectralState u = random_state(2, 5, 2, {1.0, 1.0}, rng, 0.0, true, SpectralState::Storage::full);
  const SpectralState r = rhs(0.3, u, p, f, Frame::moving);
  CHECK(reality_defect(r) <= 1e-12);
  CHECK(divergence_defect(r) <= 1e-12);
}

TEST_CASE("linear part of the right side") {
  SimParams p = burgers(4, 0.1);
  p.nonlinear = false;
  SpectralState u(1, 4, 1);
  u.set_pair(ModeIndex(3), {cplx(1.0, 0.5)});
  const SpectralState r = rhs(0.0, u, p, ForcingSpec::none(1, 1), Frame::moving);
  CHECK(std::abs(r.amplitude(ModeIndex(3), 0) - (-0.9) * cplx(1.0, 0.5)) < 1e-15);
  CHECK(energy(rhs(0.0, SpectralState(1, 4, 1), burgers(4), ForcingSpec::none(1, 1), Frame::moving)) == 0.0);
}

TEST_CASE("frame transforms") {
  std::mt19937_64 rng(41);
  SimParams p = nse(4);
  p.alpha = {2.0, -3.0, 0.0};
  SpectralState u = random_state(2, 4, 2, {1.0, 1.0}, rng);
  u.mean() = {2.0, -3.0, 0.0};
  const SpectralState a0 = frame_transform(u, p.alpha, 0.0, FrameDirection::to_moving);
  CHECK(a0.data() == u.data());
  CHECK(a0.mean()[0] == 0.0);
  const SpectralState a = frame_transform(u, p.alpha, 1.7, FrameDirection::to_moving);
  for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(std::abs(a.data()[i]) == doctest::Approx(std::abs(u.data()[i])));
  const SpectralState back = frame_transform(a, p.alpha, 1.7, FrameDirection::to_lab);
  CHECK(distance(back, u) <= 1e-15);
  CHECK(back.mean() == u.mean());
}

TEST_CASE("lab and moving trajectories agree after the frame change") {
  std::mt19937_64 rng(43);
  SimParams p = burgers(16, 1.0, 7.0);
  const ForcingSpec f(1, 1, {ForcedMode{ModeIndex(1), {cplx(1.0)}}, ForcedMode{ModeIndex(3), {cplx(0.0, 0.5)}}});
  SpectralState a0 = random_state(1, 16, 1, {0.5, 2.0}, rng);
  SpectralState u0 = frame_transform(a0, p.alpha, 0.0, FrameDirection::to_lab);
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  cfg.sample_every = 0.1;
  cfg.keep_states = true;
  const auto lab = integrate(u0, 0.0, cfg, p, f, Frame::lab);
  const auto mov = integrate(a0, 0.0, cfg, p, f, Frame::moving);
  double worst = 0.0;
  for (std::size_t i = 0; i < lab.size(); ++i)
    worst = std::max(worst, distance(frame_transform(lab.states[i], p.alpha, lab.t[i], FrameDirection::to_moving),
                                     mov.states[i]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("Jacobian at the zero state is the diagonal linear part") {
  const SimParams p = burgers(6, 0.7);
  const Eigen::MatrixXd J = jacobian(0.0, make_state(p, Frame::moving), p, ForcingSpec::none(1, 1), Frame::moving);
  CHECK(J.rows() == 12);
  for (int k = 1; k <= 6; ++k) {
    CHECK(J(2 * (k - 1), 2 * (k - 1)) == doctest::Approx(-0.7 * k * k));
    CHECK(J(2 * (k - 1) + 1, 2 * (k - 1) + 1) == doctest::Approx(-0.7 * k * k));
  }
  CHECK((J - Eigen::MatrixXd(J.diagonal().asDiagonal())).norm() == 0.0);
  CHECK(log_norm_euclidean(J) == doctest::Approx(-0.7));
  CHECK(gershgorin_log_norm(J) == doctest::Approx(-0.7));
}

TEST_CASE("Jacobian matches central differences") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> g;
  struct Case {
    SimParams p;
    ForcingSpec f;
  };
  SimParams b = burgers(10, 0.5);
  SimParams n = nse(4, 0.5);
  n.alpha = {1.0, 2.0, 0.0};
  const std::vector<Case> cases = {
      {b, ForcingSpec(1, 1, {ForcedMode{ModeIndex(2), {cplx(1.0)}}})},
      {n, ForcingSpec(2, 2, {ForcedMode{ModeIndex(1, 0), {cplx(0.0), cplx(1.0)}}})}};
  for (const auto& c : cases)
    for (Frame frame : {Frame::moving, Frame::lab}) {
      SpectralState u = random_state(c.p.dim(), c.p.cutoff, c.p.components(), {1.0, 1.0}, rng);
      u.mean() = make_state(c.p, frame).mean();
      const Eigen::MatrixXd J = jacobian(0.4, u, c.p, c.f, frame);
      const Eigen::VectorXd x = to_reduced(u);
      Eigen::VectorXd h(x.size());
      for (auto i = 0; i < h.size(); ++i) h(i) = g(rng);
      const double eps = 1e-5;
      const auto plus = to_reduced(rhs(0.4, from_reduced(x + eps * h, u), c.p, c.f, frame));
      const auto minus = to_reduced(rhs(0.4, from_reduced(x - eps * h, u), c.p, c.f, frame));
      const Eigen::VectorXd fd = (plus - minus) / (2 * eps);
      CHECK((fd - J * h).norm() / (J * h).norm() < 1e-6);
    }
}

TEST_CASE("forcing does not enter the Jacobian") {
  std::mt19937_64 rng(53);
  const SimParams p = burgers(8);
  const SpectralState u = random_state(1, 8, 1, {1.0, 1.0}, rng);
  const ForcingSpec f(1, 1, {ForcedMode{ModeIndex(1), {cplx(3.0)}}});
  CHECK((jacobian(0.2, u, p, f, Frame::moving) - jacobian(0.2, u, p, ForcingSpec::none(1, 1), Frame::moving)).norm() == 0.0);
}

TEST_CASE("the right side checks the frame mean and shape") {
  SimParams p = burgers(4, 1.0, 3.0);
  SpectralState u(1, 4, 1);
  CHECK_THROWS_AS(rhs(0.0, u, p, ForcingSpec::none(1, 1), Frame::lab), PreconditionError);
  CHECK_THROWS_AS(rhs(0.0, SpectralState(1, 5, 1), p, ForcingSpec::none(1, 1), Frame::moving), PreconditionError);
}
