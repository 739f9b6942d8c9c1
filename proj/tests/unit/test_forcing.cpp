#include <doctest.h>

#include <cmath>

#include "avglab/forcing.hpp"
#include "avglab/model.hpp"

using namespace avglab;

TEST_CASE("modes given for -k are stored as conjugates of k") {
  const ForcingSpec f(1, 1, {ForcedMode{ModeIndex(-2), {cplx(1.0, 2.0)}}}, 6.0);
  REQUIRE(f.modes().size() == 1);
  CHECK(f.modes()[0].k == ModeIndex(2));
  CHECK(f.modes()[0].amplitude[0] == cplx(1.0, -2.0));
}

TEST_CASE("the zero mode cannot be forced") {
  CHECK_THROWS_AS(ForcingSpec(1, 1, {ForcedMode{ModeIndex(0), {cplx(1.0)}}}), PreconditionError);
}

TEST_CASE("duplicates must agree") {
  const ForcingSpec ok(1, 1,
                       {ForcedMode{ModeIndex(1), {cplx(1.0, 1.0)}}, ForcedMode{ModeIndex(-1), {cplx(1.0, -1.0)}}});
  CHECK(ok.modes().size() == 1);
  CHECK_THROWS_AS(ForcingSpec(1, 1, {ForcedMode{ModeIndex(1), {cplx(1.0)}}, ForcedMode{ModeIndex(1), {cplx(2.0)}}}),
                  PreconditionError);
}

TEST_CASE("vector amplitudes are projected onto the plane orthogonal to k") {
  const ForcingSpec f(2, 2, {ForcedMode{ModeIndex(1, 0), {cplx(1.0), cplx(1.0)}}});
  CHECK(std::abs(f.modes()[0].amplitude[0]) == doctest::Approx(0.0));
  CHECK(f.modes()[0].amplitude[1] == cplx(1.0));
}

TEST_CASE("envelope constants are the tightest ones") {
  ForcedMode slow{ModeIndex(2), {cplx(0.3, 0.4)}, Profile::slow_cosine, 0.5, 0.1};
  const ForcingSpec f(1, 1, {ForcedMode{ModeIndex(1), {cplx(1.0)}}, slow}, 6.0);
  CHECK(f.envelope().A_V == doctest::Approx(std::max(1.0, 0.5 * 64.0)));
  CHECK(f.envelope().B_V == doctest::Approx(0.5 * 0.5 * 64.0));
  for (double t = 0.0; t < 30.0; t += 0.37)
    for (std::size_t i = 0; i < f.modes().size(); ++i) {
      const double kp = std::pow(f.modes()[i].k.norm(), 6.0);
      CHECK(std::abs(f.value(i, t)[0]) * kp <= f.envelope().A_V * (1 + 1e-12));
      CHECK(std::abs(f.rate(i, t)[0]) * kp <= f.envelope().B_V * (1 + 1e-12));
    }
  CHECK(f.sup_energy() == doctest::Approx(2.0 * (1.0 + 0.25)));
  CHECK(f.sup_enstrophy() == doctest::Approx(2.0 * (1.0 + 4.0 * 0.25)));
  CHECK(f.max_wavenumber() == 2.0);
  CHECK(f.scaled(2.0).envelope().A_V == doctest::Approx(2.0 * f.envelope().A_V));
}

TEST_CASE("Leray projection") {
  auto p = leray_project(ModeIndex(1, 0), {cplx(1.0), cplx(1.0)});
  CHECK(std::abs(p[0]) < 1e-15);
  CHECK(p[1] == cplx(1.0));
  p = leray_project(ModeIndex(1, 1), {cplx(1.0), cplx(-1.0)});
  CHECK(p[0] == cplx(1.0));
  CHECK(p[1] == cplx(-1.0));
  const ModeIndex k(3, -2);
  const Amplitude v{cplx(0.4, 1.0), cplx(-2.0, 0.5)};
  const auto q = leray_project(k, v);
  CHECK(std::abs(q[0] * 3.0 - q[1] * 2.0) < 1e-14);
  const auto qq = leray_project(k, q);
  CHECK(std::abs(qq[0] - q[0]) < 1e-15);
  CHECK(std::abs(qq[1] - q[1]) < 1e-15);
  CHECK_THROWS_AS(leray_project(ModeIndex(0, 0), v), PreconditionError);
}

TEST_CASE("parameters must cover the forcing") {
  SimParams p;
  p.cutoff = 4;
  const ForcingSpec f(1, 1, {ForcedMode{ModeIndex(5), {cplx(1.0)}}});
  CHECK_THROWS_AS(p.validate(f), PreconditionError);
  p.nu = -1.0;
  CHECK_THROWS_AS(p.validate(), PreconditionError);
}
