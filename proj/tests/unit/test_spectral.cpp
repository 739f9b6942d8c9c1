#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "avglab/spectral.hpp"
#include "support/oracles.hpp"

using namespace avglab;

TEST_CASE("mode sets split into a canonical half") {
  const ModeSet one(1, 5);
  CHECK(one.size() == 5);
  CHECK(one.mode(0) == ModeIndex(1));
  CHECK(one.lookup(ModeIndex(3)) == 3);
  CHECK(one.lookup(ModeIndex(-3)) == -3);
  CHECK(one.lookup(ModeIndex(6)) == 0);

  const ModeSet two(2, 3);
  int count = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      if (a * a + b * b > 0 && a * a + b * b <= 9) ++count;
  CHECK(two.size() == static_cast<std::size_t>(count / 2));
  for (const auto& k : two.canonical()) {
    CHECK(k.is_canonical());
    CHECK(two.lookup(-k) < 0);
  }
}

TEST_CASE("energy and enstrophy of simple states") {
  SpectralState u(2, 4, 2);
  u.set_pair(ModeIndex(1, 0), {cplx(0.0), cplx(1.0 / std::sqrt(2.0)), cplx(0.0)});
  CHECK(energy(u) == doctest::Approx(1.0));
  CHECK(enstrophy(u) == doctest::Approx(1.0));

  SpectralState w(1, 5, 1);
  w.set_pair(ModeIndex(3), {cplx(0.3, -0.4)});
  CHECK(enstrophy(w) == doctest::Approx(9.0 * energy(w)));
  w.mean()[0] = 7.0;
  CHECK(energy(w) == doctest::Approx(0.5));
  CHECK(enstrophy(w) == doctest::Approx(4.5));
}

TEST_CASE("energy and enstrophy match brute-force sums on random states") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const SpectralState u = random_state(2, 6, 2, {1.0, 1.5}, rng);
    double e = 0.0, v = 0.0;
    for (int a = -6; a <= 6; ++a)
      for (int b = -6; b <= 6; ++b) {
        if (a * a + b * b == 0 || a * a + b * b > 36) continue;
        const auto amp = u.amplitude(ModeIndex(a, b));
        const double m2 = std::norm(amp[0]) + std::norm(amp[1]);
        e += m2;
        v += (a * a + b * b) * m2;
      }
    CHECK(energy(u) == doctest::Approx(e).epsilon(1e-13));
    CHECK(enstrophy(u) == doctest::Approx(v).epsilon(1e-13));
    CHECK(enstrophy(u) >= energy(u));
  }
}

TEST_CASE("conjugate flip of every mode keeps energy and enstrophy") {
  std::mt19937_64 rng(5);
  const SpectralState u = random_state(2, 5, 2, {1.0, 1.0}, rng);
  SpectralState f = u;
  for (auto& v : f.data()) v = std::conj(v);
  CHECK(energy(f) == doctest::Approx(energy(u)).epsilon(1e-15));
  CHECK(enstrophy(f) == doctest::Approx(enstrophy(u)).epsilon(1e-15));
}

TEST_CASE("reality defect") {
  SpectralState u(1, 3, 1, SpectralState::Storage::full);
  u.set_pair(ModeIndex(1), {cplx(0.5, 0.0)});
  CHECK(reality_defect(u) <= 1e-15);
  u.set_amplitude(ModeIndex(1), {cplx(0.0, 1.0)});
  u.set_amplitude(ModeIndex(-1), {cplx(0.0, 1.0)});
  CHECK(reality_defect(u) == doctest::Approx(2.0));
  CHECK(reality_defect(u.with_storage(SpectralState::Storage::half)) == 0.0);
}

TEST_CASE("gradient bound") {
  SpectralState u(1, 4, 1);
  CHECK(grad_supnorm_bound(u) == 0.0);
  u.set_pair(ModeIndex(1), {cplx(1.0)});
  CHECK(grad_supnorm_bound(u) == doctest::Approx(2.0));

  std::mt19937_64 rng(11);
  const SpectralState w = random_state(2, 4, 2, {1.0, 1.0}, rng);
  const int n = 64;
  double sup[2][2] = {{0, 0}, {0, 0}};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double x = 2 * oracle::pi * a / n, y = 2 * oracle::pi * b / n;
      cplx d[2][2] = {{0, 0}, {0, 0}};
      w.for_each_mode([&](const ModeIndex& k, const Amplitude& v) {
        const cplx e = std::exp(cplx(0.0, k[0] * x + k[1] * y));
        for (int j = 0; j < 2; ++j)
          for (int l = 0; l < 2; ++l) d[j][l] += cplx(0.0, k[l]) * v[j] * e;
      });
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) sup[j][l] = std::max(sup[j][l], std::abs(d[j][l].real()));
    }
  CHECK(grad_supnorm_bound(w) >= sup[0][0] + sup[0][1] + sup[1][0] + sup[1][1]);
}

TEST_CASE("random states respect the envelope and are divergence free") {
  std::mt19937_64 rng(9);
  const EnvelopeBound env{2.0, 3.0};
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralState u = random_state(2, 8, 2, env, rng);
    CHECK(envelope_ratio(u, env) <= 1.0 + 1e-12);
    CHECK(divergence_defect(u) <= 1e-14);
  }
}

TEST_CASE("state text round trip") {
  std::mt19937_64 rng(2);
  for (auto storage : {SpectralState::Storage::half, SpectralState::Storage::full}) {
    SpectralState u = random_state(2, 4, 2, {1.0, 1.0}, rng, 0.0, true, storage);
    u.mean() = {0.25, -1.5, 0.0};
    std::stringstream ss;
    write_state(ss, u);
    const SpectralState v = read_state(ss);
    CHECK(v.storage() == storage);
    CHECK(v.same_shape(u));
    CHECK(v.data() == u.data());
    CHECK(v.mean() == u.mean());
  }
  std::stringstream bad("1 4");
  CHECK_THROWS_AS(read_state(bad), PreconditionError);
}

TEST_CASE("distance and shapes") {
  SpectralState a(1, 3, 1), b(1, 3, 1), c(1, 4, 1);
  a.set_pair(ModeIndex(2), {cplx(1.0)});
  CHECK(distance(a, b) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(distance(a, c), PreconditionError);
}
