#include <doctest.h>

#include <cmath>

#include "avglab/lattice.hpp"
#include "avglab/spectral.hpp"
#include "support/oracles.hpp"

using namespace avglab;

namespace {
// The bracket meets the interval of values that round to `shown` at `digits` decimals.
bool meets_rounded(const Bracket& b, double shown, int digits) {
  const double half = 0.5 * std::pow(10.0, -digits);
  return b.upper >= shown - half && b.lower <= shown + half;
}
}  // namespace

TEST_CASE("one-dimensional lattice sums bracket the zeta values") {
  const Bracket s2 = sum_S(1, 2.0);
  CHECK(s2.contains(1.0 + 2.0 * oracle::zeta2()));
  CHECK(meets_rounded(s2, 4.289868, 6));
  CHECK(s2.width() <= 1e-4);
  const Bracket s4 = sum_S(1, 4.0);
  CHECK(s4.contains(1.0 + 2.0 * oracle::zeta4()));
  CHECK(meets_rounded(s4, 3.164646, 6));
  CHECK(s4.width() <= 1e-6);
}

TEST_CASE("two-dimensional lattice sums bracket the closed forms") {
  CHECK(sum_S(2, 3.0).contains(oracle::square_lattice_sum(oracle::zeta_three_halves, oracle::beta_three_halves)));
  CHECK(sum_S(2, 4.0).contains(oracle::square_lattice_sum(oracle::zeta2(), oracle::catalan)));
}

TEST_CASE("the square-lattice bracket contains a large direct sum with its own tail") {
  // Direct sum over |k| <= 2000 plus the continuum tail 2 pi / R.
  long double s = 1.0L;
  const int R = 2000;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b) {
      const long r2 = long(a) * a + long(b) * b;
      if (r2 == 0 || r2 > long(R) * R) continue;
      const long double r = static_cast<long double>(r2);
      s += 1.0L / (r * std::sqrt(r));
    }
  const double truncated = static_cast<double>(s);
  const Bracket b = sum_S(2, 3.0);
  CHECK(b.lower > truncated);
  CHECK(b.contains(truncated + 2.0 * oracle::pi / R));
}

TEST_CASE("three-dimensional sums and tails") {
  const Bracket b = sum_S(3, 4.0);
  CHECK(b.lower > 1.0);
  CHECK(b.width() < 1e-2 * b.upper);
  const Bracket t = lattice_tail(1, 2.0, 10.0);
  double direct = 0.0;
  for (int k = 11; k < 2000000; ++k) direct += 2.0 / (double(k) * k);
  CHECK(t.lower <= direct);
  CHECK(t.upper >= direct);
}

TEST_CASE("divergent sums are rejected") {
  CHECK_THROWS_AS(sum_S(1, 1.0), PreconditionError);
  CHECK_THROWS_AS(sum_S(2, 2.0), PreconditionError);
  CHECK_THROWS_AS(estimate_C2(2, 2.0), PreconditionError);
}

TEST_CASE("convolution constant estimate") {
  // Direct convolution at k = 1: sum over k1 != 0, 1 of 1/(k1^2 (1 - k1)^2), plus the two
  // terms with a zero factor counted as 1.
  double direct = 0.0;
  for (int k1 = -10000; k1 <= 10000; ++k1) {
    if (k1 == 0 || k1 == 1) continue;
    direct += 1.0 / (double(k1) * k1 * double(1 - k1) * (1 - k1));
  }
  CHECK(direct == doctest::Approx(2.0 * (oracle::pi * oracle::pi / 3.0 - 3.0)).epsilon(1e-6));
  const double c2 = estimate_C2(1, 2.0);
  CHECK(c2 >= direct);
  const int k[3] = {1, 0, 0};
  CHECK(convolution_weight(1, 2.0, k) >= direct);

  for (int d = 1; d <= 3; ++d)
    for (double g : {d + 0.5, d + 2.0}) {
      const int K = d == 1 ? 64 : (d == 2 ? 16 : 6);
      CHECK(estimate_C2(d, g, K) >= estimate_C2(d, g, K / 2));
    }
  CHECK(std::isfinite(estimate_C2(3, 7.0)));
}
