#include "avglab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "avglab/spectral.hpp"

namespace avglab {

namespace {

const double kPi = std::acos(-1.0);

double sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

void require_dim(int d) {
  if (d < 1 || d > 3) throw PreconditionError("dimension must be 1, 2 or 3");
}

// Sum of |k|^-p over 0 < |k| <= R, using the sign/permutation symmetry of the lattice.
long double lattice_partial(int d, double p, int R) {
  const long long R2 = static_cast<long long>(R) * R;
  const double hp = -0.5 * p;
  long double total = 0.0L;
  if (d == 1) {
    for (int k = R; k >= 1; --k) total += 2.0L * std::pow(static_cast<double>(k), -p);
    return total;
  }
  if (d == 2) {
    for (int a = R; a >= 0; --a) {
      const long long rest = R2 - static_cast<long long>(a) * a;
      const int bmax = static_cast<int>(std::floor(std::sqrt(static_cast<double>(rest))));
      long double row = 0.0L;
      for (int b = bmax; b >= 0; --b) {
        if (a == 0 && b == 0) continue;
        const double w = (a ? 2.0 : 1.0) * (b ? 2.0 : 1.0);
        row += w * std::pow(static_cast<double>(static_cast<long long>(a) * a + static_cast<long long>(b) * b), hp);
      }
      total += row;
    }
    return total;
  }
  for (int a = R; a >= 0; --a) {
    const long long ra = R2 - static_cast<long long>(a) * a;
    const int bmax = static_cast<int>(std::floor(std::sqrt(static_cast<double>(ra))));
    for (int b = bmax; b >= 0; --b) {
      const long long rb = ra - static_cast<long long>(b) * b;
      const int cmax = static_cast<int>(std::floor(std::sqrt(static_cast<double>(rb))));
      long double row = 0.0L;
      for (int c = cmax; c >= 0; --c) {
        if (a == 0 && b == 0 && c == 0) continue;
        const double w = (a ? 2.0 : 1.0) * (b ? 2.0 : 1.0) * (c ? 2.0 : 1.0);
        const long long n2 = static_cast<long long>(a) * a + static_cast<long long>(b) * b +
                             static_cast<long long>(c) * c;
        row += w * std::pow(static_cast<double>(n2), hp);
      }
      total += row;
    }
  }
  return total;
}

int default_radius(int d) {
  switch (d) {
    case 1: return 1000000;
    case 2: return 2000;
    default: return 200;
  }
}

}  // namespace

Bracket lattice_tail(int d, double p, double R) {
  require_dim(d);
  if (!(p > d)) throw PreconditionError("lattice sum diverges for p <= d");
  if (d == 1) {
    const double k0 = std::floor(std::max(R, 0.0)) + 1.0;
    const double integral = std::pow(k0, 1.0 - p) / (p - 1.0);
    return {2.0 * integral, 2.0 * (std::pow(k0, -p) + integral)};
  }
  const double half_diag = 0.5 * std::sqrt(static_cast<double>(d));
  if (!(R > half_diag)) throw PreconditionError("tail radius too small for the cube comparison");
  const double w = sphere_area(d);
  const double upper = std::pow(1.0 + half_diag / R, p) * w * std::pow(R - half_diag, d - p) / (p - d);
  const double lower = std::pow(1.0 - half_diag / R, p) * w * std::pow(R + half_diag, d - p) / (p - d);
  return {lower, upper};
}

Bracket sum_S(int d, double p, int radius) {
  require_dim(d);
  if (!(p > d))
    throw PreconditionError("sum over Z^" + std::to_string(d) + " of |k|^-p diverges for p <= " +
                            std::to_string(d));
  const int R = radius > 0 ? radius : default_radius(d);
  const double partial = 1.0 + static_cast<double>(lattice_partial(d, p, R));
  const Bracket tail = lattice_tail(d, p, static_cast<double>(R));
  const double pad = 8.0 * std::numeric_limits<double>::epsilon() * partial;
  return {partial + tail.lower - pad, partial + tail.upper + pad};
}

double convolution_weight(int d, double gamma, const int* k) {
  double kn2 = 0.0;
  for (int i = 0; i < d; ++i) kn2 += static_cast<double>(k[i]) * k[i];
  const double kn = std::sqrt(kn2);
  const int R0 = d == 1 ? 4096 : (d == 2 ? 64 : 24);
  const int R = std::max(R0, static_cast<int>(std::ceil(2.0 * kn)) + 1);
  const long long R2 = static_cast<long long>(R) * R;
  auto w = [gamma](long long n2) {
    return n2 == 0 ? 1.0 : std::pow(static_cast<double>(n2), -0.5 * gamma);
  };
  long double total = 0.0L;
  const int r2 = d >= 2 ? R : 0;
  const int r3 = d >= 3 ? R : 0;
  for (int a = -R; a <= R; ++a)
    for (int b = -r2; b <= r2; ++b)
      for (int c = -r3; c <= r3; ++c) {
        const long long n1 = static_cast<long long>(a) * a + static_cast<long long>(b) * b +
                             static_cast<long long>(c) * c;
        if (n1 > R2) continue;
        const long long da = k[0] - a;
        const long long db = (d >= 2 ? k[1] : 0) - b;
        const long long dc = (d >= 3 ? k[2] : 0) - c;
        total += w(n1) * w(da * da + db * db + dc * dc);
      }
  const double tail =
      std::pow(R / (R - kn), gamma) * lattice_tail(d, 2.0 * gamma, static_cast<double>(R)).upper;
  const double scale = kn2 == 0.0 ? 1.0 : std::pow(kn, gamma);
  return scale * (static_cast<double>(total) + tail);
}

double estimate_C2(int d, double gamma, int K) {
  require_dim(d);
  if (!(gamma > d)) throw PreconditionError("convolution constant needs gamma > d");
  if (K <= 0) K = d == 1 ? 512 : (d == 2 ? 32 : 8);
  // The per-k term is invariant under sign changes and permutations of k.
  double best = 0.0;
  const int K2 = K * K;
  const int lim2 = d >= 2 ? K : 0;
  const int lim3 = d >= 3 ? K : 0;
  for (int a = 0; a <= K; ++a)
    for (int b = (d >= 2 ? a : 0); b <= lim2; ++b)
      for (int c = (d >= 3 ? b : 0); c <= lim3; ++c) {
        if (a * a + b * b + c * c > K2) continue;
        const int k[3] = {a, b, c};
        best = std::max(best, convolution_weight(d, gamma, k));
      }
  return best;
}

}  // namespace avglab
