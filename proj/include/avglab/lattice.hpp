#pragma once

namespace avglab {

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double mid() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }
};

/// Bounds on the sum of |k|^-p over integer k in dimension d with |k| > R.
/// Requires p > d, and R > sqrt(d)/2 for d >= 2.
Bracket lattice_tail(int d, double p, double R);

/// 1 + sum over nonzero k in Z^d of |k|^-p, as a bracket.
/// `radius` = 0 picks a default truncation for the dimension.
Bracket sum_S(int d, double p, int radius = 0);

/// Floating-point estimate of the convolution constant
///   sup_{|k| <= K} floor|k|^g * sum_{k1 + k2 = k} floor|k1|^-g floor|k2|^-g
/// where floor|0| = 1. Each k uses a truncated sum plus a tail bound, so the value
/// only grows with K. It is a sampled supremum, not a proof.
double estimate_C2(int d, double gamma, int K = 0);

/// Per-wavevector term of estimate_C2.
double convolution_weight(int d, double gamma, const int* k);

}  // namespace avglab
