#pragma once

#include <vector>

#include "avglab/spectral.hpp"

namespace avglab {

enum class Profile { constant, slow_cosine };

/// One forced wavevector: f_k(t) = amplitude * g(t), g = 1 or cos(omega_slow t + phase).
struct ForcedMode {
  ModeIndex k;
  Amplitude amplitude{};
  Profile profile = Profile::constant;
  double omega_slow = 0.0;
  double phase = 0.0;

  double shape(double t) const;
  double shape_rate(double t) const;
  /// Euclidean norm of the complex amplitude vector.
  double magnitude(int components) const;
};

/// Tightest A_V, B_V with |f_k(t)| <= A_V/|k|^s_V and |f_k'(t)| <= B_V/|k|^s_V.
struct ForcingEnvelope {
  double A_V = 0.0;
  double B_V = 0.0;
  double s_V = 0.0;
};

/// Finitely many forced modes of a real forcing with zero mean.
///
/// Entries are stored for canonical wavevectors only; an entry given for -k is
/// converted by conjugation. Vector amplitudes are projected onto the plane
/// orthogonal to k.
class ForcingSpec {
 public:
  ForcingSpec() = default;
  ForcingSpec(int dim, int components, std::vector<ForcedMode> modes, double s_V = 0.0);
  static ForcingSpec none(int dim, int components) { return ForcingSpec(dim, components, {}); }

  int dim() const { return dim_; }
  int components() const { return components_; }
  bool empty() const { return modes_.empty(); }
  const std::vector<ForcedMode>& modes() const { return modes_; }
  const ForcingEnvelope& envelope() const { return envelope_; }

  Amplitude value(std::size_t i, double t) const;
  Amplitude rate(std::size_t i, double t) const;

  /// Largest |k| among forced modes (0 when unforced).
  double max_wavenumber() const;
  /// Upper bound on sup_t of the energy of f over both halves.
  double sup_energy() const;
  /// Upper bound on sup_t of sum |k|^2 |f_k|^2 over both halves.
  double sup_enstrophy() const;
  /// sup over k and t of |k|^e |f_k(t)|.
  double sup_weighted(double e) const;

  ForcingSpec scaled(double factor) const;
  ForcingSpec with_decay_exponent(double s_V) const;

 private:
  int dim_ = 1;
  int components_ = 1;
  std::vector<ForcedMode> modes_;
  ForcingEnvelope envelope_;
};

}  // namespace avglab
