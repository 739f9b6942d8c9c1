#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace avglab {

using cplx = std::complex<double>;

/// Raised when an operation's input violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integer wavevector in dimension 1, 2 or 3. Unused trailing components are zero.
struct ModeIndex {
  std::array<int, 3> c{0, 0, 0};
  int dim = 1;

  ModeIndex() = default;
  explicit ModeIndex(int k1) : c{k1, 0, 0}, dim(1) {}
  ModeIndex(int k1, int k2) : c{k1, k2, 0}, dim(2) {}
  ModeIndex(int k1, int k2, int k3) : c{k1, k2, k3}, dim(3) {}
  static ModeIndex from_components(const std::vector<int>& comps);

  int operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  int norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
  double norm() const;
  bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0; }
  /// First nonzero component positive.
  bool is_canonical() const;
  ModeIndex operator-() const;
  ModeIndex operator+(const ModeIndex& o) const;
  ModeIndex operator-(const ModeIndex& o) const;
  bool operator==(const ModeIndex& o) const { return dim == o.dim && c == o.c; }
  bool operator!=(const ModeIndex& o) const { return !(*this == o); }
  std::string str() const;
};

/// k . v for a real direction vector (only the first `dim` entries are used).
double dot(const ModeIndex& k, const std::array<double, 3>& v);

/// Norm with the |0| := 1 convention used in decay envelopes.
double floor_norm(const ModeIndex& k);

/// The modes 0 < |k| <= m of one dimension, split into a canonical half and its mirror.
class ModeSet {
 public:
  ModeSet(int dim, int cutoff);
  static std::shared_ptr<const ModeSet> make(int dim, int cutoff);

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return canonical_.size(); }
  const ModeIndex& mode(std::size_t slot) const { return canonical_[slot]; }
  const std::vector<ModeIndex>& canonical() const { return canonical_; }

  /// +(slot+1) for a canonical mode, -(slot+1) for the mirror of one, 0 if absent.
  int lookup(const ModeIndex& k) const;
  bool contains(const ModeIndex& k) const { return lookup(k) != 0; }

 private:
  int dim_;
  int cutoff_;
  int width_;
  std::vector<ModeIndex> canonical_;
  std::vector<std::int32_t> grid_;
  std::size_t grid_offset(const ModeIndex& k) const;
};

using Amplitude = std::array<cplx, 3>;

/// |a_k| <= C / |k|^s for every mode.
struct EnvelopeBound {
  double C = 0.0;
  double s = 0.0;
  double at(const ModeIndex& k) const;
};

/// Fourier amplitudes of a real field on 0 < |k| <= m, plus a real mean.
///
/// Half storage keeps only canonical modes and derives k < 0 by conjugation.
/// Full storage keeps both halves independently so the reality defect can be measured.
class SpectralState {
 public:
  enum class Storage { half, full };

  SpectralState() = default;
  SpectralState(int dim, int cutoff, int components, Storage storage = Storage::half);
  SpectralState(std::shared_ptr<const ModeSet> modes, int components,
                Storage storage = Storage::half);

  int dim() const { return modes_->dim(); }
  int cutoff() const { return modes_->cutoff(); }
  int components() const { return components_; }
  Storage storage() const { return storage_; }
  const ModeSet& modes() const { return *modes_; }
  const std::shared_ptr<const ModeSet>& mode_set() const { return modes_; }
  std::size_t slots() const { return modes_->size(); }
  bool same_shape(const SpectralState& o) const;

  /// Raw coefficients: canonical slots first, then (full storage) the mirror slots.
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }
  cplx* canonical(std::size_t slot) { return data_.data() + slot * components_; }
  const cplx* canonical(std::size_t slot) const { return data_.data() + slot * components_; }
  cplx* mirror(std::size_t slot);
  const cplx* mirror(std::size_t slot) const;

  /// Zero for modes outside the cutoff and for k = 0.
  Amplitude amplitude(const ModeIndex& k) const;
  cplx amplitude(const ModeIndex& k, int component) const { return amplitude(k)[component]; }
  /// Writes one entry; in half storage a mirror write stores the conjugate.
  void set_amplitude(const ModeIndex& k, const Amplitude& v);
  /// Writes k and its conjugate mirror together.
  void set_pair(const ModeIndex& k, const Amplitude& v);

  std::array<double, 3>& mean() { return mean_; }
  const std::array<double, 3>& mean() const { return mean_; }

  SpectralState with_storage(Storage storage) const;
  void set_zero();

  /// Visits every mode of both halves: f(const ModeIndex&, const Amplitude&).
  template <class F>
  void for_each_mode(F&& f) const {
    const auto& ms = *modes_;
    for (std::size_t s = 0; s < ms.size(); ++s) {
      Amplitude a{}, b{};
      const cplx* p = canonical(s);
      const cplx* q = storage_ == Storage::full ? mirror(s) : nullptr;
      for (int j = 0; j < components_; ++j) {
        a[j] = p[j];
        b[j] = q ? q[j] : std::conj(p[j]);
      }
      f(ms.mode(s), a);
      f(-ms.mode(s), b);
    }
  }

 private:
  std::shared_ptr<const ModeSet> modes_;
  int components_ = 1;
  Storage storage_ = Storage::half;
  std::vector<cplx> data_;
  std::array<double, 3> mean_{0.0, 0.0, 0.0};
};

double energy(const SpectralState& s, bool include_mean = false);
double enstrophy(const SpectralState& s);
double l2_norm(const SpectralState& s);
double reality_defect(const SpectralState& s);
/// max_k |(u_k, k)| / |k|; zero for scalar fields.
double divergence_defect(const SpectralState& s);
/// Sum over modes, components and directions of |k_l| |u_k^j|.
double grad_supnorm_bound(const SpectralState& s);
/// sqrt of the energy of a - b.
double distance(const SpectralState& a, const SpectralState& b);
/// max_k |a_k| |k|^s / C; infinity if C = 0 and the state is nonzero.
double envelope_ratio(const SpectralState& s, const EnvelopeBound& env);

/// Random state with |a_k| <= C/|k|^s, uniform phases and moduli in [lo, 1] of the bound.
/// With `solenoidal`, vector amplitudes are orthogonal to k.
SpectralState random_state(int dim, int cutoff, int components, const EnvelopeBound& env,
                           std::mt19937_64& rng, double lo = 0.0, bool solenoidal = true,
                           SpectralState::Storage storage = SpectralState::Storage::half);

void write_state(std::ostream& os, const SpectralState& s);
SpectralState read_state(std::istream& is);

}  // namespace avglab
