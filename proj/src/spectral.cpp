#include "avglab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

namespace avglab {

ModeIndex ModeIndex::from_components(const std::vector<int>& comps) {
  if (comps.empty() || comps.size() > 3)
    throw PreconditionError("mode index needs 1 to 3 components");
  ModeIndex k;
  k.dim = static_cast<int>(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) k.c[i] = comps[i];
  return k;
}

double ModeIndex::norm() const { return std::sqrt(static_cast<double>(norm2())); }

bool ModeIndex::is_canonical() const {
  for (int i = 0; i < dim; ++i) {
    if (c[i] > 0) return true;
    if (c[i] < 0) return false;
  }
  return false;
}

ModeIndex ModeIndex::operator-() const {
  ModeIndex k = *this;
  for (auto& x : k.c) x = -x;
  return k;
}

ModeIndex ModeIndex::operator+(const ModeIndex& o) const {
  ModeIndex k = *this;
  for (int i = 0; i < 3; ++i) k.c[i] += o.c[i];
  return k;
}

ModeIndex ModeIndex::operator-(const ModeIndex& o) const { return *this + (-o); }

std::string ModeIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << c[i];
  os << ')';
  return os.str();
}

double dot(const ModeIndex& k, const std::array<double, 3>& v) {
  double r = 0.0;
  for (int i = 0; i < k.dim; ++i) r += k.c[i] * v[i];
  return r;
}

double floor_norm(const ModeIndex& k) { return k.is_zero() ? 1.0 : k.norm(); }

double EnvelopeBound::at(const ModeIndex& k) const { return C / std::pow(floor_norm(k), s); }

ModeSet::ModeSet(int dim, int cutoff) : dim_(dim), cutoff_(cutoff), width_(2 * cutoff + 1) {
  if (dim < 1 || dim > 3) throw PreconditionError("dimension must be 1, 2 or 3");
  if (cutoff < 1) throw PreconditionError("cutoff must be positive");
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) cells *= static_cast<std::size_t>(width_);
  grid_.assign(cells, 0);
  const int m = cutoff;
  const int m2 = m * m;
  const int r2 = dim >= 2 ? m : 0;
  const int r3 = dim >= 3 ? m : 0;
  for (int a = 0; a <= m; ++a)
    for (int b = -r2; b <= r2; ++b)
      for (int c = -r3; c <= r3; ++c) {
        ModeIndex k;
        k.dim = dim;
        k.c = {a, b, c};
        if (k.is_zero() || k.norm2() > m2 || !k.is_canonical()) continue;
        canonical_.push_back(k);
      }
  for (std::size_t s = 0; s < canonical_.size(); ++s) {
    const int code = static_cast<int>(s) + 1;
    grid_[grid_offset(canonical_[s])] = code;
    grid_[grid_offset(-canonical_[s])] = -code;
  }
}

std::shared_ptr<const ModeSet> ModeSet::make(int dim, int cutoff) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::weak_ptr<const ModeSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{dim, cutoff}];
  if (auto p = slot.lock()) return p;
  auto p = std::make_shared<const ModeSet>(dim, cutoff);
  slot = p;
  return p;
}

std::size_t ModeSet::grid_offset(const ModeIndex& k) const {
  std::size_t off = 0;
  for (int i = 0; i < dim_; ++i)
    off = off * static_cast<std::size_t>(width_) + static_cast<std::size_t>(k.c[i] + cutoff_);
  return off;
}

int ModeSet::lookup(const ModeIndex& k) const {
  if (k.dim != dim_) throw PreconditionError("mode " + k.str() + " has the wrong dimension");
  for (int i = 0; i < dim_; ++i)
    if (k.c[i] < -cutoff_ || k.c[i] > cutoff_) return 0;
  return grid_[grid_offset(k)];
}

SpectralState::SpectralState(int dim, int cutoff, int components, Storage storage)
    : SpectralState(ModeSet::make(dim, cutoff), components, storage) {}

SpectralState::SpectralState(std::shared_ptr<const ModeSet> modes, int components,
                             Storage storage)
    : modes_(std::move(modes)), components_(components), storage_(storage) {
  if (components < 1 || components > 3) throw PreconditionError("components must be 1, 2 or 3");
  const std::size_t halves = storage == Storage::full ? 2 : 1;
  data_.assign(halves * modes_->size() * static_cast<std::size_t>(components), cplx(0.0, 0.0));
}

bool SpectralState::same_shape(const SpectralState& o) const {
  return modes_ && o.modes_ && dim() == o.dim() && cutoff() == o.cutoff() &&
         components_ == o.components_ && storage_ == o.storage_;
}

cplx* SpectralState::mirror(std::size_t slot) {
  return data_.data() + (modes_->size() + slot) * components_;
}

const cplx* SpectralState::mirror(std::size_t slot) const {
  return data_.data() + (modes_->size() + slot) * components_;
}

Amplitude SpectralState::amplitude(const ModeIndex& k) const {
  Amplitude a{};
  const int code = modes_->lookup(k);
  if (code == 0) return a;
  const std::size_t slot = static_cast<std::size_t>(std::abs(code) - 1);
  if (code > 0) {
    const cplx* p = canonical(slot);
    for (int j = 0; j < components_; ++j) a[j] = p[j];
  } else if (storage_ == Storage::full) {
    const cplx* p = mirror(slot);
    for (int j = 0; j < components_; ++j) a[j] = p[j];
  } else {
    const cplx* p = canonical(slot);
    for (int j = 0; j < components_; ++j) a[j] = std::conj(p[j]);
  }
  return a;
}

void SpectralState::set_amplitude(const ModeIndex& k, const Amplitude& v) {
  const int code = modes_->lookup(k);
  if (code == 0) throw PreconditionError("mode " + k.str() + " is outside the state");
  const std::size_t slot = static_cast<std::size_t>(std::abs(code) - 1);
  if (code > 0) {
    cplx* p = canonical(slot);
    for (int j = 0; j < components_; ++j) p[j] = v[j];
  } else if (storage_ == Storage::full) {
    cplx* p = mirror(slot);
    for (int j = 0; j < components_; ++j) p[j] = v[j];
  } else {
    cplx* p = canonical(slot);
    for (int j = 0; j < components_; ++j) p[j] = std::conj(v[j]);
  }
}

void SpectralState::set_pair(const ModeIndex& k, const Amplitude& v) {
  set_amplitude(k, v);
  Amplitude w{};
  for (int j = 0; j < components_; ++j) w[j] = std::conj(v[j]);
  if (storage_ == Storage::full) set_amplitude(-k, w);
}

SpectralState SpectralState::with_storage(Storage storage) const {
  if (storage == storage_) return *this;
  SpectralState out(modes_, components_, storage);
  out.mean_ = mean_;
  const std::size_t n = modes_->size() * static_cast<std::size_t>(components_);
  std::copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n), out.data_.begin());
  if (storage == Storage::full)
    for (std::size_t i = 0; i < n; ++i) out.data_[n + i] = std::conj(data_[i]);
  return out;
}

void SpectralState::set_zero() {
  std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0));
  mean_ = {0.0, 0.0, 0.0};
}

namespace {

double weighted_square_sum(const SpectralState& s, bool by_k2) {
  double total = 0.0;
  const auto& ms = s.modes();
  const int n = s.components();
  const bool full = s.storage() == SpectralState::Storage::full;
  for (std::size_t slot = 0; slot < ms.size(); ++slot) {
    const double w = by_k2 ? static_cast<double>(ms.mode(slot).norm2()) : 1.0;
    double part = 0.0;
    for (int j = 0; j < n; ++j) part += std::norm(s.canonical(slot)[j]);
    if (full) {
      for (int j = 0; j < n; ++j) part += std::norm(s.mirror(slot)[j]);
    } else {
      part *= 2.0;
    }
    total += w * part;
  }
  return total;
}

}  // namespace

double energy(const SpectralState& s, bool include_mean) {
  double e = weighted_square_sum(s, false);
  if (include_mean)
    for (int j = 0; j < s.components(); ++j) e += s.mean()[j] * s.mean()[j];
  return e;
}

double enstrophy(const SpectralState& s) { return weighted_square_sum(s, true); }

double l2_norm(const SpectralState& s) { return std::sqrt(energy(s)); }

double reality_defect(const SpectralState& s) {
  if (s.storage() == SpectralState::Storage::half) return 0.0;
  double worst = 0.0;
  for (std::size_t slot = 0; slot < s.slots(); ++slot)
    for (int j = 0; j < s.components(); ++j)
      worst = std::max(worst, std::abs(s.canonical(slot)[j] - std::conj(s.mirror(slot)[j])));
  return worst;
}

double divergence_defect(const SpectralState& s) {
  if (s.components() == 1) return 0.0;
  double worst = 0.0;
  s.for_each_mode([&](const ModeIndex& k, const Amplitude& a) {
    cplx d = 0.0;
    for (int j = 0; j < s.components(); ++j) d += a[j] * static_cast<double>(k.c[j]);
    worst = std::max(worst, std::abs(d) / k.norm());
  });
  return worst;
}

double grad_supnorm_bound(const SpectralState& s) {
  double total = 0.0;
  s.for_each_mode([&](const ModeIndex& k, const Amplitude& a) {
    double kabs = 0.0;
    for (int l = 0; l < k.dim; ++l) kabs += std::abs(k.c[l]);
    for (int j = 0; j < s.components(); ++j) total += kabs * std::abs(a[j]);
  });
  return total;
}

double distance(const SpectralState& a, const SpectralState& b) {
  if (!a.same_shape(b)) throw PreconditionError("distance between states of different shape");
  double total = 0.0;
  const double w = a.storage() == SpectralState::Storage::half ? 2.0 : 1.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) total += w * std::norm(a.data()[i] - b.data()[i]);
  return std::sqrt(total);
}

double envelope_ratio(const SpectralState& s, const EnvelopeBound& env) {
  double worst = 0.0;
  s.for_each_mode([&](const ModeIndex& k, const Amplitude& a) {
    double mag = 0.0;
    for (int j = 0; j < s.components(); ++j) mag += std::norm(a[j]);
    mag = std::sqrt(mag);
    if (mag == 0.0) return;
    const double bound = env.at(k);
    worst = std::max(worst, bound > 0.0 ? mag / bound : std::numeric_limits<double>::infinity());
  });
  return worst;
}

SpectralState random_state(int dim, int cutoff, int components, const EnvelopeBound& env,
                           std::mt19937_64& rng, double lo, bool solenoidal,
                           SpectralState::Storage storage) {
  SpectralState s(dim, cutoff, components, SpectralState::Storage::half);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (std::size_t slot = 0; slot < s.slots(); ++slot) {
    const ModeIndex& k = s.modes().mode(slot);
    const double mag = env.at(k) * (lo + (1.0 - lo) * unit(rng));
    Amplitude v{};
    if (components == 1) {
      v[0] = std::polar(mag, two_pi * unit(rng));
    } else {
      double norm2 = 0.0;
      for (int j = 0; j < components; ++j) {
        v[j] = cplx(gauss(rng), gauss(rng));
      }
      if (solenoidal) {
        cplx d = 0.0;
        for (int j = 0; j < components; ++j) d += v[j] * static_cast<double>(k.c[j]);
        for (int j = 0; j < components; ++j) v[j] -= d * static_cast<double>(k.c[j]) / static_cast<double>(k.norm2());
      }
      for (int j = 0; j < components; ++j) norm2 += std::norm(v[j]);
      const double scale = norm2 > 0.0 ? mag / std::sqrt(norm2) : 0.0;
      for (int j = 0; j < components; ++j) v[j] *= scale;
    }
    s.set_amplitude(k, v);
  }
  return s.with_storage(storage);
}

void write_state(std::ostream& os, const SpectralState& s) {
  const auto old_prec = os.precision(17);
  os << s.dim() << ' ' << s.cutoff() << ' ' << s.components();
  for (int j = 0; j < s.components(); ++j) os << ' ' << s.mean()[j];
  os << '\n';
  auto row = [&](const ModeIndex& k, const cplx* p) {
    for (int i = 0; i < k.dim; ++i) os << k.c[i] << ' ';
    for (int j = 0; j < s.components(); ++j)
      os << p[j].real() << ' ' << p[j].imag() << (j + 1 < s.components() ? " " : "");
    os << '\n';
  };
  for (std::size_t slot = 0; slot < s.slots(); ++slot) row(s.modes().mode(slot), s.canonical(slot));
  if (s.storage() == SpectralState::Storage::full)
    for (std::size_t slot = 0; slot < s.slots(); ++slot) row(-s.modes().mode(slot), s.mirror(slot));
  os.precision(old_prec);
}

SpectralState read_state(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw PreconditionError("state text is empty");
  std::istringstream head(line);
  int d = 0, m = 0, n = 0;
  if (!(head >> d >> m >> n)) throw PreconditionError("state header must start with d m n");
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  for (int j = 0; j < n; ++j)
    if (!(head >> mean[j])) throw PreconditionError("state header is missing mean components");

  struct Row {
    ModeIndex k;
    Amplitude v;
  };
  std::vector<Row> rows;
  bool has_mirror = false;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<int> comps(static_cast<std::size_t>(d));
    for (auto& c : comps)
      if (!(ls >> c)) throw PreconditionError("bad mode row: " + line);
    Row r{ModeIndex::from_components(comps), {}};
    for (int j = 0; j < n; ++j) {
      double re = 0.0, im = 0.0;
      if (!(ls >> re >> im)) throw PreconditionError("bad amplitude in row: " + line);
      r.v[j] = cplx(re, im);
    }
    if (!r.k.is_canonical()) has_mirror = true;
    rows.push_back(r);
  }
  SpectralState s(d, m, n, has_mirror ? SpectralState::Storage::full : SpectralState::Storage::half);
  s.mean() = mean;
  for (const auto& r : rows) s.set_amplitude(r.k, r.v);
  return s;
}

}  // namespace avglab
