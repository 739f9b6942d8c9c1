#include "avglab/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "avglab/lattice.hpp"
#include "json.hpp"

namespace avglab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string s = "invalid configuration";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

const std::vector<std::string> kScenarios = {"toy_ode",         "averaging_gap", "burgers_scaling",
                                             "attraction_rate", "nse2d",         "ibp_identity",
                                             "trajectory"};

bool sweeps_alpha(const std::string& s) {
  return s == "toy_ode" || s == "averaging_gap" || s == "burgers_scaling" || s == "nse2d";
}

bool needs_nonresonance(const std::string& s) {
  return s == "averaging_gap" || s == "burgers_scaling" || s == "nse2d";
}

bool needs_decay(const std::string& s) { return s == "averaging_gap" || s == "burgers_scaling"; }

// Reads typed fields out of a JSON object and records every problem instead of stopping.
class Reader {
 public:
  Reader(const json& obj, std::string where, std::vector<std::string>& errors)
      : obj_(obj), where_(std::move(where)), errors_(errors) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void error(const std::string& key, const std::string& msg) { errors_.push_back(path(key) + ": " + msg); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
        out = v.get<double>();
      } else if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
        out = v.get<int>();
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
          throw std::invalid_argument("expected a nonnegative integer");
        out = v.get<std::uint64_t>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
        out = v.get<std::string>();
      } else {
        out = v.get<T>();
      }
    } catch (const std::exception& e) {
      error(key, e.what());
    }
  }

  /// A number or a list of numbers.
  void get_list(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_number()) {
      out = {v.get<double>()};
      return;
    }
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      error(key, "expected a number or a list of numbers");
      return;
    }
    out = v.get<std::vector<double>>();
  }

  void reject_unknown() {
    for (const auto& [k, v] : obj_.items())
      if (!seen_.count(k)) error(k, "unknown key");
  }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

ModelKind parse_model(const std::string& s, Reader& r) {
  if (s == "burgers") return ModelKind::burgers;
  if (s == "nse2d") return ModelKind::nse2d;
  r.error("model", "expected 'burgers' or 'nse2d', got '" + s + "'");
  return ModelKind::burgers;
}

std::array<double, 3> alpha_vector(const RunConfig& c, double magnitude) {
  if (c.model == ModelKind::burgers) return {magnitude, 0.0, 0.0};
  const double n = std::hypot(c.alpha_dir[0], c.alpha_dir[1]);
  return {magnitude * c.alpha_dir[0] / n, magnitude * c.alpha_dir[1] / n, 0.0};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void validate(RunConfig& c, std::vector<std::string>& errors) {
  auto err = [&](const std::string& s) { errors.push_back(s); };
  if (std::find(kScenarios.begin(), kScenarios.end(), c.scenario) == kScenarios.end()) {
    std::string list;
    for (const auto& s : kScenarios) list += (list.empty() ? "" : ", ") + s;
    err("scenario: unknown scenario '" + c.scenario + "' (expected one of " + list + ")");
  }
  if (!(c.nu > 0.0)) err("nu: must be positive, got " + fmt(c.nu));
  if (c.m < 1) err("m: must be at least 1, got " + std::to_string(c.m));
  if (c.scenario == "nse2d" && c.model != ModelKind::nse2d) err("model: scenario nse2d needs model nse2d");
  if ((c.scenario == "toy_ode" || c.scenario == "averaging_gap" || c.scenario == "burgers_scaling") &&
      c.model != ModelKind::burgers)
    err("model: scenario " + c.scenario + " needs model burgers");
  if (!(std::hypot(c.alpha_dir[0], c.alpha_dir[1]) > 0.0)) err("alpha_dir: must be nonzero");
  if (!(c.sample_every > 0.0)) err("integrator.sample_every: must be positive");
  if (sweeps_alpha(c.scenario) && c.alphas.empty()) err("alphas: scenario " + c.scenario + " needs alpha values");
  for (double a : c.alphas)
    if (!std::isfinite(a) || a < 0.0) err("alphas: values must be finite and nonnegative, got " + fmt(a));
  if (c.scenario == "averaging_gap" && !(c.h0 > 0.0)) err("h0: must be positive");
  if (c.scenario == "attraction_rate" && c.ic_pairs < 1) err("ic_pairs: must be at least 1");
  if (!(c.ic_C > 0.0)) err("ic_C: must be positive");
  if (c.initial_energy < 0.0) err("initial_energy: must be nonnegative");
  if (needs_decay(c.scenario) && !(c.s_V > 5.0))
    err("s_V: scenario " + c.scenario + " needs s_V > 5, got " + fmt(c.s_V));
  if ((c.scenario == "averaging_gap") && c.forcing.empty()) err("forcing: averaging_gap needs a forced mode");

  const int dim = c.model == ModelKind::burgers ? 1 : 2;
  const int comps = dim;
  bool forcing_ok = true;
  for (std::size_t i = 0; i < c.forcing.size(); ++i) {
    const auto& f = c.forcing[i];
    const std::string at = "forcing[" + std::to_string(i) + "]";
    if (static_cast<int>(f.k.size()) != dim) {
      err(at + ".k: expected " + std::to_string(dim) + " components");
      forcing_ok = false;
      continue;
    }
    double norm2 = 0.0;
    for (int v : f.k) norm2 += double(v) * v;
    if (norm2 == 0.0) {
      err(at + ".k: the zero mode cannot be forced");
      forcing_ok = false;
    }
    if (std::sqrt(norm2) > c.m)
      err(at + ".k: |k| = " + fmt(std::sqrt(norm2)) + " exceeds the cutoff m = " + std::to_string(c.m));
    if (static_cast<int>(f.re.size()) != comps || static_cast<int>(f.im.size()) != comps) {
      err(at + ": re and im need " + std::to_string(comps) + " entries");
      forcing_ok = false;
    }
    if (f.profile == Profile::slow_cosine && !(f.omega_slow >= 0.0))
      err(at + ".omega_slow: must be nonnegative");
    if (forcing_ok && needs_nonresonance(c.scenario)) {
      ModeIndex k = dim == 1 ? ModeIndex(f.k[0]) : ModeIndex(f.k[0], f.k[1]);
      for (double a : c.alphas) {
        const auto av = alpha_vector(c, a);
        if (std::abs(dot(k, av)) <= 1e-12 * (1.0 + a))
          err(at + ".k: mode " + k.str() + " is resonant at alpha = " + fmt(a) + " (k.alpha = 0)");
      }
    }
  }
  if (forcing_ok && errors.empty()) {
    try {
      make_forcing(c);
    } catch (const std::exception& e) {
      err(std::string("forcing: ") + e.what());
    }
  }
  if (c.scenario == "ibp_identity") {
    const auto n = c.ibp.A.size();
    if (n == 0) err("ibp.A: must be a nonempty square matrix");
    for (const auto& row : c.ibp.A)
      if (row.size() != n) {
        err("ibp.A: must be square");
        break;
      }
    if (c.ibp.v0.size() != n) err("ibp.v0: needs " + std::to_string(n) + " entries");
    if (!c.ibp.v1.empty() && c.ibp.v1.size() != n) err("ibp.v1: needs " + std::to_string(n) + " entries");
    if (!(c.ibp.h > 0.0)) err("ibp.h: must be positive");
    if (c.ibp.omegas.empty()) err("ibp.omegas: needs at least one frequency");
    for (double w : c.ibp.omegas)
      if (w == 0.0) err("ibp.omegas: frequencies must be nonzero");
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"top level must be a JSON object"});
  std::vector<std::string> errors;
  RunConfig c;
  Reader r(doc, "", errors);
  r.get("scenario", c.scenario);
  if (!r.has("scenario")) r.error("scenario", "required");
  c.model = c.scenario == "nse2d" ? ModelKind::nse2d : ModelKind::burgers;
  if (r.has("model")) {
    std::string m;
    r.get("model", m);
    c.model = parse_model(m, r);
  }
  r.get("nu", c.nu);
  r.get("alpha", c.alpha);
  r.get_list("alphas", c.alphas);
  if (r.has("alpha_dir")) {
    std::vector<double> d;
    r.get_list("alpha_dir", d);
    if (d.size() == 2)
      c.alpha_dir = {d[0], d[1]};
    else
      r.error("alpha_dir", "expected two numbers");
  }
  r.get("m", c.m);
  if (r.has("frame")) {
    std::string f;
    r.get("frame", f);
    if (f == "lab")
      c.frame = Frame::lab;
    else if (f == "moving")
      c.frame = Frame::moving;
    else
      r.error("frame", "expected 'lab' or 'moving'");
  }
  r.get("s_V", c.s_V);
  r.get("h0", c.h0);
  if (!r.has("h0") && c.nu > 0.0) c.h0 = 1.0 / c.nu;
  r.get("ic_pairs", c.ic_pairs);
  r.get("ic_C", c.ic_C);
  r.get("ic_s", c.ic_s);
  r.get("initial_energy", c.initial_energy);
  r.get("E_tilde", c.E_tilde);
  r.get("s_abs", c.s_abs);
  r.get("C_hat", c.C_hat);
  r.get("output", c.output);
  r.get("seed", c.seed);

  if (r.has("integrator")) {
    const json& ij = doc.at("integrator");
    if (!ij.is_object()) {
      r.error("integrator", "expected an object");
    } else {
      Reader ir(ij, "integrator", errors);
      if (ir.has("method")) {
        std::string m;
        ir.get("method", m);
        if (m == "if_rk4")
          c.method = Method::if_rk4;
        else if (m == "rk4")
          c.method = Method::rk4;
        else
          ir.error("method", "expected 'if_rk4' or 'rk4'");
      }
      if (ir.has("dt")) {
        if (ij.at("dt").is_string() && ij.at("dt") == "auto")
          c.dt = 0.0;
        else if (ij.at("dt").is_number() && ij.at("dt").get<double>() > 0.0)
          c.dt = ij.at("dt").get<double>();
        else
          ir.error("dt", "expected a positive number or \"auto\"");
      }
      ir.get("sample_every", c.sample_every);
      ir.get("t_end", c.t_end);
      ir.reject_unknown();
    }
  }

  if (r.has("forcing")) {
    const json& fj = doc.at("forcing");
    if (!fj.is_array()) {
      r.error("forcing", "expected a list of forced modes");
    } else {
      for (std::size_t i = 0; i < fj.size(); ++i) {
        const std::string at = "forcing[" + std::to_string(i) + "]";
        if (!fj[i].is_object()) {
          errors.push_back(at + ": expected an object");
          continue;
        }
        Reader fr(fj[i], at, errors);
        ForcingEntry e;
        if (fr.has("k")) {
          const json& kj = fj[i].at("k");
          if (kj.is_number_integer())
            e.k = {kj.get<int>()};
          else if (kj.is_array() && std::all_of(kj.begin(), kj.end(), [](const json& x) { return x.is_number_integer(); }))
            e.k = kj.get<std::vector<int>>();
          else
            fr.error("k", "expected an integer or a list of integers");
        } else {
          fr.error("k", "required");
        }
        fr.get_list("re", e.re);
        fr.get_list("im", e.im);
        const std::size_t comps = c.model == ModelKind::burgers ? 1 : 2;
        if (e.re.empty()) e.re.assign(comps, 0.0);
        if (e.im.empty()) e.im.assign(comps, 0.0);
        if (fr.has("profile")) {
          std::string p;
          fr.get("profile", p);
          if (p == "constant")
            e.profile = Profile::constant;
          else if (p == "slow_cosine")
            e.profile = Profile::slow_cosine;
          else
            fr.error("profile", "expected 'constant' or 'slow_cosine'");
        }
        fr.get("omega_slow", e.omega_slow);
        fr.get("phase", e.phase);
        fr.reject_unknown();
        c.forcing.push_back(std::move(e));
      }
    }
  }

  if (r.has("ibp")) {
    const json& bj = doc.at("ibp");
    if (!bj.is_object()) {
      r.error("ibp", "expected an object");
    } else {
      Reader br(bj, "ibp", errors);
      if (br.has("A")) {
        try {
          c.ibp.A = bj.at("A").get<std::vector<std::vector<double>>>();
        } catch (const std::exception&) {
          br.error("A", "expected a list of rows of numbers");
        }
      }
      br.get_list("v0", c.ibp.v0);
      br.get_list("v1", c.ibp.v1);
      br.get("t0", c.ibp.t0);
      br.get("h", c.ibp.h);
      br.get_list("omegas", c.ibp.omegas);
      br.reject_unknown();
    }
  }
  r.reject_unknown();
  validate(c, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

std::string serialize_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = c.scenario;
  j["model"] = to_string(c.model);
  j["nu"] = c.nu;
  j["alpha"] = c.alpha;
  j["alphas"] = c.alphas;
  j["alpha_dir"] = c.alpha_dir;
  j["m"] = c.m;
  j["frame"] = to_string(c.frame);
  nlohmann::ordered_json forcing = nlohmann::ordered_json::array();
  for (const auto& f : c.forcing) {
    nlohmann::ordered_json e;
    e["k"] = f.k;
    e["re"] = f.re;
    e["im"] = f.im;
    e["profile"] = f.profile == Profile::constant ? "constant" : "slow_cosine";
    e["omega_slow"] = f.omega_slow;
    e["phase"] = f.phase;
    forcing.push_back(e);
  }
  j["forcing"] = forcing;
  j["s_V"] = c.s_V;
  nlohmann::ordered_json integ;
  integ["method"] = to_string(c.method);
  if (c.dt > 0.0)
    integ["dt"] = c.dt;
  else
    integ["dt"] = "auto";
  integ["sample_every"] = c.sample_every;
  integ["t_end"] = c.t_end;
  j["integrator"] = integ;
  j["h0"] = c.h0;
  j["ic_pairs"] = c.ic_pairs;
  j["ic_C"] = c.ic_C;
  j["ic_s"] = c.ic_s;
  j["initial_energy"] = c.initial_energy;
  j["E_tilde"] = c.E_tilde;
  j["s_abs"] = c.s_abs;
  j["C_hat"] = c.C_hat;
  if (c.scenario == "ibp_identity" || !c.ibp.A.empty()) {
    nlohmann::ordered_json b;
    b["A"] = c.ibp.A;
    b["v0"] = c.ibp.v0;
    b["v1"] = c.ibp.v1;
    b["t0"] = c.ibp.t0;
    b["h"] = c.ibp.h;
    b["omegas"] = c.ibp.omegas;
    j["ibp"] = b;
  }
  j["output"] = c.output;
  j["seed"] = c.seed;
  return j.dump(2);
}

SimParams make_params(const RunConfig& c) {
  SimParams p;
  p.model = c.model;
  p.nu = c.nu;
  p.cutoff = c.m;
  p.alpha = alpha_vector(c, c.alpha);
  return p;
}

ForcingSpec make_forcing(const RunConfig& c) {
  const int dim = c.model == ModelKind::burgers ? 1 : 2;
  std::vector<ForcedMode> modes;
  for (const auto& f : c.forcing) {
    ForcedMode fm;
    fm.k = dim == 1 ? ModeIndex(f.k.at(0)) : ModeIndex(f.k.at(0), f.k.at(1));
    for (std::size_t j = 0; j < f.re.size() && j < 3; ++j) fm.amplitude[j] = cplx(f.re[j], f.im.at(j));
    fm.profile = f.profile;
    fm.omega_slow = f.omega_slow;
    fm.phase = f.phase;
    modes.push_back(fm);
  }
  return ForcingSpec(dim, dim, std::move(modes), c.s_V);
}

ScenarioOptions make_options(const RunConfig& c) {
  ScenarioOptions o;
  o.integrator.method = c.method;
  o.integrator.dt = c.dt;
  o.integrator.sample_every = c.sample_every;
  o.t_end = c.t_end;
  o.seed = c.seed;
  o.alpha_dir = c.alpha_dir;
  o.E_tilde = c.E_tilde;
  o.s_abs = c.s_abs;
  o.C_hat = c.C_hat;
  o.initial_energy = c.initial_energy;
  o.ic_envelope = {c.ic_C, c.ic_s};
  return o;
}

namespace {

ScenarioResult run_trajectory(const RunConfig& c) {
  const SimParams p = make_params(c);
  const ForcingSpec f = make_forcing(c);
  p.validate(f);
  IntegratorConfig cfg;
  cfg.method = c.method;
  cfg.dt = c.dt;
  cfg.sample_every = c.sample_every;
  cfg.t_end = c.t_end > 0.0 ? c.t_end : 10.0 / c.nu;
  SpectralState u0 = make_state(p, c.frame);
  if (c.initial_energy > 0.0) {
    std::mt19937_64 rng(c.seed);
    SpectralState r = random_state(p.dim(), p.cutoff, p.components(), {c.ic_C, c.ic_s}, rng);
    const double e = energy(r);
    if (e > 0.0)
      for (auto& v : r.data()) v *= std::sqrt(c.initial_energy / e);
    r.mean() = u0.mean();
    u0 = r;
  }
  const TrajectoryRecord rec = integrate(u0, 0.0, cfg, p, f, c.frame);
  ScenarioResult res;
  res.scenario = "trajectory";
  res.parameters = {{"nu", c.nu}, {"alpha", c.alpha}, {"m", double(c.m)}, {"t_end", cfg.t_end},
                    {"dt", rec.dt}, {"steps", double(rec.steps)}};
  res.metrics.columns = {"t_end", "final_energy", "final_enstrophy", "max_reality_defect"};
  double defect = 0.0;
  for (double d : rec.reality_defect) defect = std::max(defect, d);
  res.metrics.rows.push_back({rec.t.back(), rec.energy.back(), rec.enstrophy.back(), defect});
  res.series.columns = {"t", "energy", "enstrophy", "l2norm", "gradbound", "reality_defect"};
  for (std::size_t i = 0; i < rec.size(); ++i)
    res.series.rows.push_back({rec.t[i], rec.energy[i], rec.enstrophy[i], rec.l2norm[i], rec.gradbound[i],
                               rec.reality_defect[i]});
  const auto mon = p.model == ModelKind::burgers
                       ? check_dissipation_inequality(rec.t, rec.energy, p.nu, f.sup_energy())
                       : check_dissipation_inequality(rec.t, rec.enstrophy, p.nu, f.sup_enstrophy());
  res.add_check(p.model == ModelKind::burgers ? "energy_inequality_excess" : "enstrophy_inequality_excess",
                mon.max_excess, -std::numeric_limits<double>::infinity(), 0.0);
  res.add_check("reality_defect", defect, 0.0, 1e-12);
  return res;
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& c) {
  const ScenarioOptions o = make_options(c);
  if (c.scenario == "toy_ode") return run_toy_ode(c.nu, c.alphas, o);
  if (c.scenario == "averaging_gap") return run_averaging_gap(make_params(c), make_forcing(c), c.alphas, c.h0, o);
  if (c.scenario == "burgers_scaling") return run_burgers_scaling(c.nu, make_forcing(c), c.alphas, c.m, o);
  if (c.scenario == "attraction_rate")
    return run_attraction_rate(make_params(c), make_forcing(c), c.alpha, c.ic_pairs, o);
  if (c.scenario == "nse2d") return run_nse2d(c.nu, make_forcing(c), c.alphas, c.m, o);
  if (c.scenario == "trajectory") return run_trajectory(c);
  if (c.scenario == "ibp_identity") {
    const auto n = static_cast<Eigen::Index>(c.ibp.A.size());
    LinearSystemSpec s;
    s.A.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) s.A(i, j) = c.ibp.A[i][j];
    s.v0 = Eigen::Map<const Eigen::VectorXd>(c.ibp.v0.data(), n);
    s.v1 = c.ibp.v1.empty() ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(c.ibp.v1.data(), n));
    s.t0 = c.ibp.t0;
    return run_ibp_identity(s, c.ibp.omegas, c.ibp.h);
  }
  throw PreconditionError("unknown scenario '" + c.scenario + "'");
}

BoundsReport make_bounds_report(const RunConfig& c) {
  BoundsReport rep;
  const ForcingSpec f = make_forcing(c);
  const int d = c.model == ModelKind::burgers ? 1 : 2;
  const auto& env = f.envelope();
  rep.add("A_V", env.A_V, "tightest forcing envelope", {{"s_V", env.s_V}});
  rep.add("B_V", env.B_V, "tightest forcing-rate envelope", {{"s_V", env.s_V}});
  rep.add("forcing_sup_energy", f.sup_energy(), "forcing energy bound");
  rep.add("forcing_sup_enstrophy", f.sup_enstrophy(), "forcing enstrophy bound");
  for (double p : {d + 1.0, 2.0 * c.s_abs}) {
    if (!(p > d)) continue;
    const Bracket b = sum_S(d, p);
    const std::string name = "S_" + std::to_string(d) + "(" + fmt(p) + ")";
    rep.add(name + ".lower", b.lower, "lattice sum, truncated sum plus tail bound", {{"d", double(d)}, {"p", p}});
    rep.add(name + ".upper", b.upper, "lattice sum, truncated sum plus tail bound", {{"d", double(d)}, {"p", p}});
  }
  const double E0 = f.sup_energy() / (c.nu * c.nu);
  const double E_tilde = c.E_tilde > 0.0 ? c.E_tilde : (E0 > 0.0 ? 1.1 * E0 : 1.0);
  if (c.model == ModelKind::burgers) {
    const double D = burgers_D(c.s_abs);
    rep.add("D", D, "closed form", {{"s", c.s_abs}});
    const double C_hat = c.C_hat >= 0.0 ? c.C_hat : default_nonlinearity_constant(E_tilde, c.s_abs);
    rep.add("C_hat", C_hat, c.C_hat >= 0.0 ? "user supplied" : "D(s) sqrt(E_tilde)",
            {{"E_tilde", E_tilde}, {"s", c.s_abs}});
    const BurgersTrapping tr = burgers_trapping_constants(E_tilde, c.s_abs, c.nu, f);
    const std::vector<std::pair<std::string, double>> in = {{"E_tilde", E_tilde}, {"s", c.s_abs}, {"nu", c.nu}};
    rep.add("trapping.E0", tr.E0, "sup energy(f)/nu^2", in);
    rep.add("trapping.N", tr.N, "closed form", in);
    rep.add("trapping.C_min", tr.C_min, "closed form", in);
    rep.add("trapping.margin", tr.margin, "isolation inequality at |k| = ceil(N) + 1", in);
    for (const auto& st : burgers_absorbing_sequence(E_tilde, c.nu, f, 4, 0.0)) {
      const std::string base = "absorbing.C_" + std::to_string(st.i);
      rep.add(base, st.C, "absorbing-set recursion with equality", {{"s", st.s}, {"E_tilde", E_tilde}, {"nu", c.nu}});
      rep.add(base + ".envelope", st.C_W, "max(C_i, sqrt(E_tilde) N^s_i)", {{"s", st.s}});
    }
    if (env.s_V > 5.0 && !f.empty()) {
      std::vector<double> alphas = c.alphas;
      if (c.alpha != 0.0) alphas.push_back(c.alpha);
      for (double a : alphas) {
        if (a == 0.0) continue;
        const double root = burgers_E1(env.A_V, env.B_V, env.s_V, c.nu, a, C_hat);
        rep.add("sqrt_E1@" + fmt(a), root, "eternal-solution bound, h0 = 1/nu",
                {{"alpha", a}, {"nu", c.nu}, {"C_hat", C_hat}});
        rep.add("orbit_bound@" + fmt(a), 5.0 / 3.0 * root, "5 sqrt(E1)/3", {{"alpha", a}});
      }
    }
  } else {
    const auto scan = nonresonance_scan(c.alpha_dir, c.m);
    rep.add("nonresonance.min", scan.min_value, "exhaustive scan over 0 < |k| <= m",
            {{"K", double(c.m)}, {"k1", double(scan.argmin[0])}, {"k2", double(scan.argmin[1])}});
    std::vector<double> alphas = c.alphas;
    if (c.alpha != 0.0) alphas.push_back(c.alpha);
    for (double a : alphas) {
      double wmin = std::numeric_limits<double>::infinity();
      for (const auto& fm : f.modes()) wmin = std::min(wmin, std::abs(dot(fm.k, alpha_vector(c, a))));
      if (std::isfinite(wmin)) rep.add("forced_omega_min@" + fmt(a), wmin, "min over forced k of |k.alpha|", {{"alpha", a}});
    }
    if (c.s_abs > 2.0)
      rep.add("C2", estimate_C2(2, c.s_abs), "sampled estimate, not rigorous", {{"d", 2.0}, {"gamma", c.s_abs}});
    if (c.ic_s > 3.0) {
      const auto ed = enstrophy_energy_delta(c.ic_C, c.ic_s, 2, 0.1);
      rep.add("enstrophy_delta", ed.delta, "eps/(sqrt2 n) with the upper lattice tail",
              {{"C", c.ic_C}, {"s", c.ic_s}, {"eps", 0.1}, {"n", double(ed.n)}});
    }
  }
  return rep;
}

int dispatch(const RunConfig& c, const std::string& out_dir, std::ostream& log, std::ostream& err) {
  try {
    const ScenarioResult res = run_scenario(c);
    fs::create_directories(out_dir);
    const std::string metrics_name = c.scenario + ".csv";
    const std::string series_name = res.series.empty() ? "" : c.scenario + "_series.csv";
    {
      std::ofstream os(fs::path(out_dir) / metrics_name);
      res.metrics.write_csv(os);
      if (!os) throw std::runtime_error("cannot write " + metrics_name);
    }
    if (!series_name.empty()) {
      std::ofstream os(fs::path(out_dir) / series_name);
      res.series.write_csv(os);
      if (!os) throw std::runtime_error("cannot write " + series_name);
    }
    const fs::path json_path = fs::path(out_dir) / (c.scenario + ".json");
    {
      std::ofstream os(json_path);
      os << res.to_json(metrics_name, series_name) << '\n';
      if (!os) throw std::runtime_error("cannot write " + json_path.string());
    }
    for (const auto& chk : res.checks)
      log << (chk.passed ? "pass " : (chk.hard ? "FAIL " : "warn ")) << chk.name << " = " << chk.value << " in ["
          << chk.lower << ", " << chk.upper << "]\n";
    for (const auto& n : res.notes) log << "note: " << n << '\n';
    log << "wrote " << json_path.string() << '\n';
    return res.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

namespace {

std::vector<std::string> csv_header(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::string line;
  std::getline(is, line);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  return cols;
}

bool has_col(const std::vector<std::string>& cols, const std::string& c) {
  return std::find(cols.begin(), cols.end(), c) != cols.end();
}

std::string col(const std::string& name) { return "(column(\"" + name + "\"))"; }

}  // namespace

std::string emit_plot_script(const std::string& result_path) {
  std::ifstream is(result_path);
  if (!is) throw std::runtime_error("cannot read " + result_path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("result is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object() || !doc.contains("scenario") || !doc.contains("metrics") || !doc.contains("metrics_csv"))
    throw std::runtime_error("result has no scenario metrics");
  if (doc["metrics"]["rows"].empty()) throw std::runtime_error("result is empty: no metric rows to plot");
  const std::string scenario = doc["scenario"];
  const fs::path dir = fs::path(result_path).parent_path();
  const std::string metrics_csv = doc["metrics_csv"];
  const auto cols = csv_header(dir / metrics_csv);

  std::ostringstream gp;
  gp << "set datafile separator \",\"\n"
     << "set key autotitle columnhead\n"
     << "set terminal pngcairo size 900,600\n";
  const std::string png = fs::path(result_path).stem().string();
  auto metric_plot = [&](const std::string& x, const std::vector<std::string>& ys, const std::string& title) {
    std::vector<std::string> present;
    for (const auto& y : ys)
      if (has_col(cols, y)) present.push_back(y);
    if (!has_col(cols, x) || present.empty()) return;
    gp << "set output \"" << png << "_" << present.front() << ".png\"\n"
       << "set logscale xy\nset xlabel \"" << x << "\"\nset title \"" << title << "\"\n"
       << "plot ";
    for (std::size_t i = 0; i < present.size(); ++i)
      gp << (i ? ", \\\n     " : "") << "\"" << metrics_csv << "\" using " << col(x) << ":" << col(present[i])
         << " with linespoints title \"" << present[i] << "\"";
    gp << "\nunset logscale\n";
  };
  if (scenario == "toy_ode") metric_plot("alpha", {"trailing_mean_abs_z", "exact_abs_z", "inverse_alpha_bound"}, "attractor size");
  if (scenario == "burgers_scaling" || scenario == "nse2d")
    metric_plot("alpha", {"trailing_sup_norm", "orbit_bound"}, "trailing sup norm");
  if (scenario == "averaging_gap") metric_plot("alpha", {"sup_gap", "delta"}, "averaging gap");
  if (scenario == "ibp_identity") metric_plot("omega", {"direct_norm", "bound"}, "oscillatory integral");

  if (doc.contains("series_csv")) {
    const std::string series_csv = doc["series_csv"];
    const auto scols = csv_header(dir / series_csv);
    if (scols.size() >= 2 && scols.front() == "t") {
      gp << "set output \"" << png << "_series.png\"\n"
         << "set xlabel \"t\"\nset logscale y\nset title \"" << scenario << " series\"\nplot ";
      for (std::size_t i = 1; i < scols.size(); ++i)
        gp << (i > 1 ? ", \\\n     " : "") << "\"" << series_csv << "\" using " << col("t") << ":" << col(scols[i])
           << " with lines title \"" << scols[i] << "\"";
      gp << "\nunset logscale\n";
    }
  }
  const fs::path out = fs::path(result_path).replace_extension(".gp");
  std::ofstream os(out);
  os << gp.str();
  if (!os) throw std::runtime_error("cannot write " + out.string());
  return out.string();
}

}  // namespace avglab
