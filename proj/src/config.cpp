#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "sls/dirac_solver.hpp"
#include "sls/io.hpp"
#include "sls/mb_solver.hpp"
#include "sls/scenario.hpp"

namespace sls {

using json = nlohmann::json;

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::free_expansion: return "free_expansion";
    case ScenarioId::square_well: return "square_well";
    case ScenarioId::zitterbewegung: return "zitterbewegung";
    case ScenarioId::cross_validate: return "cross_validate";
  }
  return "?";
}

std::string to_string(Model m) {
  switch (m) {
    case Model::mb: return "mb";
    case Model::dirac: return "dirac";
    case Model::schrodinger: return "schrodinger";
  }
  return "?";
}

const std::vector<ScenarioId>& all_scenarios() {
  static const std::vector<ScenarioId> ids{ScenarioId::free_expansion, ScenarioId::square_well,
                                           ScenarioId::zitterbewegung, ScenarioId::cross_validate};
  return ids;
}

std::optional<ScenarioId> parse_scenario_id(const std::string& s) {
  for (ScenarioId id : all_scenarios())
    if (to_string(id) == s) return id;
  return std::nullopt;
}

std::optional<Model> parse_model(const std::string& s) {
  for (Model m : {Model::mb, Model::dirac, Model::schrodinger})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

std::string describe(ScenarioId id) {
  switch (id) {
    case ScenarioId::free_expansion:
      return "gaussian stationary pulse, no potential; diffusive (wide) or ballistic (tight) expansion";
    case ScenarioId::square_well:
      return "pulse released in a square well; in-well norm decay via Klein tunneling";
    case ScenarioId::zitterbewegung:
      return "pi/2 flip of the control phase; center-of-mass trembling and its spectrum";
    case ScenarioId::cross_validate:
      return "free expansion under all three models with pairwise intensity differences";
  }
  return "";
}

namespace {

std::string join_errors(const std::vector<FieldError>& errors) {
  std::string s;
  for (const auto& e : errors) {
    if (!s.empty()) s += "; ";
    s += e.field + ": " + e.message;
  }
  return s;
}

// Rounds n up to a power of two.
double next_pow2(double x) {
  double p = 1;
  while (p < x) p *= 2;
  return p;
}

/// Splits t into an integer number of steps no longer than bound.
double fitted_dt(double interval, double bound) {
  const double n = std::ceil(interval / bound * (1 - 1e-12));
  return interval / std::max(1.0, n);
}

class Collector {
 public:
  void add(std::string field, std::string message) {
    errors_.push_back({std::move(field), std::move(message)});
  }
  bool ok() const { return errors_.empty(); }
  std::size_t count() const { return errors_.size(); }
  [[noreturn]] void raise() { throw ValidationError(errors_); }

  template <typename T>
  std::optional<T> get(const json& obj, const std::string& key, const std::string& field) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer()) throw std::invalid_argument("expected an integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw std::invalid_argument("expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw std::invalid_argument("expected a string");
      }
      return it->get<T>();
    } catch (const std::exception& e) {
      add(field, e.what());
      return std::nullopt;
    }
  }

  void unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) add(prefix + it.key(), "unknown key");
  }

  const json& section(const json& raw, const std::string& key) {
    static const json empty = json::object();
    auto it = raw.find(key);
    if (it == raw.end() || it->is_null()) return empty;
    if (!it->is_object()) {
      add(key, "expected an object");
      return empty;
    }
    return *it;
  }

 private:
  std::vector<FieldError> errors_;
};

const std::set<std::string> kRawGroup{"gamma", "delta", "omega", "g2n"};
const std::set<std::string> kRatioGroup{"gamma_over_delta", "cos_theta", "omega_over_delta"};

std::optional<MediumConfig<double>> parse_medium(const json& raw, bool preset, Collector& err) {
  bool any_raw = raw.contains("c");
  bool any_ratio = false;
  for (const auto& k : kRawGroup) any_raw = any_raw || raw.contains(k);
  for (const auto& k : kRatioGroup) any_ratio = any_ratio || raw.contains(k);

  if (any_raw && any_ratio) {
    std::string raw_keys, ratio_keys;
    for (const auto& k : kRawGroup)
      if (raw.contains(k)) raw_keys += (raw_keys.empty() ? "" : ", ") + k;
    for (const auto& k : kRatioGroup)
      if (raw.contains(k)) ratio_keys += (ratio_keys.empty() ? "" : ", ") + k;
    err.add("medium", "parameter groups are exclusive: {" + raw_keys + "} given together with {" +
                          ratio_keys + "}");
    return std::nullopt;
  }
  if (preset && (any_raw || any_ratio)) {
    err.add("medium", "--preset paper supplies the medium; remove the medium keys from the config");
    return std::nullopt;
  }
  if (preset) return figure_preset<double>();
  if (!any_raw && !any_ratio) {
    err.add("medium",
            "missing: give either {gamma, delta, omega, g2n} or {gamma_over_delta, cos_theta}");
    return std::nullopt;
  }

  const std::size_t before = err.count();
  if (any_raw) {
    MediumConfig<double> m;
    auto need = [&](const char* k) -> double {
      auto v = err.get<double>(raw, k, k);
      if (!v) {
        if (!raw.contains(k)) err.add(k, "missing");
        return 0;
      }
      return *v;
    };
    m.gamma = need("gamma");
    m.delta = need("delta");
    m.omega = need("omega");
    m.g2n = need("g2n");
    m.c = err.get<double>(raw, "c", "c").value_or(1.0);
    if (err.count() != before) return std::nullopt;
    try {
      validate_medium(m);
      return to_internal_units(m);
    } catch (const ConfigError& e) {
      err.add(e.field(), std::string(e.what()).substr(e.field().size() + 2));
      return std::nullopt;
    }
  }
  const auto god = err.get<double>(raw, "gamma_over_delta", "gamma_over_delta");
  const auto cth = err.get<double>(raw, "cos_theta", "cos_theta");
  const double ood = err.get<double>(raw, "omega_over_delta", "omega_over_delta").value_or(0.2);
  if (!raw.contains("gamma_over_delta")) err.add("gamma_over_delta", "missing");
  if (!raw.contains("cos_theta")) err.add("cos_theta", "missing");
  if (err.count() != before || !god || !cth) return std::nullopt;
  try {
    return medium_from_ratios(*god, *cth, ood);
  } catch (const ConfigError& e) {
    err.add(e.field(), std::string(e.what()).substr(e.field().size() + 2));
    return std::nullopt;
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<FieldError> errors)
    : std::invalid_argument(join_errors(errors)), errors_(std::move(errors)) {}

bool Scenario::has(Model m) const { return std::find(models.begin(), models.end(), m) != models.end(); }

nlohmann::ordered_json Scenario::resolved() const {
  nlohmann::ordered_json j;
  j["scenario"] = to_string(id);
  std::vector<std::string> names;
  for (Model m : models) names.push_back(to_string(m));
  j["models"] = names;
  j["medium"] = to_json(medium);
  j["grid"] = {{"n_points", n_points}, {"length", length}};
  j["initial"] = {{"width", width},
                  {"phase", phase == RelativePhase::zero ? "0" : "pi/2"},
                  {"center", center}};
  nlohmann::ordered_json pot;
  pot["kind"] = potential_kind == PotentialKind::square_well ? "square_well" : "none";
  if (potential_kind == PotentialKind::square_well) {
    pot["u0_mc2"] = u0;
    pot["a_lambda_c"] = a;
    pot["smooth_cells"] = smooth_cells;
    pot["detuning_mapping"] = mapping == DetuningMapping::unit     ? "unit"
                              : mapping == DetuningMapping::linear ? "linear"
                                                                   : "polariton";
  }
  j["potential"] = pot;
  j["t_final"] = t_final;
  j["transient"] = transient;
  j["fit_window"] = {fit_begin, fit_end};
  j["samples"] = samples;
  j["snapshots"] = snapshots;
  j["snapshot_stride"] = snapshot_stride;
  nlohmann::ordered_json st;
  for (const auto& [m, s] : settings) {
    nlohmann::ordered_json e;
    e["dt"] = s.dt;
    if (m == Model::mb) e["adiabatic"] = s.adiabatic;
    else e["damping"] = s.damping;
    st[to_string(m)] = e;
  }
  j["solvers"] = st;
  return j;
}

std::string Scenario::params_hash() const { return hex64(fnv1a64(resolved().dump())); }

MediumConfig<double> medium_from_json(const json& raw, bool preset_paper) {
  Collector err;
  auto m = parse_medium(raw, preset_paper, err);
  if (!err.ok() || !m) err.raise();
  return *m;
}

Scenario validate_config(const json& raw, ScenarioId id, const RunOptions& opts) {
  Collector err;
  if (!raw.is_object()) {
    err.add("config", "expected a JSON object");
    err.raise();
  }
  std::set<std::string> top{"grid", "initial", "potential", "t_final", "transient", "models",
                            "mb", "dirac", "schrodinger", "samples", "snapshots",
                            "snapshot_stride", "fit_window", "c"};
  top.insert(kRawGroup.begin(), kRawGroup.end());
  top.insert(kRatioGroup.begin(), kRatioGroup.end());
  err.unknown_keys(raw, top, "");

  Scenario s;
  s.id = id;
  const auto medium = parse_medium(raw, opts.preset_paper, err);

  // Models.
  if (opts.models) {
    s.models = *opts.models;
  } else if (raw.contains("models")) {
    const json& ms = raw["models"];
    if (!ms.is_array()) {
      err.add("models", "expected an array of model names");
    } else {
      for (const auto& m : ms) {
        auto parsed = m.is_string() ? parse_model(m.get<std::string>()) : std::nullopt;
        if (!parsed) err.add("models", "unknown model " + m.dump());
        else if (!s.has(*parsed)) s.models.push_back(*parsed);
      }
    }
  }
  if (s.models.empty() && !raw.contains("models") && !opts.models) {
    switch (id) {
      case ScenarioId::free_expansion: break;  // resolved after the width is known
      case ScenarioId::square_well: s.models = {Model::mb, Model::dirac}; break;
      case ScenarioId::zitterbewegung: s.models = {Model::dirac}; break;
      case ScenarioId::cross_validate: s.models = {Model::mb, Model::dirac, Model::schrodinger}; break;
    }
  } else if (s.models.empty()) {
    err.add("models", "at least one model is required");
  }

  const json& grid = err.section(raw, "grid");
  const json& init = err.section(raw, "initial");
  const json& pot = err.section(raw, "potential");
  err.unknown_keys(grid, {"n_points", "length"}, "grid.");
  err.unknown_keys(init, {"width_lambda_c", "width_l_abs", "phase", "center"}, "initial.");
  err.unknown_keys(pot, {"kind", "u0_mc2", "a_lambda_c", "smooth_cells", "detuning_mapping"},
                   "potential.");
  for (const char* m : {"mb", "dirac", "schrodinger"}) {
    const json& sec = err.section(raw, m);
    err.unknown_keys(sec, std::string(m) == "mb" ? std::set<std::string>{"dt", "adiabatic"}
                                                 : std::set<std::string>{"dt", "damping"},
                     std::string(m) + ".");
  }

  // Phase.
  std::optional<RelativePhase> phase;
  if (init.contains("phase")) {
    const json& p = init["phase"];
    if (p.is_string() && (p == "0" || p == "zero")) phase = RelativePhase::zero;
    else if (p.is_string() && (p == "pi/2" || p == "half_pi")) phase = RelativePhase::half_pi;
    else if (p.is_number() && p.get<double>() == 0) phase = RelativePhase::zero;
    else if (p.is_number() && std::abs(p.get<double>() - std::numbers::pi / 2) < 1e-9)
      phase = RelativePhase::half_pi;
    else err.add("initial.phase", "must be 0 or \"pi/2\"");
  }
  if (id == ScenarioId::zitterbewegung) {
    if (phase == RelativePhase::zero) err.add("initial.phase", "zitterbewegung requires pi/2");
    s.phase = RelativePhase::half_pi;
  } else if (id == ScenarioId::square_well) {
    if (phase == RelativePhase::half_pi) err.add("initial.phase", "square_well requires phase 0");
    s.phase = RelativePhase::zero;
  } else {
    s.phase = phase.value_or(RelativePhase::zero);
  }

  // Potential.
  std::string kind = err.get<std::string>(pot, "kind", "potential.kind")
                         .value_or(id == ScenarioId::square_well ? "square_well" : "none");
  if (kind == "square_well") {
    if (id != ScenarioId::square_well)
      err.add("potential.kind", to_string(id) + " runs without a potential");
    s.potential_kind = PotentialKind::square_well;
  } else if (kind == "none") {
    if (id == ScenarioId::square_well) err.add("potential.kind", "square_well needs kind square_well");
    s.potential_kind = PotentialKind::none;
  } else {
    err.add("potential.kind", "must be \"none\" or \"square_well\"");
  }
  s.u0 = err.get<double>(pot, "u0_mc2", "potential.u0_mc2").value_or(1.875);
  s.a = err.get<double>(pot, "a_lambda_c", "potential.a_lambda_c").value_or(0.1);
  s.smooth_cells = err.get<double>(pot, "smooth_cells", "potential.smooth_cells").value_or(0);
  const std::string mapping =
      err.get<std::string>(pot, "detuning_mapping", "potential.detuning_mapping").value_or("polariton");
  if (mapping == "unit") s.mapping = DetuningMapping::unit;
  else if (mapping == "linear") s.mapping = DetuningMapping::linear;
  else if (mapping == "polariton") s.mapping = DetuningMapping::polariton;
  else err.add("potential.detuning_mapping", "must be unit, linear or polariton");
  if (s.potential_kind == PotentialKind::square_well) {
    if (!(s.u0 >= 0)) err.add("potential.u0_mc2", "must be non-negative");
    if (!(s.a > 0)) err.add("potential.a_lambda_c", "must be positive");
    if (!(s.smooth_cells >= 0)) err.add("potential.smooth_cells", "must be non-negative");
  }

  const auto width_lc = err.get<double>(init, "width_lambda_c", "initial.width_lambda_c");
  const auto width_la = err.get<double>(init, "width_l_abs", "initial.width_l_abs");
  if (width_lc && width_la) err.add("initial", "give width_lambda_c or width_l_abs, not both");
  s.center = err.get<double>(init, "center", "initial.center").value_or(0);

  s.samples = err.get<int>(raw, "samples", "samples").value_or(id == ScenarioId::zitterbewegung ? 1000 : 400);
  if (auto v = err.get<int>(raw, "snapshots", "snapshots")) {
    s.snapshots = *v;
  } else {
    // Largest count up to 16 that divides the record.
    s.snapshots = 16;
    while (s.samples >= 1 && s.snapshots > 1 && s.samples % s.snapshots != 0) --s.snapshots;
  }
  s.snapshot_stride = err.get<int>(raw, "snapshot_stride", "snapshot_stride").value_or(1);
  if (s.samples < 1) err.add("samples", "must be >= 1");
  if (s.snapshots < 0) err.add("snapshots", "must be >= 0");
  if (s.snapshot_stride < 1) err.add("snapshot_stride", "must be >= 1");
  if (s.snapshots > 0 && s.samples >= 1 && s.samples % s.snapshots != 0)
    err.add("snapshots", "must divide samples");

  if (!medium) err.raise();
  s.medium = *medium;
  s.params = derive_params(s.medium);
  const DerivedParams<double>& p = s.params;
  if (p.weak_detuning)
    s.warnings.push_back("gamma/|delta| > 0.1: the real-mass Dirac limit is degraded");
  const double rest = std::abs(p.rest_energy);

  // Width and time defaults.
  if (width_la) s.width = *width_la;
  else if (width_lc) s.width = *width_lc * p.lambda_c;
  else s.width = (id == ScenarioId::zitterbewegung ? 10.0 : 0.05 * p.lambda_c);
  if (!(s.width > 0)) err.add("initial.width", "must be positive");
  const bool tight = s.width < p.lambda_c;
  if (s.models.empty() && id == ScenarioId::free_expansion)
    s.models = tight ? std::vector<Model>{Model::mb, Model::dirac}
                     : std::vector<Model>{Model::mb, Model::schrodinger};

  if (auto t = err.get<double>(raw, "t_final", "t_final")) {
    s.t_final = *t;
    if (!(s.t_final > 0)) err.add("t_final", "must be positive");
  } else {
    switch (id) {
      case ScenarioId::free_expansion:
      case ScenarioId::cross_validate:
        s.t_final = tight ? 2 * p.lambda_c / p.c_star
                          : 4 * std::abs(p.m_star) * s.width * s.width;
        break;
      case ScenarioId::square_well: s.t_final = 20 / rest; break;
      case ScenarioId::zitterbewegung: s.t_final = 40 / rest; break;
    }
  }
  s.transient = err.get<double>(raw, "transient", "transient").value_or(2 / rest);
  if (raw.contains("fit_window")) {
    const json& fw = raw["fit_window"];
    if (fw.is_array() && fw.size() == 2 && fw[0].is_number() && fw[1].is_number()) {
      s.fit_begin = fw[0].get<double>();
      s.fit_end = fw[1].get<double>();
      if (!(s.fit_begin < s.fit_end)) err.add("fit_window", "must be increasing");
    } else {
      err.add("fit_window", "expected [t_begin, t_end]");
    }
  } else {
    s.fit_begin = s.t_final / 4;
    s.fit_end = s.t_final;
  }

  // Grid.
  const bool free_like = id != ScenarioId::square_well;
  const double needed = free_like ? 8 * (s.width + p.c_star * s.t_final) : 2 * p.c_star * s.t_final;
  const Eigen::Index default_n = id == ScenarioId::zitterbewegung ? 32768
                                 : id == ScenarioId::square_well  ? 8192
                                                                  : 4096;
  s.n_points = err.get<Eigen::Index>(grid, "n_points", "grid.n_points").value_or(default_n);
  s.length = err.get<double>(grid, "length", "grid.length").value_or(next_pow2(needed));
  if (s.n_points < 64 || !is_power_of_two(s.n_points))
    err.add("grid.n_points", "must be a power of two >= 64");
  if (!(s.length > 0)) err.add("grid.length", "must be positive");
  if (s.length < needed * (1 - 1e-12))
    err.add("grid.length", "domain too small: need >= " + std::to_string(needed) +
                               (free_like ? " (8 x (width + c* t_final))" : " (2 c* t_final)"));
  if (!err.ok()) err.raise();

  const double dz = s.length / double(s.n_points);
  if (!(s.width > 4 * dz)) err.add("initial.width", "pulse is not resolved (needs width > 4 dz)");
  if (!(s.center >= -s.length / 2 && s.center < s.length / 2))
    err.add("initial.center", "outside the domain");
  if (s.potential_kind == PotentialKind::square_well && !(s.a * p.lambda_c < s.length / 2))
    err.add("potential.a_lambda_c", "well is wider than half the domain");

  // Solvers.
  const Grid<double> g(s.n_points, s.length);
  PotentialProfile<double> profile = free_potential(g);
  if (s.potential_kind == PotentialKind::square_well && err.ok()) {
    profile = square_well(g, s.u0, s.a, p, s.smooth_cells);
    if (s.has(Model::mb)) {
      try {
        assign_detuning(profile, s.medium, p, s.mapping);
      } catch (const ConfigError& e) {
        err.add(e.field(), std::string(e.what()).substr(e.field().size() + 2));
      }
    }
  }
  const double interval = s.t_final / std::max(1, s.samples);
  for (Model m : s.models) {
    const std::string name = to_string(m);
    const json& sec = err.section(raw, name);
    ModelSettings ms;
    double bound = 0;
    switch (m) {
      case Model::mb:
        bound = mb_max_dt(g, s.medium);
        ms.adiabatic = err.get<bool>(sec, "adiabatic", "mb.adiabatic").value_or(false);
        break;
      case Model::dirac:
        bound = std::min(dirac_max_dt(p, profile), 0.5 * dz / p.c_star);
        ms.damping = err.get<bool>(sec, "damping", "dirac.damping").value_or(false);
        break;
      case Model::schrodinger:
        bound = std::min(dirac_max_dt(p, profile), 0.5 * dz / p.c_star);
        ms.damping = err.get<bool>(sec, "damping", "schrodinger.damping").value_or(false);
        break;
    }
    if (auto dt = err.get<double>(sec, "dt", name + ".dt")) {
      ms.dt = *dt;
      if (!(ms.dt > 0)) {
        err.add(name + ".dt", "must be positive");
      } else {
        if (m == Model::mb && ms.dt > mb_max_dt(g, s.medium) * (1 + 1e-12))
          err.add("mb.dt", "exceeds 0.5 min(1/|Gamma|, dz/c) = " + std::to_string(mb_max_dt(g, s.medium)));
        if (m == Model::dirac && ms.dt > dirac_max_dt(p, profile) * (1 + 1e-12))
          err.add("dirac.dt", "exceeds 0.1 / max(m* c*^2, max|U|) = " +
                                  std::to_string(dirac_max_dt(p, profile)));
        const double r = interval / ms.dt;
        if (std::abs(r - std::round(r)) > 1e-6 * std::max(1.0, r))
          err.add(name + ".dt", "must divide the sample interval t_final / samples = " +
                                    std::to_string(interval));
      }
    } else {
      ms.dt = fitted_dt(interval, bound);
    }
    s.settings[m] = ms;
  }
  if (!err.ok()) err.raise();
  return s;
}

}  // namespace sls
