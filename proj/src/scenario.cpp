#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>

#include "sls/analytic.hpp"
#include "sls/dirac_solver.hpp"
#include "sls/io.hpp"
#include "sls/mb_solver.hpp"
#include "sls/observables.hpp"
#include "sls/scenario.hpp"
#include "sls/schrodinger_solver.hpp"

namespace sls {

using ojson = nlohmann::ordered_json;

const ModelResult* ScenarioResult::find(Model m) const {
  for (const auto& r : models)
    if (r.model == m) return &r;
  return nullptr;
}

namespace {

// One model's solver, state and bookkeeping.
struct Track {
  Model model;
  Eigen::Index steps_per_sample{};
  std::unique_ptr<MBSolver<double>> mb;
  std::unique_ptr<DiracSolver<double>> dirac;
  std::unique_ptr<SchrodingerSolver<double>> schrodinger;
  MBState<double> mb_state;
  SpinorState<double> spinor;
  SumModeState<double> sum_mode;
  ObservableSeries<double> series;
  std::filesystem::path dir;
  std::ofstream snapshot_index;
  int snapshot_count{0};

  double time() const {
    switch (model) {
      case Model::mb: return mb_state.t;
      case Model::dirac: return spinor.t;
      case Model::schrodinger: return sum_mode.t;
    }
    return 0;
  }

  void advance() {
    switch (model) {
      case Model::mb: mb->advance(mb_state, steps_per_sample); break;
      case Model::dirac: dirac->advance(spinor, steps_per_sample); break;
      case Model::schrodinger: schrodinger->advance(sum_mode, steps_per_sample); break;
    }
  }

  void check_finite() const {
    switch (model) {
      case Model::mb: mb->check_finite(mb_state); break;
      case Model::dirac: dirac->check_finite(spinor); break;
      case Model::schrodinger: schrodinger->check_finite(sum_mode); break;
    }
  }

  RealArray<double> intensity(const DerivedParams<double>& p) const {
    switch (model) {
      case Model::mb: return mb_state.intensity();
      case Model::dirac: return bare_intensity(spinor, p);
      case Model::schrodinger: return sum_mode.intensity();
    }
    return {};
  }

  ObservableRecord<double> observe(const Grid<double>& g, const DerivedParams<double>& p,
                                   const PotentialProfile<double>& pot) const {
    switch (model) {
      case Model::mb: return measure(mb_state, g, &pot);
      case Model::dirac: return measure(spinor, g, p, &pot);
      case Model::schrodinger: return measure(sum_mode, g, &pot);
    }
    return {};
  }

  void snapshot(const Grid<double>& g, const DerivedParams<double>& p, const Scenario& s,
                const std::string& hash) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04d.csv", snapshot_count++);
    const auto file = dir / "snapshots" / name;
    switch (model) {
      case Model::mb: write_snapshot_mb(file, g, mb_state, s.snapshot_stride); break;
      case Model::dirac:
        write_snapshot_spinor(file, g, transform_basis(spinor, p, Direction::to_bare),
                              s.snapshot_stride);
        break;
      case Model::schrodinger: write_snapshot_sum_mode(file, g, sum_mode, s.snapshot_stride); break;
    }
    ojson meta;
    meta["file"] = name;
    meta["t"] = time();
    meta["params_hash"] = hash;
    meta["scenario"] = to_string(s.id);
    meta["model"] = to_string(model);
    write_ndjson_line(snapshot_index, meta);
  }
};

std::string pair_key(Model a, Model b) { return to_string(a) + "_vs_" + to_string(b); }

ojson derived_block(const DerivedParams<double>& p) {
  ojson j;
  j["c_star"] = p.c_star;
  j["rest_energy"] = p.rest_energy;
  j["lambda_c"] = p.lambda_c;
  j["beta"] = p.beta;
  j["all"] = to_json(p);
  return j;
}

ojson model_summary(const Scenario& s, const Track& tr, const std::string& hash,
                    const std::filesystem::path& dir) {
  const DerivedParams<double>& p = s.params;
  const auto& series = tr.series;
  const auto& last = series.back();
  ojson j;
  j["scenario"] = to_string(s.id);
  j["model"] = to_string(tr.model);
  j["params_hash"] = hash;
  j["derived"] = derived_block(p);
  const ModelSettings& ms = s.settings.at(tr.model);
  j["dt"] = ms.dt;
  j["steps"] = tr.steps_per_sample * s.samples;
  j["t_final"] = s.t_final;
  j["final"] = {{"t", last.t}, {"norm", last.norm}, {"com", last.com}, {"width", last.width}};

  if (s.id == ScenarioId::free_expansion || s.id == ScenarioId::cross_validate) {
    const auto fit = lobe_speed(series, s.fit_begin, s.fit_end, LobeEstimator::peak);
    const auto cfit = lobe_speed(series, s.fit_begin, s.fit_end, LobeEstimator::centroid);
    bool monotone = true;
    for (std::size_t i = 1; i < series.size(); ++i)
      monotone = monotone && series[i].width >= series[i - 1].width;
    j["lobe_speed"] = {{"speed", fit.speed},
                       {"speed_over_c_star", fit.speed / p.c_star},
                       {"low_confidence", fit.low_confidence},
                       {"mean_contrast", fit.mean_contrast},
                       {"samples", fit.samples},
                       {"window", {s.fit_begin, s.fit_end}}};
    j["com_right_speed"] = {{"speed", cfit.speed}, {"speed_over_c_star", cfit.speed / p.c_star}};
    j["com_right_slope_over_c_star"] = com_right_slope(series) / p.c_star;
    j["width_monotone"] = monotone;
  }
  if (s.id == ScenarioId::square_well) {
    double at_transient = std::nan("");
    for (const auto& r : series.records)
      if (r.t >= s.transient) {
        at_transient = r.norm_in_well;
        break;
      }
    const auto rate = in_well_decay_rate(series, s.transient);
    const auto w = well_bound_energy(s.u0, s.a);
    j["in_well"] = {{"transient", s.transient},
                    {"norm_at_transient", at_transient},
                    {"norm_final", last.norm_in_well},
                    {"ratio", last.norm_in_well / at_transient},
                    {"decay_rate", rate.rate},
                    {"fit_samples", rate.samples}};
    j["well"] = {{"u0_mc2", s.u0},
                 {"a_lambda_c", s.a},
                 {"well_argument", w.well_argument},
                 {"energy_mc2", w.energy},
                 {"decay_length_lambda_c", std::isfinite(w.decay_length) ? ojson(w.decay_length)
                                                                         : ojson(nullptr)},
                 {"bound", w.bound}};
  }
  if (s.id == ScenarioId::zitterbewegung && series.size() >= 64) {
    const auto spec = com_spectrum(series, Window::hann, SpectrumSignal::com);
    const double expected = p.zitter_freq;
    j["spectrum"] = {{"peak_omega", spec.peak_omega},
                     {"expected_omega", expected},
                     {"relative_error", std::abs(spec.peak_omega - expected) / expected},
                     {"bin_width", spec.bin_width},
                     {"has_peak", spec.has_peak}};
    if (!dir.empty()) write_spectrum(dir / "spectrum.csv", spec);
    const double sigma_k = 1 / s.width;
    double worst = 0;
    for (const auto& r : series.records) {
      if (r.t <= 5 / std::abs(p.rest_energy)) continue;
      const double ref = zitter_com_normalized(r.t, sigma_k, p);
      worst = std::max(worst, std::abs(r.com - ref) / std::abs(ref));
    }
    j["com_vs_asymptotic"] = {{"max_relative_deviation", worst},
                              {"limit", zitter_com_limit(sigma_k, p)}};
  }
  return j;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
  const DerivedParams<double>& p = s.params;
  const Grid<double> g(s.n_points, s.length);
  PotentialProfile<double> pot = free_potential(g);
  if (s.potential_kind == PotentialKind::square_well) {
    pot = square_well(g, s.u0, s.a, p, s.smooth_cells);
    if (s.has(Model::mb)) assign_detuning(pot, s.medium, p, s.mapping);
  }
  const auto init = make_gaussian_stationary(g, s.medium, p, s.width, s.center, s.phase);
  const std::string hash = s.params_hash();
  const double interval = s.sample_interval();
  const bool write = !out_dir.empty();
  const std::filesystem::path root = write ? out_dir / to_string(s.id) : std::filesystem::path{};

  std::vector<Track> tracks;
  tracks.reserve(s.models.size());
  for (Model m : s.models) {
    Track tr;
    tr.model = m;
    const ModelSettings& ms = s.settings.at(m);
    tr.steps_per_sample = std::llround(interval / ms.dt);
    switch (m) {
      case Model::mb:
        tr.mb = std::make_unique<MBSolver<double>>(
            g, s.medium, pot, MBStepperConfig<double>{ms.dt, tr.steps_per_sample, ms.adiabatic});
        tr.mb_state = init.mb;
        break;
      case Model::dirac:
        tr.dirac = std::make_unique<DiracSolver<double>>(
            g, p, pot, DiracStepperConfig<double>{ms.dt, tr.steps_per_sample, ms.damping});
        tr.spinor = init.spinor;
        break;
      case Model::schrodinger:
        tr.schrodinger = std::make_unique<SchrodingerSolver<double>>(
            g, p, pot, SchrodingerConfig<double>{ms.dt, ms.damping, tr.steps_per_sample});
        tr.sum_mode = init.sum_mode;
        break;
    }
    if (write) {
      tr.dir = root / to_string(m);
      std::filesystem::create_directories(tr.dir / "snapshots");
      tr.snapshot_index.open(tr.dir / "snapshots" / "index.ndjson", std::ios::binary);
    }
    tracks.push_back(std::move(tr));
  }

  ScenarioResult result;
  result.scenario = s;
  const int snap_every = s.snapshots > 0 ? s.samples / s.snapshots : 0;

  auto record = [&](int sample) {
    for (auto& tr : tracks) {
      tr.series.push_back(tr.observe(g, p, pot));
      tr.series.records.back().t = interval * sample;
      if (write && snap_every > 0 && sample % snap_every == 0) tr.snapshot(g, p, s, hash);
    }
    if (tracks.size() > 1) {
      ComparisonSample c;
      c.t = interval * sample;
      std::vector<RealArray<double>> in;
      for (const auto& tr : tracks) in.push_back(tr.intensity(p));
      for (std::size_t a = 0; a < tracks.size(); ++a)
        for (std::size_t b = a + 1; b < tracks.size(); ++b)
          c.l2[pair_key(tracks[a].model, tracks[b].model)] = normalized_l2_difference(in[b], in[a]);
      result.comparison.push_back(std::move(c));
    }
  };

  record(0);
  for (int k = 1; k <= s.samples; ++k) {
    for (auto& tr : tracks) {
      try {
        tr.advance();
      } catch (const NumericalAbort& e) {
        throw NumericalAbort(to_string(s.id) + "/" + to_string(tr.model) + ": " + e.message(),
                             e.time(), e.max_field());
      }
    }
    record(k);
  }
  for (auto& tr : tracks) {
    try {
      tr.check_finite();
    } catch (const NumericalAbort& e) {
      throw NumericalAbort(to_string(s.id) + "/" + to_string(tr.model) + ": " + e.message(),
                           e.time(), e.max_field());
    }
  }

  ojson top;
  top["scenario"] = to_string(s.id);
  std::vector<std::string> names;
  for (Model m : s.models) names.push_back(to_string(m));
  top["models"] = names;
  top["params_hash"] = hash;
  top["derived"] = derived_block(p);
  top["config"] = s.resolved();
  if (!s.warnings.empty()) top["warnings"] = s.warnings;

  for (auto& tr : tracks) {
    ModelResult mr;
    mr.model = tr.model;
    mr.steps = tr.steps_per_sample * s.samples;
    mr.summary = model_summary(s, tr, hash, tr.dir);
    if (write) {
      write_observables(tr.dir / "observables.ndjson", tr.series);
      write_json(tr.dir / "summary.json", mr.summary);
    }
    top["results"][to_string(tr.model)] = mr.summary;
    mr.series = std::move(tr.series);
    result.models.push_back(std::move(mr));
  }

  if (!result.comparison.empty()) {
    ojson cmp;
    for (const auto& [key, v0] : result.comparison.front().l2) {
      double worst = 0;
      for (const auto& c : result.comparison) worst = std::max(worst, c.l2.at(key));
      cmp[key] = {{"max", worst}, {"final", result.comparison.back().l2.at(key)}};
    }
    top["comparison"] = cmp;
    if (write) {
      std::ofstream os(root / "comparison.ndjson", std::ios::binary);
      for (const auto& c : result.comparison) {
        ojson line;
        line["t"] = c.t;
        for (const auto& [key, v] : c.l2) line[key] = v;
        write_ndjson_line(os, line);
      }
    }
  }
  if (write) write_json(root / "summary.json", top);
  result.summary = std::move(top);
  return result;
}

}  // namespace sls
