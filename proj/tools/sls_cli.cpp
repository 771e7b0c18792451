// sls: stationary-light simulator command line.
//
//   sls run --scenario <id> --config <file.json> [--preset paper] [--models mb,dirac] --out <dir>
//   sls analytic {params|well|zitter} --config <file.json> [--preset paper]
//   sls list-scenarios
//   sls validate --config <file.json> [--scenario <id>] [--preset paper]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical abort.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "sls/analytic.hpp"
#include "sls/io.hpp"
#include "sls/scenario.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalAbort = 3;

using ojson = nlohmann::ordered_json;

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream is(path);
  if (!is) throw sls::ConfigError("config", "cannot open " + path);
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw sls::ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

void apply_thread_cap() {
  const char* env = std::getenv("SLS_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) {
    std::cerr << "warning: ignoring SLS_THREADS=" << env << " (expected a non-negative integer)\n";
    return;
  }
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(int(n));
#endif
}

std::vector<sls::Model> parse_models(const std::string& list) {
  std::vector<sls::Model> out;
  std::stringstream ss(list);
  std::string item;
  std::vector<sls::FieldError> errors;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto m = sls::parse_model(item);
    if (!m) errors.push_back({"--models", "unknown model '" + item + "'"});
    else if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty() && errors.empty()) errors.push_back({"--models", "empty model list"});
  if (!errors.empty()) throw sls::ValidationError(errors);
  return out;
}

sls::ScenarioId scenario_or_throw(const std::string& name) {
  auto id = sls::parse_scenario_id(name);
  if (!id) throw sls::ConfigError("--scenario", "unknown scenario '" + name + "' (see list-scenarios)");
  return *id;
}

void print_errors(const sls::ValidationError& e) {
  std::cerr << "configuration invalid (" << e.errors().size() << " error"
            << (e.errors().size() == 1 ? "" : "s") << "):\n";
  for (const auto& fe : e.errors()) std::cerr << "  " << fe.field << ": " << fe.message << '\n';
}

ojson analytic_params(const nlohmann::json& cfg, bool preset) {
  const auto medium = sls::medium_from_json(cfg, preset);
  ojson j;
  j["medium"] = sls::to_json(medium);
  j["derived"] = sls::to_json(sls::derive_params(medium));
  return j;
}

ojson analytic_well(const nlohmann::json& cfg, bool preset) {
  const auto p = sls::derive_params(sls::medium_from_json(cfg, preset));
  const nlohmann::json pot = cfg.value("potential", nlohmann::json::object());
  const double u0 = pot.value("u0_mc2", 1.875);
  const double a = pot.value("a_lambda_c", 0.1);
  const auto w = sls::well_bound_energy(u0, a);
  ojson j;
  j["u0_mc2"] = u0;
  j["a_lambda_c"] = a;
  j["well_argument"] = w.well_argument;
  j["energy_pair_mc2"] = {w.energy, -w.energy};
  j["energy_pair"] = {w.energy * std::abs(p.rest_energy), -w.energy * std::abs(p.rest_energy)};
  j["decay_length_lambda_c"] = std::isfinite(w.decay_length) ? ojson(w.decay_length) : ojson(nullptr);
  j["decay_length"] =
      std::isfinite(w.decay_length) ? ojson(w.decay_length * p.lambda_c) : ojson(nullptr);
  j["bound"] = w.bound;
  return j;
}

ojson analytic_zitter(const nlohmann::json& cfg, bool preset, int samples) {
  const auto p = sls::derive_params(sls::medium_from_json(cfg, preset));
  const nlohmann::json init = cfg.value("initial", nlohmann::json::object());
  const double width = init.contains("width_lambda_c")
                           ? init["width_lambda_c"].get<double>() * p.lambda_c
                           : init.value("width_l_abs", 10.0);
  if (!(width > 0)) throw sls::ConfigError("initial.width", "must be positive");
  if (samples < 2) throw sls::ConfigError("--samples", "must be >= 2");
  const double sigma_k = 1 / width;
  const double rest = std::abs(p.rest_energy);
  const double t_final = cfg.value("t_final", 40 / rest);
  ojson j;
  j["sigma_k"] = sigma_k;
  j["omega"] = p.zitter_freq;
  j["limit_normalized"] = sls::zitter_com_limit(sigma_k, p);
  ojson t = ojson::array(), z = ojson::array(), zn = ojson::array();
  for (int i = 1; i <= samples; ++i) {
    const double ti = t_final * i / samples;
    t.push_back(ti);
    z.push_back(sls::zitter_com(ti, sigma_k, p));
    zn.push_back(sls::zitter_com_normalized(ti, sigma_k, p));
  }
  j["t"] = t;
  j["com"] = z;
  j["com_normalized"] = zn;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary-light simulator: Maxwell-Bloch, Dirac and Schroedinger models"};
  app.require_subcommand(1);

  std::string scenario, config, out, models, preset;
  auto* run = app.add_subcommand("run", "run a scenario and write its output tree");
  run->add_option("--scenario", scenario, "scenario id")->required();
  run->add_option("--config", config, "JSON configuration file");
  run->add_option("--preset", preset, "parameter preset")->check(CLI::IsMember({"paper"}));
  run->add_option("--models", models, "comma-separated subset of mb,dirac,schrodinger");
  run->add_option("--out", out, "output directory")->required();

  std::string a_config, a_preset;
  int a_samples = 400;
  auto* analytic = app.add_subcommand("analytic", "closed-form predictions as JSON");
  analytic->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", a_config, "JSON configuration file");
    sub->add_option("--preset", a_preset, "parameter preset")->check(CLI::IsMember({"paper"}));
  };
  auto* a_params = analytic->add_subcommand("params", "derived parameters");
  auto* a_well = analytic->add_subcommand("well", "square-well bound state");
  auto* a_zitter = analytic->add_subcommand("zitter", "center-of-mass trajectory");
  add_common(a_params);
  add_common(a_well);
  add_common(a_zitter);
  a_zitter->add_option("--samples", a_samples, "number of samples");

  auto* list = app.add_subcommand("list-scenarios", "list scenario ids");

  std::string v_config, v_scenario = "free_expansion", v_preset;
  auto* validate = app.add_subcommand("validate", "check a configuration and print it resolved");
  validate->add_option("--config", v_config, "JSON configuration file");
  validate->add_option("--scenario", v_scenario, "scenario id");
  validate->add_option("--preset", v_preset, "parameter preset")->check(CLI::IsMember({"paper"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    apply_thread_cap();
    if (*list) {
      for (auto id : sls::all_scenarios())
        std::cout << sls::to_string(id) << "\t" << sls::describe(id) << '\n';
      return 0;
    }
    if (*validate) {
      sls::RunOptions opts;
      opts.preset_paper = v_preset == "paper";
      if (v_config.empty() && !opts.preset_paper)
        throw sls::ConfigError("--config", "required unless --preset is given");
      const auto s = sls::validate_config(load_config(v_config), scenario_or_throw(v_scenario), opts);
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      ojson j = s.resolved();
      j["params_hash"] = s.params_hash();
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (*analytic) {
      const bool pre = a_preset == "paper";
      if (a_config.empty() && !pre) throw sls::ConfigError("--config", "required unless --preset is given");
      const auto cfg = load_config(a_config);
      ojson j;
      if (*a_params) j = analytic_params(cfg, pre);
      else if (*a_well) j = analytic_well(cfg, pre);
      else j = analytic_zitter(cfg, pre, a_samples);
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (*run) {
      sls::RunOptions opts;
      opts.preset_paper = preset == "paper";
      if (config.empty() && !opts.preset_paper)
        throw sls::ConfigError("--config", "required unless --preset is given");
      if (!models.empty()) opts.models = parse_models(models);
      const auto s = sls::validate_config(load_config(config), scenario_or_throw(scenario), opts);
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
      const auto result = sls::run_scenario(s, out);
      std::cout << result.summary.dump(2) << '\n';
      return 0;
    }
  } catch (const sls::ValidationError& e) {
    print_errors(e);
    return kConfigError;
  } catch (const sls::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sls::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
