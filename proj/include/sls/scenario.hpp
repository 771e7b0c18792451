#pragma once

// Scenario description, validation and execution for the command-line runner.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sls/grid.hpp"
#include "sls/observables.hpp"
#include "sls/params.hpp"
#include "sls/potentials.hpp"

namespace sls {

enum class ScenarioId { free_expansion, square_well, zitterbewegung, cross_validate };
enum class Model { mb, dirac, schrodinger };

std::string to_string(ScenarioId id);
std::string to_string(Model m);
std::optional<ScenarioId> parse_scenario_id(const std::string& s);
std::optional<Model> parse_model(const std::string& s);
const std::vector<ScenarioId>& all_scenarios();
std::string describe(ScenarioId id);

struct FieldError {
  std::string field;
  std::string message;
};

/// Every problem found in a configuration, reported together.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

struct ModelSettings {
  double dt{};
  bool damping{false};    // dirac, schrodinger
  bool adiabatic{false};  // mb
};

struct Scenario {
  ScenarioId id{ScenarioId::free_expansion};
  std::vector<Model> models;
  MediumConfig<double> medium;  // internal units
  DerivedParams<double> params;

  Eigen::Index n_points{};
  double length{};

  double width{};  // L_abs
  RelativePhase phase{RelativePhase::zero};
  double center{};

  PotentialKind potential_kind{PotentialKind::none};
  double u0{};
  double a{};
  double smooth_cells{};
  DetuningMapping mapping{DetuningMapping::polariton};

  double t_final{};
  double transient{};  // start of the in-well decay fit
  double fit_begin{}, fit_end{};
  int samples{};    // number of record intervals
  int snapshots{};  // number of snapshot intervals (0 = none)
  int snapshot_stride{1};
  std::map<Model, ModelSettings> settings;

  std::vector<std::string> warnings;

  double sample_interval() const { return t_final / samples; }
  bool has(Model m) const;
  /// Canonical description of every resolved input; hashed for provenance.
  nlohmann::ordered_json resolved() const;
  std::string params_hash() const;
};

struct RunOptions {
  bool preset_paper{false};
  std::optional<std::vector<Model>> models;
};

/// Resolves defaults and checks every constraint; throws ValidationError.
Scenario validate_config(const nlohmann::json& raw, ScenarioId id, const RunOptions& opts = {});

/// Medium part only (either parameter group, or the preset when raw has none).
MediumConfig<double> medium_from_json(const nlohmann::json& raw, bool preset_paper);

struct ModelResult {
  Model model{};
  ObservableSeries<double> series;
  Eigen::Index steps{};
  nlohmann::ordered_json summary;
};

struct ComparisonSample {
  double t{};
  std::map<std::string, double> l2;  // "mb_vs_dirac" -> value
};

struct ScenarioResult {
  Scenario scenario;
  std::vector<ModelResult> models;
  std::vector<ComparisonSample> comparison;
  nlohmann::ordered_json summary;

  const ModelResult* find(Model m) const;
};

/// Runs all models in lockstep on the common sample times. Writes the output
/// tree under out_dir/<scenario>/ when out_dir is non-empty.
ScenarioResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir = {});

}  // namespace sls
