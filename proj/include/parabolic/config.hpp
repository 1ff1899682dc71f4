#pragma once

// JSON run configuration. Every physical quantity is written as
// {"value": ..., "unit": "..."}; see README for the accepted units.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parabolic/core.hpp"
#include "parabolic/fieldeval.hpp"
#include "parabolic/quadrature.hpp"
#include "parabolic/rates.hpp"

namespace parabolic::config {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanRange {
  double z_min = 0.0;
  double z_max = 0.0;
  double step = 1.0;
};

struct FieldMapParams {
  ModeParams mode;
  field::ComponentSelector component = field::ComponentSelector::Z;
  field::PlaneGrid grid;
};

struct IsosurfaceParams {
  ModeParams mode;
  double level = 0.5;
  field::VolumeGrid grid;
};

struct ValidateParams {
  int cases = 5;
  std::uint64_t seed = 20240611;
};

struct RunConfig {
  nlohmann::json source;  // fully resolved document (extends applied)
  std::string name;
  int preset_version = 1;

  IonSpec ion;
  MirrorSpec mirror;
  TrapSpec trap;
  bool frequencies_are_angular = false;
  DipoleSpec dipole;

  std::vector<rates::FamilySpec> families;
  int n_max = 5;
  std::optional<HertzCoefficients> coefficients;
  rates::CalibrationWindow calibration;
  QuadratureConfig quadrature;
  double rate_refinement = 1.0;
  rates::Route route = rates::Route::Series;

  std::optional<FieldMapParams> field_map;
  std::optional<ScanRange> rate_scan;
  std::vector<double> mode_table_z;
  std::optional<ScanRange> perp_decomposition;
  std::optional<IsosurfaceParams> isosurface;
  ValidateParams validate;

  /// Hash of the canonical resolved document, as 16 hex digits.
  std::string hash() const;
};

/// Directory searched for named presets: $PARABOLIC_PRESET_DIR or the
/// source-tree default.
std::filesystem::path preset_dir();
std::vector<std::string> preset_names();

/// Reads a JSON file; a document with a top-level "config" object (a metadata
/// sidecar written by a previous run) is unwrapped.
nlohmann::json read_json(const std::filesystem::path& path);

/// Applies "extends" chains (preset names) as JSON merge patches.
nlohmann::json resolve(nlohmann::json doc);

RunConfig parse(const nlohmann::json& doc);
RunConfig load_file(const std::filesystem::path& path);
RunConfig load_preset(const std::string& name);

// Unit conversion helpers, exposed for tests.
double length_to_reduced(const nlohmann::json& quantity, double omega);  // -> c/omega
double length_to_metres(const nlohmann::json& quantity);                 // rejects c/omega
double frequency_to_angular(const nlohmann::json& quantity, bool frequencies_are_angular);
double mass_to_kg(const nlohmann::json& quantity);

}  // namespace parabolic::config
