#include "parabolic/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "parabolic/io.hpp"

namespace parabolic::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(where + ": missing '" + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + ": value must be finite");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + ": expected an integer");
  return v.get<int>();
}

std::string unit_of(const json& q, const std::string& where) {
  const auto& u = require(q, "unit", where);
  if (!u.is_string()) fail(where + ": unit must be a string");
  return u.get<std::string>();
}

double length_scale_m(const std::string& unit) {
  if (unit == "m") return 1.0;
  if (unit == "mm") return 1e-3;
  if (unit == "um") return 1e-6;
  if (unit == "nm") return 1e-9;
  return 0.0;
}

json default_document() {
  return json::parse(R"({
    "preset_version": 1,
    "dipole": {"orientation": [0, 0, 1]},
    "catalog": {"families": ["E0"], "n_max": 5},
    "calibration": {
      "z_min": {"value": 120, "unit": "c/omega"},
      "z_max": {"value": 160, "unit": "c/omega"},
      "samples": 21
    },
    "quadrature": {
      "relative_tolerance": 1e-10,
      "absolute_tolerance": 1e-14,
      "max_subdivisions": 4000,
      "truncation_u": 12,
      "taper_fraction": 0.2,
      "panel_phase": 8
    },
    "rates": {"refinement": 1.0, "route": "series"}
  })");
}

}  // namespace

double length_to_metres(const json& q) {
  const std::string where = "length";
  const double v = number(require(q, "value", where), where);
  const std::string unit = unit_of(q, where);
  const double s = length_scale_m(unit);
  if (s == 0.0) fail("length unit '" + unit + "' must be one of m, mm, um, nm");
  return v * s;
}

double length_to_reduced(const json& q, double omega) {
  const std::string where = "length";
  const double v = number(require(q, "value", where), where);
  const std::string unit = unit_of(q, where);
  if (unit == "c/omega") return v;
  const double s = length_scale_m(unit);
  if (s == 0.0) fail("length unit '" + unit + "' must be one of m, mm, um, nm, c/omega");
  return to_dimensionless(v * s, omega);
}

double frequency_to_angular(const json& q, bool frequencies_are_angular) {
  const std::string where = "frequency";
  const double v = number(require(q, "value", where), where);
  const std::string unit = unit_of(q, where);
  if (unit == "rad/s") return v;
  double s = 0.0;
  if (unit == "Hz") s = 1.0;
  if (unit == "kHz") s = 1e3;
  if (unit == "MHz") s = 1e6;
  if (s == 0.0) fail("frequency unit '" + unit + "' must be one of Hz, kHz, MHz, rad/s");
  return frequencies_are_angular ? v * s : 2.0 * kPi * v * s;
}

double mass_to_kg(const json& q) {
  const std::string where = "mass";
  const double v = number(require(q, "value", where), where);
  const std::string unit = unit_of(q, where);
  if (unit == "kg") return v;
  if (unit == "u") return v * constants::atomic_mass;
  fail("mass unit '" + unit + "' must be kg or u");
}

std::string RunConfig::hash() const { return io::hex64(io::fnv1a(source.dump())); }

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("PARABOLIC_PRESET_DIR"); env && *env) return env;
  return PARABOLIC_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_dir(), ec)) {
    if (entry.path().extension() == ".json") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read configuration file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.at("config").is_object()) return doc.at("config");
  return doc;
}

json resolve(json doc) {
  if (!doc.is_object()) fail("configuration must be a JSON object");
  for (int depth = 0; doc.contains("extends"); ++depth) {
    if (depth > 16) fail("'extends' chain is too deep");
    const auto& ext = doc.at("extends");
    if (!ext.is_string()) fail("'extends' must be a preset name");
    const std::string name = ext.get<std::string>();
    const auto path = preset_dir() / (name + ".json");
    if (!std::filesystem::exists(path)) fail("unknown preset '" + name + "'");
    json base = read_json(path);
    doc.erase("extends");
    base.merge_patch(doc);
    doc = std::move(base);
  }
  json full = default_document();
  full.merge_patch(doc);
  return full;
}

namespace {

ModeParams parse_mode(const json& j, const std::string& where) {
  ModeParams mode;
  mode.family = family_from_string(require(j, "family", where).get<std::string>());
  mode.m = integer(require(j, "m", where), where + ".m");
  mode.kappa = number(require(j, "kappa", where), where + ".kappa");
  if (j.contains("omega")) mode.omega = number(j.at("omega"), where + ".omega");
  if (j.contains("coefficients")) {
    const auto& c = j.at("coefficients");
    if (!c.is_array() || c.size() != 3) fail(where + ".coefficients: expected [plus, minus, zero]");
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& v = c[i];
      if (!v.is_array() || v.size() != 2) fail(where + ".coefficients: each entry is [re, im]");
      mode.coeffs.values[i] = {number(v[0], where), number(v[1], where)};
    }
  }
  mode.validate();
  return mode;
}

field::Axis parse_axis(const json& j, double omega, const std::string& where) {
  field::Axis a;
  const std::string unit = unit_of(j, where);
  a.min = length_to_reduced(json{{"value", require(j, "min", where)}, {"unit", unit}}, omega);
  a.max = length_to_reduced(json{{"value", require(j, "max", where)}, {"unit", unit}}, omega);
  a.count = integer(require(j, "count", where), where + ".count");
  a.validate(where.c_str());
  return a;
}

ScanRange parse_scan(const json& j, double omega, const std::string& where) {
  ScanRange r;
  const std::string unit = unit_of(j, where);
  auto len = [&](const char* key) {
    return length_to_reduced(json{{"value", require(j, key, where)}, {"unit", unit}}, omega);
  };
  r.z_min = len("z_min");
  r.z_max = len("z_max");
  r.step = j.contains("step") ? len("step") : 1.0;
  if (r.z_max < r.z_min) fail(where + ": z_max < z_min");
  if (r.z_max > r.z_min && !(r.step > 0.0)) fail(where + ": step must be positive");
  return r;
}

}  // namespace

RunConfig parse(const json& input) {
  RunConfig cfg;
  try {
    cfg.source = resolve(input);
    const json& d = cfg.source;
    if (d.contains("name")) cfg.name = d.at("name").get<std::string>();
    cfg.preset_version = integer(d.at("preset_version"), "preset_version");

    const auto& ion = require(d, "ion", "config");
    cfg.ion.name = ion.value("name", std::string{});
    cfg.ion.mass = mass_to_kg(require(ion, "mass", "ion"));
    cfg.ion.transition_wavelength = length_to_metres(require(ion, "transition_wavelength", "ion"));
    cfg.ion.validate();
    const double omega = cfg.ion.omega();

    const auto& mirror = require(d, "mirror", "config");
    cfg.mirror.focal_length = length_to_metres(require(mirror, "focal_length", "mirror"));
    const auto& kappa = require(mirror, "kappa", "mirror");
    if (kappa.contains("list")) {
      KappaList list;
      for (const auto& v : kappa.at("list")) list.values.push_back(number(v, "mirror.kappa.list"));
      cfg.mirror.kappa_rule = list;
    } else if (kappa.contains("grid")) {
      const auto& g = kappa.at("grid");
      cfg.mirror.kappa_rule = KappaGrid{number(require(g, "anchor", "kappa.grid"), "kappa.grid.anchor"),
                                        number(require(g, "step", "kappa.grid"), "kappa.grid.step"),
                                        integer(require(g, "index_min", "kappa.grid"), "kappa.grid.index_min"),
                                        integer(require(g, "index_max", "kappa.grid"), "kappa.grid.index_max")};
    } else {
      fail("mirror.kappa needs 'list' or 'grid'");
    }
    cfg.mirror.validate();

    const auto& trap = require(d, "trap", "config");
    cfg.frequencies_are_angular = trap.value("frequencies_are_angular", false);
    const auto& sec = require(trap, "secular_frequencies", "trap");
    const auto& sec_values = require(sec, "value", "trap.secular_frequencies");
    if (!sec_values.is_array() || sec_values.size() != 3) fail("trap.secular_frequencies.value: expected 3 entries");
    const std::string sec_unit = unit_of(sec, "trap.secular_frequencies");
    for (std::size_t i = 0; i < 3; ++i)
      cfg.trap.secular_frequencies[i] =
          frequency_to_angular(json{{"value", sec_values[i]}, {"unit", sec_unit}}, cfg.frequencies_are_angular);
    cfg.trap.symmetric = cfg.trap.secular_frequencies[0] == cfg.trap.secular_frequencies[1];
    if (trap.contains("center")) {
      const auto& c = trap.at("center");
      const auto& cv = require(c, "value", "trap.center");
      if (!cv.is_array() || cv.size() != 3) fail("trap.center.value: expected 3 entries");
      const std::string cu = unit_of(c, "trap.center");
      for (std::size_t i = 0; i < 3; ++i)
        cfg.trap.center[i] = length_to_reduced(json{{"value", cv[i]}, {"unit", cu}}, omega);
    }
    cfg.trap.validate();

    const auto& dip = require(d, "dipole", "config");
    const auto& o = require(dip, "orientation", "dipole");
    if (!o.is_array() || o.size() != 3) fail("dipole.orientation: expected 3 entries");
    cfg.dipole = make_dipole({number(o[0], "dipole"), number(o[1], "dipole"), number(o[2], "dipole")});

    const auto& cat = d.at("catalog");
    for (const auto& f : require(cat, "families", "catalog")) cfg.families.push_back(rates::FamilySpec::parse(f.get<std::string>()));
    if (cfg.families.empty()) fail("catalog.families is empty");
    cfg.n_max = integer(require(cat, "n_max", "catalog"), "catalog.n_max");
    if (cat.contains("coefficients")) {
      cfg.coefficients = parse_mode(json{{"family", "E"}, {"m", 0}, {"kappa", 0.0},
                                         {"coefficients", cat.at("coefficients")}},
                                    "catalog")
                             .coeffs;
    }

    const auto& cal = d.at("calibration");
    cfg.calibration.z_min = length_to_reduced(require(cal, "z_min", "calibration"), omega);
    cfg.calibration.z_max = length_to_reduced(require(cal, "z_max", "calibration"), omega);
    cfg.calibration.samples = integer(require(cal, "samples", "calibration"), "calibration.samples");

    const auto& q = d.at("quadrature");
    cfg.quadrature.relative_tolerance = number(q.at("relative_tolerance"), "quadrature.relative_tolerance");
    cfg.quadrature.absolute_tolerance = number(q.at("absolute_tolerance"), "quadrature.absolute_tolerance");
    cfg.quadrature.max_subdivisions = integer(q.at("max_subdivisions"), "quadrature.max_subdivisions");
    cfg.quadrature.truncation_u = number(q.at("truncation_u"), "quadrature.truncation_u");
    cfg.quadrature.taper_fraction = number(q.at("taper_fraction"), "quadrature.taper_fraction");
    cfg.quadrature.panel_phase = number(q.at("panel_phase"), "quadrature.panel_phase");
    cfg.quadrature.validate();

    const auto& r = d.at("rates");
    cfg.rate_refinement = number(r.at("refinement"), "rates.refinement");
    if (!(cfg.rate_refinement > 0.0)) fail("rates.refinement must be positive");
    const std::string route = r.at("route").get<std::string>();
    if (route == "series") cfg.route = rates::Route::Series;
    else if (route == "tensor") cfg.route = rates::Route::Tensor;
    else fail("rates.route must be 'series' or 'tensor'");

    if (d.contains("field_map")) {
      const auto& fm = d.at("field_map");
      FieldMapParams p;
      p.mode = parse_mode(require(fm, "mode", "field_map"), "field_map.mode");
      p.component = field::selector_from_string(fm.value("component", std::string("z")));
      const std::string plane = fm.value("plane", std::string("rho-z"));
      if (plane == "rho-z") p.grid.kind = field::PlaneGrid::Kind::RhoZ;
      else if (plane == "x-z") p.grid.kind = field::PlaneGrid::Kind::XZ;
      else fail("field_map.plane must be 'rho-z' or 'x-z'");
      p.grid.transverse = parse_axis(require(fm, "transverse", "field_map"), omega, "transverse");
      p.grid.z = parse_axis(require(fm, "z", "field_map"), omega, "z");
      p.grid.validate();
      cfg.field_map = p;
    }
    if (d.contains("rate_scan")) cfg.rate_scan = parse_scan(d.at("rate_scan"), omega, "rate_scan");
    if (d.contains("perp_decomposition"))
      cfg.perp_decomposition = parse_scan(d.at("perp_decomposition"), omega, "perp_decomposition");
    if (d.contains("mode_table")) {
      const auto& mt = d.at("mode_table");
      const std::string unit = unit_of(mt, "mode_table");
      for (const auto& z : require(mt, "z", "mode_table"))
        cfg.mode_table_z.push_back(length_to_reduced(json{{"value", z}, {"unit", unit}}, omega));
      if (cfg.mode_table_z.empty()) fail("mode_table.z is empty");
    }
    if (d.contains("isosurface")) {
      const auto& is = d.at("isosurface");
      IsosurfaceParams p;
      p.mode = parse_mode(require(is, "mode", "isosurface"), "isosurface.mode");
      p.level = number(require(is, "level", "isosurface"), "isosurface.level");
      if (!(p.level > 0.0 && p.level <= 1.0)) fail("isosurface.level must lie in (0, 1]");
      p.grid.x = parse_axis(require(is, "x", "isosurface"), omega, "x");
      p.grid.y = parse_axis(require(is, "y", "isosurface"), omega, "y");
      p.grid.z = parse_axis(require(is, "z", "isosurface"), omega, "z");
      cfg.isosurface = p;
    }
    if (d.contains("validate")) {
      const auto& v = d.at("validate");
      cfg.validate.cases = v.value("cases", cfg.validate.cases);
      cfg.validate.seed = v.value("seed", cfg.validate.seed);
      if (cfg.validate.cases < 1) fail("validate.cases must be >= 1");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_file(const std::filesystem::path& path) { return parse(read_json(path)); }

RunConfig load_preset(const std::string& name) { return parse(json{{"extends", name}}); }

}  // namespace parabolic::config
