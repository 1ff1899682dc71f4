#include "parabolic/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "parabolic/fieldeval.hpp"
#include "parabolic/io.hpp"
#include "parabolic/rates.hpp"
#include "parabolic/special.hpp"
#include "parabolic/spectrum.hpp"
#include "parabolic/trap.hpp"

namespace parabolic::cli {

using nlohmann::json;
using io::format_double;

namespace {

std::ostream& log_of(const Context& ctx) { return ctx.log ? *ctx.log : std::clog; }

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

rates::RateOptions rate_options(const Context& ctx) {
  rates::RateOptions o;
  o.quad = ctx.config.quadrature;
  o.threads = ctx.threads;
  o.refinement = ctx.config.rate_refinement;
  o.route = ctx.config.route;
  return o;
}

json quadrature_json(const QuadratureConfig& q) {
  return {{"relative_tolerance", q.relative_tolerance}, {"absolute_tolerance", q.absolute_tolerance},
          {"max_subdivisions", q.max_subdivisions},     {"truncation_u", q.truncation_u},
          {"taper_fraction", q.taper_fraction},         {"panel_phase", q.panel_phase}};
}

json base_metadata(const Context& ctx, const std::string& command) {
  const auto& c = ctx.config;
  return {{"command", command},
          {"config_hash", c.hash()},
          {"preset_version", c.preset_version},
          {"quadrature", quadrature_json(c.quadrature)},
          {"units", {{"length", "c/omega"}, {"rate", "Gamma_0"}}},
          {"config", c.source}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  io::write_atomic(path, j.dump(2) + "\n");
}

struct PreparedCatalog {
  rates::ModeCatalog catalog;
  rates::TrapModel trap;
  rates::CalibrationReport calibration;
};

PreparedCatalog prepare_catalog(const Context& ctx) {
  const auto& c = ctx.config;
  PreparedCatalog p;
  p.catalog = rates::build_catalog(c.mirror, 1.0, c.families, c.n_max, c.coefficients);
  p.trap = rates::TrapModel::from(c.trap, c.ion);
  auto& log = log_of(ctx);
  const auto kappas = kappa_values(c.mirror.kappa_rule);
  log << "catalog: " << p.catalog.modes.size() << " modes, families";
  for (const auto& f : c.families) log << ' ' << f.label();
  log << ", " << kappas.size() << " kappa values in [" << kappas.front() << ", " << kappas.back()
      << "], n_max " << c.n_max << ", hash " << io::hex64(p.catalog.hash()) << '\n';
  log << "lamb-dicke: eta_x " << p.trap.eta.x << ", eta_y " << p.trap.eta.y << ", eta_z " << p.trap.eta.z << '\n';
  p.calibration = rates::calibrate(p.catalog, c.dipole, p.trap, rate_options(ctx), c.calibration);
  log << "calibration: C = " << p.calibration.constant << " (mean raw rate " << p.calibration.mean_raw
      << " over Z in [" << c.calibration.z_min << ", " << c.calibration.z_max << "], "
      << c.calibration.samples << " samples)\n";
  return p;
}

json catalog_metadata(const PreparedCatalog& p) {
  json fam = json::array();
  for (const auto& f : p.catalog.families) fam.push_back(f.label());
  return {{"calibration_constant", p.calibration.constant},
          {"calibration_mean_raw", p.calibration.mean_raw},
          {"catalog_hash", io::hex64(p.catalog.hash())},
          {"catalog_modes", p.catalog.modes.size()},
          {"families", fam},
          {"n_max", p.catalog.n_max},
          {"lamb_dicke", {{"x", p.trap.eta.x}, {"y", p.trap.eta.y}, {"z", p.trap.eta.z}}}};
}

void log_rate_residuals(const Context& ctx, const std::vector<rates::RateResult>& results) {
  double trunc = 0.0;
  std::size_t clamped = 0;
  for (const auto& r : results) {
    trunc = std::max(trunc, r.max_truncation);
    clamped += r.clamped;
  }
  log_of(ctx) << "residuals: max series truncation " << trunc << ", clamped contributions " << clamped << '\n';
}

std::string entries_csv(const std::string& hash, const std::vector<rates::RateResult>& results) {
  std::ostringstream os;
  os << "# config_hash: " << hash << '\n';
  os << "z,family,m,kappa,sigma,winding,weight,t_over_gamma0,contribution\n";
  for (const auto& r : results) {
    for (const auto& e : r.entries) {
      os << format_double(r.z()) << ',' << e.family << ',' << e.mode.m << ',' << format_double(e.mode.kappa)
         << ',' << value(e.sigma) << ',' << e.winding << ',' << format_double(e.weight) << ','
         << format_double(e.t) << ',' << format_double(e.contribution) << '\n';
    }
  }
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

int field_map(const Context& ctx) {
  const auto& c = ctx.config;
  if (!c.field_map) throw UsageError("configuration has no 'field_map' section");
  const auto& p = *c.field_map;
  auto& log = log_of(ctx);
  log << "field-map: " << to_string(p.mode.family) << "-mode m=" << p.mode.m << " kappa=" << p.mode.kappa
      << ", " << p.grid.size() << " points\n";
  const auto map = field::intensity_map(p.mode, p.component, p.grid, c.quadrature, ctx.threads);

  double residual = 0.0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < map.samples.size(); ++i) {
    if (!map.valid[i]) continue;
    residual = std::max(residual, map.samples[i].residual);
    if (map.intensity[i] > map.intensity[peak] || !map.valid[peak]) peak = i;
  }
  log << "residuals: max quadrature error estimate " << residual << ", failed points " << map.failures << '\n';

  io::write_atomic(ctx.out_dir / "field_map.csv", io::field_map_csv(map, c.hash()));
  const bool rho = p.grid.kind == field::PlaneGrid::Kind::RhoZ;
  json desc = {{"shape", {p.grid.transverse.count, p.grid.z.count}},
               {"order", "row-major, z fastest"},
               {"quantity", "relative intensity of component " + field::to_string(p.component)},
               {"axes",
                {{{"name", rho ? "rho" : "x"}, {"min", p.grid.transverse.min}, {"max", p.grid.transverse.max}, {"unit", "c/omega"}},
                 {{"name", "z"}, {"min", p.grid.z.min}, {"max", p.grid.z.max}, {"unit", "c/omega"}}}},
               {"config_hash", c.hash()}};
  io::write_binary_grid(ctx.out_dir / "field_map.bin", map.relative, desc);

  json meta = base_metadata(ctx, "field-map");
  meta["component"] = field::to_string(p.component);
  meta["max_intensity"] = map.max;
  meta["failures"] = map.failures;
  meta["max_residual"] = residual;
  if (map.valid[peak]) {
    const auto& pos = map.samples[peak].position;
    meta["peak"] = {{"transverse", rho ? pos.rho : (pos.phi != 0.0 ? -pos.rho : pos.rho)}, {"z", pos.z}};
  }
  write_json(ctx.out_dir / "field_map.json", meta);
  return map.failures == 0 ? kSuccess : kFailure;
}

int rate_scan(const Context& ctx) {
  const auto& c = ctx.config;
  if (!c.rate_scan) throw UsageError("configuration has no 'rate_scan' section");
  const auto prepared = prepare_catalog(ctx);
  const auto& r = *c.rate_scan;
  const auto results = rates::rate_scan(prepared.catalog, c.dipole, prepared.trap, rate_options(ctx),
                                        r.z_min, r.z_max, r.step);
  log_rate_residuals(ctx, results);

  std::ostringstream os;
  os << "# config_hash: " << c.hash() << '\n' << "z,total\n";
  std::size_t peak = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    os << format_double(results[i].z()) << ',' << format_double(results[i].total) << '\n';
    if (results[i].total > results[peak].total) peak = i;
  }
  io::write_atomic(ctx.out_dir / "rate_scan.csv", os.str());
  io::write_atomic(ctx.out_dir / "rate_scan_entries.csv", entries_csv(c.hash(), results));

  json meta = base_metadata(ctx, "rate-scan");
  meta.update(catalog_metadata(prepared));
  meta["points"] = results.size();
  meta["peak"] = {{"z", results[peak].z()}, {"total", results[peak].total}};
  meta["approaches_unity_outer_30pct"] = rates::approaches_unity(results);
  write_json(ctx.out_dir / "rate_scan.json", meta);
  log_of(ctx) << "rate-scan: peak Gamma/Gamma_0 = " << results[peak].total << " at Z = " << results[peak].z() << '\n';
  return kSuccess;
}

int mode_table(const Context& ctx) {
  const auto& c = ctx.config;
  const auto prepared = prepare_catalog(ctx);
  std::vector<double> zs = c.mode_table_z;
  if (zs.empty()) zs.push_back(c.trap.center[2]);

  std::ostringstream os;
  os << "# config_hash: " << c.hash() << '\n' << "z,kappa,family,m,t_over_gamma0,branching\n";
  json per_z = json::array();
  std::vector<rates::RateResult> results;
  for (double z : zs) {
    results.push_back(rates::total_rate(prepared.catalog, c.dipole, prepared.trap.at_z(z), rate_options(ctx)));
    const auto table = rates::mode_table(results.back());
    for (const auto& row : table.rows) {
      os << format_double(z) << ',' << format_double(row.kappa) << ',' << row.family << ',' << row.m << ','
         << format_double(row.contribution) << ',' << format_double(row.branching) << '\n';
    }
    json entry = {{"z", z}, {"total", table.total}, {"significant_5pct", table.count_significant(0.05)}};
    if (const auto* top = table.top()) {
      entry["top"] = {{"kappa", top->kappa}, {"family", top->family}, {"m", top->m},
                      {"t_over_gamma0", top->contribution}, {"branching", top->branching}};
    }
    per_z.push_back(entry);
  }
  log_rate_residuals(ctx, results);
  io::write_atomic(ctx.out_dir / "mode_table.csv", os.str());
  json meta = base_metadata(ctx, "mode-table");
  meta.update(catalog_metadata(prepared));
  meta["tables"] = per_z;
  write_json(ctx.out_dir / "mode_table.json", meta);
  return kSuccess;
}

int perp_decomposition(const Context& ctx) {
  const auto& c = ctx.config;
  if (!c.perp_decomposition) throw UsageError("configuration has no 'perp_decomposition' section");
  const auto prepared = prepare_catalog(ctx);
  const auto& r = *c.perp_decomposition;
  const auto results = rates::rate_scan(prepared.catalog, c.dipole, prepared.trap, rate_options(ctx),
                                        r.z_min, r.z_max, r.step);
  log_rate_residuals(ctx, results);

  std::ostringstream os;
  os << "# config_hash: " << c.hash() << '\n' << "z";
  for (const auto& f : prepared.catalog.families) os << ',' << f.label();
  os << ",total\n";
  double mismatch = 0.0;
  for (const auto& res : results) {
    const auto fams = rates::family_totals(prepared.catalog, res);
    os << format_double(res.z());
    std::vector<double> parts;
    for (const auto& [label, v] : fams) {
      os << ',' << format_double(v);
      parts.push_back(v);
    }
    os << ',' << format_double(res.total) << '\n';
    mismatch = std::max(mismatch, std::abs(rates::exact_sum(parts) - res.total));
  }
  io::write_atomic(ctx.out_dir / "perp_decomposition.csv", os.str());
  io::write_atomic(ctx.out_dir / "perp_decomposition_entries.csv", entries_csv(c.hash(), results));
  json meta = base_metadata(ctx, "perp-decomposition");
  meta.update(catalog_metadata(prepared));
  meta["max_family_sum_mismatch"] = mismatch;
  write_json(ctx.out_dir / "perp_decomposition.json", meta);
  return kSuccess;
}

int isosurface(const Context& ctx) {
  const auto& c = ctx.config;
  if (!c.isosurface) throw UsageError("configuration has no 'isosurface' section");
  const auto& p = *c.isosurface;
  log_of(ctx) << "isosurface: " << p.grid.size() << " points, level " << p.level << '\n';
  const auto iso = field::isointensity_grid(p.mode, p.level, p.grid, c.quadrature, ctx.threads);
  std::vector<double> rel(iso.intensity.size());
  for (std::size_t i = 0; i < rel.size(); ++i)
    rel[i] = iso.valid[i] ? (iso.max > 0.0 ? iso.intensity[i] / iso.max : 0.0) : std::nan("");
  log_of(ctx) << "residuals: failed points " << iso.failures << '\n';
  auto axis = [](const char* name, const field::Axis& a) {
    return json{{"name", name}, {"min", a.min}, {"max", a.max}, {"count", a.count}, {"unit", "c/omega"}};
  };
  json desc = {{"shape", {p.grid.x.count, p.grid.y.count, p.grid.z.count}},
               {"order", "row-major, x slowest, z fastest"},
               {"quantity", "|E|^2 / max |E|^2 (NaN where quadrature failed)"},
               {"axes", {axis("x", p.grid.x), axis("y", p.grid.y), axis("z", p.grid.z)}},
               {"level", p.level},
               {"max_intensity", iso.max},
               {"threshold_intensity", iso.threshold},
               {"failures", iso.failures},
               {"config_hash", c.hash()}};
  io::write_binary_grid(ctx.out_dir / "isosurface.bin", rel, desc);
  json meta = base_metadata(ctx, "isosurface");
  meta["level"] = p.level;
  meta["threshold_intensity"] = iso.threshold;
  meta["failures"] = iso.failures;
  write_json(ctx.out_dir / "isosurface.json", meta);
  return iso.failures == 0 ? kSuccess : kFailure;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

namespace {

struct Check {
  std::string name;
  double threshold = 0.0;
  double residual = 0.0;
  bool passed = false;
  std::string detail;
};

double relative_diff(const CVec3& a, const CVec3& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

ModeParams random_mode(std::mt19937_64& rng, double kappa_range, int m_range) {
  std::uniform_real_distribution<double> kappa(-kappa_range, kappa_range);
  std::uniform_int_distribution<int> m(-m_range, m_range);
  std::bernoulli_distribution e(0.5);
  ModeParams mode;
  mode.family = e(rng) ? Family::EMode : Family::BMode;
  mode.m = m(rng);
  mode.kappa = kappa(rng);
  return mode;
}

}  // namespace

int validate(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& q = c.quadrature;
  const int cases = c.validate.cases;
  std::mt19937_64 rng(c.validate.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Check> checks;
  const auto eta = trap::LambDicke::from(c.trap, c.ion);

  auto run = [&](const std::string& name, double threshold, const std::function<double()>& body) {
    Check ch;
    ch.name = name;
    ch.threshold = threshold;
    try {
      ch.residual = body();
      ch.passed = ch.residual <= threshold;
    } catch (const std::exception& e) {
      ch.residual = std::numeric_limits<double>::infinity();
      ch.detail = e.what();
    }
    checks.push_back(ch);
  };

  run("field_oracle_equivalence", 1e-6, [&] {
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      const auto mode = random_mode(rng, 3.0, 2);
      const field::CylPoint pos{4.0 * unit(rng), 2.0 * kPi * unit(rng), -8.0 + 16.0 * unit(rng)};
      const auto a = field::field_at_point(mode, pos, q);
      const auto b = field::field_2d_oracle(mode, pos, q);
      worst = std::max(worst, relative_diff(a.cartesian, b.cartesian));
    }
    return worst;
  });

  run("azimuthal_identity", 1e-9, [&] {
    double worst = 0.0;
    std::uniform_int_distribution<int> n(0, 3);
    for (int i = 0; i < 2 * cases; ++i) {
      const int a = n(rng);
      const int b = (i % 2 == 0) ? a : n(rng);
      const double e = unit(rng);
      const double t1 = kPi * (0.01 + 0.98 * unit(rng));
      const double t2 = kPi * (0.01 + 0.98 * unit(rng));
      const double closed = trap::azimuthal_pair_integral(a, b, e, t1, t2);
      const cplx quad = trap::azimuthal_pair_quadrature(a, b, e, t1, t2);
      worst = std::max(worst, std::abs(quad - closed) / (4.0 * kPi * kPi));
    }
    return worst;
  });

  run("transversality", 1e-12, [&] {
    double worst = 0.0;
    for (int i = 0; i < 4 * cases; ++i) {
      const auto mode = random_mode(rng, 10.0, 3);
      const double theta = kPi * (0.01 + 0.98 * unit(rng));
      const double phi = 2.0 * kPi * unit(rng);
      const CVec3 f = spectrum::mode_spectrum(mode, theta, phi);
      const CVec3 k{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
      worst = std::max(worst, std::abs(spectrum::dot(k, f)) / std::sqrt(spectrum::norm2(f)));
    }
    return worst;
  });

  run("point_atom_factorization", 1e-6, [&] {
    double worst = 0.0;
    rates::RateOptions opts;
    opts.quad = q;
    for (int i = 0; i < cases; ++i) {
      const auto mode = random_mode(rng, 3.0, 1);
      const Sigma s = sigma_from_int(mode.m);
      const double z = -10.0 + 20.0 * unit(rng);
      const rates::TrapModel point{{0.0, 0.0, z}, {}};
      const double t = rates::mode_contribution(mode, s, point, opts).value;
      const double e2 = std::norm(field::field_at_point(mode, {0.0, 0.0, z}, q).component(s));
      worst = std::max(worst, std::abs(t - e2) / std::max(e2, 1e-300));
    }
    return worst;
  });

  run("series_tensor_agreement", 1e-12, [&] {
    double worst = 0.0;
    rates::RateOptions series;
    series.quad = q;
    auto tensor = series;
    tensor.route = rates::Route::Tensor;
    for (int i = 0; i < cases; ++i) {
      const auto mode = random_mode(rng, 2.0, 2);
      const Sigma s = sigma_from_int(static_cast<int>(std::floor(3.0 * unit(rng))) - 1);
      const rates::TrapModel t{{0.0, 0.0, -5.0 + 10.0 * unit(rng)}, eta};
      const double a = rates::mode_contribution(mode, s, t, series).value;
      const double b = rates::mode_contribution(mode, s, t, tensor).value;
      if (a < 0.0 || b < 0.0) return std::numeric_limits<double>::infinity();
      const double scale = std::max(a, b);
      if (scale > 0.0) worst = std::max(worst, std::abs(a - b) / scale);
    }
    return worst;
  });

  run("form_factor_positive_definite", 1e-12, [&] {
    double worst = 0.0;
    const RVec3 center{0.3, -0.2, 5.0};
    for (int trial = 0; trial < cases; ++trial) {
      std::array<RVec3, 6> k{};
      for (auto& v : k) {
        const double ct = -1.0 + 2.0 * unit(rng);
        const double st = std::sqrt(1.0 - ct * ct);
        const double ph = 2.0 * kPi * unit(rng);
        v = {st * std::cos(ph), st * std::sin(ph), ct};
      }
      std::array<cplx, 6> w{};
      for (auto& x : w) x = {unit(rng) - 0.5, unit(rng) - 0.5};
      cplx form{};
      double scale = 0.0;
      for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b) {
          form += std::conj(w[a]) * trap::form_factor(k[a], k[b], 1.0, center, eta) * w[b];
          scale += std::abs(w[a]) * std::abs(w[b]);
        }
      worst = std::max(worst, std::max(0.0, -form.real()) / scale);
    }
    return worst;
  });

  run("bessel_ladder", 0.0, [&] {
    double violations = 0.0;
    for (int i = 1; i <= 50; ++i) {
      const double x = 0.1 * i;
      for (int n = 0; n < 6; ++n)
        if (!(special::bessel_i(n + 1, x) < special::bessel_i(n, x))) violations += 1.0;
    }
    return violations;
  });

  run("stationary_phase", 0.10, [&] {
    double worst = 0.0;
    for (const auto& [kappa, z] : std::vector<std::pair<double, double>>{{-30.0, 80.0}, {25.0, -60.0}}) {
      ModeParams mode;
      mode.kappa = kappa;
      const field::CylPoint pos{0.0, 0.0, z};
      const auto est = field::stationary_phase_field(mode, pos);
      const auto ref = field::field_at_point(mode, pos, q);
      if (!est.feasible) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(std::abs(est.sample.component(Sigma::Zero)) -
                                       std::abs(ref.component(Sigma::Zero))) /
                                  std::abs(ref.component(Sigma::Zero)));
    }
    return worst;
  });

  run("selection_rules_and_resummation", 0.0, [&] {
    MirrorSpec mirror{c.mirror.focal_length, KappaList{{-0.6, 0.02, 0.64}}};
    auto catalog = rates::build_catalog(mirror, 1.0, {rates::FamilySpec{Family::EMode, 0}, rates::FamilySpec{Family::EMode, 1}}, 3);
    catalog.calibration = 1.0;
    rates::RateOptions opts;
    opts.quad = q;
    opts.keep_zero_weight = true;
    const auto res = rates::total_rate(catalog, make_dipole({0.0, 0.0, 1.0}), {{0.0, 0.0, 0.0}, eta}, opts);
    double bad = 0.0;
    std::vector<double> parts;
    for (const auto& e : res.entries) {
      if (e.sigma != Sigma::Zero && (e.weight != 0.0 || e.contribution != 0.0)) bad += 1.0;
      if (e.t < 0.0) bad += 1.0;
      parts.push_back(e.contribution);
    }
    if (rates::exact_sum(parts) != res.total) bad += 1.0;
    return bad;
  });

  json report = json::array();
  bool all = true;
  auto& out = log_of(ctx);
  for (const auto& ch : checks) {
    all = all && ch.passed;
    json j = {{"name", ch.name}, {"passed", ch.passed}, {"threshold", ch.threshold}};
    j["residual"] = std::isfinite(ch.residual) ? json(ch.residual) : json("inf");
    if (!ch.detail.empty()) j["detail"] = ch.detail;
    report.push_back(j);
    out << (ch.passed ? "PASS " : "FAIL ") << ch.name << " residual=" << ch.residual
        << " threshold=" << ch.threshold << (ch.detail.empty() ? "" : " (" + ch.detail + ")") << '\n';
  }
  json meta = base_metadata(ctx, "validate");
  meta["checks"] = report;
  meta["passed"] = all;
  write_json(ctx.out_dir / "validate.json", meta);
  return all ? kSuccess : kFailure;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parabolic-mirror mode fields and trapped-ion emission rates", "parabolic"};
  app.require_subcommand(1);
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  int threads = 1;
  double tolerance = 0.0;

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
  };
  const std::vector<Sub> subs{
      {"field-map", "Intensity map of one mode on a (rho, z) or (x, z) grid", &field_map},
      {"rate-scan", "Calibrated emission rate versus trap position", &rate_scan},
      {"mode-table", "Per-mode contributions at fixed trap positions", &mode_table},
      {"perp-decomposition", "Per-family rate curves for a transverse dipole", &perp_decomposition},
      {"isosurface", "3D intensity grid for isosurface extraction", &isosurface},
      {"validate", "Oracle and invariant self-checks", &validate},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    auto* c = sub->add_option("--config", config_path, "JSON configuration file");
    auto* p = sub->add_option("--preset", preset, "Named preset");
    c->excludes(p);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", tolerance, "Relative quadrature tolerance");
  }

  std::vector<std::string> argv_store{"parabolic"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const auto it = std::find_if(subs.begin(), subs.end(), [&](const Sub& s) { return chosen->get_name() == s.name; });

  Context ctx;
  ctx.out_dir = out_dir;
  ctx.threads = threads;
  ctx.log = &err;
  try {
    if (!config_path.empty()) {
      ctx.config = config::load_file(config_path);
    } else if (!preset.empty()) {
      ctx.config = config::load_preset(preset);
    } else if (chosen->get_name() == "validate") {
      ctx.config = config::load_preset("ybII");
    } else {
      err << "error: --config or --preset is required\n";
      return kUsage;
    }
    if (chosen->count("--tolerance") > 0) {
      nlohmann::json doc = ctx.config.source;
      doc["quadrature"]["relative_tolerance"] = tolerance;
      ctx.config = config::parse(doc);
    }
    err << "config " << ctx.config.hash() << (ctx.config.name.empty() ? "" : " (" + ctx.config.name + ")")
        << ", threads " << threads << '\n';
    return it->fn(ctx);
  } catch (const config::ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const QuadratureError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kFailure;
  } catch (const rates::CalibrationError& e) {
    err << "calibration failure: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace parabolic::cli
