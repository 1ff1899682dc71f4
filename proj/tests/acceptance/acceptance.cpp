// Acceptance suite. Usage: acceptance <criterion 1..10>
// Prints one "PASS cNN ..." or "FAIL cNN ..." line and exits nonzero on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "parabolic/commands.hpp"
#include "parabolic/config.hpp"
#include "parabolic/fieldeval.hpp"
#include "parabolic/rates.hpp"
#include "parabolic/spectrum.hpp"
#include "parabolic/trap.hpp"

using namespace parabolic;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [x]");
}

struct Prepared {
  config::RunConfig cfg;
  rates::ModeCatalog catalog;
  rates::TrapModel trap;
  rates::RateOptions opts;
};

Prepared prepare(const std::string& preset, bool calibrate) {
  Prepared p;
  p.cfg = config::load_preset(preset);
  p.catalog = rates::build_catalog(p.cfg.mirror, 1.0, p.cfg.families, p.cfg.n_max, p.cfg.coefficients);
  p.trap = rates::TrapModel::from(p.cfg.trap, p.cfg.ion);
  p.opts.quad = p.cfg.quadrature;
  p.opts.refinement = p.cfg.rate_refinement;
  p.opts.route = p.cfg.route;
  p.opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (calibrate) rates::calibrate(p.catalog, p.cfg.dipole, p.trap, p.opts, p.cfg.calibration);
  return p;
}

ModeParams mode_of(Family f, int m, double kappa) {
  ModeParams p;
  p.family = f;
  p.m = m;
  p.kappa = kappa;
  return p;
}

double max_abs_diff(const CVec3& a, const CVec3& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double max_abs(const CVec3& a) {
  double d = 0.0;
  for (const auto& v : a) d = std::max(d, std::abs(v));
  return d;
}

// 1. reduced field path vs two-dimensional quadrature
Outcome oracle_equivalence() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const QuadratureConfig cfg;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ModeParams mode = mode_of(u(rng) < 0.5 ? Family::EMode : Family::BMode,
                                    static_cast<int>(u(rng) * 7) - 3, -6.0 + 12.0 * u(rng));
    const field::CylPoint pt{8.0 * u(rng), 2.0 * kPi * u(rng), -15.0 + 30.0 * u(rng)};
    const auto a = field::field_at_point(mode, pt, cfg);
    const auto b = field::field_2d_oracle(mode, pt, cfg);
    worst = std::max(worst, max_abs_diff(a.cartesian, b.cartesian) / max_abs(b.cartesian));
  }
  Outcome o;
  note(o, worst <= 1e-6, "20 cases, max relative deviation " + fmt("%.2e", worst));
  return o;
}

// 2. closed-form azimuthal pair integral vs direct quadrature
Outcome azimuthal_identity() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = static_cast<int>(u(rng) * 7) - 3;
    const int np = u(rng) < 0.6 ? n : static_cast<int>(u(rng) * 7) - 3;
    const double eta = u(rng);
    const double t = kPi * u(rng);
    const double tp = kPi * u(rng);
    const double closed = trap::azimuthal_pair_integral(n, np, eta, t, tp);
    const cplx quad = trap::azimuthal_pair_quadrature(n, np, eta, t, tp);
    worst = std::max(worst, std::abs(quad - closed) / std::max(1.0, std::abs(closed)));
  }
  Outcome o;
  note(o, worst <= 1e-9, "50 cases, max deviation " + fmt("%.2e", worst));
  return o;
}

// 3. on-axis intensity maximum near Z = -2 kappa
Outcome localization() {
  Outcome o;
  for (double kappa : {2.0, 5.6, 10.4}) {
    const double target = field::localization_plane(kappa);
    const auto peak = field::on_axis_peak(mode_of(Family::EMode, 0, kappa), target - 20.0, target + 20.0, 0.25,
                                          QuadratureConfig{});
    const double off = peak.z - target;
    note(o, std::abs(off) <= 2.0,
         "kappa " + fmt("%g", kappa) + ": peak " + fmt("%.2f", peak.z) + " vs " + fmt("%.1f", target));
  }
  return o;
}

// 4. stationary-phase estimate at |Z| >= 50
Outcome stationary_phase() {
  struct Case { double kappa, rho, z; };
  const Case cases[] = {{-12.0, 0.0, 50.0}, {-20.0, 0.0, 80.0}, {15.0, 0.0, -60.0}, {-25.0, 0.0, 100.0},
                        {-16.0, 0.0, 64.0}};
  Outcome o;
  double worst = 0.0;
  for (const auto& c : cases) {
    const ModeParams mode = mode_of(Family::EMode, 0, c.kappa);
    const field::CylPoint pt{c.rho, 0.0, c.z};
    const auto sp = field::stationary_phase_field(mode, pt);
    if (!sp.feasible || sp.caustic) {
      note(o, false, "kappa " + fmt("%g", c.kappa) + " not a feasible point");
      continue;
    }
    const auto q = field::field_at_point(mode, pt, QuadratureConfig{});
    const double rel = max_abs_diff(sp.sample.cartesian, q.cartesian) / max_abs(q.cartesian);
    worst = std::max(worst, rel);
  }
  note(o, worst <= 0.10, "5 cases, max relative deviation " + fmt("%.3f", worst));
  return o;
}

const rates::RateEntry* find_entry(const rates::RateResult& r, double kappa, int m, Sigma s) {
  for (const auto& e : r.entries)
    if (std::abs(e.mode.kappa - kappa) < 1e-9 && e.mode.m == m && e.sigma == s) return &e;
  return nullptr;
}

// 5. single-mode dominance, YbII
Outcome ybii_dominant_mode() {
  auto p = prepare("ybII", true);
  const auto r = rates::total_rate(p.catalog, p.cfg.dipole, p.trap.at_z(0.0), p.opts);
  const auto* e = find_entry(r, 0.02, 0, Sigma::Zero);
  Outcome o;
  if (!e) {
    note(o, false, "kappa 0.02 missing from the catalog");
    return o;
  }
  note(o, std::abs(e->t - 0.47) <= 0.05,
       "T(kappa=0.02)/Gamma_0 = " + fmt("%.4f", e->t) + " (target 0.47 +- 0.05), branching " +
           fmt("%.3f", e->contribution / r.total) + ", C = " + fmt("%.6g", *p.catalog.calibration));
  return o;
}

// 6. total enhancement and its decay
Outcome ybii_enhancement() {
  auto p = prepare("ybII", true);
  const auto scan = rates::rate_scan(p.catalog, p.cfg.dipole, p.trap, p.opts, -40.0, 40.0, 1.0);
  Outcome o;
  double at0 = 0.0;
  double min_inner = 1e300;
  double near_far = 0.0;  // mean |Gamma - 1| for 25 <= |Z| <= 32
  double far_far = 0.0;   // mean |Gamma - 1| for 33 <= |Z| <= 40
  int n_near = 0;
  int n_far = 0;
  for (const auto& r : scan) {
    const double z = std::abs(r.z());
    if (r.z() == 0.0) at0 = r.total;
    if (z <= 20.0) min_inner = std::min(min_inner, r.total);
    if (z >= 25.0 && z <= 32.0) near_far += std::abs(r.total - 1.0), ++n_near;
    if (z >= 33.0) far_far += std::abs(r.total - 1.0), ++n_far;
  }
  near_far /= n_near;
  far_far /= n_far;
  note(o, at0 >= 1.60 && at0 <= 1.90, "Gamma(0)/Gamma_0 = " + fmt("%.4f", at0) + " (target [1.60, 1.90])");
  note(o, min_inner > 1.0, "min over |Z|<=20: " + fmt("%.4f", min_inner));
  note(o, far_far <= near_far && far_far < std::abs(at0 - 1.0),
       "mean |Gamma-1| " + fmt("%.4f", near_far) + " (25..32) -> " + fmt("%.4f", far_far) + " (33..40)");
  return o;
}

// 7. YbIII lowest-|kappa| mode
Outcome ybiii_floor() {
  auto p = prepare("ybIII", true);
  const auto r = rates::total_rate(p.catalog, p.cfg.dipole, p.trap.at_z(0.0), p.opts);
  const auto* e = find_entry(r, 0.64, 0, Sigma::Zero);
  const auto* e_neg = find_entry(r, -0.64, 0, Sigma::Zero);
  Outcome o;
  if (!e || !e_neg) {
    note(o, false, "kappa +-0.64 missing from the catalog");
    return o;
  }
  note(o, std::abs(e->t - 0.40) <= 0.05,
       "T(kappa=0.64)/Gamma_0 = " + fmt("%.4f", e->t) + ", T(kappa=-0.64)/Gamma_0 = " + fmt("%.4f", e_neg->t) +
           " (target 0.40 +- 0.05)");
  return o;
}

// 8. number of significant modes away from focus
Outcome mode_count() {
  auto p = prepare("ybII", true);
  Outcome o;
  for (double z : {-10.0, 10.0}) {
    const auto table = rates::mode_table(p.catalog, p.cfg.dipole, p.trap.at_z(z), p.opts);
    const auto n = table.count_significant(0.05);
    note(o, n <= 14, "Z = " + fmt("%g", z) + ": " + std::to_string(n) + " modes >= 5% of the top entry");
  }
  return o;
}

// 9. transverse dipole: B |m|=1 family outweighs B m=0 near focus
Outcome perpendicular_ordering() {
  auto p = prepare("ybII-perp", false);
  Outcome o;
  for (double z : {-2.0, 0.0, 2.0}) {
    const auto r = rates::raw_rate(p.catalog, p.cfg.dipole, p.trap.at_z(z), p.opts);
    double b1 = 0.0;
    double b0 = 0.0;
    std::vector<double> fam;
    for (const auto& [label, v] : rates::family_totals(p.catalog, r)) {
      if (label == "B1") b1 = v;
      if (label == "B0") b0 = v;
      fam.push_back(v);
    }
    const double mismatch = std::abs(rates::exact_sum(fam) - r.total);
    note(o, b1 >= b0, "Z = " + fmt("%g", z) + ": B1/B0 = " + fmt("%.3f", b1 / b0));
    note(o, mismatch <= 1e-15 * r.total, "family sum mismatch " + fmt("%.1e", mismatch));
  }
  return o;
}

// 10. property suite
std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool identical_outputs(std::string& why) {
  const fs::path dir = fs::temp_directory_path() / "parabolic_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  json doc = {
      {"extends", "ybII"},
      {"mirror", {{"kappa", {{"grid", nullptr}, {"list", {-1.22, -0.6, 0.02, 0.64, 1.26, 1.88}}}}}},
      {"calibration", {{"z_min", {{"value", 40}, {"unit", "c/omega"}}},
                       {"z_max", {{"value", 60}, {"unit", "c/omega"}}},
                       {"samples", 3}}},
      {"rate_scan", {{"z_min", -6}, {"z_max", 6}, {"step", 1}, {"unit", "c/omega"}}},
      {"field_map", {{"mode", {{"family", "B"}, {"m", 1}, {"kappa", -0.64}}},
                     {"component", "total"},
                     {"plane", "x-z"},
                     {"transverse", {{"min", -4}, {"max", 4}, {"count", 9}, {"unit", "c/omega"}}},
                     {"z", {{"min", -4}, {"max", 4}, {"count", 9}, {"unit", "c/omega"}}}}},
  };
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << doc.dump(2);
  const char* files[] = {"field_map.csv", "field_map.bin", "rate_scan.csv", "rate_scan_entries.csv"};
  std::ostringstream sink;
  for (const char* threads : {"1", "4"}) {
    const std::string out = (dir / threads).string();
    for (const char* cmd : {"field-map", "rate-scan"}) {
      if (cli::run({cmd, "--config", cfg.string(), "--out", out, "--threads", threads}, sink, sink) != 0) {
        why = std::string(cmd) + " failed";
        return false;
      }
    }
  }
  for (const char* f : files) {
    if (slurp(dir / "1" / f) != slurp(dir / "4" / f)) {
      why = std::string(f) + " differs";
      return false;
    }
  }
  fs::remove_all(dir);
  why = "field-map and rate-scan outputs identical for 1 and 4 threads";
  return true;
}

Outcome property_suite() {
  Outcome o;
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  double transverse = 0.0;
  for (int i = 0; i < 500; ++i) {
    ModeParams mode = mode_of(u(rng) < 0.5 ? Family::EMode : Family::BMode, static_cast<int>(u(rng) * 11) - 5,
                              -10.0 + 20.0 * u(rng));
    for (auto& c : mode.coeffs.values) c = {u(rng) - 0.5, u(rng) - 0.5};
    const double th = kPi * (1e-3 + (1.0 - 2e-3) * u(rng));
    const double ph = 2.0 * kPi * u(rng);
    const CVec3 f = spectrum::mode_spectrum(mode, th, ph);
    const CVec3 k{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    transverse = std::max(transverse, std::abs(spectrum::dot(k, f)) / std::sqrt(spectrum::norm2(f)));
  }
  note(o, transverse <= 1e-12, "transversality " + fmt("%.1e", transverse));

  rates::TrapModel trap;
  trap.eta = {0.19275784045746935, 0.19275784045746935, 0.13343057310904752};
  const rates::RateOptions opts;
  double most_negative = 0.0;
  double factorization = 0.0;
  for (int i = 0; i < 40; ++i) {
    const ModeParams mode = mode_of(u(rng) < 0.5 ? Family::EMode : Family::BMode,
                                    static_cast<int>(u(rng) * 7) - 3, -8.0 + 16.0 * u(rng));
    const double z = -25.0 + 50.0 * u(rng);
    for (Sigma s : kAllSigmas) {
      const auto d = rates::mode_contribution(mode, s, trap.at_z(z), opts);
      most_negative = std::min(most_negative, d.clamped ? -1.0 : d.value);
    }
    if (i < 10) {
      rates::TrapModel point;
      point.center = {0.0, 0.0, z};
      const Sigma s = sigma_from_int(std::clamp(mode.m, -1, 1));
      const double t = rates::mode_contribution(mode, s, point, opts).value;
      const double e2 = std::norm(field::field_at_point(mode, field::CylPoint{0.0, 0.0, z}, opts.quad).component(s));
      factorization = std::max(factorization, std::abs(t - e2) / std::max(e2, 1e-12));
    }
  }
  note(o, most_negative >= 0.0, "T >= 0 over 120 channels");
  note(o, factorization <= 1e-6, "eta->0 factorization " + fmt("%.1e", factorization));

  // axial dipole couples only sigma = 0
  MirrorSpec mirror;
  mirror.focal_length = 2.1e-3;
  mirror.kappa_rule = KappaGrid{0.02, 0.62, -10, 9};
  std::vector<rates::FamilySpec> fams;
  for (int m = 0; m <= 5; ++m) {
    fams.push_back({Family::EMode, m});
    fams.push_back({Family::BMode, m});
  }
  auto cat = rates::build_catalog(mirror, 1.0, fams, 5);
  rates::RateOptions keep = opts;
  keep.keep_zero_weight = true;
  const auto axial = rates::raw_rate(cat, make_dipole({0, 0, 1}), trap.at_z(1.0), keep);
  bool selection = true;
  for (const auto& e : axial.entries)
    if (e.sigma != Sigma::Zero) selection = selection && e.contribution == 0.0 && e.weight == 0.0;
  note(o, selection, "axial dipole: sigma = +-1 channels carry zero weight");

  // winding cutoff convergence with m in [-5, 5]
  const double r = 1.0 / std::sqrt(2.0);
  const auto tilted = make_dipole({r, 0.0, r});
  double worst_cut = 0.0;
  for (double z : {-5.0, 0.0, 5.0}) {
    cat.n_max = 5;
    const double t5 = rates::raw_rate(cat, tilted, trap.at_z(z), opts).total;
    cat.n_max = 3;
    const double t3 = rates::raw_rate(cat, tilted, trap.at_z(z), opts).total;
    worst_cut = std::max(worst_cut, std::abs(t5 - t3) / t5);
  }
  note(o, worst_cut < 0.005, "n_max 3 -> 5 change " + fmt("%.2e", worst_cut));

  std::string why;
  note(o, identical_outputs(why), why);
  return o;
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {"oracle equivalence of the reduced field path", 120, oracle_equivalence},
      {"azimuthal pair integral identity", 30, azimuthal_identity},
      {"localization near Z = -2 kappa", 300, localization},
      {"stationary-phase estimate at |Z| >= 50", 120, stationary_phase},
      {"YbII single-mode dominance at focus", 600, ybii_dominant_mode},
      {"YbII enhancement and decay", 1800, ybii_enhancement},
      {"YbIII lowest-kappa mode at focus", 600, ybiii_floor},
      {"mode-count economy at Z = +-10", 600, mode_count},
      {"perpendicular-dipole family ordering", 1800, perpendicular_ordering},
      {"property suite", 300, property_suite},
  };
  const int n = argc > 1 ? std::atoi(argv[1]) : 0;
  if (n < 1 || n > 10) {
    std::cerr << "usage: acceptance <criterion 1..10>\n";
    return 2;
  }
  const auto& c = criteria[n - 1];
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  note(o, secs <= c.budget_s, "runtime " + fmt("%.1f", secs) + " s (budget " + fmt("%.0f", c.budget_s) + " s)");
  char tag[8];
  std::snprintf(tag, sizeof(tag), "c%02d", n);
  std::cout << (o.pass ? "PASS " : "FAIL ") << tag << ' ' << c.name << ": " << o.detail << std::endl;
  return o.pass ? 0 : 1;
}
