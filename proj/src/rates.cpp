#include "parabolic/rates.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include "parabolic/io.hpp"
#include "parabolic/parallel.hpp"
#include "parabolic/special.hpp"
#include "parabolic/spectrum.hpp"

namespace parabolic::rates {

using spectrum::AngularSpectrum;

// Sigma channels in summation order.
constexpr std::array<Sigma, 3> kSigmaOrder{Sigma::Minus, Sigma::Zero, Sigma::Plus};

std::string FamilySpec::label() const {
  return (family == Family::EMode ? "E" : "B") + std::to_string(m_abs);
}

std::vector<int> FamilySpec::m_values() const {
  if (m_abs == 0) return {0};
  return {-m_abs, m_abs};
}

FamilySpec FamilySpec::parse(const std::string& label) {
  static const std::regex re("^([EB])([0-9]+)$");
  std::smatch match;
  if (!std::regex_match(label, match, re))
    throw DomainError("mode family '" + label + "' is not of the form E<|m|> or B<|m|>");
  return {match[1] == "E" ? Family::EMode : Family::BMode, std::stoi(match[2])};
}

double ModeCatalog::scale() const {
  if (!calibration) throw CalibrationError("mode catalog has not been calibrated");
  return *calibration;
}

std::uint64_t ModeCatalog::hash() const {
  std::ostringstream os;
  os << "n_max=" << n_max << ';';
  for (const auto& e : modes) {
    const auto& m = e.mode;
    os << family_label(e) << ',' << m.m << ',' << io::format_double(m.kappa) << ','
       << io::format_double(m.omega);
    for (const auto& c : m.coeffs.values) os << ',' << io::format_double(c.real()) << ',' << io::format_double(c.imag());
    os << ';';
  }
  return io::fnv1a(os.str());
}

ModeCatalog build_catalog(const MirrorSpec& mirror, double omega, const std::vector<FamilySpec>& families,
                          int n_max, const std::optional<HertzCoefficients>& coeffs) {
  mirror.validate();
  if (families.empty()) throw DomainError("mode catalog needs at least one family");
  if (n_max < 0) throw DomainError("winding cutoff n_max must be >= 0");
  for (std::size_t i = 0; i < families.size(); ++i) {
    if (families[i].m_abs < 0) throw DomainError("family |m| must be >= 0");
    for (std::size_t j = 0; j < i; ++j)
      if (families[i] == families[j]) throw DomainError("duplicate mode family " + families[i].label());
  }
  ModeCatalog cat;
  cat.mirror = mirror;
  cat.families = families;
  cat.n_max = n_max;
  for (double kappa : kappa_values(mirror.kappa_rule)) {
    for (std::size_t f = 0; f < families.size(); ++f) {
      for (int m : families[f].m_values()) {
        ModeParams mode;
        mode.omega = omega;
        mode.m = m;
        mode.kappa = kappa;
        mode.family = families[f].family;
        if (coeffs) mode.coeffs = *coeffs;
        mode.validate();
        cat.modes.push_back({mode, f});
      }
    }
  }
  return cat;
}

ModeCatalog refine_catalog(const ModeCatalog& catalog) {
  const auto* grid = std::get_if<KappaGrid>(&catalog.mirror.kappa_rule);
  if (!grid) throw DomainError("only kappa grids can be refined");
  MirrorSpec mirror = catalog.mirror;
  mirror.kappa_rule = KappaGrid{grid->anchor, 0.5 * grid->step, 2 * grid->index_min, 2 * grid->index_max};
  std::optional<HertzCoefficients> coeffs;
  if (!catalog.modes.empty()) coeffs = catalog.modes.front().mode.coeffs;
  const double omega = catalog.modes.empty() ? 1.0 : catalog.modes.front().mode.omega;
  return build_catalog(mirror, omega, catalog.families, catalog.n_max, coeffs);
}

TrapModel TrapModel::from(const TrapSpec& trap, const IonSpec& ion) {
  return {trap.center, trap::LambDicke::from(trap, ion)};
}

TrapModel TrapModel::at_z(double z) const {
  TrapModel t = *this;
  t.center[2] = z;
  return t;
}

// ---------------------------------------------------------------------------
// Single-mode contributions
// ---------------------------------------------------------------------------

namespace {

cplx unit_phase(double a) { return {std::cos(a), std::sin(a)}; }

trap::LambDicke scaled_eta(const trap::LambDicke& eta, double omega) {
  return {eta.x * omega, eta.y * omega, eta.z * omega};
}

struct Weighted {
  std::vector<cplx> b;
  std::vector<double> c;
  std::vector<double> s;
};

// b_k = w_k sech^2 u_k a(u_k) e^{i w Z c_k} e^{-(eta_x^2 s_k^2 + eta_z^2 c_k^2) / 2}
Weighted weighted_profile(const AngularSpectrum& spec, Sigma sigma, const trap::LambDicke& eta,
                          double z, const RateOptions& opts) {
  const ModeParams& mode = spec.mode();
  const double w = mode.omega;
  const double rate = w * std::abs(z) + 2.0 * std::abs(mode.kappa) + 4.0;
  const auto nodes = spectral_nodes(rate, opts.quad, opts.refinement);
  const double ex2 = eta.x * eta.x;
  const double ez2 = eta.z * eta.z;
  Weighted out;
  out.b.reserve(nodes.size());
  out.c.reserve(nodes.size());
  out.s.reserve(nodes.size());
  for (const auto& node : nodes) {
    const auto& p = node.point;
    const double s = p.sin_theta;
    const double c = p.cos_theta;
    const cplx a = spec.profile(sigma, p);
    const double damp = std::exp(-0.5 * (ex2 * s * s + ez2 * c * c));
    out.b.push_back(node.weight * s * s * damp * a * unit_phase(w * z * c));
    out.c.push_back(c);
    out.s.push_back(s);
  }
  return out;
}

// T = sum_{p,q} A_p Q_q |sum_k b_k c_k^p s_k^{2q+|n|}|^2 from the power series
// of e^{eta_z^2 c c'} and I_|n|(eta_x^2 s s').
ContributionDetail series_contribution(const Weighted& wp, int an, double ex2, double ez2) {
  const std::size_t n = wp.b.size();
  double bound = 0.0;
  for (const auto& v : wp.b) bound += std::abs(v);
  const double b2 = bound * bound;
  ContributionDetail out;
  if (b2 == 0.0) return out;

  std::vector<cplx> base(n);
  std::vector<double> s2(n);
  for (std::size_t k = 0; k < n; ++k) {
    base[k] = wp.b[k] * std::pow(wp.s[k], an);
    s2[k] = wp.s[k] * wp.s[k];
  }
  double q0 = std::pow(0.5 * ex2, an);
  for (int j = 2; j <= an; ++j) q0 /= j;

  constexpr double kTol = 1e-17;
  constexpr int kMaxTerms = 80;
  double total = 0.0;
  double a_p = 1.0;
  std::vector<cplx> work(n);
  for (int p = 0; p < kMaxTerms; ++p) {
    if (p > 0) {
      a_p *= ez2 / p;
      for (std::size_t k = 0; k < n; ++k) base[k] *= wp.c[k];
    }
    if (a_p * q0 * b2 <= kTol * total || a_p * q0 * b2 < 1e-300) {
      out.truncation = a_p * q0 * b2;
      break;
    }
    work = base;
    double q = q0;
    for (int j = 0; j < kMaxTerms; ++j) {
      if (j > 0) {
        q *= 0.25 * ex2 * ex2 / (static_cast<double>(j) * (j + an));
        for (std::size_t k = 0; k < n; ++k) work[k] *= s2[k];
      }
      const double coef = a_p * q;
      if (coef * b2 <= kTol * total || coef * b2 < 1e-300) {
        out.truncation = std::max(out.truncation, coef * b2);
        break;
      }
      cplx sum{};
      for (const auto& v : work) sum += v;
      total += coef * std::norm(sum);
    }
  }
  out.value = total;
  return out;
}

// Direct quadratic form b^H M b with M_jk = e^{eta_z^2 c_j c_k} I_|n|(eta_x^2 s_j s_k).
ContributionDetail tensor_contribution(const Weighted& wp, int an, double ex2, double ez2) {
  const std::size_t n = wp.b.size();
  cplx total{};
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cplx row{};
    for (std::size_t k = 0; k < n; ++k) {
      const double kernel = std::exp(ez2 * wp.c[j] * wp.c[k]) *
                            special::bessel_i(an, ex2 * wp.s[j] * wp.s[k]);
      row += kernel * wp.b[k];
      scale += kernel * std::abs(wp.b[j]) * std::abs(wp.b[k]);
    }
    total += std::conj(wp.b[j]) * row;
  }
  ContributionDetail out;
  out.value = total.real();
  if (out.value < 0.0) {
    if (out.value < -1e-10 * scale)
      throw QuadratureError("negative mode contribution beyond tolerance", -out.value);
    out.value = 0.0;
    out.clamped = true;
  }
  return out;
}

}  // namespace

ContributionDetail mode_contribution(const ModeParams& mode, Sigma sigma, const TrapModel& trap,
                                     const RateOptions& opts) {
  if (!trap.on_axis())
    throw DomainError("reduced mode contribution needs a trap centred on the axis");
  if (!trap.eta.axisymmetric())
    throw DomainError("reduced mode contribution needs eta_x == eta_y");
  opts.quad.validate();
  const AngularSpectrum spec(mode);
  if (spec.is_null(sigma)) return {};
  const auto eta = scaled_eta(trap.eta, mode.omega);
  const auto wp = weighted_profile(spec, sigma, eta, trap.center[2], opts);
  const int an = std::abs(mode.m - value(sigma));
  const double ex2 = eta.x * eta.x;
  const double ez2 = eta.z * eta.z;
  return opts.route == Route::Series ? series_contribution(wp, an, ex2, ez2)
                                     : tensor_contribution(wp, an, ex2, ez2);
}

std::array<std::array<cplx, 3>, 3> coherence_matrix(const ModeParams& mode, const TrapModel& trap,
                                                    const RateOptions& opts) {
  opts.quad.validate();
  mode.validate();
  const double w = mode.omega;
  const auto eta = scaled_eta(trap.eta, w);
  const RVec3& x0 = trap.center;
  const double rho0 = std::hypot(x0[0], x0[1]);
  const double rate = w * (std::abs(x0[2]) + rho0) + 2.0 * std::abs(mode.kappa) + 4.0;
  const auto nodes = spectral_nodes(rate, opts.quad, opts.refinement);
  int n_phi = opts.brute_force_phi_points;
  if (n_phi <= 0) n_phi = 2 * (static_cast<int>(std::ceil(w * rho0)) + std::abs(mode.m) + 2) + 16;
  const double dphi = 2.0 * kPi / n_phi;
  const std::array<double, 3> e2{eta.x * eta.x, eta.y * eta.y, eta.z * eta.z};

  const std::size_t count = nodes.size() * static_cast<std::size_t>(n_phi);
  std::vector<RVec3> k(count);
  std::vector<CVec3> v(count);
  std::size_t idx = 0;
  for (const auto& node : nodes) {
    const auto& p = node.point;
    const double weight = node.weight * p.sin_theta * p.sin_theta * dphi;
    for (int j = 0; j < n_phi; ++j, ++idx) {
      const double phi = j * dphi;
      const RVec3 kh{p.sin_theta * std::cos(phi), p.sin_theta * std::sin(phi), p.cos_theta};
      const CVec3 f = to_circular(spectrum::mode_spectrum(mode, p, phi));
      double dot = 0.0;
      double damp = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        dot += kh[i] * x0[i];
        damp += e2[i] * kh[i] * kh[i];
      }
      const cplx factor = weight * std::exp(-0.5 * damp) * unit_phase(w * dot);
      k[idx] = kh;
      for (std::size_t i = 0; i < 3; ++i) v[idx][i] = factor * f[i];
    }
  }

  std::array<std::array<cplx, 3>, 3> m{};
  for (std::size_t a = 0; a < count; ++a) {
    CVec3 u{};
    for (std::size_t b = 0; b < count; ++b) {
      const double g = std::exp(e2[0] * k[a][0] * k[b][0] + e2[1] * k[a][1] * k[b][1] +
                                e2[2] * k[a][2] * k[b][2]);
      for (std::size_t i = 0; i < 3; ++i) u[i] += g * v[b][i];
    }
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) m[i][j] += std::conj(v[a][i]) * u[j];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Totals
// ---------------------------------------------------------------------------

double exact_sum(const std::vector<double>& values) {
  // Shewchuk's non-overlapping partials with a correctly rounded final step.
  std::vector<double> partials;
  for (double x : values) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

namespace {

std::array<cplx, 3> dipole_projections(const DipoleSpec& d) {
  std::array<cplx, 3> out{};
  for (Sigma s : kAllSigmas) {
    const CVec3 e = basis_vector(s);
    out[slot(s)] = d.orientation[0] * e[0] + d.orientation[1] * e[1] + d.orientation[2] * e[2];
  }
  return out;
}

RateResult compute_rate(const ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                        const RateOptions& opts, double scale) {
  dipole.validate();
  opts.quad.validate();
  const bool brute = !trap.on_axis() || !trap.eta.axisymmetric();
  if (brute && !opts.allow_brute_force)
    throw DomainError("off-axis or anisotropic trap needs the brute-force rate path");
  const auto proj = dipole_projections(dipole);

  std::vector<std::vector<RateEntry>> per_mode(catalog.modes.size());
  std::vector<double> truncation(catalog.modes.size(), 0.0);
  parallel_for(catalog.modes.size(), opts.threads, [&](std::size_t i) {
    const auto& entry = catalog.modes[i];
    const ModeParams& mode = entry.mode;
    std::array<std::array<cplx, 3>, 3> coherence{};
    if (brute) coherence = coherence_matrix(mode, trap, opts);
    auto active = [&](Sigma s) {
      return std::abs(mode.m - value(s)) <= catalog.n_max;
    };
    for (Sigma s : kSigmaOrder) {
      if (!active(s)) continue;
      const double weight = std::norm(proj[slot(s)]);
      if (weight == 0.0 && !opts.keep_zero_weight) continue;
      RateEntry e;
      e.mode_index = i;
      e.mode = mode;
      e.family = catalog.family_label(entry);
      e.sigma = s;
      e.winding = mode.m - value(s);
      e.weight = weight;
      if (brute) {
        e.t_raw = std::max(0.0, coherence[slot(s)][slot(s)].real());
        cplx row{};
        for (Sigma r : kSigmaOrder) {
          if (!active(r)) continue;
          row += std::conj(proj[slot(s)]) * proj[slot(r)] * coherence[slot(s)][slot(r)];
        }
        e.contribution = scale * row.real();
      } else {
        const auto detail = mode_contribution(mode, s, trap, opts);
        e.t_raw = detail.value;
        e.clamped = detail.clamped;
        truncation[i] = std::max(truncation[i], detail.truncation);
        e.contribution = scale * weight * e.t_raw;
      }
      e.t = scale * e.t_raw;
      per_mode[i].push_back(std::move(e));
    }
  });

  RateResult result;
  result.center = trap.center;
  result.scale = scale;
  result.brute_force = brute;
  std::vector<double> parts;
  for (std::size_t i = 0; i < per_mode.size(); ++i) {
    result.max_truncation = std::max(result.max_truncation, truncation[i]);
    for (auto& e : per_mode[i]) {
      if (e.clamped) ++result.clamped;
      parts.push_back(e.contribution);
      result.entries.push_back(std::move(e));
    }
  }
  result.total = exact_sum(parts);
  return result;
}

}  // namespace

RateResult total_rate(const ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                      const RateOptions& opts) {
  return compute_rate(catalog, dipole, trap, opts, catalog.scale());
}

RateResult raw_rate(const ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                    const RateOptions& opts) {
  return compute_rate(catalog, dipole, trap, opts, 1.0);
}

CalibrationReport calibrate(ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                            const RateOptions& opts, const CalibrationWindow& window) {
  if (window.samples < 1 || !(window.z_max >= window.z_min))
    throw DomainError("invalid calibration window");
  CalibrationReport report;
  for (int i = 0; i < window.samples; ++i) {
    const double z = window.samples == 1
                         ? window.z_min
                         : window.z_min + (window.z_max - window.z_min) * i / (window.samples - 1);
    report.z.push_back(z);
    report.raw.push_back(raw_rate(catalog, dipole, trap.at_z(z), opts).total);
  }
  report.mean_raw = exact_sum(report.raw) / window.samples;
  if (!(report.mean_raw > 0.0) || !std::isfinite(report.mean_raw))
    throw CalibrationError("far-field rate vanishes over the calibration window");
  report.constant = 1.0 / report.mean_raw;
  catalog.calibration = report.constant;
  return report;
}

std::vector<double> scan_points(double z_min, double z_max, double step) {
  if (!std::isfinite(z_min) || !std::isfinite(z_max) || z_max < z_min)
    throw DomainError("invalid scan range");
  if (z_max == z_min) return {z_min};
  if (!(step > 0.0)) throw DomainError("scan step must be positive");
  const auto n = static_cast<std::size_t>(std::floor((z_max - z_min) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = z_min + static_cast<double>(i) * step;
  return out;
}

std::vector<RateResult> rate_scan(const ModeCatalog& catalog, const DipoleSpec& dipole,
                                  const TrapModel& trap, const RateOptions& opts, double z_min,
                                  double z_max, double step) {
  std::vector<RateResult> out;
  for (double z : scan_points(z_min, z_max, step))
    out.push_back(total_rate(catalog, dipole, trap.at_z(z), opts));
  return out;
}

bool approaches_unity(const std::vector<RateResult>& scan, double fraction) {
  const std::size_t n = scan.size();
  if (n < 4) return true;
  const auto k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(fraction * n)));
  auto dev = [&](std::size_t i) { return std::abs(scan[i].total - 1.0); };
  for (std::size_t i = 1; i < k && i < n; ++i)
    if (dev(i - 1) > dev(i)) return false;
  for (std::size_t i = n - k; i + 1 < n; ++i)
    if (dev(i + 1) > dev(i)) return false;
  return true;
}

std::size_t ModeTable::count_significant(double fraction) const {
  const ModeRow* t = top();
  if (!t) return 0;
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const ModeRow& r) {
    return r.contribution >= fraction * t->contribution;
  }));
}

const ModeRow* ModeTable::top() const {
  const ModeRow* best = nullptr;
  for (const auto& r : rows)
    if (!best || r.contribution > best->contribution) best = &r;
  return best;
}

ModeTable mode_table(const RateResult& result) {
  ModeTable table;
  table.z = result.z();
  table.total = result.total;
  std::size_t i = 0;
  while (i < result.entries.size()) {
    const auto& first = result.entries[i];
    std::vector<double> parts;
    std::size_t j = i;
    for (; j < result.entries.size() && result.entries[j].mode_index == first.mode_index; ++j)
      parts.push_back(result.entries[j].contribution);
    ModeRow row;
    row.kappa = first.mode.kappa;
    row.family = first.family;
    row.m = first.mode.m;
    row.contribution = exact_sum(parts);
    row.branching = result.total != 0.0 ? row.contribution / result.total : 0.0;
    table.rows.push_back(row);
    i = j;
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ModeRow& a, const ModeRow& b) { return a.kappa < b.kappa; });
  return table;
}

ModeTable mode_table(const ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                     const RateOptions& opts) {
  return mode_table(total_rate(catalog, dipole, trap, opts));
}

std::vector<std::pair<std::string, double>> family_totals(const ModeCatalog& catalog,
                                                          const RateResult& result) {
  std::vector<std::vector<double>> parts(catalog.families.size());
  for (const auto& e : result.entries)
    parts[catalog.modes[e.mode_index].family_index].push_back(e.contribution);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t f = 0; f < catalog.families.size(); ++f)
    out.emplace_back(catalog.families[f].label(), exact_sum(parts[f]));
  return out;
}

double gamma0(double omega_ab, double dipole_magnitude) {
  if (!(omega_ab > 0.0) || !(dipole_magnitude > 0.0))
    throw DomainError("free-space rate needs positive frequency and dipole moment");
  const double c = constants::c;
  return omega_ab * omega_ab * omega_ab * dipole_magnitude * dipole_magnitude /
         (3.0 * kPi * constants::epsilon0 * constants::hbar * c * c * c);
}

}  // namespace parabolic::rates
