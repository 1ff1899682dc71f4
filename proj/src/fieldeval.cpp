#include "parabolic/fieldeval.hpp"

#include <algorithm>
#include <cmath>

#include "parabolic/parallel.hpp"
#include "parabolic/special.hpp"

namespace parabolic::field {

using spectrum::AngularSpectrum;

RVec3 CylPoint::cartesian() const { return {rho * std::cos(phi), rho * std::sin(phi), z}; }

CylPoint CylPoint::from_cartesian(const RVec3& x) {
  const double rho = std::hypot(x[0], x[1]);
  return {rho, rho > 0.0 ? std::atan2(x[1], x[0]) : 0.0, x[2]};
}

double FieldSample::intensity() const { return spectrum::norm2(cartesian); }

namespace {

cplx i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

cplx unit_phase(double a) { return {std::cos(a), std::sin(a)}; }

double signed_bessel(const std::vector<double>& seq, int n) {
  const int an = std::abs(n);
  const double v = seq[static_cast<std::size_t>(an)];
  return (n < 0 && an % 2 == 1) ? -v : v;
}

void check_position(const CylPoint& p) {
  if (!std::isfinite(p.rho) || !std::isfinite(p.phi) || !std::isfinite(p.z) || p.rho < 0.0)
    throw DomainError("field position must be finite with rho >= 0");
}

double phase_rate(const ModeParams& mode, const CylPoint& p) {
  return mode.omega * (std::abs(p.z) + p.rho) + 2.0 * std::abs(mode.kappa) + 1.0;
}

}  // namespace

FieldSample field_at_point(const AngularSpectrum& spec, const CylPoint& position,
                           const QuadratureConfig& cfg) {
  check_position(position);
  const ModeParams& mode = spec.mode();
  const double w = mode.omega;
  std::array<int, 3> winding{};
  int n_max = 0;
  for (Sigma s : kAllSigmas) {
    winding[slot(s)] = mode.m - value(s);
    if (!spec.is_null(s)) n_max = std::max(n_max, std::abs(winding[slot(s)]));
  }

  auto integrand = [&](double u) {
    std::array<cplx, 3> out{};
    const double taper = window_weight(u, cfg);
    if (taper == 0.0) return out;
    const PolarPoint p = PolarPoint::from_u(u);
    const CVec3 env = spec.envelope(p);
    const auto j = special::bessel_j_sequence(n_max, w * position.rho * p.sin_theta);
    const cplx common = taper * p.sin_theta * p.sin_theta *
                        unit_phase(w * position.z * p.cos_theta - 2.0 * mode.kappa * u);
    for (Sigma s : kAllSigmas) {
      if (spec.is_null(s)) continue;
      out[slot(s)] = common * env[slot(s)] * signed_bessel(j, winding[slot(s)]);
    }
    return out;
  };

  const double span = 2.0 * cfg.truncation_u;
  const int panels =
      std::max(16, static_cast<int>(std::ceil(span * phase_rate(mode, position) / kPi)));
  const auto res = integrate_adaptive<3>(integrand, -cfg.truncation_u, cfg.truncation_u, panels, cfg);

  FieldSample sample;
  sample.position = position;
  sample.residual = res.error;
  for (Sigma s : kAllSigmas) {
    const int n = winding[slot(s)];
    sample.circular[slot(s)] = i_pow(n) * unit_phase(n * position.phi) * res.value[slot(s)];
  }
  sample.cartesian = to_cartesian(sample.circular);
  return sample;
}

FieldSample field_at_point(const ModeParams& mode, const CylPoint& position,
                           const QuadratureConfig& cfg) {
  return field_at_point(AngularSpectrum(mode), position, cfg);
}

FieldSample field_2d_oracle(const ModeParams& mode, const CylPoint& position,
                            const QuadratureConfig& cfg, int phi_points, double refinement) {
  check_position(position);
  mode.validate();
  const double w = mode.omega;
  int n_phi = phi_points;
  if (n_phi <= 0) {
    n_phi = 2 * (static_cast<int>(std::ceil(w * position.rho)) + std::abs(mode.m) + 2) + 32;
  }
  n_phi += n_phi % 2;
  const auto nodes = spectral_nodes(phase_rate(mode, position), cfg, refinement);
  const RVec3 r = position.cartesian();
  const double dphi = 2.0 * kPi / n_phi;

  CVec3 acc{};
  for (const auto& node : nodes) {
    const PolarPoint& p = node.point;
    CVec3 ring{};
    for (int j = 0; j < n_phi; ++j) {
      const double phi = j * dphi;
      const double cp = std::cos(phi);
      const double sp = std::sin(phi);
      const CVec3 f = spectrum::mode_spectrum(mode, p, phi);
      const cplx ph =
          unit_phase(w * (p.sin_theta * cp * r[0] + p.sin_theta * sp * r[1] + p.cos_theta * r[2]));
      for (std::size_t i = 0; i < 3; ++i) ring[i] += f[i] * ph;
    }
    const double weight = node.weight * p.sin_theta * p.sin_theta * dphi;
    for (std::size_t i = 0; i < 3; ++i) acc[i] += weight * ring[i];
  }
  FieldSample sample;
  sample.position = position;
  sample.cartesian = acc;
  sample.circular = to_circular(acc);
  return sample;
}

double localization_plane(double kappa, double omega) {
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  return -2.0 * kappa / omega;
}

StationaryAngle stationary_phase_angle(double kappa, double z, double omega) {
  if (z == 0.0) throw DomainError("stationary phase is undefined at Z = 0");
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  StationaryAngle out;
  out.sin2 = -2.0 * kappa / (omega * z);
  out.feasible = out.sin2 >= 0.0 && out.sin2 <= 1.0;
  if (out.feasible) out.theta = std::asin(std::sqrt(out.sin2));
  return out;
}

double stationary_phase_prefactor(double kappa, double z, double omega) {
  const double wz = omega * z;
  return std::sqrt(kPi / (std::abs(wz) * std::sqrt(1.0 + 2.0 * kappa / wz)));
}

StationaryPhaseEstimate stationary_phase_field(const ModeParams& mode, const CylPoint& position) {
  check_position(position);
  const AngularSpectrum spec(mode);
  const double w = mode.omega;
  const double z = position.z;
  const auto angle = stationary_phase_angle(mode.kappa, z, w);

  StationaryPhaseEstimate est;
  est.sample.position = position;
  est.feasible = angle.feasible;
  est.asymptotic_regime = std::abs(w * z) >= 20.0;
  est.theta = angle.theta;
  if (!angle.feasible) return est;
  if (angle.sin2 >= 1.0 - 1e-12 || angle.sin2 <= 0.0) {
    est.caustic = angle.sin2 > 0.0;
    return est;
  }
  est.prefactor = stationary_phase_prefactor(mode.kappa, z, w);

  std::array<cplx, 3> sum{};
  for (double theta : {angle.theta, kPi - angle.theta}) {
    const PolarPoint p = PolarPoint::from_theta(theta);
    const CVec3 env = spec.envelope(p);
    const double phase = w * z * p.cos_theta - 2.0 * mode.kappa * p.u;
    const double second = -2.0 * w * z * p.cos_theta;
    const cplx factor = std::sqrt(2.0 * kPi / std::abs(second)) *
                        unit_phase(phase + (second > 0.0 ? 0.25 : -0.25) * kPi);
    for (Sigma s : kAllSigmas) {
      if (spec.is_null(s)) continue;
      const int n = mode.m - value(s);
      const double j = special::bessel_j(n, w * position.rho * p.sin_theta);
      sum[slot(s)] += p.sin_theta * env[slot(s)] * j * factor;
    }
  }
  for (Sigma s : kAllSigmas) {
    const int n = mode.m - value(s);
    est.sample.circular[slot(s)] = i_pow(n) * unit_phase(n * position.phi) * sum[slot(s)];
  }
  est.sample.cartesian = to_cartesian(est.sample.circular);
  return est;
}

// ---------------------------------------------------------------------------

ComponentSelector selector_from_string(const std::string& s) {
  if (s == "x" || s == "Ex") return ComponentSelector::X;
  if (s == "y" || s == "Ey") return ComponentSelector::Y;
  if (s == "z" || s == "Ez") return ComponentSelector::Z;
  if (s == "plus" || s == "+1") return ComponentSelector::Plus;
  if (s == "minus" || s == "-1") return ComponentSelector::Minus;
  if (s == "zero" || s == "0") return ComponentSelector::Zero;
  if (s == "total" || s == "|E|") return ComponentSelector::Total;
  throw DomainError("unknown field component '" + s + "'");
}

std::string to_string(ComponentSelector c) {
  switch (c) {
    case ComponentSelector::X: return "x";
    case ComponentSelector::Y: return "y";
    case ComponentSelector::Z: return "z";
    case ComponentSelector::Plus: return "plus";
    case ComponentSelector::Minus: return "minus";
    case ComponentSelector::Zero: return "zero";
    default: return "total";
  }
}

double selected_intensity(const FieldSample& s, ComponentSelector c) {
  switch (c) {
    case ComponentSelector::X: return std::norm(s.cartesian[0]);
    case ComponentSelector::Y: return std::norm(s.cartesian[1]);
    case ComponentSelector::Z: return std::norm(s.cartesian[2]);
    case ComponentSelector::Plus: return std::norm(s.component(Sigma::Plus));
    case ComponentSelector::Minus: return std::norm(s.component(Sigma::Minus));
    case ComponentSelector::Zero: return std::norm(s.component(Sigma::Zero));
    default: return s.intensity();
  }
}

double Axis::at(int i) const {
  if (count == 1) return min;
  return min + (max - min) * static_cast<double>(i) / (count - 1);
}

void Axis::validate(const char* name) const {
  if (count < 1) throw DomainError(std::string("grid axis '") + name + "' has no points");
  if (!std::isfinite(min) || !std::isfinite(max) || max < min)
    throw DomainError(std::string("grid axis '") + name + "' has invalid bounds");
}

void PlaneGrid::validate() const {
  transverse.validate(kind == Kind::RhoZ ? "rho" : "x");
  z.validate("z");
  if (kind == Kind::RhoZ && transverse.min < 0.0) throw DomainError("rho axis must be >= 0");
}

std::size_t PlaneGrid::size() const {
  return static_cast<std::size_t>(transverse.count) * static_cast<std::size_t>(z.count);
}

CylPoint PlaneGrid::point(std::size_t index) const {
  const int i = static_cast<int>(index / static_cast<std::size_t>(z.count));
  const int k = static_cast<int>(index % static_cast<std::size_t>(z.count));
  const double t = transverse.at(i);
  if (kind == Kind::RhoZ) return {t, 0.0, z.at(k)};
  return {std::abs(t), t < 0.0 ? kPi : 0.0, z.at(k)};
}

IntensityMap intensity_map(const ModeParams& mode, ComponentSelector selector, const PlaneGrid& grid,
                           const QuadratureConfig& cfg, int threads) {
  grid.validate();
  cfg.validate();
  const AngularSpectrum spec(mode);
  IntensityMap map;
  map.grid = grid;
  map.selector = selector;
  const std::size_t n = grid.size();
  map.samples.resize(n);
  map.intensity.assign(n, 0.0);
  map.relative.assign(n, 0.0);
  map.valid.assign(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      map.samples[i] = field_at_point(spec, grid.point(i), cfg);
      map.intensity[i] = selected_intensity(map.samples[i], selector);
      map.valid[i] = 1;
    } catch (const QuadratureError&) {
      map.samples[i].position = grid.point(i);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (map.valid[i]) map.max = std::max(map.max, map.intensity[i]);
    else ++map.failures;
  }
  if (map.max > 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      if (map.valid[i]) map.relative[i] = map.intensity[i] / map.max;
  }
  return map;
}

void VolumeGrid::validate() const {
  x.validate("x");
  y.validate("y");
  z.validate("z");
}

std::size_t VolumeGrid::size() const {
  return static_cast<std::size_t>(x.count) * static_cast<std::size_t>(y.count) *
         static_cast<std::size_t>(z.count);
}

RVec3 VolumeGrid::point(std::size_t index) const {
  const auto nz = static_cast<std::size_t>(z.count);
  const auto ny = static_cast<std::size_t>(y.count);
  const int k = static_cast<int>(index % nz);
  const int j = static_cast<int>((index / nz) % ny);
  const int i = static_cast<int>(index / (nz * ny));
  return {x.at(i), y.at(j), z.at(k)};
}

IsoGrid isointensity_grid(const ModeParams& mode, double level, const VolumeGrid& grid,
                          const QuadratureConfig& cfg, int threads) {
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("isosurface level must lie in (0, 1]");
  grid.validate();
  cfg.validate();
  const AngularSpectrum spec(mode);
  IsoGrid out;
  out.grid = grid;
  out.level = level;
  const std::size_t n = grid.size();
  out.intensity.assign(n, 0.0);
  out.valid.assign(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      out.intensity[i] = field_at_point(spec, CylPoint::from_cartesian(grid.point(i)), cfg).intensity();
      out.valid[i] = 1;
    } catch (const QuadratureError&) {
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (out.valid[i]) out.max = std::max(out.max, out.intensity[i]);
    else ++out.failures;
  }
  out.threshold = level * out.max;
  return out;
}

AxisPeak on_axis_peak(const ModeParams& mode, double z_min, double z_max, double step,
                      const QuadratureConfig& cfg) {
  if (std::abs(mode.m) > 1) throw DomainError("no winding-zero component for |m| > 1");
  if (!(step > 0.0) || !(z_max > z_min)) throw DomainError("invalid on-axis scan range");
  const Sigma sigma = sigma_from_int(mode.m);
  const AngularSpectrum spec(mode);
  auto value_at = [&](double z) {
    return std::norm(field_at_point(spec, {0.0, 0.0, z}, cfg).component(sigma));
  };
  AxisPeak best{z_min, -1.0};
  const int n = static_cast<int>(std::floor((z_max - z_min) / step)) + 1;
  for (int i = 0; i < n; ++i) {
    const double z = z_min + i * step;
    const double v = value_at(z);
    if (v > best.intensity) best = {z, v};
  }
  // golden-section refinement inside the bracketing cells
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(z_min, best.z - step);
  double b = std::min(z_max, best.z + step);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = value_at(c);
  double fd = value_at(d);
  while (b - a > 1e-4) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = value_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = value_at(d);
    }
  }
  const double z = 0.5 * (a + b);
  const double v = value_at(z);
  if (v > best.intensity) best = {z, v};
  return best;
}

}  // namespace parabolic::field
