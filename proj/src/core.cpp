#include "parabolic/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace parabolic {

std::string to_string(Sigma s) {
  switch (s) {
    case Sigma::Plus: return "+1";
    case Sigma::Minus: return "-1";
    default: return "0";
  }
}

Sigma sigma_from_int(int v) {
  if (v == 1) return Sigma::Plus;
  if (v == -1) return Sigma::Minus;
  if (v == 0) return Sigma::Zero;
  throw DomainError("sigma must be -1, 0 or +1, got " + std::to_string(v));
}

CVec3 basis_vector(Sigma s) {
  switch (s) {
    case Sigma::Plus: return {1.0, kI, 0.0};
    case Sigma::Minus: return {1.0, -kI, 0.0};
    default: return {0.0, 0.0, 1.0};
  }
}

CVec3 to_circular(const CVec3& v) {
  CVec3 out{};
  out[slot(Sigma::Plus)] = 0.5 * (v[0] - kI * v[1]);
  out[slot(Sigma::Minus)] = 0.5 * (v[0] + kI * v[1]);
  out[slot(Sigma::Zero)] = v[2];
  return out;
}

CVec3 to_cartesian(const CVec3& c) {
  const cplx p = c[slot(Sigma::Plus)];
  const cplx m = c[slot(Sigma::Minus)];
  return {p + m, kI * (p - m), c[slot(Sigma::Zero)]};
}

std::string to_string(Family f) { return f == Family::EMode ? "E" : "B"; }

Family family_from_string(const std::string& s) {
  if (s == "E" || s == "e" || s == "EMode") return Family::EMode;
  if (s == "B" || s == "b" || s == "BMode") return Family::BMode;
  throw DomainError("unknown mode family '" + s + "' (expected E or B)");
}

bool HertzCoefficients::all_zero() const {
  return std::all_of(values.begin(), values.end(), [](cplx v) { return v == cplx{}; });
}

HertzCoefficients HertzCoefficients::scaled(double factor) const {
  HertzCoefficients out = *this;
  for (auto& v : out.values) v *= factor;
  return out;
}

HertzCoefficients HertzCoefficients::azimuthal() {
  // e+ e^{-i phi}/2 - e- e^{i phi}/2 = i phi_hat
  HertzCoefficients c;
  c[Sigma::Plus] = 0.5;
  c[Sigma::Minus] = -0.5;
  c[Sigma::Zero] = 0.0;
  return c;
}

void ModeParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("mode omega must be positive");
  if (!std::isfinite(kappa)) throw DomainError("mode kappa must be finite");
  for (const auto& v : coeffs.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DomainError("mode coefficients must be finite");
  }
}

std::vector<double> kappa_values(const KappaRule& rule) {
  std::vector<double> out;
  if (const auto* list = std::get_if<KappaList>(&rule)) {
    out = list->values;
  } else {
    const auto& g = std::get<KappaGrid>(rule);
    if (!(g.step > 0.0)) throw DomainError("kappa grid step must be positive");
    if (g.index_max < g.index_min) throw DomainError("kappa grid index range is empty");
    out.reserve(static_cast<std::size_t>(g.index_max - g.index_min + 1));
    for (int j = g.index_min; j <= g.index_max; ++j) out.push_back(g.anchor + g.step * j);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) throw DomainError("kappa values must be finite");
    if (i > 0 && !(out[i] > out[i - 1]))
      throw DomainError("kappa values must be strictly increasing");
  }
  return out;
}

void MirrorSpec::validate() const {
  if (!(focal_length > 0.0)) throw DomainError("mirror focal length must be positive");
  if (kappa_values(kappa_rule).empty()) throw DomainError("kappa catalog is empty");
}

void IonSpec::validate() const {
  if (!(mass > 0.0)) throw DomainError("ion mass must be positive");
  if (!(transition_wavelength > 0.0)) throw DomainError("transition wavelength must be positive");
}

double IonSpec::omega() const { return 2.0 * kPi * constants::c / transition_wavelength; }

void TrapSpec::validate() const {
  for (double f : secular_frequencies) {
    if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("secular frequencies must be positive");
  }
  if (symmetric && secular_frequencies[0] != secular_frequencies[1])
    throw DomainError("symmetric trap requires Lambda_x == Lambda_y");
  for (double x : center) {
    if (!std::isfinite(x)) throw DomainError("trap center must be finite");
  }
}

TrapSpec TrapSpec::at_z(double z) const {
  TrapSpec t = *this;
  t.center[2] = z;
  return t;
}

CVec3 circular_components(const RVec3& d) {
  const double norm = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    std::ostringstream os;
    os << "dipole orientation must be a unit vector (|d| = " << norm << ")";
    throw DomainError(os.str());
  }
  return to_circular({d[0], d[1], d[2]});
}

void DipoleSpec::validate() const {
  (void)circular_components(orientation);
  if (!(magnitude > 0.0)) throw DomainError("dipole magnitude must be positive");
}

CVec3 DipoleSpec::circular() const { return circular_components(orientation); }

double DipoleSpec::weight(Sigma s) const {
  const CVec3 e = basis_vector(s);
  const cplx proj = orientation[0] * e[0] + orientation[1] * e[1] + orientation[2] * e[2];
  return std::norm(proj);
}

DipoleSpec make_dipole(const RVec3& direction) {
  const double n =
      std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] + direction[2] * direction[2]);
  if (!(n > 0.0)) throw DomainError("dipole direction must be non-zero");
  DipoleSpec d;
  d.orientation = {direction[0] / n, direction[1] / n, direction[2] / n};
  return d;
}

double to_dimensionless(double length_m, double omega) {
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  return length_m * omega / constants::c;
}

double from_dimensionless(double length, double omega) {
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  return length * constants::c / omega;
}

}  // namespace parabolic
