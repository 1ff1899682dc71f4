#include "parabolic/spectrum.hpp"

#include <cmath>

namespace parabolic::spectrum {

CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

cplx dot(const CVec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm2(const CVec3& a) { return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]); }

namespace {

cplx kappa_phase(double kappa, double u) {
  const double arg = -2.0 * kappa * u;
  return {std::cos(arg), std::sin(arg)};
}

CVec3 apply_curl(Family family, double w, const CVec3& k, const CVec3& pi) {
  const CVec3 kxp = cross(k, pi);
  const CVec3 v = family == Family::EMode ? kxp : cross(k, kxp);
  return {kI * w * v[0], kI * w * v[1], kI * w * v[2]};
}

}  // namespace

cplx hertz_component(const ModeParams& mode, Sigma sigma, const PolarPoint& p) {
  return mode.coeffs[sigma] * kappa_phase(mode.kappa, p.u) / (2.0 * kPi * p.sin_theta);
}

cplx hertz_component(const ModeParams& mode, Sigma sigma, double theta) {
  return hertz_component(mode, sigma, PolarPoint::from_theta(theta));
}

CVec3 hertz_potential(const ModeParams& mode, const PolarPoint& p, double phi) {
  CVec3 pi{};
  for (Sigma s : kAllSigmas) {
    const double a = (mode.m - value(s)) * phi;
    const cplx comp = hertz_component(mode, s, p) * cplx{std::cos(a), std::sin(a)};
    const CVec3 e = basis_vector(s);
    for (int i = 0; i < 3; ++i) pi[static_cast<std::size_t>(i)] += e[static_cast<std::size_t>(i)] * comp;
  }
  return pi;
}

CVec3 mode_spectrum(const ModeParams& mode, const PolarPoint& p, double phi) {
  const CVec3 k{p.sin_theta * std::cos(phi), p.sin_theta * std::sin(phi), p.cos_theta};
  return apply_curl(mode.family, mode.omega, k, hertz_potential(mode, p, phi));
}

CVec3 mode_spectrum(const ModeParams& mode, double theta, double phi) {
  return mode_spectrum(mode, PolarPoint::from_theta(theta), phi);
}

AngularSpectrum::AngularSpectrum(ModeParams mode) : mode_(std::move(mode)) {
  mode_.validate();
  potential_dir_ = {};
  for (Sigma s : kAllSigmas) {
    const CVec3 e = basis_vector(s);
    for (std::size_t i = 0; i < 3; ++i) potential_dir_[i] += e[i] * mode_.coeffs[s];
  }
  // sin(theta) * envelope is a trigonometric polynomial of degree <= 2 in
  // theta, so vanishing at five distinct angles means it vanishes identically.
  null_ = {true, true, true};
  for (double u : {-1.7, -0.6, 0.15, 0.9, 2.3}) {
    const auto e = envelope(PolarPoint::from_u(u));
    for (Sigma s : kAllSigmas) null_[slot(s)] = null_[slot(s)] && std::abs(e[slot(s)]) < 1e-300;
  }
}

CVec3 AngularSpectrum::envelope(const PolarPoint& p) const {
  // At phi = 0 every sigma component of f carries its e^{i(m - sigma)phi}
  // factor as 1, so the circular components of f(theta, 0) are the profiles.
  const CVec3 k{p.sin_theta, 0.0, p.cos_theta};
  const CVec3 f = apply_curl(mode_.family, mode_.omega, k, potential_dir_);
  CVec3 circ = to_circular(f);
  for (auto& v : circ) v /= p.sin_theta;  // 2 pi f / (2 pi sin theta)
  return circ;
}

cplx AngularSpectrum::profile(Sigma s, const PolarPoint& p) const {
  return envelope(s, p) * kappa_phase(mode_.kappa, p.u);
}

CVec3 AngularSpectrum::reassemble(const PolarPoint& p, double phi) const {
  CVec3 out{};
  for (Sigma s : kAllSigmas) {
    const double a = (mode_.m - value(s)) * phi;
    const cplx c = profile(s, p) * cplx{std::cos(a), std::sin(a)} / (2.0 * kPi);
    const CVec3 e = basis_vector(s);
    for (std::size_t i = 0; i < 3; ++i) out[i] += e[i] * c;
  }
  return out;
}

std::function<cplx(double)> sigma_profile(const ModeParams& mode, Sigma sigma) {
  return [spec = AngularSpectrum(mode), sigma](double theta) { return spec.profile(sigma, theta); };
}

}  // namespace parabolic::spectrum
