#pragma once

// Angular spectrum of a parabolic mode on the Fourier sphere.
//
// The Hertz potential has circular components
//   pi_sigma(theta, phi) = c_sigma e^{i(m - sigma) phi} (tan theta/2)^{-2 i kappa} / (2 pi sin theta)
// and the field amplitude is f = i w k x pi (E-modes) or f = i w k x (k x pi)
// (B-modes), w = omega / c in reference units.

#include <functional>

#include "parabolic/core.hpp"
#include "parabolic/quadrature.hpp"

namespace parabolic::spectrum {

/// c_sigma (tan theta/2)^{-2 i kappa} / (2 pi sin theta); the azimuthal factor is not included.
cplx hertz_component(const ModeParams& mode, Sigma sigma, double theta);
cplx hertz_component(const ModeParams& mode, Sigma sigma, const PolarPoint& p);

/// Cartesian Hertz potential vector at (theta, phi).
CVec3 hertz_potential(const ModeParams& mode, const PolarPoint& p, double phi);

/// Cartesian field amplitude f(theta, phi). Rejects theta outside (0, pi).
CVec3 mode_spectrum(const ModeParams& mode, double theta, double phi);
CVec3 mode_spectrum(const ModeParams& mode, const PolarPoint& p, double phi);

/// Per-sigma polar profiles a_sigma(theta) with
///   f(theta, phi) = sum_sigma e_sigma a_sigma(theta) e^{i(m - sigma) phi} / (2 pi).
/// a_sigma factorizes as envelope_sigma(theta) * e^{-2 i kappa u}; the envelope
/// carries no kappa dependence.
class AngularSpectrum {
 public:
  explicit AngularSpectrum(ModeParams mode);

  const ModeParams& mode() const { return mode_; }

  /// Envelope with the kappa phase stripped, evaluated for all three sigmas.
  CVec3 envelope(const PolarPoint& p) const;
  cplx envelope(Sigma s, const PolarPoint& p) const { return envelope(p)[slot(s)]; }

  cplx profile(Sigma s, const PolarPoint& p) const;
  cplx profile(Sigma s, double theta) const { return profile(s, PolarPoint::from_theta(theta)); }

  /// Reassembled Cartesian amplitude from the profiles.
  CVec3 reassemble(const PolarPoint& p, double phi) const;

  /// True when the sigma profile vanishes identically.
  bool is_null(Sigma s) const { return null_[slot(s)]; }

 private:
  ModeParams mode_;
  CVec3 potential_dir_;  // sum_sigma e_sigma c_sigma
  std::array<bool, 3> null_{};
};

/// theta -> a_sigma(theta) as a standalone callable.
std::function<cplx(double)> sigma_profile(const ModeParams& mode, Sigma sigma);

// Small vector helpers shared with the field and rate modules.
CVec3 cross(const CVec3& a, const CVec3& b);
cplx dot(const CVec3& a, const CVec3& b);
double norm2(const CVec3& a);

}  // namespace parabolic::spectrum
