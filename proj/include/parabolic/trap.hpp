#pragma once

// Centre-of-mass form factors for an ion in the motional ground state of a
// harmonic trap.

#include <vector>

#include "parabolic/core.hpp"

namespace parabolic::trap {

/// eta = sqrt(hbar omega^2 / (2 M Lambda c^2)); all inputs SI and positive.
double lamb_dicke(double omega_gamma, double mass, double secular_frequency);

struct LambDicke {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static LambDicke from(const TrapSpec& trap, const IonSpec& ion, double omega_ratio = 1.0);
  bool axisymmetric() const { return x == y; }
};

/// g(k, k') = e^{i (k - k') . w X0} prod_i e^{-eta_i^2 (k_i - k'_i)^2 / 2}.
/// `center` is in c/omega units; k and k' must be unit vectors.
cplx form_factor(const RVec3& k, const RVec3& k_prime, double omega, const RVec3& center,
                 const LambDicke& eta);

/// Closed form of
///   int dphi' int dphi e^{-i(n' phi' - n phi)} e^{eta_x^2 sin(theta) sin(theta') cos(phi - phi')}
///   = (2 pi)^2 delta_{n n'} I_|n|(eta_x^2 sin(theta) sin(theta')).
double azimuthal_pair_integral(int n, int n_prime, double eta_x, double theta, double theta_prime);

/// The same double integral by the periodic trapezoid rule on `points` x `points` nodes.
cplx azimuthal_pair_quadrature(int n, int n_prime, double eta_x, double theta, double theta_prime,
                               int points = 64);

/// max over x in [0, eta_x^2] of I_|n|(x) / I_0(x) for n = 0..n_max. The ratio
/// grows with x, so the maximum sits at x = eta_x^2.
std::vector<double> bessel_weight_profile(double eta_x, int n_max);

}  // namespace parabolic::trap
