#include "parabolic/trap.hpp"

#include <cmath>

#include "parabolic/special.hpp"

namespace parabolic::trap {

double lamb_dicke(double omega_gamma, double mass, double secular_frequency) {
  if (!(omega_gamma > 0.0) || !(mass > 0.0) || !(secular_frequency > 0.0))
    throw DomainError("Lamb-Dicke parameter needs positive frequency, mass and trap frequency");
  const double c = constants::c;
  return std::sqrt(constants::hbar * omega_gamma * omega_gamma /
                   (2.0 * mass * secular_frequency * c * c));
}

LambDicke LambDicke::from(const TrapSpec& trap, const IonSpec& ion, double omega_ratio) {
  trap.validate();
  ion.validate();
  const double w = ion.omega() * omega_ratio;
  const auto& f = trap.secular_frequencies;
  return {lamb_dicke(w, ion.mass, f[0]), lamb_dicke(w, ion.mass, f[1]),
          lamb_dicke(w, ion.mass, f[2])};
}

namespace {

void require_unit(const RVec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(std::abs(n - 1.0) <= 1e-10)) throw DomainError("form factor needs unit wave vectors");
}

}  // namespace

cplx form_factor(const RVec3& k, const RVec3& k_prime, double omega, const RVec3& center,
                 const LambDicke& eta) {
  require_unit(k);
  require_unit(k_prime);
  const std::array<double, 3> e{eta.x, eta.y, eta.z};
  double phase = 0.0;
  double gauss = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double dk = k[i] - k_prime[i];
    phase += dk * omega * center[i];
    gauss += e[i] * e[i] * dk * dk;
  }
  return std::exp(-0.5 * gauss) * cplx{std::cos(phase), std::sin(phase)};
}

double azimuthal_pair_integral(int n, int n_prime, double eta_x, double theta, double theta_prime) {
  if (!(eta_x >= 0.0)) throw DomainError("eta_x must be >= 0");
  if (!(theta > 0.0 && theta < kPi) || !(theta_prime > 0.0 && theta_prime < kPi))
    throw DomainError("polar angles must lie in (0, pi)");
  if (n != n_prime) return 0.0;
  const double x = std::abs(eta_x * eta_x * std::sin(theta) * std::sin(theta_prime));
  return 4.0 * kPi * kPi * special::bessel_i(std::abs(n), x);
}

cplx azimuthal_pair_quadrature(int n, int n_prime, double eta_x, double theta, double theta_prime,
                               int points) {
  if (points < 2) throw DomainError("azimuthal quadrature needs at least 2 points");
  const double a = eta_x * eta_x * std::sin(theta) * std::sin(theta_prime);
  const double h = 2.0 * kPi / points;
  cplx sum{};
  for (int i = 0; i < points; ++i) {
    const double phi = -kPi + i * h;
    for (int j = 0; j < points; ++j) {
      const double phi_p = -kPi + j * h;
      const double arg = n * phi - n_prime * phi_p;
      sum += std::exp(a * std::cos(phi - phi_p)) * cplx{std::cos(arg), std::sin(arg)};
    }
  }
  return sum * h * h;
}

std::vector<double> bessel_weight_profile(double eta_x, int n_max) {
  if (!(eta_x >= 0.0)) throw DomainError("eta_x must be >= 0");
  if (n_max < 0) throw DomainError("n_max must be >= 0");
  const double x = eta_x * eta_x;
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  out[0] = 1.0;
  if (x == 0.0) return out;
  const double i0 = special::bessel_i_scaled(0, x);
  for (int n = 1; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = special::bessel_i_scaled(n, x) / i0;
  return out;
}

}  // namespace parabolic::trap
