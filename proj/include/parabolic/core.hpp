#pragma once

// Domain types and unit conventions shared by the whole library.
//
// Geometry is carried in dimensionless units of c/omega (omega = the atomic
// transition frequency), rates as ratios to the free-space rate Gamma_0.
// SI quantities only appear at the configuration boundary.

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace parabolic {

using cplx = std::complex<double>;
using RVec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

namespace constants {
inline constexpr double c = 299792458.0;                 // m/s
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double epsilon0 = 8.8541878128e-12;     // F/m
inline constexpr double atomic_mass = 1.66053906660e-27; // kg
}  // namespace constants

/// Raised for inputs that violate a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Circular polarization basis {e+ = ex + i ey, e- = ex - i ey, e0 = ez}
// ---------------------------------------------------------------------------

enum class Sigma : int { Minus = -1, Zero = 0, Plus = 1 };

inline constexpr std::array<Sigma, 3> kAllSigmas{Sigma::Plus, Sigma::Minus, Sigma::Zero};

constexpr int value(Sigma s) { return static_cast<int>(s); }

/// Storage slot of a sigma component: Plus -> 0, Minus -> 1, Zero -> 2.
constexpr std::size_t slot(Sigma s) {
  switch (s) {
    case Sigma::Plus: return 0;
    case Sigma::Minus: return 1;
    default: return 2;
  }
}

std::string to_string(Sigma s);
Sigma sigma_from_int(int v);

/// Cartesian components of the basis vector e_sigma.
CVec3 basis_vector(Sigma s);

/// Coefficients v_sigma such that v = sum_sigma e_sigma v_sigma.
CVec3 to_circular(const CVec3& cartesian);
CVec3 to_cartesian(const CVec3& circular);

/// A circular component together with its effective winding number n = m - sigma.
struct CircularComponent {
  Sigma sigma;
  int winding;

  static CircularComponent of(int m, Sigma s) { return {s, m - value(s)}; }
};

// ---------------------------------------------------------------------------
// Modes
// ---------------------------------------------------------------------------

enum class Family { EMode, BMode };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// Per-sigma Hertz potential coefficients, indexed by Sigma.
struct HertzCoefficients {
  std::array<cplx, 3> values{};

  cplx& operator[](Sigma s) { return values[slot(s)]; }
  const cplx& operator[](Sigma s) const { return values[slot(s)]; }

  bool all_zero() const;
  HertzCoefficients scaled(double factor) const;

  /// Hertz potential along the azimuthal unit vector of k-space:
  /// pi ~ i phi_hat e^{i m phi_k}. Default for every family.
  static HertzCoefficients azimuthal();
};

/// Mode label gamma = {omega, m, kappa, family} plus the sigma coefficients.
/// `omega` is dimensionless, relative to the reference (transition) frequency.
struct ModeParams {
  double omega = 1.0;
  int m = 0;
  double kappa = 0.0;
  Family family = Family::EMode;
  HertzCoefficients coeffs = HertzCoefficients::azimuthal();

  void validate() const;
  CircularComponent component(Sigma s) const { return CircularComponent::of(m, s); }
};

// ---------------------------------------------------------------------------
// Mirror, ion, trap, dipole
// ---------------------------------------------------------------------------

/// Explicit list of kappa values.
struct KappaList {
  std::vector<double> values;
};

/// Uniform grid kappa_j = anchor + j * step for j in [index_min, index_max].
struct KappaGrid {
  double anchor = 0.0;
  double step = 1.0;
  int index_min = 0;
  int index_max = 0;
};

using KappaRule = std::variant<KappaList, KappaGrid>;

/// Materialized kappa values of a rule, strictly increasing.
std::vector<double> kappa_values(const KappaRule& rule);

struct MirrorSpec {
  double focal_length = 0.0;  // metres
  KappaRule kappa_rule = KappaList{};

  void validate() const;
};

struct IonSpec {
  std::string name;
  double mass = 0.0;                   // kg
  double transition_wavelength = 0.0;  // metres

  void validate() const;
  double omega() const;  // rad/s
};

struct TrapSpec {
  RVec3 center{0.0, 0.0, 0.0};            // c/omega units
  RVec3 secular_frequencies{1.0, 1.0, 1.0};  // rad/s
  bool symmetric = true;

  void validate() const;
  bool on_axis() const { return center[0] == 0.0 && center[1] == 0.0; }
  TrapSpec at_z(double z) const;
};

struct DipoleSpec {
  RVec3 orientation{0.0, 0.0, 1.0};
  double magnitude = 1.0;  // C m, only used for absolute-rate reporting

  void validate() const;
  /// (d+, d-, d0) with d = sum_sigma e_sigma d_sigma.
  CVec3 circular() const;
  /// |d . e_sigma|^2, the weight multiplying the sigma component of the field.
  double weight(Sigma s) const;
};

DipoleSpec make_dipole(const RVec3& direction);

/// Circular components of a unit vector; throws DomainError if |d| deviates
/// from 1 by more than 1e-12.
CVec3 circular_components(const RVec3& d);

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

/// x * omega / c for a length in metres.
double to_dimensionless(double length_m, double omega);
double from_dimensionless(double length, double omega);

}  // namespace parabolic
