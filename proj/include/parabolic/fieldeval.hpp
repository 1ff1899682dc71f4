#pragma once

// Real-space electric field of a mode, E(r) = int dOmega_k e^{i w k.r} f(k).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parabolic/core.hpp"
#include "parabolic/quadrature.hpp"
#include "parabolic/spectrum.hpp"

namespace parabolic::field {

/// Cylindrical position in c/omega units.
struct CylPoint {
  double rho = 0.0;
  double phi = 0.0;
  double z = 0.0;

  RVec3 cartesian() const;
  static CylPoint from_cartesian(const RVec3& x);
};

struct FieldSample {
  CylPoint position;
  CVec3 cartesian{};  // E_x, E_y, E_z
  CVec3 circular{};   // E_sigma, indexed by slot(sigma)
  double residual = 0.0;

  double intensity() const;  // |E|^2
  cplx component(Sigma s) const { return circular[slot(s)]; }
};

/// Azimuthally reduced evaluation: each sigma component with winding n is
///   i^n e^{i n phi} int d(theta) sin(theta) a_sigma(theta) J_n(w rho sin theta) e^{i w z cos theta},
/// integrated adaptively in u. Throws QuadratureError on non-convergence.
FieldSample field_at_point(const ModeParams& mode, const CylPoint& position,
                           const QuadratureConfig& cfg);
FieldSample field_at_point(const spectrum::AngularSpectrum& spec, const CylPoint& position,
                           const QuadratureConfig& cfg);

/// Brute-force tensor quadrature over (u, phi_k) of the Cartesian spectrum.
/// `phi_points` = 0 picks a resolution from the Bessel argument range.
FieldSample field_2d_oracle(const ModeParams& mode, const CylPoint& position,
                            const QuadratureConfig& cfg, int phi_points = 0,
                            double refinement = 2.0);

/// Plane of maximal amplitude, Z = -2 kappa / w (c/omega units).
double localization_plane(double kappa, double omega = 1.0);

struct StationaryAngle {
  bool feasible = false;
  double sin2 = 0.0;   // -2 kappa / (w Z)
  double theta = 0.0;  // in (0, pi/2] when feasible
};

/// Solves sin^2(theta) = -2 kappa / (w Z); Z = 0 throws DomainError.
StationaryAngle stationary_phase_angle(double kappa, double z, double omega = 1.0);

/// sqrt(pi / (|w Z| sqrt(1 + 2 kappa / (w Z)))).
double stationary_phase_prefactor(double kappa, double z, double omega = 1.0);

struct StationaryPhaseEstimate {
  FieldSample sample;
  bool feasible = false;
  bool caustic = false;            // stationary points merge at theta = pi/2
  bool asymptotic_regime = false;  // |w Z| >= 20
  double theta = 0.0;
  double prefactor = 0.0;
};

/// Coherent sum over the two stationary points theta_sp and pi - theta_sp.
/// Infeasible or caustic geometry returns a zero field with the flag set.
StationaryPhaseEstimate stationary_phase_field(const ModeParams& mode, const CylPoint& position);

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

enum class ComponentSelector { X, Y, Z, Plus, Minus, Zero, Total };

ComponentSelector selector_from_string(const std::string& s);
std::string to_string(ComponentSelector c);
double selected_intensity(const FieldSample& s, ComponentSelector c);

struct Axis {
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  double at(int i) const;
  void validate(const char* name) const;
};

/// Rectangular grid in the (rho, z) half-plane (phi = 0) or the (x, z) plane.
struct PlaneGrid {
  enum class Kind { RhoZ, XZ };
  Kind kind = Kind::RhoZ;
  Axis transverse;
  Axis z;

  void validate() const;
  std::size_t size() const;
  CylPoint point(std::size_t index) const;  // row-major, z fastest
};

struct IntensityMap {
  PlaneGrid grid;
  ComponentSelector selector = ComponentSelector::Total;
  std::vector<FieldSample> samples;
  std::vector<double> intensity;  // |selected|^2
  std::vector<double> relative;   // intensity / max, 0 where invalid
  std::vector<std::uint8_t> valid;
  double max = 0.0;
  std::size_t failures = 0;
};

IntensityMap intensity_map(const ModeParams& mode, ComponentSelector selector, const PlaneGrid& grid,
                           const QuadratureConfig& cfg, int threads = 1);

struct VolumeGrid {
  Axis x;
  Axis y;
  Axis z;

  void validate() const;
  std::size_t size() const;
  RVec3 point(std::size_t index) const;  // x slowest, z fastest
};

struct IsoGrid {
  VolumeGrid grid;
  std::vector<double> intensity;  // |E|^2
  std::vector<std::uint8_t> valid;
  double max = 0.0;
  double level = 0.0;
  double threshold = 0.0;  // level * max
  std::size_t failures = 0;
};

IsoGrid isointensity_grid(const ModeParams& mode, double level, const VolumeGrid& grid,
                          const QuadratureConfig& cfg, int threads = 1);

struct AxisPeak {
  double z = 0.0;
  double intensity = 0.0;
};

/// On-axis maximum of |E_sigma|^2 for the winding-zero component (sigma = m),
/// by a scan with `step` followed by golden-section refinement.
AxisPeak on_axis_peak(const ModeParams& mode, double z_min, double z_max, double step,
                      const QuadratureConfig& cfg);

}  // namespace parabolic::field
