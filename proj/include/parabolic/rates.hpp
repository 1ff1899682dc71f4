#pragma once

// Spontaneous emission rate of a trapped ion summed over a catalog of modes.
//
// For a trap centred on the axis at Z the contribution of mode gamma to the
// sigma channel reduces to
//   T = int du du' sech^2(u) sech^2(u') conj(a(u)) K_n(u, u') a(u')
//   K_n = e^{-i w Z (cos - cos')} e^{-eta_z^2 (cos - cos')^2 / 2}
//         e^{-eta_x^2 (sin^2 + sin'^2) / 2} I_|n|(eta_x^2 sin sin'),
// which equals |E_sigma(0, 0, Z)|^2 for a point atom. Overall normalization is
// fixed by a single calibration constant C (far-field rate = Gamma_0).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parabolic/core.hpp"
#include "parabolic/quadrature.hpp"
#include "parabolic/trap.hpp"

namespace parabolic::rates {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mode family with a fixed |m|; "E0", "E1", "B1", "B0", ...
struct FamilySpec {
  Family family = Family::EMode;
  int m_abs = 0;

  std::string label() const;
  std::vector<int> m_values() const;  // {0} or {-|m|, +|m|}
  static FamilySpec parse(const std::string& label);
  bool operator==(const FamilySpec&) const = default;
};

struct CatalogEntry {
  ModeParams mode;
  std::size_t family_index = 0;
};

struct ModeCatalog {
  MirrorSpec mirror;
  std::vector<FamilySpec> families;
  std::vector<CatalogEntry> modes;  // sorted by kappa, then family, then m
  int n_max = 5;                    // components with |m - sigma| > n_max are dropped
  std::optional<double> calibration;

  bool calibrated() const { return calibration.has_value(); }
  double scale() const;  // throws CalibrationError when uncalibrated
  const std::string family_label(const CatalogEntry& e) const { return families[e.family_index].label(); }
  std::uint64_t hash() const;
};

/// One mode per kappa value, family and m. `coeffs` overrides the default
/// azimuthal Hertz coefficients.
ModeCatalog build_catalog(const MirrorSpec& mirror, double omega, const std::vector<FamilySpec>& families,
                          int n_max, const std::optional<HertzCoefficients>& coeffs = std::nullopt);

/// Same families with the kappa grid step halved (grid rules only).
ModeCatalog refine_catalog(const ModeCatalog& catalog);

/// Trap geometry in reduced units together with its Lamb-Dicke parameters.
struct TrapModel {
  RVec3 center{0.0, 0.0, 0.0};  // c/omega
  trap::LambDicke eta;

  static TrapModel from(const TrapSpec& trap, const IonSpec& ion);
  TrapModel at_z(double z) const;
  bool on_axis() const { return center[0] == 0.0 && center[1] == 0.0; }
};

enum class Route { Series, Tensor };

struct RateOptions {
  QuadratureConfig quad;
  int threads = 1;
  double refinement = 1.0;   // node density multiplier
  Route route = Route::Series;
  bool keep_zero_weight = false;  // list sigma channels whose dipole weight vanishes
  bool allow_brute_force = true;  // off-axis / anisotropic traps
  int brute_force_phi_points = 0; // 0 = automatic
};

struct ContributionDetail {
  double value = 0.0;         // raw T (before calibration)
  double truncation = 0.0;    // bound on the neglected series terms (Series route)
  bool clamped = false;       // a small negative value was set to zero
};

/// Raw contribution T of one sigma channel for a trap centred on the axis with
/// eta_x == eta_y.
ContributionDetail mode_contribution(const ModeParams& mode, Sigma sigma, const TrapModel& trap,
                                     const RateOptions& opts);

/// Full 3x3 sigma coherence matrix by brute-force quadrature over both
/// Fourier spheres; valid for any trap centre and eta. Indexed by slot().
std::array<std::array<cplx, 3>, 3> coherence_matrix(const ModeParams& mode, const TrapModel& trap,
                                                    const RateOptions& opts);

struct RateEntry {
  std::size_t mode_index = 0;
  ModeParams mode;
  std::string family;
  Sigma sigma = Sigma::Zero;
  int winding = 0;
  double weight = 0.0;        // |d . e_sigma|^2
  double t_raw = 0.0;
  double t = 0.0;             // C * t_raw, units of Gamma_0
  double contribution = 0.0;  // weighted share of the total
  bool clamped = false;
};

struct RateResult {
  RVec3 center{};
  double total = 0.0;  // Gamma / Gamma_0 (raw units when scale = 1)
  double scale = 1.0;
  bool brute_force = false;
  double max_truncation = 0.0;
  std::size_t clamped = 0;
  std::vector<RateEntry> entries;

  double z() const { return center[2]; }
};

/// Correctly rounded sum, independent of order.
double exact_sum(const std::vector<double>& values);

/// Rate with the calibration constant applied; throws CalibrationError when
/// the catalog is not calibrated.
RateResult total_rate(const ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                      const RateOptions& opts);

/// Rate with scale 1, usable before calibration.
RateResult raw_rate(const ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                    const RateOptions& opts);

struct CalibrationWindow {
  double z_min = 120.0;
  double z_max = 160.0;
  int samples = 21;
};

struct CalibrationReport {
  double constant = 0.0;
  double mean_raw = 0.0;
  std::vector<double> z;
  std::vector<double> raw;
};

/// Sets catalog.calibration so that the mean rate over the window is 1.
CalibrationReport calibrate(ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                            const RateOptions& opts, const CalibrationWindow& window = {});

/// Trap-centre positions z_min, z_min + step, ... <= z_max (one point when z_min == z_max).
std::vector<double> scan_points(double z_min, double z_max, double step);

std::vector<RateResult> rate_scan(const ModeCatalog& catalog, const DipoleSpec& dipole,
                                  const TrapModel& trap, const RateOptions& opts, double z_min,
                                  double z_max, double step);

/// |Gamma/Gamma_0 - 1| non-increasing over the outer `fraction` of the scan on both sides.
bool approaches_unity(const std::vector<RateResult>& scan, double fraction = 0.3);

struct ModeRow {
  double kappa = 0.0;
  std::string family;
  int m = 0;
  double contribution = 0.0;  // sum over sigma of weighted T, units of Gamma_0
  double branching = 0.0;     // contribution / total
};

struct ModeTable {
  double z = 0.0;
  double total = 0.0;
  std::vector<ModeRow> rows;  // sorted by kappa

  std::size_t count_significant(double fraction) const;
  const ModeRow* top() const;
};

ModeTable mode_table(const RateResult& result);
ModeTable mode_table(const ModeCatalog& catalog, const DipoleSpec& dipole, const TrapModel& trap,
                     const RateOptions& opts);

/// Per-family sums of a rate result, in catalog family order.
std::vector<std::pair<std::string, double>> family_totals(const ModeCatalog& catalog,
                                                          const RateResult& result);

/// Free-space rate omega^3 d^2 / (3 pi eps0 hbar c^3), SI.
double gamma0(double omega_ab, double dipole_magnitude);

}  // namespace parabolic::rates
