#include <doctest.h>

#include <cmath>
#include <random>

#include "parabolic/fieldeval.hpp"
#include "parabolic/rates.hpp"

using namespace parabolic;
using namespace parabolic::rates;

namespace {

MirrorSpec list_mirror(std::vector<double> kappas) {
  MirrorSpec m;
  m.focal_length = 2.1e-3;
  m.kappa_rule = KappaList{std::move(kappas)};
  return m;
}

TrapModel trap_at(double z, double ex, double ez) {
  TrapModel t;
  t.center = {0.0, 0.0, z};
  t.eta = {ex, ex, ez};
  return t;
}

ModeParams mode_of(Family f, int m, double kappa) {
  ModeParams p;
  p.family = f;
  p.m = m;
  p.kappa = kappa;
  return p;
}

}  // namespace

TEST_SUITE("rates") {
  TEST_CASE("family labels") {
    const auto f = FamilySpec::parse("B1");
    CHECK(f.family == Family::BMode);
    CHECK(f.m_abs == 1);
    CHECK(f.label() == "B1");
    CHECK(f.m_values() == std::vector<int>{-1, 1});
    CHECK(FamilySpec::parse("E0").m_values() == std::vector<int>{0});
    CHECK_THROWS_AS(FamilySpec::parse("X2"), DomainError);
  }

  TEST_CASE("catalog construction") {
    const auto one = build_catalog(list_mirror({-0.64}), 1.0, {FamilySpec::parse("E0"), FamilySpec::parse("B0")}, 5);
    CHECK(one.modes.size() == 2);
    CHECK_FALSE(one.calibrated());
    CHECK_THROWS_AS(one.scale(), CalibrationError);

    MirrorSpec grid;
    grid.focal_length = 2.1e-3;
    grid.kappa_rule = KappaGrid{0.02, 0.62, -145, 145};
    const auto yb = build_catalog(grid, 1.0, {FamilySpec::parse("E0")}, 5);
    CHECK(yb.modes.size() == 291);
    bool has = false;
    for (const auto& e : yb.modes) has |= std::abs(e.mode.kappa - 0.02) < 1e-12;
    CHECK(has);
    const auto fine = refine_catalog(yb);
    CHECK(fine.modes.size() == 581);
    CHECK(fine.hash() != yb.hash());
    CHECK_THROWS_AS(refine_catalog(one), DomainError);
    CHECK_THROWS_AS(build_catalog(list_mirror({}), 1.0, {FamilySpec::parse("E0")}, 5), DomainError);
  }

  TEST_CASE("point-atom limit reproduces the on-axis field") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const RateOptions opts;
    for (int i = 0; i < 10; ++i) {
      const int m = static_cast<int>(u(rng) * 5) - 2;
      const Family fam = u(rng) < 0.5 ? Family::EMode : Family::BMode;
      const ModeParams mode = mode_of(fam, m, -6.0 + 12.0 * u(rng));
      const double z = -20.0 + 40.0 * u(rng);
      const Sigma s = sigma_from_int(std::clamp(m, -1, 1));
      const double t = mode_contribution(mode, s, trap_at(z, 0.0, 0.0), opts).value;
      const auto field = field::field_at_point(mode, field::CylPoint{0.0, 0.0, z}, opts.quad);
      const double e2 = std::norm(field.component(s));
      CHECK(t == doctest::Approx(e2).epsilon(1e-6).scale(1e-12));
    }
  }

  TEST_CASE("series and tensor routes agree") {
    RateOptions series;
    RateOptions tensor;
    tensor.route = Route::Tensor;
    for (const auto& [m, sigma] : {std::pair{0, Sigma::Zero}, {0, Sigma::Plus}, {2, Sigma::Minus}, {-1, Sigma::Zero}}) {
      const ModeParams mode = mode_of(Family::EMode, m, 1.3);
      const TrapModel t = trap_at(-4.0, 0.19, 0.13);
      const double a = mode_contribution(mode, sigma, t, series).value;
      const double b = mode_contribution(mode, sigma, t, tensor).value;
      CHECK(a >= 0.0);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }

  TEST_CASE("zero coefficients contribute nothing") {
    ModeParams mode = mode_of(Family::EMode, 0, 0.5);
    mode.coeffs = HertzCoefficients{};
    for (Sigma s : kAllSigmas) CHECK(mode_contribution(mode, s, trap_at(0.0, 0.2, 0.1), RateOptions{}).value == 0.0);
    auto cat = build_catalog(list_mirror({0.5}), 1.0, {FamilySpec::parse("E0")}, 5, HertzCoefficients{});
    CHECK_THROWS_AS(calibrate(cat, make_dipole({0, 0, 1}), trap_at(0.0, 0.2, 0.1), RateOptions{},
                              CalibrationWindow{20.0, 30.0, 3}),
                    CalibrationError);
  }

  TEST_CASE("reduced path refuses off-axis and anisotropic traps") {
    TrapModel t = trap_at(0.0, 0.2, 0.1);
    t.center[0] = 1.0;
    CHECK_THROWS_AS(mode_contribution(ModeParams{}, Sigma::Zero, t, RateOptions{}), DomainError);
    t = trap_at(0.0, 0.2, 0.1);
    t.eta.y = 0.3;
    CHECK_THROWS_AS(mode_contribution(ModeParams{}, Sigma::Zero, t, RateOptions{}), DomainError);
    const auto cat = build_catalog(list_mirror({0.5}), 1.0, {FamilySpec::parse("E0")}, 5);
    RateOptions no_brute;
    no_brute.allow_brute_force = false;
    CHECK_THROWS_AS(raw_rate(cat, make_dipole({0, 0, 1}), t, no_brute), DomainError);
  }

  TEST_CASE("brute-force coherence matrix matches the reduced path on the axis") {
    const ModeParams mode = mode_of(Family::EMode, 1, -0.64);
    const TrapModel t = trap_at(2.0, 0.19, 0.13);
    const auto m = coherence_matrix(mode, t, RateOptions{});
    for (Sigma s : kAllSigmas) {
      const double reduced = mode_contribution(mode, s, t, RateOptions{}).value;
      CHECK(m[slot(s)][slot(s)].real() == doctest::Approx(reduced).epsilon(1e-6).scale(1e-10));
    }
    // different windings do not interfere for an axisymmetric trap on the axis
    CHECK(std::abs(m[slot(Sigma::Plus)][slot(Sigma::Zero)]) < 1e-8);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(m[i][j] - std::conj(m[j][i])) < 1e-10);
  }

  TEST_CASE("selection rules") {
    const auto cat = build_catalog(list_mirror({-0.64, 0.02}), 1.0, {FamilySpec::parse("E0"), FamilySpec::parse("E1")}, 5);
    const TrapModel t = trap_at(0.0, 0.19, 0.13);
    const auto rz = raw_rate(cat, make_dipole({0, 0, 1}), t, RateOptions{});
    for (const auto& e : rz.entries) CHECK(e.sigma == Sigma::Zero);
    const auto rx = raw_rate(cat, make_dipole({1, 0, 0}), t, RateOptions{});
    for (const auto& e : rx.entries) CHECK(e.sigma != Sigma::Zero);
    RateOptions keep;
    keep.keep_zero_weight = true;
    const auto all = raw_rate(cat, make_dipole({0, 0, 1}), t, keep);
    CHECK(all.entries.size() == 3 * cat.modes.size());
    CHECK(all.total == rz.total);
    // n_max drops high-winding channels
    const auto narrow = build_catalog(list_mirror({0.02}), 1.0, {FamilySpec::parse("E1")}, 0);
    for (const auto& e : raw_rate(narrow, make_dipole({1, 0, 0}), t, keep).entries) CHECK(e.winding == 0);
  }

  TEST_CASE("total equals the exact sum of the entries") {
    const auto cat = build_catalog(list_mirror({-1.2, -0.64, 0.02, 0.6}), 1.0,
                                   {FamilySpec::parse("E1"), FamilySpec::parse("B1"), FamilySpec::parse("B0")}, 5);
    const auto r = raw_rate(cat, make_dipole({1, 0, 0}), trap_at(3.0, 0.19, 0.13), RateOptions{});
    std::vector<double> parts;
    for (const auto& e : r.entries) parts.push_back(e.contribution);
    CHECK(exact_sum(parts) == r.total);
    std::vector<double> fam;
    for (const auto& [label, v] : family_totals(cat, r)) fam.push_back(v);
    CHECK(exact_sum(fam) == doctest::Approx(r.total).epsilon(1e-15));
    const auto table = mode_table(r);
    double br = 0.0;
    for (const auto& row : table.rows) br += row.branching;
    CHECK(br == doctest::Approx(1.0));
    for (std::size_t i = 1; i < table.rows.size(); ++i) CHECK(table.rows[i - 1].kappa <= table.rows[i].kappa);
  }

  TEST_CASE("exact sum") {
    CHECK(exact_sum({1e16, 1.0, -1e16}) == 1.0);
    CHECK(exact_sum({0.1, 0.2, 0.3}) == exact_sum({0.3, 0.1, 0.2}));
    CHECK(exact_sum({}) == 0.0);
  }

  TEST_CASE("calibrated rates are invariant under coefficient and dipole scaling") {
    const CalibrationWindow window{40.0, 60.0, 3};
    const TrapModel t = trap_at(0.0, 0.19, 0.13);
    auto a = build_catalog(list_mirror({-0.64, 0.02, 0.66}), 1.0, {FamilySpec::parse("E0")}, 5);
    auto b = build_catalog(list_mirror({-0.64, 0.02, 0.66}), 1.0, {FamilySpec::parse("E0")}, 5,
                           HertzCoefficients::azimuthal().scaled(2.0));
    const auto d = make_dipole({0, 0, 1});
    calibrate(a, d, t, RateOptions{}, window);
    calibrate(b, d, t, RateOptions{}, window);
    CHECK(*b.calibration == doctest::Approx(*a.calibration / 4.0).epsilon(1e-12));
    const double ga = total_rate(a, d, t, RateOptions{}).total;
    CHECK(total_rate(b, d, t, RateOptions{}).total == doctest::Approx(ga).epsilon(1e-12));
    DipoleSpec big = d;
    big.magnitude = 5.0;
    CHECK(total_rate(a, big, t, RateOptions{}).total == ga);
  }

  TEST_CASE("thread count does not change results") {
    const auto cat = build_catalog(list_mirror({-1.2, -0.64, 0.02, 0.6, 1.3}), 1.0, {FamilySpec::parse("E0")}, 5);
    RateOptions one;
    RateOptions four;
    four.threads = 4;
    const auto a = raw_rate(cat, make_dipole({0, 0, 1}), trap_at(-2.0, 0.19, 0.13), one);
    const auto b = raw_rate(cat, make_dipole({0, 0, 1}), trap_at(-2.0, 0.19, 0.13), four);
    CHECK(a.total == b.total);
  }

  TEST_CASE("scan helpers") {
    CHECK(scan_points(1.0, 1.0, 0.0) == std::vector<double>{1.0});
    CHECK(scan_points(-1.0, 1.0, 0.5).size() == 5);
    CHECK_THROWS_AS(scan_points(1.0, 0.0, 1.0), DomainError);
    std::vector<RateResult> scan;
    for (double z : {-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0}) {
      RateResult r;
      r.center = {0, 0, z};
      r.total = 1.0 + 1.0 / (1.0 + z * z);
      scan.push_back(r);
    }
    CHECK(approaches_unity(scan));
    scan.back().total = 3.0;
    CHECK_FALSE(approaches_unity(scan));
  }

  TEST_CASE("free-space rate scaling") {
    const double w = 2.0 * kPi * constants::c / 369.5e-9;
    const double g = gamma0(w, 1e-29);
    CHECK(g > 0.0);
    CHECK(gamma0(w, 2e-29) == doctest::Approx(4.0 * g));
    CHECK(gamma0(2.0 * w, 1e-29) == doctest::Approx(8.0 * g));
  }
}
