#pragma once

// Quadrature over the Fourier sphere polar angle.
//
// Integrals over theta_k in (0, pi) are carried out in u = ln tan(theta_k/2),
// where sin(theta_k) = sech(u), cos(theta_k) = -tanh(u) and
// d(theta_k) = sin(theta_k) du. The kappa phase (tan theta_k/2)^{-2 i kappa}
// becomes the plain Fourier factor e^{-2 i kappa u}. The u axis is truncated
// to |u| <= U with a raised-cosine taper over the outer `taper_fraction` of
// the window.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "parabolic/core.hpp"

namespace parabolic {

/// Quadrature failed to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct QuadratureConfig {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-14;
  int max_subdivisions = 4000;
  double truncation_u = 12.0;
  double taper_fraction = 0.2;
  /// Phase (radians) spanned by one 16-point panel of a fixed node set.
  double panel_phase = 8.0;

  void validate() const;
};

/// Taper weight of the truncated u window: 1 inside, raised cosine to 0 at |u| = U.
double window_weight(double u, const QuadratureConfig& cfg);

/// A point on the Fourier sphere expressed through u = ln tan(theta/2).
struct PolarPoint {
  double u;
  double sin_theta;
  double cos_theta;

  static PolarPoint from_u(double u);
  static PolarPoint from_theta(double theta);
  double theta() const { return std::atan2(sin_theta, cos_theta); }
};

struct QuadNode {
  PolarPoint point;
  double weight;  // du weight times taper
};

/// Gauss-Legendre abscissae and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int n);

/// Composite 16-point Gauss-Legendre nodes on [-U, U] with panel widths chosen
/// so that a phase growing at `max_phase_rate` rad per unit u advances at most
/// `panel_phase / refinement` per panel. Weights include the taper; nodes with
/// zero weight are dropped.
std::vector<QuadNode> spectral_nodes(double max_phase_rate, const QuadratureConfig& cfg,
                                     double refinement = 1.0);

template <std::size_t N>
struct AdaptiveResult {
  std::array<cplx, N> value{};
  double error = 0.0;
  int subdivisions = 0;
};

namespace detail {

struct KronrodRule {
  std::array<double, 8> xk;   // Kronrod abscissae (positive half, last = 0)
  std::array<double, 8> wk;   // Kronrod weights
  std::array<double, 4> wg;   // Gauss weights for xk[1], xk[3], xk[5], xk[7]
};
const KronrodRule& gk15();

template <std::size_t N>
struct Panel {
  double a;
  double b;
  std::array<cplx, N> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <std::size_t N, class F>
Panel<N> gk15_panel(F& f, double a, double b) {
  const auto& r = gk15();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<cplx, N> kron{};
  std::array<cplx, N> gauss{};
  const auto fc = f(c);
  for (std::size_t i = 0; i < N; ++i) {
    kron[i] = r.wk[7] * fc[i];
    gauss[i] = r.wg[3] * fc[i];
  }
  for (int j = 0; j < 7; ++j) {
    const double dx = h * r.xk[static_cast<std::size_t>(j)];
    const auto f1 = f(c - dx);
    const auto f2 = f(c + dx);
    for (std::size_t i = 0; i < N; ++i) {
      const cplx s = f1[i] + f2[i];
      kron[i] += r.wk[static_cast<std::size_t>(j)] * s;
      if (j % 2 == 1) gauss[i] += r.wg[static_cast<std::size_t>(j / 2)] * s;
    }
  }
  Panel<N> p{a, b, {}, 0.0};
  for (std::size_t i = 0; i < N; ++i) {
    p.value[i] = h * kron[i];
    p.error = std::max(p.error, std::abs(h * (kron[i] - gauss[i])));
  }
  return p;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a vector of complex
/// integrands over [a, b], starting from `initial_panels` equal panels.
/// Throws QuadratureError when `max_subdivisions` is exhausted.
template <std::size_t N, class F>
AdaptiveResult<N> integrate_adaptive(F&& f, double a, double b, int initial_panels,
                                     const QuadratureConfig& cfg) {
  // same floor as QUADPACK: below 50 eps the error estimate is pure roundoff
  constexpr double kRoundoffFloor = 50.0 * 2.220446049250313e-16;
  if (cfg.relative_tolerance < kRoundoffFloor) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "relative tolerance %.3g is below the roundoff floor %.3g",
                  cfg.relative_tolerance, kRoundoffFloor);
    throw QuadratureError(msg, 0.0);
  }
  std::priority_queue<detail::Panel<N>> heap;
  const int n0 = std::max(1, initial_panels);
  const double w = (b - a) / n0;
  for (int k = 0; k < n0; ++k) {
    const double lo = a + k * w;
    const double hi = (k + 1 == n0) ? b : a + (k + 1) * w;
    heap.push(detail::gk15_panel<N>(f, lo, hi));
  }
  int subdivisions = 0;
  auto totals = [&heap]() {
    // priority_queue has no iteration; copy is cheap relative to integrand cost
    auto copy = heap;
    std::array<cplx, N> sum{};
    double err = 0.0;
    while (!copy.empty()) {
      const auto& p = copy.top();
      for (std::size_t i = 0; i < N; ++i) sum[i] += p.value[i];
      err += p.error;
      copy.pop();
    }
    return std::pair{sum, err};
  };
  auto [sum, err] = totals();
  while (true) {
    double scale = 0.0;
    for (const auto& v : sum) scale = std::max(scale, std::abs(v));
    const double target = std::max(cfg.absolute_tolerance, cfg.relative_tolerance * scale);
    if (err <= target) break;
    if (subdivisions >= cfg.max_subdivisions) {
      char msg[128];
      std::snprintf(msg, sizeof(msg), "adaptive quadrature did not converge (residual %.3g, target %.3g)",
                    err, target);
      throw QuadratureError(msg, err);
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15_panel<N>(f, worst.a, mid);
    auto right = detail::gk15_panel<N>(f, mid, worst.b);
    for (std::size_t i = 0; i < N; ++i) sum[i] += left.value[i] + right.value[i] - worst.value[i];
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
    if (subdivisions % 64 == 0) std::tie(sum, err) = totals();  // limit drift
  }
  std::tie(sum, err) = totals();
  return {sum, err, subdivisions};
}

}  // namespace parabolic
