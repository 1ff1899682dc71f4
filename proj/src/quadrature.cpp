#include "parabolic/quadrature.hpp"

#include <map>
#include <mutex>

namespace parabolic {

void QuadratureConfig::validate() const {
  if (!(relative_tolerance > 0.0 && relative_tolerance <= 1e-2))
    throw DomainError("relative tolerance must lie in (0, 1e-2]");
  if (!(absolute_tolerance >= 0.0)) throw DomainError("absolute tolerance must be >= 0");
  if (max_subdivisions < 1) throw DomainError("max_subdivisions must be >= 1");
  if (!(truncation_u > 0.0)) throw DomainError("truncation U must be positive");
  if (!(taper_fraction >= 0.0 && taper_fraction < 1.0))
    throw DomainError("taper fraction must lie in [0, 1)");
  if (!(panel_phase > 0.0)) throw DomainError("panel phase must be positive");
}

double window_weight(double u, const QuadratureConfig& cfg) {
  const double au = std::abs(u);
  const double outer = cfg.truncation_u;
  if (au >= outer) return 0.0;
  const double width = cfg.taper_fraction * outer;
  const double inner = outer - width;
  if (au <= inner || width <= 0.0) return 1.0;
  return 0.5 * (1.0 + std::cos(kPi * (au - inner) / width));
}

PolarPoint PolarPoint::from_u(double u) {
  return {u, 1.0 / std::cosh(u), -std::tanh(u)};
}

PolarPoint PolarPoint::from_theta(double theta) {
  if (!(theta > 0.0 && theta < kPi)) throw DomainError("polar angle must lie in (0, pi)");
  return {std::log(std::tan(0.5 * theta)), std::sin(theta), std::cos(theta)};
}

const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

std::vector<QuadNode> spectral_nodes(double max_phase_rate, const QuadratureConfig& cfg,
                                     double refinement) {
  const auto& gl = gauss_legendre(16);
  const double span = 2.0 * cfg.truncation_u;
  const double rate = std::max(max_phase_rate, 1.0);
  const int panels = std::max(
      8, static_cast<int>(std::ceil(span * rate * refinement / cfg.panel_phase)));
  const double h = span / panels;
  std::vector<QuadNode> out;
  out.reserve(static_cast<std::size_t>(panels) * gl.nodes.size());
  for (int p = 0; p < panels; ++p) {
    const double c = -cfg.truncation_u + (p + 0.5) * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = c + 0.5 * h * gl.nodes[i];
      const double w = 0.5 * h * gl.weights[i] * window_weight(u, cfg);
      if (w > 0.0) out.push_back({PolarPoint::from_u(u), w});
    }
  }
  return out;
}

namespace detail {

const KronrodRule& gk15() {
  static const KronrodRule rule{
      {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
       0.207784955007898467600689403773245, 0.0},
      {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
       0.204432940075298892414161999234649, 0.209482141084727828012999174891714},
      {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
       0.381830050505118944950369775488975, 0.417959183673469387755102040816327}};
  return rule;
}

}  // namespace detail

}  // namespace parabolic
