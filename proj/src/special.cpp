#include "parabolic/special.hpp"

#include <cmath>
#include <cstdlib>

#include "parabolic/core.hpp"

namespace parabolic::special {

namespace {

constexpr double kRescaleAbove = 1e200;
constexpr double kRescaleBy = 1e-200;

int miller_start(int n, double x) {
  const double top = std::max(static_cast<double>(n), x);
  int start = static_cast<int>(top + 20.0 + std::sqrt(60.0 * top));
  return start + (start % 2);  // even
}

// Downward recurrence for J_0..J_{n_max}, normalized with J_0 + 2 sum J_{2k} = 1.
std::vector<double> j_downward(int n_max, double x) {
  const int start = miller_start(n_max, x);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  double next = 0.0;
  double cur = 1e-300;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * cur - next;
    next = cur;
    cur = prev;  // now holds J_{k-1}
    if (k - 1 <= n_max) out[static_cast<std::size_t>(k - 1)] = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > kRescaleAbove) {
      cur *= kRescaleBy;
      next *= kRescaleBy;
      norm *= kRescaleBy;
      for (auto& v : out) v *= kRescaleBy;
    }
  }
  norm += cur;  // J_0 term
  for (auto& v : out) v /= norm;
  return out;
}

}  // namespace

std::vector<double> bessel_j_sequence(int n_max, double x) {
  if (n_max < 0) throw DomainError("bessel_j_sequence: n_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  const double ax = std::abs(x);
  if (ax == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (ax > n_max && n_max >= 1) {
    // Upward recurrence is stable below the turning point k ~ x.
    const auto seed = j_downward(1, ax);
    out[0] = seed[0];
    out[1] = seed[1];
    for (int k = 1; k < n_max; ++k)
      out[static_cast<std::size_t>(k + 1)] =
          (2.0 * k / ax) * out[static_cast<std::size_t>(k)] - out[static_cast<std::size_t>(k - 1)];
  } else {
    out = j_downward(n_max, ax);
  }
  if (x < 0.0) {
    for (int k = 1; k <= n_max; k += 2) out[static_cast<std::size_t>(k)] = -out[static_cast<std::size_t>(k)];
  }
  return out;
}

double bessel_j(int n, double x) {
  const int an = std::abs(n);
  const double v = bessel_j_sequence(an, x)[static_cast<std::size_t>(an)];
  return (n < 0 && an % 2 == 1) ? -v : v;
}

double bessel_i_scaled(int n, double x) {
  const int an = std::abs(n);  // I_{-n} = I_n
  const double ax = std::abs(x);
  double result = 0.0;
  if (ax == 0.0) {
    result = an == 0 ? 1.0 : 0.0;
  } else if (ax < 1.0) {
    // Power series, all terms positive.
    const double half = 0.5 * ax;
    double term = 1.0;
    for (int k = 1; k <= an; ++k) term *= half / k;
    double sum = term;
    const double h2 = half * half;
    for (int k = 1; k < 200; ++k) {
      term *= h2 / (static_cast<double>(k) * (k + an));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    result = sum * std::exp(-ax);
  } else {
    // Miller recurrence normalized with e^{x} = I_0 + 2 sum_{k>=1} I_k.
    const int start = an + 30 + static_cast<int>(12.0 * std::sqrt(ax));
    double next = 0.0;
    double cur = 1e-300;
    double norm = 0.0;
    double wanted = an == start ? cur : 0.0;
    for (int k = start; k >= 1; --k) {
      const double prev = (2.0 * k / ax) * cur + next;
      next = cur;
      cur = prev;  // I_{k-1}
      if (k - 1 == an) wanted = cur;
      if (k - 1 > 0) norm += 2.0 * cur;
      if (cur > kRescaleAbove) {
        cur *= kRescaleBy;
        next *= kRescaleBy;
        norm *= kRescaleBy;
        wanted *= kRescaleBy;
      }
    }
    norm += cur;
    result = wanted / norm;
  }
  if (x < 0.0 && an % 2 == 1) result = -result;
  return result;
}

double bessel_i(int n, double x) { return bessel_i_scaled(n, x) * std::exp(std::abs(x)); }

}  // namespace parabolic::special
