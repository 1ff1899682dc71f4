#pragma once

#include <vector>

namespace parabolic::special {

/// Bessel function of the first kind J_n(x), integer order of either sign.
double bessel_j(int n, double x);

/// J_0(x) .. J_{n_max}(x) in one pass.
std::vector<double> bessel_j_sequence(int n_max, double x);

/// Exponentially scaled modified Bessel function e^{-|x|} I_n(x).
double bessel_i_scaled(int n, double x);

/// Modified Bessel function I_n(x). Overflows only where I_n itself does.
double bessel_i(int n, double x);

}  // namespace parabolic::special
