#pragma once

#include <complex>

namespace fracdamp {

/// |z| at which bessel_j switches from the power series to the large-argument expansion.
inline constexpr double kBesselSwitchRadius = 25.0;

/// Bessel function of the first kind J_nu(z) for real nu >= -1 and complex z off the
/// negative real axis (principal branch of z^nu).
std::complex<double> bessel_j(double nu, std::complex<double> z);

/// Ascending power series. Sums in 113-bit precision once |z| > 8, where the
/// alternating terms on the real axis exceed the result by many orders of magnitude.
std::complex<double> bessel_j_series(double nu, std::complex<double> z);

/// Hankel large-argument expansion
///   J_nu(z) = sqrt(2/(pi z)) [P(z) cos chi - Q(z) sin chi],  chi = z - nu pi/2 - pi/4,
/// summed until the terms stop decreasing or fall below machine precision. In the left half
/// plane it is evaluated at -z and continued with J_nu(z) = e^{+-i nu pi} J_nu(-z).
std::complex<double> bessel_j_asymptotic(double nu, std::complex<double> z);

/// The same expansion truncated after the 1/z^2 term (error O(|z|^-3)).
std::complex<double> bessel_j_three_term(double nu, std::complex<double> z);

/// n-th positive zero of J_nu on the real axis (n >= 1, nu > -1), by bracketing and bisection.
double bessel_j_zero(double nu, int n);

}  // namespace fracdamp
