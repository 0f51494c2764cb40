#pragma once

// Special functions used by the transforms. Bessel J is self-contained
// (power series below |z| = 20, Hankel asymptotic expansion above).

namespace polya {

/// Bessel function of the first kind J_nu(z) for real z >= 0 and nu >= -1/2.
double bessel_j(double nu, double z);

/// Normalized Hankel kernel
///   Lambda_nu(z) = Gamma(nu+1) J_nu(2 sqrt(z)) / z^(nu/2),   z >= 0,
/// an entire function with Lambda_nu(0) = 1.
double hankel_kernel(double nu, double z);

/// k-th derivative of the Hankel kernel in z, using
///   Lambda_nu^(k)(z) = (-1)^k Gamma(nu+1)/Gamma(nu+k+1) Lambda_{nu+k}(z).
double hankel_kernel_derivative(double nu, int k, double z);

/// Approximate location of the k-th positive zero (k >= 1) of J_nu (McMahon).
double bessel_zero_estimate(double nu, int k);

/// prod_{j=0}^{n-1} j!
double superfactorial(int n);

double factorial(int n);

}  // namespace polya
