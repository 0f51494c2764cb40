#include "polya/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polya {
namespace {

constexpr double kSeriesLimit = 20.0;

// Power series in extended precision; the alternating terms peak around
// e^z / z so long double keeps ~10 significant digits at the switch point.
long double series_j(double nu, double z) {
  const long double half = static_cast<long double>(z) / 2.0L;
  const long double q = -half * half;
  long double term = 1.0L / std::tgamma(static_cast<long double>(nu) + 1.0L);
  long double sum = term;
  for (int k = 1; k < 300; ++k) {
    term *= q / (static_cast<long double>(k) * (static_cast<long double>(k) + nu));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && k > 2) break;
  }
  if (nu == 0.0) return sum;
  return sum * std::pow(half, static_cast<long double>(nu));
}

double asymptotic_j(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double p = 0.0;
  double q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      const double odd = 2.0 * k - 1.0;
      term *= (mu - odd * odd) / (k * 8.0 * z);
    }
    const double mag = std::fabs(term);
    if (mag > last) break;
    last = mag;
    switch (k % 4) {
      case 0: p += term; break;
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
    }
    if (mag < 1e-17 * (std::fabs(p) + std::fabs(q))) break;
  }
  const double chi = z - (0.5 * nu + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(double nu, double z) {
  if (nu < -0.5) throw std::domain_error("bessel_j: order below -1/2");
  if (z < 0.0) throw std::domain_error("bessel_j: negative argument");
  if (z == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  if (z < kSeriesLimit) return static_cast<double>(series_j(nu, z));
  return asymptotic_j(nu, z);
}

double hankel_kernel(double nu, double z) {
  if (z < 0.0) throw std::domain_error("hankel_kernel: negative argument");
  const double arg = 2.0 * std::sqrt(z);
  if (arg < kSeriesLimit) {
    // sum_k (-z)^k Gamma(nu+1) / (k! Gamma(k+nu+1))
    long double term = 1.0L;
    long double sum = 1.0L;
    const long double mz = -static_cast<long double>(z);
    for (int k = 1; k < 300; ++k) {
      term *= mz / (static_cast<long double>(k) * (static_cast<long double>(k) + nu));
      sum += term;
      if (std::fabs(term) < 1e-22L * std::fabs(sum) && k > 2) break;
    }
    return static_cast<double>(sum);
  }
  return std::tgamma(nu + 1.0) * asymptotic_j(nu, arg) / std::pow(z, 0.5 * nu);
}

double hankel_kernel_derivative(double nu, int k, double z) {
  if (k == 0) return hankel_kernel(nu, z);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double ratio = std::exp(std::lgamma(nu + 1.0) - std::lgamma(nu + k + 1.0));
  return sign * ratio * hankel_kernel(nu + k, z);
}

double bessel_zero_estimate(double nu, int k) {
  const double beta = (k + 0.5 * nu - 0.25) * std::numbers::pi;
  const double mu = 4.0 * nu * nu;
  return beta - (mu - 1.0) / (8.0 * beta);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double superfactorial(int n) {
  double p = 1.0;
  for (int j = 0; j < n; ++j) p *= factorial(j);
  return p;
}

}  // namespace polya
