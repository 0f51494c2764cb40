#pragma once

// Adaptive Gauss-Kronrod quadrature with tail handling and an oscillatory
// zero-to-zero summation with Euler acceleration.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace polya {

enum class TailStrategy { doubling, exponential_map };

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  TailStrategy tail_cutoff_strategy = TailStrategy::doubling;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1)
      throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
  }
};

/// Raised when an integral is detected to diverge (or a strip condition fails).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  long evaluations = 0;
};

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(double)>;

/// Integral over [a, b]; either bound may be infinite. Throws DivergenceError
/// when the tail increments fail to shrink.
QuadResult<double> integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec = {});
QuadResult<std::complex<double>> integrate(const ComplexFn& f, double a, double b,
                                           const QuadratureSpec& spec = {});

/// Like integrate() but with a length scale for the first tail piece.
QuadResult<double> integrate_scaled(const RealFn& f, double a, double b, double scale,
                                    const QuadratureSpec& spec = {});
QuadResult<std::complex<double>> integrate_scaled(const ComplexFn& f, double a, double b,
                                                  double scale, const QuadratureSpec& spec = {});

/// Integral over [a, inf) of an oscillating integrand, summed between the
/// breakpoints a = b_0 < b_1 < ... supplied by `breakpoint(k)` (k >= 1).
/// Partial sums are Euler-accelerated when the pieces decay slowly.
QuadResult<double> integrate_oscillatory(const RealFn& f, double a,
                                         const std::function<double(int)>& breakpoint,
                                         const QuadratureSpec& spec = {});
QuadResult<std::complex<double>> integrate_oscillatory(const ComplexFn& f, double a,
                                                       const std::function<double(int)>& breakpoint,
                                                       const QuadratureSpec& spec = {});

/// Composite Gauss-Legendre rule on [a, b] with `panels` panels of `order`
/// points each; used for tensor-product integrals.
struct FixedRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
FixedRule gauss_legendre_rule(double a, double b, int panels, int order = 16);

}  // namespace polya
