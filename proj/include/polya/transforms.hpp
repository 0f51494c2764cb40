#pragma once

// Univariate Fourier, Hankel and Mellin transforms, the inverse Hankel
// transform, and the multivariate transforms of polynomial and Polya
// ensembles.

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polya/linalg.hpp"
#include "polya/quadrature.hpp"
#include "polya/spaces.hpp"
#include "polya/weights.hpp"

namespace polya {

struct TransformKind {
  enum Kind { Fourier, Hankel, Mellin };
  Kind kind = Fourier;
  double nu = 0.0;  // Hankel order, >= -1/2

  static TransformKind fourier() { return {Fourier, 0.0}; }
  static TransformKind hankel(double nu);
  static TransformKind mellin() { return {Mellin, 0.0}; }

  /// The transform that diagonalizes convolution on `space`.
  static TransformKind for_space(const MatrixSpace& space);
};

/// Fourier: int f(x) e^{isx} dx; Hankel: Gamma(nu+1) int f(x) J_nu(2 sqrt(xs)) (xs)^{-nu/2} dx;
/// Mellin: int f(x) x^{s-1} dx. Hankel accepts real s >= 0 only.
Complex univariate_transform(const TransformKind& kind, const Weight& f, Complex s,
                             const QuadratureSpec& spec = {});

/// k-th derivative of the transform in s (Hankel: real s only).
Complex univariate_transform_derivative(const TransformKind& kind, const Weight& f, Complex s, int k,
                                        const QuadratureSpec& spec = {});

/// (1/Gamma(nu+1)) int_0^inf F(s) (xs)^{nu/2} J_nu(2 sqrt(xs)) ds.
double inverse_hankel(const std::function<double(double)>& F, double nu, double x,
                      const QuadratureSpec& spec = {});

/// Product of normalized univariate transforms of a Polya weight.
Complex mv_transform_polya(const MatrixSpace& space, const Weight& w, std::span<const Complex> s,
                           const QuadratureSpec& spec = {});

/// C_n[w] of PE_M(w_1..w_n) via the Gram matrix of moments (Andreief).
double polynomial_normalization(const WeightVector& ws, const QuadratureSpec& spec = {});

/// Determinantal transform of PE_M(w_1..w_n). When `norm` is absent it is
/// computed by polynomial_normalization. Coincident real s are handled by
/// divided differences.
Complex mv_transform_polynomial(const MatrixSpace& space, const WeightVector& ws,
                                std::span<const Complex> s, std::optional<double> norm = std::nullopt,
                                const QuadratureSpec& spec = {});

using ScalarFn = std::function<double(double)>;

/// lhs = (1/n!) int det[phi_b(x_c)] det[psi_b(x_c)] dx by nested quadrature,
/// rhs = det[int phi_b psi_c]. Supports n <= 3.
std::pair<double, double> andreief_check(const std::vector<ScalarFn>& phi,
                                         const std::vector<ScalarFn>& psi, const Support& domain,
                                         const QuadratureSpec& spec = {});

}  // namespace polya
