#pragma once

// Polynomial and Polya ensembles: normalization, joint densities,
// one-point marginals and the convolutions that preserve the class.

#include <functional>
#include <optional>
#include <vector>

#include "polya/quadrature.hpp"
#include "polya/spaces.hpp"
#include "polya/transforms.hpp"
#include "polya/weights.hpp"

namespace polya {

/// C_n[w] of the Polya ensemble PE_M(w), from univariate transforms.
double normalize(const MatrixSpace& space, const Weight& w, const QuadratureSpec& spec = {});

class Ensemble {
 public:
  static Ensemble polynomial(const MatrixSpace& space, WeightVector ws, const QuadratureSpec& spec = {});
  static Ensemble polya(const MatrixSpace& space, const Weight& w, const QuadratureSpec& spec = {});

  const MatrixSpace& space() const { return space_; }
  bool is_polya() const { return polya_weight_.has_value(); }
  const Weight& polya_weight() const { return *polya_weight_; }
  /// w_1..w_n (induced weights for the Polya form).
  const WeightVector& weights() const { return weights_; }
  double norm() const { return norm_; }

  /// w_b(x), zero outside the support.
  double weight_value(int b, double x) const;

 private:
  Ensemble(MatrixSpace space, WeightVector ws, std::optional<Weight> polya, double norm)
      : space_(space), weights_(std::move(ws)), polya_weight_(std::move(polya)), norm_(norm) {}

  MatrixSpace space_;
  WeightVector weights_;
  std::optional<Weight> polya_weight_;
  double norm_;
};

struct DensityValue {
  double value = 0.0;
  bool positivity_violation = false;
};

/// C_n Delta_n(a) det[w_b(a_c)], flagged when below -10 * tol.
DensityValue joint_density_checked(const Ensemble& e, const SpectralPoint& a, double tol = 1e-10);
double joint_density(const Ensemble& e, const SpectralPoint& a);

/// Density of one (unordered) eigenvalue / squared singular value.
std::function<double(double)> marginal_density(const Ensemble& e, const QuadratureSpec& spec = {});

struct ConvolutionKind {
  enum Kind { additive, multiplicative, hankel };
  Kind kind = additive;
  double nu = 0.0;

  static ConvolutionKind for_space(const MatrixSpace& space);
};

/// (f * g)(x), (f (*) g)(x) or (f *_nu g)(x).
double univariate_convolution(const ConvolutionKind& kind, const Weight& f, const Weight& g, double x,
                              const QuadratureSpec& spec = {});

/// The convolution as a Weight with memoized values and derivatives.
Weight convolve_weights(const ConvolutionKind& kind, const Weight& f, const Weight& g,
                        const QuadratureSpec& spec = {});

/// Weight of PE_M(w1) * PE_M(w2).
Weight convolve_polya(const MatrixSpace& space, const Weight& w1, const Weight& w2,
                      const QuadratureSpec& spec = {});

/// Weights of PE_M(w_1..w_n) * PE_M(w).
WeightVector convolve_mixed(const MatrixSpace& space, const WeightVector& ws, const Weight& w,
                            const QuadratureSpec& spec = {});

}  // namespace polya
