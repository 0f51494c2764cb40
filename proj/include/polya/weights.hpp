#pragma once

// One-point weights, the three derivative operators that generate Polya
// ensembles, built-in weight families and numerical admissibility checks.

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polya/jet.hpp"
#include "polya/quadrature.hpp"
#include "polya/spaces.hpp"

namespace polya {

struct Support {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Support real_line() { return {}; }
  static Support half_line() { return {0.0, std::numeric_limits<double>::infinity()}; }
  static Support interval(double a, double b) { return {a, b}; }

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool bounded_below() const { return std::isfinite(lo); }
  bool bounded_above() const { return std::isfinite(hi); }
};

/// A non-negative one-point weight. Outside its support the weight is zero.
///
/// Derivatives come from, in order of preference: an analytic Taylor hook
/// (exact up to any order), or central differences with Richardson
/// extrapolation (orders <= kMaxNumericOrder).
class Weight {
 public:
  using EvalFn = std::function<double(double)>;
  /// Returns f(x), f'(x), ..., f^(order)(x).
  using DerivFn = std::function<std::vector<double>(double x, int order)>;
  /// Returns (x^nu d x^(1-nu) d)^m f at x for one fixed nu.
  using OperatorFn = std::function<double(double x, int m)>;

  static constexpr int kMaxNumericOrder = 4;

  Weight() = default;
  Weight(std::string label, Support support, EvalFn eval, DerivFn deriv = nullptr);

  /// Weight whose value and derivatives come from one Taylor-jet expression.
  static Weight from_jet(std::string label, Support support, std::function<Jet(const Jet&)> expr);

  double operator()(double x) const;
  double value(double x) const { return (*this)(x); }

  /// f, f', ..., f^(order) at x (x inside the closed support).
  std::vector<double> derivatives(double x, int order) const;
  double derivative(double x, int k) const { return derivatives(x, k)[static_cast<std::size_t>(k)]; }

  bool has_analytic_derivatives() const { return static_cast<bool>(deriv_); }
  int max_derivative_order() const;

  const Support& support() const { return support_; }
  const std::string& label() const { return label_; }

  /// Attach a direct evaluator of the chiral operator for one nu (used by
  /// weights defined through transforms, where numeric derivatives would be
  /// too noisy).
  Weight with_operator_hook(double nu, OperatorFn hook) const;
  const OperatorFn* operator_hook(double nu) const;

 private:
  std::vector<double> numeric_derivatives(double x, int order) const;

  std::string label_;
  Support support_;
  std::shared_ptr<const EvalFn> eval_;
  DerivFn deriv_;
  std::optional<double> hook_nu_;
  std::shared_ptr<const OperatorFn> hook_;
};

using WeightVector = std::vector<Weight>;

/// w_j(x): (-d)^(j-1) w for H2, (-x d)^(j-1) w for G and
/// (x^nu d x^(1-nu) d)^(j-1) w for Mnu, H1 and H4.
double apply_derivative_op(const MatrixSpace& space, const Weight& w, int j, double x);

/// Derivative order of w needed for the j-th induced weight.
int required_derivative_order(const MatrixSpace& space, int j);

/// Induced weights w_1..w_n of the Polya ensemble PE_M(w), as Weights.
WeightVector induced_weights(const MatrixSpace& space, const Weight& w);

struct AdmissibilityReport {
  bool nonnegative = true;
  bool nonzero = true;
  bool integrable = true;
  bool boundary = true;
  bool derivatives_available = true;
  std::vector<std::string> diagnostics;

  bool pass() const { return nonnegative && nonzero && integrable && boundary && derivatives_available; }
};

AdmissibilityReport admissibility_check(const MatrixSpace& space, const Weight& w,
                                        const QuadratureSpec& spec = {});

/// Built-in families. Parameters are looked up by name; missing ones take
/// the defaults documented in the README.
using FamilyParams = std::map<std::string, double>;
Weight make_family(const std::string& name, const FamilyParams& params = {});
std::vector<std::string> family_names();

/// Sample points spread over the support (used by the checks and the CLI).
std::vector<double> support_samples(const Support& s, int count, double scale = 1.0);

}  // namespace polya
