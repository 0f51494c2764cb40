#pragma once

// Polya frequency functions: grid checks, randomized order checks, Laplace
// generators and the bridges to Polya ensembles on G and M.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polya/ensembles.hpp"
#include "polya/weights.hpp"

namespace polya {

struct PffWitness {
  std::vector<double> xs;
  std::vector<double> ys;
  double determinant = 0.0;
  double product = 0.0;  // Delta(x) Delta(y) det
};

struct PffVerdict {
  bool is_pff = true;
  int order_tested = 0;
  long grids_tested = 0;
  std::optional<PffWitness> witness;
};

/// Single evaluation of Delta(x) Delta(y) det[f(x_b - y_c)].
PffVerdict pff_check_grid(const Weight& f, int order, std::span<const double> xs,
                          std::span<const double> ys);

struct GridSampler {
  long trials = 10000;
  std::uint64_t seed = 0;
  double range = 0.0;  // half-width of the sampling window; 0 picks one from f
  int workers = 0;     // 0 uses worker_count()
  /// Without integrability checking order 2 does not imply higher orders, so
  /// every order 2..N is sampled instead (or f is rejected if strict).
  bool strict_integrability = false;
};

/// Randomized and structured search for a violation at n = 1 and n = N.
PffVerdict pff_order_check(const Weight& f, int order, const GridSampler& sampler = {});

enum class LaplaceSupport { half_line, real_line };

/// Density with Laplace transform e^{gamma s^2 - shift s} prod_j 1/(1 + delta_j s).
Weight make_laplace_pff(std::vector<double> deltas, double shift = 0.0, double gamma = 0.0,
                        LaplaceSupport support = LaplaceSupport::half_line);

/// x -> w(e^{-x}) e^{-x}.
Weight bridge_G(const Weight& w);

/// x -> (1/Gamma(nu+1)) int (x/y)^nu e^{-x/y} wt(y) dy/y. Warnings about the
/// boundary behaviour of wt at 0 are appended to `warnings` when given.
Weight lift_to_M(const Weight& wt, double nu, const QuadratureSpec& spec = {},
                 std::vector<std::string>* warnings = nullptr);

/// PE on M_0 with n = 2 from w(x) = exp(-1/(a - x)) on (0, a); throws if the
/// joint density turns negative on a 100 x 100 grid.
Ensemble beyond_theorem_example(double a, const QuadratureSpec& spec = {});

}  // namespace polya
