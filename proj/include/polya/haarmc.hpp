#pragma once

// Haar sampling on the classical groups, Monte Carlo estimates of the
// HCIZ, Berezin-Karpelevich and Gelfand-Naimark integrals and of the
// group-integral identities of Polya ensembles, and matrix ensemble samplers.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "polya/ensembles.hpp"
#include "polya/linalg.hpp"
#include "polya/quadrature.hpp"
#include "polya/spaces.hpp"
#include "polya/weights.hpp"

namespace polya {

struct McReport {
  Complex estimate{};
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

struct GroupKind {
  enum Kind { Unitary, Orthogonal, Symplectic, ProductUnitary };
  Kind kind = Unitary;
  int n = 1;   // Unitary(n), Orthogonal(n), Symplectic(2n), ProductUnitary(n, n+nu)
  int nu = 0;

  int dimension() const;
  /// The group K acting on the ambient matrices of a space.
  static GroupKind for_space(const MatrixSpace& space);
};

/// Symplectic form I_n (x) [[0,1],[-1,0]] preserved by Symplectic(2n).
MatrixXc symplectic_form(int n);

MatrixXc haar_sample(const GroupKind& g, std::mt19937_64& rng);
MatrixXc haar_sample(const GroupKind& g, std::uint64_t seed);

/// Monte Carlo mean of f over `n_samples` draws; chunked so that the result
/// is independent of the number of workers.
McReport monte_carlo(long n_samples, std::uint64_t seed,
                     const std::function<Complex(std::mt19937_64&)>& draw);

struct IntegralKind {
  enum Kind { hciz, bk, gn };
  Kind kind = hciz;
  SpaceKind space = SpaceKind::Mnu;  // for bk: Mnu, H1even, H1odd or H4
  double nu = 0.0;                   // for bk on Mnu

  static IntegralKind bk_on(const MatrixSpace& space);
  double bessel_order() const;
};

Complex group_integral_closed(const IntegralKind& kind, std::span<const double> a,
                              std::span<const double> s);
McReport group_integral_mc(const IntegralKind& kind, std::span<const double> a,
                           std::span<const double> s, long n_samples, std::uint64_t seed);

/// The n = 1 group average computed without sampling: for bk by quadrature
/// over the one relevant angle, for hciz and gn directly.
Complex group_integral_rank_one(const IntegralKind& kind, double a, double s,
                                const QuadratureSpec& spec = {});

/// Delta_n(-1/x) computed directly.
double vandermonde_neg_inverse(std::span<const double> x);

struct GroupIdentity {
  McReport lhs;
  Complex rhs;
};

GroupIdentity polya_group_identity(const MatrixSpace& space, const Weight& w, const SpectralPoint& x,
                                   const SpectralPoint& y, long n_samples, std::uint64_t seed,
                                   const QuadratureSpec& spec = {});

struct SampleFamily {
  enum Kind { gaussian, laguerre, ginibre, jacobi };
  Kind kind = gaussian;
  double eps = 1.0;  // gaussian variance scale
  int nu = 0;
  int mu = 0;

  static SampleFamily parse(const std::string& text);
};

/// Ambient matrix draw: Hermitian for the additive spaces, a general complex
/// matrix for G.
MatrixXc sample_matrix(const MatrixSpace& space, const SampleFamily& family, std::mt19937_64& rng);

/// Eigenvalues (H2) or squared singular values (otherwise) of an ambient matrix.
SpectralPoint spectrum_of(const MatrixSpace& space, const MatrixXc& m);

SpectralPoint sample_matrix_ensemble(const MatrixSpace& space, const SampleFamily& family,
                                     std::uint64_t seed);

/// The Polya weight whose ensemble the family samples.
Weight family_weight(const MatrixSpace& space, const SampleFamily& family);

/// Kolmogorov-Smirnov distance between pooled samples and a density.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& density,
                   const Support& support, const QuadratureSpec& spec = {});

/// Samples X1 + X2 (or X1 X2 on G), and compares the pooled spectrum with the
/// one-point marginal of the convolved Polya ensemble.
double empirical_convolution_check(const MatrixSpace& space, const SampleFamily& f1, const SampleFamily& f2,
                                   long n_samples, std::uint64_t seed, const QuadratureSpec& spec = {});

}  // namespace polya
