#pragma once

// Matrix spaces, their spectral maps and the embeddings iota_M.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polya/linalg.hpp"

namespace polya {

enum class SpaceKind { G, H2, Mnu, H1even, H1odd, H4 };

/// One of the five symmetry classes with n eigenvalues / squared singular
/// values and chirality index nu.
class MatrixSpace {
 public:
  /// For Mnu, `nu` must be a non-negative integer; for the other kinds it is
  /// implied by the kind and any value passed is ignored.
  MatrixSpace(SpaceKind kind, int n, double nu = 0.0);

  static MatrixSpace parse(const std::string& kind, int n, double nu = 0.0);

  SpaceKind kind() const { return kind_; }
  int n() const { return n_; }
  double nu() const { return nu_; }

  /// True for the additive spaces with a Hankel-type transform (Mnu, H1, H4).
  bool is_hankel_class() const;
  /// True for spaces whose spectra live on (0, inf).
  bool positive_spectrum() const { return kind_ != SpaceKind::H2; }

  /// Dimension of the ambient (Hermitian) matrix: n for G and H2, 2n+nu for
  /// Mnu, 2n / 2n+1 for H1, 2n for H4.
  int ambient_dimension() const;

  std::string name() const;

  /// The same kind with n = 1.
  MatrixSpace with_n(int n) const { return MatrixSpace(kind_, n, nu_); }

 private:
  SpaceKind kind_;
  int n_;
  double nu_;
};

/// Spectral point in canonical (ascending) order.
class SpectralPoint {
 public:
  explicit SpectralPoint(std::vector<double> values);
  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

  /// Throws std::domain_error if an entry is not admissible for `space`.
  void validate_for(const MatrixSpace& space) const;

 private:
  std::vector<double> values_;
};

/// C_H2, C_G, C_Mnu, C_H1 or C_H4.
double space_constant(const MatrixSpace& space);

/// C*_{n,nu} = (1/n!) prod_{j<n} pi^(2j+nu+1) / (Gamma(j+nu+1) j!).
double chiral_constant(int n, double nu);

/// The ambient Hermitian representative iota_M(a) for Mnu, H1 and H4.
MatrixXc embed_iota(const MatrixSpace& space, std::span<const double> a);

/// A K-invariant matrix density, supplied as a function of the diagonal of
/// its representative: the eigenvalues a for H2, the singular values sqrt(a)
/// for every other kind (the diagonal blocks of iota_M(a)).
using RadialDensity = std::function<double(std::span<const double>)>;

/// Induced spectral density C_M (det a)^nu f_M(repr(a)) Delta_n(a)^2.
double spectral_map(const MatrixSpace& space, const RadialDensity& f, const SpectralPoint& a);

}  // namespace polya
