#include "polya/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polya/special.hpp"

namespace polya {

MatrixSpace::MatrixSpace(SpaceKind kind, int n, double nu) : kind_(kind), n_(n), nu_(0.0) {
  if (n < 1) throw std::invalid_argument("MatrixSpace: n must be positive");
  switch (kind) {
    case SpaceKind::G:
    case SpaceKind::H2:
      nu_ = 0.0;
      break;
    case SpaceKind::Mnu:
      if (nu < 0.0 || std::floor(nu) != nu)
        throw std::invalid_argument("MatrixSpace: nu must be a non-negative integer for Mnu");
      nu_ = nu;
      break;
    case SpaceKind::H1even:
      nu_ = -0.5;
      break;
    case SpaceKind::H1odd:
    case SpaceKind::H4:
      nu_ = 0.5;
      break;
  }
}

MatrixSpace MatrixSpace::parse(const std::string& kind, int n, double nu) {
  if (kind == "G") return {SpaceKind::G, n};
  if (kind == "H2") return {SpaceKind::H2, n};
  if (kind == "M" || kind == "Mnu") return {SpaceKind::Mnu, n, nu};
  if (kind.size() > 1 && kind[0] == 'M') return {SpaceKind::Mnu, n, std::stod(kind.substr(1))};
  if (kind == "H1even") return {SpaceKind::H1even, n};
  if (kind == "H1odd") return {SpaceKind::H1odd, n};
  if (kind == "H4") return {SpaceKind::H4, n};
  throw std::invalid_argument("unknown matrix space '" + kind + "'");
}

bool MatrixSpace::is_hankel_class() const {
  return kind_ == SpaceKind::Mnu || kind_ == SpaceKind::H1even || kind_ == SpaceKind::H1odd ||
         kind_ == SpaceKind::H4;
}

int MatrixSpace::ambient_dimension() const {
  switch (kind_) {
    case SpaceKind::G:
    case SpaceKind::H2: return n_;
    case SpaceKind::Mnu: return 2 * n_ + static_cast<int>(nu_);
    case SpaceKind::H1even:
    case SpaceKind::H4: return 2 * n_;
    case SpaceKind::H1odd: return 2 * n_ + 1;
  }
  return n_;
}

std::string MatrixSpace::name() const {
  switch (kind_) {
    case SpaceKind::G: return "G";
    case SpaceKind::H2: return "H2";
    case SpaceKind::Mnu: return "M" + std::to_string(static_cast<int>(nu_));
    case SpaceKind::H1even: return "H1even";
    case SpaceKind::H1odd: return "H1odd";
    case SpaceKind::H4: return "H4";
  }
  return "?";
}

SpectralPoint::SpectralPoint(std::vector<double> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
}

void SpectralPoint::validate_for(const MatrixSpace& space) const {
  if (size() != space.n()) throw std::invalid_argument("spectral point has wrong length");
  if (!space.positive_spectrum()) return;
  for (double v : values_)
    if (!(v > 0.0)) throw std::domain_error("squared singular values must be positive");
}

double chiral_constant(int n, double nu) {
  double logc = -std::lgamma(n + 1.0);
  for (int j = 0; j < n; ++j)
    logc += (2.0 * j + nu + 1.0) * std::log(std::numbers::pi) - std::lgamma(j + nu + 1.0) -
            std::lgamma(j + 1.0);
  return std::exp(logc);
}

double space_constant(const MatrixSpace& space) {
  const int n = space.n();
  switch (space.kind()) {
    case SpaceKind::H2: {
      double logc = -std::lgamma(n + 1.0);
      for (int j = 0; j < n; ++j) logc += j * std::log(std::numbers::pi) - std::lgamma(j + 1.0);
      return std::exp(logc);
    }
    case SpaceKind::G: return chiral_constant(n, 0.0);
    case SpaceKind::Mnu:
    case SpaceKind::H1even:
    case SpaceKind::H1odd: return chiral_constant(n, space.nu());
    case SpaceKind::H4: return chiral_constant(n, space.nu()) / std::pow(2.0, n * (n - 1.0));
  }
  return 0.0;
}

MatrixXc embed_iota(const MatrixSpace& space, std::span<const double> a) {
  const int n = space.n();
  if (static_cast<int>(a.size()) != n) throw std::invalid_argument("embed_iota: wrong length");
  for (double v : a)
    if (!(v > 0.0)) throw std::domain_error("embed_iota: entries must be positive");
  const int dim = space.ambient_dimension();
  MatrixXc m = MatrixXc::Zero(dim, dim);
  const Complex i(0.0, 1.0);
  switch (space.kind()) {
    case SpaceKind::G:
    case SpaceKind::H2:
      throw std::invalid_argument("embed_iota: only defined for Mnu, H1 and H4");
    case SpaceKind::Mnu:
      for (int j = 0; j < n; ++j) {
        m(j, n + j) = std::sqrt(a[static_cast<std::size_t>(j)]);
        m(n + j, j) = std::sqrt(a[static_cast<std::size_t>(j)]);
      }
      break;
    case SpaceKind::H1even:
    case SpaceKind::H1odd:
      for (int j = 0; j < n; ++j) {
        const double r = std::sqrt(a[static_cast<std::size_t>(j)]);
        m(2 * j, 2 * j + 1) = -i * r;
        m(2 * j + 1, 2 * j) = i * r;
      }
      break;
    case SpaceKind::H4:
      for (int j = 0; j < n; ++j) {
        const double r = std::sqrt(a[static_cast<std::size_t>(j)]);
        m(2 * j, 2 * j) = r;
        m(2 * j + 1, 2 * j + 1) = -r;
      }
      break;
  }
  return m;
}

double spectral_map(const MatrixSpace& space, const RadialDensity& f, const SpectralPoint& a) {
  a.validate_for(space);
  const auto& v = a.values();
  const double delta = vandermonde(v);
  const double c = space_constant(space);
  if (space.kind() == SpaceKind::H2) return c * f(v) * delta * delta;
  std::vector<double> roots(v.size());
  std::transform(v.begin(), v.end(), roots.begin(), [](double x) { return std::sqrt(x); });
  double det_pow = 1.0;
  if (space.kind() != SpaceKind::G)
    for (double x : v) det_pow *= std::pow(x, space.nu());
  return c * det_pow * f(roots) * delta * delta;
}

}  // namespace polya
