#include "polya/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "polya/special.hpp"

namespace polya {

namespace {

// Breakpoints for oscillatory integrals on [a, inf): the union of the
// kernel's zero sequence and a geometric sequence a + unit*2^m, so that
// pieces never exceed the local scale when the zeros are sparse.
std::function<double(int)> merged_breakpoints(double a, std::function<double(int)> zero, double unit) {
  struct State {
    std::vector<double> points;
    int next_zero = 1;
    int next_geo = 0;
  };
  auto st = std::make_shared<State>();
  return [st, a, zero = std::move(zero), unit](int k) {
    while (static_cast<int>(st->points.size()) < k) {
      double z = zero(st->next_zero);
      while (z <= a) z = zero(++st->next_zero);
      const double g = a + unit * std::ldexp(1.0, st->next_geo);
      const double last = st->points.empty() ? a : st->points.back();
      double pick;
      if (z <= g) {
        pick = z;
        ++st->next_zero;
        if (z == g) ++st->next_geo;
      } else {
        pick = g;
        ++st->next_geo;
      }
      if (pick > last) st->points.push_back(pick);
    }
    return st->points[static_cast<std::size_t>(k - 1)];
  };
}

QuadratureSpec oscillatory_spec(const QuadratureSpec& spec) {
  QuadratureSpec s = spec;
  s.max_subdivisions = std::max(spec.max_subdivisions, 4000);
  return s;
}

// Integral of g over the support of f where g carries an e^{isx}
// oscillation with real frequency `freq` (0 for none).
Complex fourier_like(const Support& sup, const ComplexFn& g, double freq, const QuadratureSpec& spec) {
  const double lo = sup.lo;
  const double hi = sup.hi;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    return integrate(g, lo, hi, oscillatory_spec(spec)).value;
  }
  if (freq == 0.0) return integrate(g, lo, hi, spec).value;
  const double period = std::numbers::pi / std::abs(freq);
  auto half_line = [&](double start, double dir) {
    ComplexFn h = [&g, start, dir](double t) { return g(start + dir * t); };
    auto bp = merged_breakpoints(0.0, [period](int k) { return k * period; }, 1.0);
    return integrate_oscillatory(h, 0.0, bp, oscillatory_spec(spec)).value;
  };
  if (std::isfinite(lo)) return half_line(lo, 1.0);
  if (std::isfinite(hi)) return half_line(hi, -1.0);
  return half_line(0.0, 1.0) + half_line(0.0, -1.0);
}

void check_mellin_strip(const Weight& f, double re_s) {
  const Support& sup = f.support();
  if (sup.lo < 0.0) throw std::domain_error("Mellin transform needs a weight on the half line");
  if (sup.lo > 0.0) return;
  // Local power of f at 0 from two small sample points.
  const double x1 = 1e-10;
  const double x2 = 1e-6;
  const double f1 = std::abs(f(x1));
  const double f2 = std::abs(f(x2));
  if (f1 == 0.0 || f2 == 0.0) return;
  const double alpha = std::log(f1 / f2) / std::log(x1 / x2);
  if (alpha + re_s <= 1e-3)
    throw DivergenceError("s outside the Mellin strip: integrand behaves like x^" +
                          std::to_string(alpha + re_s - 1.0) + " at 0");
}

double hankel_real_s(Complex s) {
  if (s.imag() != 0.0) throw std::domain_error("Hankel transform is implemented for real s only");
  if (s.real() < 0.0) throw std::domain_error("Hankel transform needs s >= 0");
  return s.real();
}

Complex hankel_integral(const Weight& f, double nu, double s, int k, const QuadratureSpec& spec) {
  const Support& sup = f.support();
  if (sup.lo < 0.0) throw std::domain_error("Hankel transform needs a weight on the half line");
  RealFn g = [&f, nu, s, k](double x) {
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * std::pow(x, k) * hankel_kernel_derivative(nu, k, x * s);
  };
  if (s == 0.0 || std::isfinite(sup.hi)) {
    auto spec2 = oscillatory_spec(spec);
    return integrate(g, sup.lo, sup.hi, spec2).value;
  }
  const double order = nu + k;
  auto zero = [order, s](int m) {
    const double j = bessel_zero_estimate(order, m);
    return j * j / (4.0 * s);
  };
  auto bp = merged_breakpoints(sup.lo, zero, 1.0);
  return integrate_oscillatory(g, sup.lo, bp, oscillatory_spec(spec)).value;
}

Complex complex_vandermonde(std::span<const Complex> s) {
  Complex p(1.0, 0.0);
  for (std::size_t b = 0; b < s.size(); ++b)
    for (std::size_t c = b + 1; c < s.size(); ++c) p *= s[c] - s[b];
  return p;
}

bool all_real(std::span<const Complex> s) {
  return std::all_of(s.begin(), s.end(), [](Complex z) { return z.imag() == 0.0; });
}

}  // namespace

TransformKind TransformKind::hankel(double nu) {
  if (nu < -0.5) throw std::invalid_argument("Hankel order must be >= -1/2");
  return {Hankel, nu};
}

TransformKind TransformKind::for_space(const MatrixSpace& space) {
  switch (space.kind()) {
    case SpaceKind::H2: return fourier();
    case SpaceKind::G: return mellin();
    default: return hankel(space.nu());
  }
}

Complex univariate_transform_derivative(const TransformKind& kind, const Weight& f, Complex s, int k,
                                        const QuadratureSpec& spec) {
  if (k < 0) throw std::invalid_argument("negative derivative order");
  const Complex i(0.0, 1.0);
  switch (kind.kind) {
    case TransformKind::Fourier: {
      ComplexFn g = [&f, s, k, i](double x) -> Complex {
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        return fx * std::pow(i * x, k) * std::exp(i * s * x);
      };
      return fourier_like(f.support(), g, s.real(), spec);
    }
    case TransformKind::Mellin: {
      check_mellin_strip(f, s.real());
      ComplexFn g = [&f, s, k](double x) -> Complex {
        if (!(x > 0.0)) return 0.0;
        const double fx = f(x);
        if (fx == 0.0) return 0.0;
        const double lx = std::log(x);
        return fx * std::pow(lx, k) * std::exp((s - 1.0) * lx);
      };
      return integrate(g, f.support().lo, f.support().hi, spec).value;
    }
    case TransformKind::Hankel:
      return hankel_integral(f, kind.nu, hankel_real_s(s), k, spec);
  }
  return 0.0;
}

Complex univariate_transform(const TransformKind& kind, const Weight& f, Complex s,
                             const QuadratureSpec& spec) {
  return univariate_transform_derivative(kind, f, s, 0, spec);
}

double inverse_hankel(const std::function<double(double)>& F, double nu, double x,
                      const QuadratureSpec& spec) {
  if (nu < -0.5) throw std::invalid_argument("inverse_hankel: nu must be >= -1/2");
  if (x < 0.0) throw std::domain_error("inverse_hankel: x must be non-negative");
  if (x == 0.0 && nu < 0.0) throw std::domain_error("inverse_hankel: singular at x = 0 for nu < 0");
  const double g2 = std::exp(2.0 * std::lgamma(nu + 1.0));
  RealFn g = [&F, nu, x, g2](double s) {
    const double v = F(s);
    if (v == 0.0) return 0.0;
    const double z = x * s;
    const double zp = nu == 0.0 ? 1.0 : std::pow(z, nu);
    return v * zp * hankel_kernel(nu, z) / g2;
  };
  if (x == 0.0) return integrate(g, 0.0, std::numeric_limits<double>::infinity(), spec).value;
  auto zero = [nu, x](int m) {
    const double j = bessel_zero_estimate(nu, m);
    return j * j / (4.0 * x);
  };
  auto bp = merged_breakpoints(0.0, zero, 1.0);
  return integrate_oscillatory(g, 0.0, bp, oscillatory_spec(spec)).value;
}

Complex mv_transform_polya(const MatrixSpace& space, const Weight& w, std::span<const Complex> s,
                           const QuadratureSpec& spec) {
  const int n = space.n();
  if (static_cast<int>(s.size()) != n) throw std::invalid_argument("mv_transform_polya: wrong length");
  const TransformKind kind = TransformKind::for_space(space);
  Complex r(1.0, 0.0);
  if (space.kind() == SpaceKind::G) {
    const double shift = 0.5 * (n - 1);
    for (int j = 1; j <= n; ++j) {
      const Complex den = univariate_transform(kind, w, Complex(j, 0.0), spec);
      if (den == 0.0) throw std::domain_error("vanishing Mellin transform in the normalization");
      r *= univariate_transform(kind, w, s[static_cast<std::size_t>(j - 1)] - shift, spec) / den;
    }
    return r;
  }
  const Complex den = univariate_transform(kind, w, 0.0, spec);
  if (den == 0.0) throw std::domain_error("vanishing transform at 0 in the normalization");
  for (const Complex& sj : s) r *= univariate_transform(kind, w, sj, spec) / den;
  return r;
}

double polynomial_normalization(const WeightVector& ws, const QuadratureSpec& spec) {
  const int n = static_cast<int>(ws.size());
  if (n == 0) throw std::invalid_argument("empty weight vector");
  MatrixXr gram(n, n);
  for (int r = 0; r < n; ++r)
    for (int b = 0; b < n; ++b) {
      const Weight& w = ws[static_cast<std::size_t>(b)];
      RealFn g = [&w, r](double a) {
        const double v = w(a);
        return v == 0.0 ? 0.0 : std::pow(a, r) * v;
      };
      gram(r, b) = integrate(g, w.support().lo, w.support().hi, spec).value;
    }
  const double det = gram.determinant();
  if (!(std::isfinite(det)) || det == 0.0)
    throw std::domain_error("polynomial ensemble has a singular moment matrix");
  return 1.0 / (factorial(n) * det);
}

Complex mv_transform_polynomial(const MatrixSpace& space, const WeightVector& ws,
                                std::span<const Complex> s, std::optional<double> norm,
                                const QuadratureSpec& spec) {
  const int n = space.n();
  if (static_cast<int>(ws.size()) != n || static_cast<int>(s.size()) != n)
    throw std::invalid_argument("mv_transform_polynomial: wrong length");
  const double c = norm ? *norm : polynomial_normalization(ws, spec);
  const TransformKind kind = TransformKind::for_space(space);
  const double shift = space.kind() == SpaceKind::G ? 0.5 * (n - 1) : 0.0;
  double prefactor = c;
  for (int j = 1; j <= n; ++j) {
    prefactor *= factorial(j);
    if (space.is_hankel_class())
      prefactor *= std::exp(std::lgamma(j + space.nu()) - std::lgamma(1.0 + space.nu()));
  }
  const int pairs = n * (n - 1) / 2;
  Complex variant(1.0, 0.0);  // Delta(is)/Delta(s), Delta(-s)/Delta(s) or 1
  if (space.kind() == SpaceKind::H2) variant = std::pow(Complex(0.0, 1.0), pairs);
  if (space.is_hankel_class()) variant = (pairs % 2) ? -1.0 : 1.0;

  Complex ratio;
  if (all_real(s)) {
    std::vector<double> pts;
    for (const Complex& z : s) pts.push_back(z.real());
    std::function<Complex(int, double, int)> entry = [&](int b, double t, int q) {
      return univariate_transform_derivative(kind, ws[static_cast<std::size_t>(b)],
                                             Complex(t - shift, 0.0), q, spec) /
             factorial(q);
    };
    ratio = det_over_vandermonde<Complex>(n, pts, entry);
  } else {
    const Complex delta = complex_vandermonde(s);
    if (delta == 0.0) throw std::domain_error("coincident complex s without a confluent limit");
    MatrixXc m(n, n);
    for (int b = 0; b < n; ++b)
      for (int cidx = 0; cidx < n; ++cidx)
        m(b, cidx) = univariate_transform(kind, ws[static_cast<std::size_t>(b)],
                                          s[static_cast<std::size_t>(cidx)] - shift, spec);
    ratio = m.determinant() / delta;
  }
  return prefactor * ratio / variant;
}

std::pair<double, double> andreief_check(const std::vector<ScalarFn>& phi,
                                         const std::vector<ScalarFn>& psi, const Support& domain,
                                         const QuadratureSpec& spec) {
  const int n = static_cast<int>(phi.size());
  if (n < 1 || n > 3 || static_cast<int>(psi.size()) != n)
    throw std::invalid_argument("andreief_check supports 1 <= n <= 3 equal-length lists");
  MatrixXr gram(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      RealFn g = [&, b, c](double x) { return phi[static_cast<std::size_t>(b)](x) * psi[static_cast<std::size_t>(c)](x); };
      gram(b, c) = integrate(g, domain.lo, domain.hi, spec).value;
    }
  const double rhs = gram.determinant();

  QuadratureSpec inner = spec;
  inner.rel_tol = std::max(spec.rel_tol, 1e-9);
  inner.abs_tol = std::max(spec.abs_tol, 1e-12);
  std::vector<double> x(static_cast<std::size_t>(n));
  auto integrand = [&]() {
    MatrixXr a(n, n), b(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        a(r, c) = phi[static_cast<std::size_t>(r)](x[static_cast<std::size_t>(c)]);
        b(r, c) = psi[static_cast<std::size_t>(r)](x[static_cast<std::size_t>(c)]);
      }
    return a.determinant() * b.determinant();
  };
  std::function<double(int)> level = [&](int depth) -> double {
    if (depth == n) return integrand();
    RealFn g = [&, depth](double t) {
      x[static_cast<std::size_t>(depth)] = t;
      return level(depth + 1);
    };
    return integrate(g, domain.lo, domain.hi, inner).value;
  };
  const double lhs = level(0) / factorial(n);
  return {lhs, rhs};
}

}  // namespace polya
