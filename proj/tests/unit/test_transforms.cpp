#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "polya/special.hpp"
#include "polya/transforms.hpp"

using namespace polya;
using std::numbers::pi;

namespace {

Weight fam(const std::string& name, FamilyParams p = {}) { return make_family(name, p); }

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("bessel and kernel spot values") {
  // Closed forms for half-integer orders, Boost for the rest.
  CHECK(bessel_j(0.5, 3.0) == doctest::Approx(std::sqrt(2 / (pi * 3.0)) * std::sin(3.0)).epsilon(1e-12));
  CHECK(bessel_j(-0.5, 30.0) == doctest::Approx(std::sqrt(2 / (pi * 30.0)) * std::cos(30.0)).epsilon(1e-12));
  for (double nu : {0.0, 1.0, 2.5})
    for (double z : {0.5, 7.0, 12.0, 19.5, 20.5, 25.0, 80.0})
      CHECK(bessel_j(nu, z) == doctest::Approx(boost::math::cyl_bessel_j(nu, z)).epsilon(1e-11).scale(1e-3));
  CHECK(hankel_kernel(1.3, 0.0) == 1.0);
  CHECK(hankel_kernel(0.0, 4.0) == doctest::Approx(bessel_j(0.0, 4.0)).epsilon(1e-14));
}

TEST_CASE("univariate transform examples") {
  CHECK(std::abs(univariate_transform(TransformKind::mellin(), fam("exponential"), 3.0) - 2.0) < 1e-9);
  CHECK(std::abs(univariate_transform(TransformKind::hankel(0.0), fam("exponential"), 0.0) - 1.0) < 1e-10);
  const Complex f0 = univariate_transform(TransformKind::fourier(), fam("gaussian_shifted"), 0.0);
  CHECK(f0.real() == doctest::Approx(2.5066283).epsilon(1e-7));
  CHECK(f0.real() == doctest::Approx(std::sqrt(2 * pi)).epsilon(1e-9));
}

TEST_CASE("closed-form transforms") {
  // Fourier of a shifted Gaussian: sqrt(2 pi) e^{i alpha s - s^2/2}.
  const double alpha = 0.7;
  for (double s : {0.3, 1.7, 4.0}) {
    const Complex want = std::sqrt(2 * pi) * std::exp(Complex(-0.5 * s * s, alpha * s));
    CHECK(rel(univariate_transform(TransformKind::fourier(), fam("gaussian_shifted", {{"alpha", alpha}}), s), want) <
          1e-8);
  }
  // Mellin of x e^{-x} is Gamma(s + 1); for complex s the oracle is the defining integral.
  for (Complex s : {Complex(0.5, 0.0), Complex(1.2, 3.0), Complex(2.5, -1.0)}) {
    const Weight w = fam("ginibre", {{"nu", 1.0}});
    auto integrand = [&](double x) { return std::exp(-x) * std::pow(Complex(x), s); };
    const Complex want = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
    CHECK(rel(univariate_transform(TransformKind::mellin(), w, s), want) < 1e-8);
  }
  CHECK(univariate_transform(TransformKind::mellin(), fam("ginibre", {{"nu", 1.0}}), 2.5).real() ==
        doctest::Approx(boost::math::tgamma(3.5)).epsilon(1e-9));
  // Hankel of x^nu e^{-x}: Gamma(nu + 1) e^{-s}.
  for (double nu : {-0.5, 0.0, 0.5, 2.0}) {
    const Weight w = fam("gaussian_radial", {{"nu", nu}, {"eps", 1.0}});
    for (double s : {0.0, 0.5, 3.0, 12.0}) {
      const double want = boost::math::tgamma(nu + 1) * std::exp(-s);
      CHECK(univariate_transform(TransformKind::hankel(nu), w, s).real() ==
            doctest::Approx(want).epsilon(1e-8).scale(0.1));
    }
  }
}

TEST_CASE("transform preconditions") {
  CHECK_THROWS(univariate_transform(TransformKind::mellin(), fam("exponential"), -0.5));
  CHECK_THROWS_AS(univariate_transform(TransformKind::hankel(0.0), fam("exponential"), Complex(1.0, 1.0)),
                  std::domain_error);
  CHECK_THROWS(TransformKind::hankel(-0.7));
}

TEST_CASE("Hankel transform at zero is the total mass") {
  for (const auto& [name, params, nu] :
       std::vector<std::tuple<std::string, FamilyParams, double>>{{"ginibre", {{"nu", 1.5}}, 0.0},
                                                                  {"jacobi", {{"n", 2}, {"mu", 1.0}}, 0.5},
                                                                  {"cauchy_lorentz", {{"n", 2}}, 2.0},
                                                                  {"bessel_k", {{"mu", 1.0}}, -0.5}}) {
    const Weight w = fam(name, params);
    RealFn f = [&](double x) { return w(x); };
    const double mass = integrate(f, w.support().lo, w.support().hi).value;
    CHECK(univariate_transform(TransformKind::hankel(nu), w, 0.0).real() == doctest::Approx(mass).epsilon(1e-10));
  }
}

TEST_CASE("inverse Hankel examples and round trips") {
  CHECK(inverse_hankel([](double s) { return std::exp(-s); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  CHECK(inverse_hankel([](double) { return 0.0; }, 0.0, 1.0) == 0.0);
  const double g = boost::math::tgamma(1.5);
  CHECK(inverse_hankel([g](double s) { return g * std::exp(-s); }, 0.5, 4.0) ==
        doctest::Approx(2 * std::exp(-4.0)).epsilon(1e-7));

  // Transform numerically, invert numerically.
  for (auto [nu, power] : {std::pair{0.0, 0.5}, std::pair{1.0, 1.0}, std::pair{0.5, 0.5}}) {
    const Weight w = fam("gaussian_radial", {{"nu", power}, {"eps", 0.8}});
    const auto kind = TransformKind::hankel(nu);
    auto F = [&](double s) { return univariate_transform(kind, w, s).real(); };
    for (double x : {0.4, 1.3}) CHECK(inverse_hankel(F, nu, x) == doctest::Approx(w(x)).epsilon(1e-5));
  }
}

TEST_CASE("Fourier round trip") {
  const Weight w = fam("gaussian_shifted", {{"alpha", 0.3}});
  for (double x : {-0.8, 0.5, 2.0}) {
    auto integrand = [&](double s) {
      return (univariate_transform(TransformKind::fourier(), w, s) * std::exp(Complex(0.0, -s * x))).real();
    };
    const double back =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -14.0, 14.0, 10, 1e-12) / (2 * pi);
    CHECK(back == doctest::Approx(w(x)).epsilon(1e-5));
  }
}

TEST_CASE("derivative identities") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  struct Item {
    MatrixSpace space;
    Weight w;
  };
  const std::vector<Item> items{
      {MatrixSpace(SpaceKind::H2, 2), fam("gaussian_shifted", {{"alpha", 0.5}})},
      {MatrixSpace(SpaceKind::H2, 2), fam("gumbel_deformed", {{"alpha", 2.0}})},
      {MatrixSpace(SpaceKind::G, 2), fam("ginibre", {{"nu", 1.0}})},
      {MatrixSpace(SpaceKind::G, 2), fam("lognormal", {{"sigma", 0.7}})},
      {MatrixSpace(SpaceKind::Mnu, 2, 0), fam("exponential")},
      {MatrixSpace(SpaceKind::Mnu, 2, 1), fam("gaussian_radial", {{"nu", 1.0}, {"eps", 0.5}})},
      {MatrixSpace(SpaceKind::H1odd, 2), fam("gaussian_radial", {{"nu", 0.5}})},
  };
  for (const auto& it : items) {
    CAPTURE(it.space.name());
    CAPTURE(it.w.label());
    const auto kind = TransformKind::for_space(it.space);
    const Weight dw = induced_weights(it.space, it.w)[1];
    for (int t = 0; t < 20; ++t) {
      Complex s = u(rng);
      if (kind.kind == TransformKind::Mellin) s += Complex(0.0, u(rng) - 2.0);
      const Complex base = univariate_transform(kind, it.w, s);
      Complex factor;
      switch (kind.kind) {
        case TransformKind::Fourier: factor = Complex(0.0, 1.0) * s; break;
        case TransformKind::Mellin: factor = s; break;
        case TransformKind::Hankel: factor = -s; break;
      }
      CHECK(rel(univariate_transform(kind, dw, s), factor * base) < 1e-6);
    }
  }
}

TEST_CASE("mv_transform_polya examples") {
  const Weight g = fam("gaussian_shifted");
  const std::vector<Complex> zero{0.0, 0.0};
  CHECK(std::abs(mv_transform_polya(MatrixSpace(SpaceKind::H2, 2), g, zero) - 1.0) < 1e-12);
  const std::vector<Complex> s0{1.5, 2.5};
  CHECK(std::abs(mv_transform_polya(MatrixSpace(SpaceKind::G, 2), fam("exponential"), s0) - 1.0) < 1e-10);
  const std::vector<Complex> s12{1.0, 2.0};
  CHECK(rel(mv_transform_polya(MatrixSpace(SpaceKind::H2, 2), g, s12), std::exp(-2.5)) < 1e-8);
}

TEST_CASE("mv transforms are one at the normalization point") {
  for (int n : {1, 2, 3}) {
    const std::vector<std::pair<MatrixSpace, Weight>> cases{
        {MatrixSpace(SpaceKind::H2, n), fam("gaussian_shifted", {{"alpha", 0.2}})},
        {MatrixSpace(SpaceKind::G, n), fam("ginibre", {{"nu", 0.5}})},
        {MatrixSpace(SpaceKind::Mnu, n, 1), fam("gaussian_radial", {{"nu", 1.0}})},
        {MatrixSpace(SpaceKind::H1even, n), fam("gaussian_radial", {{"nu", -0.5}})},
        {MatrixSpace(SpaceKind::H4, n), fam("gaussian_radial", {{"nu", 0.5}})},
    };
    for (const auto& [space, w] : cases) {
      CAPTURE(space.name());
      CAPTURE(n);
      std::vector<Complex> s(static_cast<std::size_t>(n), 0.0);
      if (space.kind() == SpaceKind::G)
        for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = j + 0.5 * (n + 1);
      CHECK(std::abs(mv_transform_polya(space, w, s) - 1.0) < 1e-9);
      CHECK(std::abs(mv_transform_polynomial(space, induced_weights(space, w), s) - 1.0) < 1e-7);
    }
  }
}

TEST_CASE("polynomial transform of induced weights factorizes") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  const std::vector<std::pair<MatrixSpace, Weight>> cases{
      {MatrixSpace(SpaceKind::H2, 2), fam("gaussian_shifted", {{"alpha", -0.4}})},
      {MatrixSpace(SpaceKind::H2, 3), fam("gaussian_shifted")},
      {MatrixSpace(SpaceKind::G, 2), fam("ginibre", {{"nu", 1.0}})},
      {MatrixSpace(SpaceKind::G, 3), fam("ginibre", {{"nu", 2.0}})},
      {MatrixSpace(SpaceKind::Mnu, 2, 0), fam("exponential")},
      {MatrixSpace(SpaceKind::H1odd, 2), fam("gaussian_radial", {{"nu", 0.5}, {"eps", 2.0}})},
  };
  for (const auto& [space, w] : cases) {
    CAPTURE(space.name());
    CAPTURE(space.n());
    const auto ws = induced_weights(space, w);
    for (int t = 0; t < 5; ++t) {
      std::vector<Complex> s;
      for (int j = 0; j < space.n(); ++j) {
        Complex v = u(rng);
        if (space.kind() == SpaceKind::G) v += Complex(space.n() - 1.0, u(rng) - 1.5);
        s.push_back(v);
      }
      CHECK(rel(mv_transform_polynomial(space, ws, s), mv_transform_polya(space, w, s)) < 1e-8);
    }
  }
}

TEST_CASE("polynomial transform at n = 1 and at coincident points") {
  const Weight w = fam("ginibre", {{"nu", 1.0}});
  for (auto space : {MatrixSpace(SpaceKind::G, 1), MatrixSpace(SpaceKind::Mnu, 1, 0), MatrixSpace(SpaceKind::H2, 1)}) {
    const auto kind = TransformKind::for_space(space);
    const Complex s = 1.7;
    const std::vector<Complex> one{s};
    const double norm = 1.0 / univariate_transform(kind, w, space.kind() == SpaceKind::G ? 1.0 : 0.0).real();
    CHECK(rel(mv_transform_polynomial(space, {w}, one, norm), norm * univariate_transform(kind, w, s)) < 1e-12);
  }
  // Coincident arguments take the confluent limit.
  MatrixSpace h2(SpaceKind::H2, 2);
  const Weight g = fam("gaussian_shifted");
  const auto ws = induced_weights(h2, g);
  const std::vector<Complex> same{0.8, 0.8};
  const std::vector<Complex> near{0.8, 0.8 + 1e-5};
  CHECK(rel(mv_transform_polynomial(h2, ws, same), mv_transform_polya(h2, g, same)) < 1e-8);
  CHECK(rel(mv_transform_polynomial(h2, ws, same), mv_transform_polynomial(h2, ws, near)) < 1e-4);
}

TEST_CASE("Andreief examples") {
  const Support half = Support::half_line();
  const ScalarFn e = [](double x) { return std::exp(-x); };
  const ScalarFn xe = [](double x) { return x * std::exp(-x); };
  auto [l1, r1] = andreief_check({e}, {e}, half);
  CHECK(l1 == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r1 == doctest::Approx(0.5).epsilon(1e-10));

  auto [l2, r2] = andreief_check({e, xe}, {e, xe}, half);
  CHECK(r2 == doctest::Approx(1.0 / 16).epsilon(1e-10));
  CHECK(l2 == doctest::Approx(1.0 / 16).epsilon(1e-7));

  auto [l3, r3] = andreief_check({e, xe}, {xe, e}, half);
  CHECK(r3 == doctest::Approx(-1.0 / 16).epsilon(1e-10));
  CHECK(l3 == doctest::Approx(-1.0 / 16).epsilon(1e-7));

  const ScalarFn x2e = [](double x) { return x * x * std::exp(-x); };
  auto [l4, r4] = andreief_check({e, xe, x2e}, {e, xe, x2e}, half);
  CHECK(l4 == doctest::Approx(r4).epsilon(1e-6));
}
