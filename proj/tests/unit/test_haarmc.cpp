#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"
#include "polya/haarmc.hpp"

using namespace polya;
using std::numbers::pi;

namespace {

double max_abs(const MatrixXc& m) { return m.cwiseAbs().maxCoeff(); }

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

// Bessel kernel normalized to 1 at 0: Gamma(nu+1) z^{-nu/2} J_nu(2 sqrt z).
double bessel_kernel(double nu, double z) {
  const double r = 2 * std::sqrt(z);
  return std::tgamma(nu + 1) * std::pow(z, -nu / 2) * boost::math::cyl_bessel_j(nu, r);
}

void check_within(const McReport& r, Complex want, double sigmas = 5.0) {
  CAPTURE(r.estimate);
  CAPTURE(want);
  CAPTURE(r.std_error);
  CHECK(std::abs(r.estimate - want) <= sigmas * r.std_error + 1e-12);
}

struct EnvGuard {
  explicit EnvGuard(const char* v) { setenv("PE_THREADS", v, 1); }
  ~EnvGuard() { unsetenv("PE_THREADS"); }
};

}  // namespace

TEST_CASE("Haar samples lie in their groups") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const MatrixXc u = haar_sample({GroupKind::Unitary, 3, 0}, rng);
    CHECK(max_abs(u.adjoint() * u - MatrixXc::Identity(3, 3)) <= 1e-12);
    const MatrixXc o = haar_sample({GroupKind::Orthogonal, 5, 0}, rng);
    CHECK(max_abs(o.imag()) == 0.0);
    CHECK(max_abs(o.transpose() * o - MatrixXc::Identity(5, 5)) <= 1e-12);
    const MatrixXc k = haar_sample({GroupKind::Symplectic, 2, 0}, rng);
    const MatrixXc j = symplectic_form(2);
    CHECK(max_abs(k.transpose() * j * k - j) <= 1e-12);
    CHECK(max_abs(k.adjoint() * k - MatrixXc::Identity(4, 4)) <= 1e-12);
    const MatrixXc p = haar_sample({GroupKind::ProductUnitary, 2, 1}, rng);
    CHECK(p.rows() == 5);
    CHECK(max_abs(p.topRightCorner(2, 3)) == 0.0);
    CHECK(max_abs(p.adjoint() * p - MatrixXc::Identity(5, 5)) <= 1e-12);
  }
  CHECK(symplectic_form(1)(0, 1) == Complex(1.0, 0.0));
  CHECK(symplectic_form(1)(1, 0) == Complex(-1.0, 0.0));
  CHECK(GroupKind::for_space(MatrixSpace(SpaceKind::H1odd, 2)).dimension() == 5);
  CHECK(GroupKind::for_space(MatrixSpace(SpaceKind::Mnu, 2, 3)).dimension() == 7);
  CHECK(GroupKind::for_space(MatrixSpace(SpaceKind::H4, 2)).dimension() == 4);
  CHECK_THROWS(haar_sample({GroupKind::Unitary, 0, 0}, rng));
}

TEST_CASE("Haar moments and invariance") {
  std::mt19937_64 rng(2);
  const GroupKind u4{GroupKind::Unitary, 4, 0};
  const int draws = 100000;
  double sum = 0.0, sq = 0.0;
  for (int t = 0; t < draws; ++t) {
    const double v = std::norm(haar_sample(u4, rng)(0, 0));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  const double sigma = std::sqrt((sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 0.25) <= 3 * sigma);

  // tr(VU) and tr(U) have the same law for fixed V.
  for (const GroupKind g : {GroupKind{GroupKind::Unitary, 3, 0}, GroupKind{GroupKind::Orthogonal, 3, 0},
                            GroupKind{GroupKind::Symplectic, 2, 0}}) {
    CAPTURE(int(g.kind));
    std::mt19937_64 r1(10), r2(20);
    const MatrixXc v = haar_sample(g, 99);
    std::vector<double> plain, shifted;
    for (int t = 0; t < draws; ++t) {
      plain.push_back(haar_sample(g, r1).trace().real());
      shifted.push_back((v * haar_sample(g, r2)).trace().real());
    }
    CHECK(ks_two_sample(plain, shifted) <= 0.02);
  }
}

TEST_CASE("closed-form group integrals") {
  const std::vector<double> a{1.0, 2.0}, s{3.0, 5.0};
  const Complex h = group_integral_closed({IntegralKind::hciz}, a, s);
  const Complex want = std::exp(Complex(0, 12)) * std::sin(1.0);
  CHECK(std::abs(h - want) <= 1e-12);

  for (double nu : {0.0, 0.5, 1.0, 2.5}) {
    IntegralKind bk{IntegralKind::bk, SpaceKind::Mnu, nu};
    for (auto [x, y] : {std::pair{0.3, 2.0}, std::pair{1.5, 4.0}, std::pair{2.0, 0.0}}) {
      const std::vector<double> av{x}, sv{y};
      const double oracle = y == 0.0 ? 1.0 : bessel_kernel(nu, x * y);
      CHECK(group_integral_closed(bk, av, sv).real() == doctest::Approx(oracle).epsilon(1e-10));
      CHECK(group_integral_rank_one(bk, x, y).real() == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
  IntegralKind h1{IntegralKind::bk, SpaceKind::H1even, 0.0};
  CHECK(group_integral_rank_one(h1, 0.7, 1.1).real() == doctest::Approx(std::cos(2 * std::sqrt(0.77))).epsilon(1e-14));
  CHECK(IntegralKind::bk_on(MatrixSpace(SpaceKind::H4, 2)).bessel_order() == 0.5);
  CHECK_THROWS(IntegralKind::bk_on(MatrixSpace(SpaceKind::H2, 2)));

  for (double s1 : {-0.5, 0.0, 2.3}) {
    const std::vector<double> av{1.7}, sv{s1};
    CHECK(group_integral_closed({IntegralKind::gn}, av, sv).real() == doctest::Approx(std::pow(1.7, s1 - 1)).epsilon(1e-12));
    CHECK(group_integral_rank_one({IntegralKind::gn}, 1.7, s1).real() == doctest::Approx(std::pow(1.7, s1 - 1)).epsilon(1e-12));
  }
  CHECK(std::abs(group_integral_rank_one({IntegralKind::hciz}, 0.4, 2.0) - std::exp(Complex(0, 0.8))) < 1e-15);

  const std::vector<double> one{1.0};
  CHECK_THROWS(group_integral_closed({IntegralKind::hciz}, a, one));
  const std::vector<double> neg{-1.0};
  CHECK_THROWS(group_integral_closed({IntegralKind::gn}, neg, one));
}

TEST_CASE("Monte Carlo group integrals match the closed forms") {
  const std::vector<double> a{1.0, 2.0}, s{3.0, 5.0};
  check_within(group_integral_mc({IntegralKind::hciz}, a, s, 100000, 7), group_integral_closed({IntegralKind::hciz}, a, s));

  // n = 1 has no randomness.
  const std::vector<double> a1{0.6}, s1{1.7};
  const auto r1 = group_integral_mc({IntegralKind::hciz}, a1, s1, 1000, 3);
  CHECK(std::abs(r1.estimate - std::exp(Complex(0, 0.6 * 1.7))) < 1e-14);
  CHECK(r1.std_error < 1e-14);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (auto space : {MatrixSpace(SpaceKind::Mnu, 2, 1), MatrixSpace(SpaceKind::Mnu, 2, 0),
                     MatrixSpace(SpaceKind::H1even, 2), MatrixSpace(SpaceKind::H1odd, 2), MatrixSpace(SpaceKind::H4, 2)}) {
    CAPTURE(space.name());
    const std::vector<double> av{u(rng), u(rng)}, sv{u(rng), u(rng)};
    const auto kind = IntegralKind::bk_on(space);
    check_within(group_integral_mc(kind, av, sv, 50000, 11), group_integral_closed(kind, av, sv));
  }

  const std::vector<double> ag{0.7, 1.9}, sg{1.5, 0.8};
  check_within(group_integral_mc({IntegralKind::gn}, ag, sg, 50000, 13), group_integral_closed({IntegralKind::gn}, ag, sg));
  const std::vector<double> a3{0.5, 1.2, 2.0}, s3{0.3, 1.0, 2.2};
  check_within(group_integral_mc({IntegralKind::hciz}, a3, s3, 50000, 17), group_integral_closed({IntegralKind::hciz}, a3, s3));

  CHECK_THROWS(group_integral_mc({IntegralKind::hciz}, a, s, 999, 1));
}

TEST_CASE("HCIZ estimate picks up a phase under shifts of a") {
  const std::vector<double> a{0.4, 1.3, 2.1}, s{0.5, -0.2, 1.0};
  const double c = 0.7;
  const std::vector<double> ac{a[0] + c, a[1] + c, a[2] + c};
  const auto r = group_integral_mc({IntegralKind::hciz}, a, s, 5000, 21);
  const auto rc = group_integral_mc({IntegralKind::hciz}, ac, s, 5000, 21);
  CHECK(std::abs(rc.estimate - std::exp(Complex(0, c * 1.3)) * r.estimate) < 1e-12);
}

TEST_CASE("Monte Carlo is deterministic and converges at the square-root rate") {
  const std::vector<double> a{1.0, 2.0}, s{3.0, 5.0};
  const auto r1 = group_integral_mc({IntegralKind::hciz}, a, s, 20000, 77);
  const auto r2 = group_integral_mc({IntegralKind::hciz}, a, s, 20000, 77);
  CHECK(r1.estimate == r2.estimate);
  CHECK(r1.std_error == r2.std_error);
  CHECK(r1.seed == 77);
  CHECK(r1.n_samples == 20000);
  McReport t1, t3;
  {
    EnvGuard g("1");
    t1 = group_integral_mc({IntegralKind::hciz}, a, s, 20000, 77);
  }
  {
    EnvGuard g("3");
    t3 = group_integral_mc({IntegralKind::hciz}, a, s, 20000, 77);
  }
  CHECK(t1.estimate == t3.estimate);
  CHECK(t1.estimate == r1.estimate);
  CHECK(group_integral_mc({IntegralKind::hciz}, a, s, 20000, 78).estimate != r1.estimate);

  double prev = 0.0;
  for (long n : {1000L, 10000L, 100000L}) {
    const double se = group_integral_mc({IntegralKind::hciz}, a, s, n, 5).std_error;
    if (prev > 0.0) CHECK(prev / se == doctest::Approx(std::sqrt(10.0)).epsilon(0.15));
    prev = se;
  }
}

TEST_CASE("vandermonde of negative inverses") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int n = 1; n <= 4; ++n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = u(rng);
    double det = 1.0;
    for (double v : x) det *= v;
    const double want = std::pow(det, 1 - n) * vandermonde(x);
    CHECK(vandermonde_neg_inverse(x) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("group integral identities of Polya ensembles") {
  const Weight g = make_family("gaussian_shifted", {});
  SUBCASE("H2 at n = 1 is exact") {
    const auto r = polya_group_identity(MatrixSpace(SpaceKind::H2, 1), g, SpectralPoint({0.3}), SpectralPoint({1.1}), 1000, 1);
    CHECK(r.lhs.estimate.real() == doctest::Approx(r.rhs.real()).epsilon(1e-10));
  }
  SUBCASE("H2") {
    const auto r = polya_group_identity(MatrixSpace(SpaceKind::H2, 2), g, SpectralPoint({0.0, 1.0}), SpectralPoint({1.0, 2.0}), 50000, 2);
    check_within(r.lhs, r.rhs);
    CHECK(std::abs(r.rhs) > 10 * r.lhs.std_error);
  }
  SUBCASE("M0") {
    const auto r = polya_group_identity(MatrixSpace(SpaceKind::Mnu, 2, 0), make_family("exponential", {}),
                                        SpectralPoint({0.4, 1.5}), SpectralPoint({0.9, 2.2}), 50000, 3);
    check_within(r.lhs, r.rhs);
    CHECK(std::abs(r.rhs) > 5 * r.lhs.std_error);
  }
  SUBCASE("G") {
    const auto r = polya_group_identity(MatrixSpace(SpaceKind::G, 2), make_family("ginibre", {{"nu", 1.0}}),
                                        SpectralPoint({0.5, 1.4}), SpectralPoint({0.8, 2.0}), 50000, 4);
    check_within(r.lhs, r.rhs);
    CHECK(std::abs(r.rhs) > 5 * r.lhs.std_error);
  }
}

TEST_CASE("matrix ensemble samplers") {
  const MatrixSpace h2(SpaceKind::H2, 2);
  const SampleFamily gauss = SampleFamily::parse("gaussian");
  CHECK(SampleFamily::parse("jacobi:nu=1,mu=2").mu == 2);
  CHECK(SampleFamily::parse("gaussian:eps=0.5").eps == 0.5);
  CHECK_THROWS(SampleFamily::parse("wishart"));
  CHECK_THROWS(SampleFamily::parse("gaussian:depth=1"));

  const int draws = 20000;
  std::vector<double> pooled;
  double tr = 0.0, tr2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto sp = sample_matrix_ensemble(h2, gauss, 1000 + t);
    CHECK(sp.values()[0] <= sp.values()[1]);
    const double v = sp.values()[0] + sp.values()[1];
    tr += v;
    tr2 += v * v;
    pooled.insert(pooled.end(), sp.values().begin(), sp.values().end());
  }
  const double mean = tr / draws;
  CHECK(std::abs(mean) <= 3 * std::sqrt((tr2 / draws - mean * mean) / draws));
  const Ensemble e = Ensemble::polya(h2, family_weight(h2, gauss));
  CHECK(ks_distance(pooled, marginal_density(e), Support::real_line()) <= 0.02);

  const MatrixSpace m0(SpaceKind::Mnu, 2, 0);
  for (int t = 0; t < 200; ++t) {
    const SpectralPoint sp = sample_matrix_ensemble(m0, gauss, t);
    for (double v : sp.values()) CHECK(v > 0.0);
  }

  CHECK(sample_matrix_ensemble(h2, gauss, 5).values() == sample_matrix_ensemble(h2, gauss, 5).values());
  CHECK_THROWS_AS(sample_matrix_ensemble(h2, SampleFamily::parse("jacobi"), 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_matrix_ensemble(MatrixSpace(SpaceKind::G, 2), gauss, 1), std::invalid_argument);
}

TEST_CASE("KS distance detects a wrong density") {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> xs(20000);
  for (auto& v : xs) v = ex(rng);
  CHECK(ks_distance(xs, [](double x) { return std::exp(-x); }, Support::half_line()) <= 0.02);
  CHECK(ks_distance(xs, [](double x) { return 2 * std::exp(-2 * x); }, Support::half_line()) > 0.1);
}

TEST_CASE("empirical convolution checks") {
  const auto g0 = SampleFamily::parse("ginibre");
  CHECK(empirical_convolution_check(MatrixSpace(SpaceKind::G, 2), g0, g0, 20000, 31) <= 0.02);
  const auto gauss = SampleFamily::parse("gaussian");
  CHECK(empirical_convolution_check(MatrixSpace(SpaceKind::H2, 2), gauss, gauss, 20000, 32) <= 0.02);
  CHECK(empirical_convolution_check(MatrixSpace(SpaceKind::Mnu, 2, 0), gauss, gauss, 20000, 33) <= 0.02);
  CHECK_THROWS(empirical_convolution_check(MatrixSpace(SpaceKind::G, 2), gauss, gauss, 100, 1));
}
