// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "polya/ensembles.hpp"
#include "polya/haarmc.hpp"
#include "polya/pff.hpp"
#include "polya/transforms.hpp"

using namespace polya;
using std::numbers::pi;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double gk(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, tol);
}

double integrate_2d(const std::function<double(double, double)>& f, double lo, double hi) {
  return gk([&](double x) { return gk([&](double y) { return f(x, y); }, lo, hi); }, lo, hi);
}

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// Deviation of an MC report from the exact value in standard errors.
double sigmas(const McReport& r, Complex exact) {
  const double d = std::abs(r.estimate - exact);
  return r.std_error > 0.0 ? d / r.std_error : (d <= 1e-12 ? 0.0 : inf);
}

Outcome normalization() {
  Outcome o;
  struct Case {
    MatrixSpace space;
    Weight w;
    double closed, lo;
  };
  const Case cases[] = {
      {MatrixSpace(SpaceKind::G, 2), make_family("ginibre", {{"nu", 1.0}}), 0.25, 0.0},
      {MatrixSpace(SpaceKind::H2, 2), make_family("gaussian_shifted"), 1 / (4 * pi), -inf},
      {MatrixSpace(SpaceKind::Mnu, 2, 0), make_family("exponential"), 0.5, 0.0}};
  double worst_mass = 0.0, worst_norm = 0.0;
  for (const auto& c : cases) {
    const Ensemble e = Ensemble::polya(c.space, c.w);
    const double mass =
        integrate_2d([&](double x, double y) { return joint_density(e, SpectralPoint({x, y})); }, c.lo, inf);
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    worst_norm = std::max(worst_norm, std::abs(normalize(c.space, c.w) - c.closed));
  }
  o.pass = worst_mass <= 1e-4 && worst_norm <= 1e-10;
  o.detail = fmt("max |mass - 1| = %.2e, max |C - closed| = %.2e", worst_mass, worst_norm);
  return o;
}

Outcome multiplication_theorems() {
  struct Case {
    const char* name;
    MatrixSpace space;
    Weight f, g;
    double s_lo, s_hi;
  };
  const Case cases[] = {
      {"additive", MatrixSpace(SpaceKind::H2, 2), make_family("gaussian_shifted", {{"alpha", 0.3}}),
       make_family("cosh_power", {{"mu", 3.0}}), -2.0, 2.0},
      {"multiplicative", MatrixSpace(SpaceKind::G, 2), make_family("ginibre", {{"nu", 1.0}}),
       make_family("ginibre", {{"nu", 0.5}}), 0.5, 3.0},
      {"hankel nu=0", MatrixSpace(SpaceKind::Mnu, 2, 0), make_family("exponential"),
       make_family("ginibre", {{"nu", 1.0}}), 0.0, 3.0},
      {"hankel nu=1/2", MatrixSpace(SpaceKind::H4, 2), make_family("gaussian_radial", {{"nu", 0.5}}),
       make_family("ginibre", {{"nu", 1.0}}), 0.0, 3.0}};
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::string where;
  for (const auto& c : cases) {
    const TransformKind kind = TransformKind::for_space(c.space);
    const Weight fg = convolve_polya(c.space, c.f, c.g);
    std::uniform_real_distribution<double> u(c.s_lo, c.s_hi);
    for (int i = 0; i < 20; ++i) {
      const Complex s(u(rng), 0.0);
      const Complex lhs = univariate_transform(kind, fg, s);
      const Complex rhs = univariate_transform(kind, c.f, s) * univariate_transform(kind, c.g, s);
      const double e = rel(lhs, rhs);
      if (e > worst) {
        worst = e;
        where = c.name;
      }
    }
  }
  Outcome o;
  o.pass = worst <= 1e-6;
  o.detail = fmt("max relative error %.2e over 4 kinds x 20 s", worst) + " (worst: " + where + ")";
  return o;
}

Outcome hankel_semigroup() {
  const ConvolutionKind kind{ConvolutionKind::hankel, 0.0};
  double worst = 0.0;
  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}, std::pair{0.5, 3.0}}) {
    const Weight f = Weight::from_jet("exp_a", Support::half_line(), [a](const Jet& x) { return exp(x * (-1 / a)) / a; });
    const Weight g = Weight::from_jet("exp_b", Support::half_line(), [b](const Jet& x) { return exp(x * (-1 / b)) / b; });
    const Weight fg = convolve_weights(kind, f, g);
    const double c = a + b;
    for (int i = 1; i <= 50; ++i) {
      const double x = 5.0 * c * i / 50;
      const double want = std::exp(-x / c) / c;
      worst = std::max(worst, std::abs(fg(x) - want) / want);
    }
  }
  Outcome o;
  o.pass = worst <= 1e-5;
  o.detail = fmt("max relative error %.2e on 3 x 50 points", worst);
  return o;
}

Outcome hciz() {
  const std::vector<double> a{1.0, 2.0}, s{3.0, 5.0};
  const Complex exact = std::exp(Complex(0, 12)) * std::sin(1.0);
  const auto r2 = group_integral_mc({IntegralKind::hciz}, a, s, 1000000, 7);
  const double d2 = sigmas(r2, exact);
  const double closed_err = std::abs(group_integral_closed({IntegralKind::hciz}, a, s) - exact);

  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::vector<double> a3{u(rng), u(rng), u(rng)}, s3{u(rng), u(rng), u(rng)};
  const auto r3 = group_integral_mc({IntegralKind::hciz}, a3, s3, 1000000, 8);
  const double d3 = sigmas(r3, group_integral_closed({IntegralKind::hciz}, a3, s3));
  Outcome o;
  o.pass = d2 <= 5.0 && d3 <= 5.0 && closed_err <= 1e-12;
  o.detail = fmt("n=2: %.2f sigma, n=3 random: %.2f sigma, closed form off by %.1e", d2, d3, closed_err);
  return o;
}

Outcome bk_gn() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  double worst = 0.0;
  for (auto space : {MatrixSpace(SpaceKind::Mnu, 2, 0), MatrixSpace(SpaceKind::Mnu, 2, 1),
                     MatrixSpace(SpaceKind::H1even, 2), MatrixSpace(SpaceKind::H1odd, 2), MatrixSpace(SpaceKind::H4, 2)}) {
    const std::vector<double> a{u(rng), u(rng)}, s{u(rng), u(rng)};
    const auto kind = IntegralKind::bk_on(space);
    worst = std::max(worst, sigmas(group_integral_mc(kind, a, s, 1000000, 100 + space.ambient_dimension()),
                                   group_integral_closed(kind, a, s)));
  }
  const std::vector<double> ag{u(rng), u(rng)}, sg{u(rng) - 1.0, u(rng) - 1.0};
  worst = std::max(worst, sigmas(group_integral_mc({IntegralKind::gn}, ag, sg, 1000000, 200),
                                 group_integral_closed({IntegralKind::gn}, ag, sg)));

  double rank_one = 0.0;
  for (double nu : {0.0, 1.0, 2.0})
    for (auto [a, s] : {std::pair{0.4, 1.3}, std::pair{2.0, 3.5}}) {
      const IntegralKind kind{IntegralKind::bk, SpaceKind::Mnu, nu};
      const std::vector<double> av{a}, sv{s};
      const double bessel = std::tgamma(nu + 1) * std::pow(a * s, -nu / 2) * boost::math::cyl_bessel_j(nu, 2 * std::sqrt(a * s));
      rank_one = std::max({rank_one, std::abs(group_integral_rank_one(kind, a, s) - bessel),
                           std::abs(group_integral_closed(kind, av, sv) - bessel)});
      const std::vector<double> gv{s - 1.0};
      const double power = std::pow(a, s - 2.0);
      rank_one = std::max({rank_one, std::abs(group_integral_rank_one({IntegralKind::gn}, a, s - 1.0) - power),
                           std::abs(group_integral_closed({IntegralKind::gn}, av, gv) - power)});
    }
  Outcome o;
  o.pass = worst <= 5.0 && rank_one <= 1e-10;
  o.detail = fmt("n=2 worst %.2f sigma over 5 BK spaces and GN, n=1 max error %.1e", worst, rank_one);
  return o;
}

Outcome group_identity() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  double worst = 0.0, weakest = inf;
  struct Case {
    MatrixSpace space;
    Weight w;
    double shift;
  };
  const Case cases[] = {{MatrixSpace(SpaceKind::H2, 2), make_family("gaussian_shifted"), -1.0},
                        {MatrixSpace(SpaceKind::Mnu, 2, 0), make_family("exponential"), 0.0}};
  for (const auto& c : cases)
    for (int pair = 0; pair < 2; ++pair) {
      const SpectralPoint x({u(rng) + c.shift, u(rng) + c.shift});
      const SpectralPoint y({u(rng) + c.shift, u(rng) + c.shift});
      const auto id = polya_group_identity(c.space, c.w, x, y, 100000, 300 + pair);
      worst = std::max(worst, sigmas(id.lhs, id.rhs));
      weakest = std::min(weakest, std::abs(id.rhs) / id.lhs.std_error);
    }
  Outcome o;
  o.pass = worst <= 5.0;
  o.detail = fmt("worst %.2f sigma over 4 point pairs (|rhs| >= %.0f sigma)", worst, weakest);
  return o;
}

Outcome pff_suite() {
  GridSampler g;
  g.trials = 10000;
  g.seed = 1;
  struct Case {
    Weight w;
    int order;
    bool expect_pff;
  };
  const Case cases[] = {{make_family("gaussian_shifted"), 4, true},
                        {make_family("heaviside"), 4, true},
                        {make_family("power_heaviside", {{"nu", 1.5}}), 3, true},
                        {make_family("gumbel_deformed", {{"alpha", 1.0}}), 4, true},
                        {make_family("indicator_gap"), 2, false},
                        {make_family("power_heaviside", {{"nu", 1.5}}), 4, false}};
  int right = 0;
  std::string wrong;
  for (const auto& c : cases) {
    const PffVerdict v = pff_order_check(c.w, c.order, g);
    const bool ok = v.is_pff == c.expect_pff && (c.expect_pff || v.witness.has_value());
    if (ok) ++right;
    else wrong += " " + c.w.label();
  }
  Outcome o;
  o.pass = right == 6;
  o.detail = fmt("%.0f of 6 verdicts as expected", right) + (wrong.empty() ? "" : "; wrong:" + wrong);
  return o;
}

Outcome bridges() {
  double bridge = 0.0;
  for (double nu : {0.0, 1.0, 2.5}) {
    const Weight b = bridge_G(make_family("ginibre", {{"nu", nu}}));
    const Weight gum = make_family("gumbel_deformed", {{"alpha", nu + 1}});
    for (double x = -4.0; x <= 4.0; x += 0.5) bridge = std::max(bridge, std::abs(b(x) - gum(x)));
  }
  double lift = 0.0;
  const Weight l0 = lift_to_M(make_family("exponential"), 0.0);
  for (int i = 0; i <= 40; ++i) {
    const double x = 0.01 * std::pow(2000.0, i / 40.0);
    const double want = 2 * boost::math::cyl_bessel_k(0, 2 * std::sqrt(x));
    lift = std::max(lift, std::abs(l0(x) - want) / want);
  }
  double laplace = 0.0;
  for (double nu : {0.0, 1.0}) {
    // Laplace transforms of e^{-y} and y e^{-y}.
    const Weight base = nu == 0.0 ? make_family("exponential") : make_family("ginibre", {{"nu", 1.0}});
    const Weight l = lift_to_M(base, nu);
    for (int i = 0; i < 10; ++i) {
      const double s = 0.1 + 0.5 * i;
      const double want = std::pow(1 + s, -(nu + 1));
      const double got = univariate_transform(TransformKind::hankel(nu), l, s).real();
      laplace = std::max(laplace, std::abs(got - want) / want);
    }
  }
  Outcome o;
  o.pass = bridge <= 1e-10 && lift <= 1e-6 && laplace <= 1e-6;
  o.detail = fmt("bridge_G %.1e, lift vs 2K0 %.1e, Hankel vs Laplace %.1e", bridge, lift, laplace);
  return o;
}

Outcome empirical_convolution() {
  const auto gauss = SampleFamily::parse("gaussian");
  const double m0 = empirical_convolution_check(MatrixSpace(SpaceKind::Mnu, 2, 0), gauss, gauss, 100000, 91);
  const double h2 = empirical_convolution_check(MatrixSpace(SpaceKind::H2, 2), gauss, gauss, 100000, 92);
  Outcome o;
  o.pass = m0 <= 0.02 && h2 <= 0.02;
  o.detail = fmt("KS M0 %.4f, H2 %.4f", m0, h2);
  return o;
}

Outcome beyond_theorem() {
  const double a = 0.2;
  const Ensemble e = beyond_theorem_example(a);
  double lowest = inf;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double x = a * (i + 0.5) / 100, y = a * (j + 0.5) / 100;
      lowest = std::min(lowest, joint_density(e, SpectralPoint({x, y})));
    }
  const double mass = integrate_2d([&](double x, double y) { return joint_density(e, SpectralPoint({x, y})); }, 0.0, a);
  Outcome o;
  o.pass = lowest >= -1e-10 && std::abs(mass - 1.0) <= 1e-4;
  o.detail = fmt("min density %.2e on 100x100 grid, |mass - 1| = %.2e", lowest, std::abs(mass - 1.0));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"normalization", normalization},
      {"multiplication theorems", multiplication_theorems},
      {"Hankel semigroup", hankel_semigroup},
      {"HCIZ Monte Carlo", hciz},
      {"Berezin-Karpelevich and Gelfand-Naimark", bk_gn},
      {"group integral identity", group_identity},
      {"PFF suite", pff_suite},
      {"bridges", bridges},
      {"empirical convolution", empirical_convolution},
      {"beyond the sufficient condition", beyond_theorem}};
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
