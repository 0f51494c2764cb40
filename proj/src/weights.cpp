#include "polya/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

namespace polya {

namespace {

using Poly = std::vector<double>;  // coefficients in increasing degree

double poly_eval(const Poly& p, double x) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

Poly poly_deriv(const Poly& p) {
  Poly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(static_cast<double>(k) * p[k]);
  return d;
}

Poly poly_shift(const Poly& p) {  // x * p
  Poly r(p.size() + 1, 0.0);
  std::copy(p.begin(), p.end(), r.begin() + 1);
  return r;
}

void poly_axpy(Poly& y, double a, const Poly& x) {
  if (y.size() < x.size()) y.resize(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

// Operator expression sum_k p_k(x) f^(k)(x).
using OpExpansion = std::vector<Poly>;

OpExpansion ensure(OpExpansion e, std::size_t k) {
  if (e.size() <= k) e.resize(k + 1);
  return e;
}

// d/dx applied to an expansion.
OpExpansion expansion_derivative(const OpExpansion& e) {
  OpExpansion r(e.size() + 1);
  for (std::size_t k = 0; k < e.size(); ++k) {
    poly_axpy(r[k], 1.0, poly_deriv(e[k]));
    poly_axpy(r[k + 1], 1.0, e[k]);
  }
  return r;
}

OpExpansion expansion_times_x(const OpExpansion& e) {
  OpExpansion r;
  for (const auto& p : e) r.push_back(poly_shift(p));
  return r;
}

OpExpansion expansion_axpy(OpExpansion y, double a, const OpExpansion& x) {
  y = ensure(std::move(y), x.size() ? x.size() - 1 : 0);
  for (std::size_t k = 0; k < x.size(); ++k) poly_axpy(y[k], a, x[k]);
  return y;
}

OpExpansion operator_expansion(const MatrixSpace& space, int m) {
  OpExpansion e{Poly{1.0}};
  for (int step = 0; step < m; ++step) {
    const OpExpansion d = expansion_derivative(e);
    switch (space.kind()) {
      case SpaceKind::H2:
        e = expansion_axpy({}, -1.0, d);
        break;
      case SpaceKind::G:
        e = expansion_axpy({}, -1.0, expansion_times_x(d));
        break;
      default: {
        // x f'' + (1 - nu) f'
        const OpExpansion dd = expansion_derivative(d);
        e = expansion_axpy(expansion_times_x(dd), 1.0 - space.nu(), d);
        break;
      }
    }
  }
  return e;
}

double evaluate_expansion(const OpExpansion& e, const std::vector<double>& derivs, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k)
    if (!e[k].empty()) s += poly_eval(e[k], x) * derivs[k];
  return s;
}

// Sum of the absolute monomial contributions, to detect cancellation.
double expansion_magnitude(const OpExpansion& e, const std::vector<double>& derivs, double x) {
  double m = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    double xp = 1.0;
    for (double c : e[k]) {
      m += std::abs(c * xp * derivs[k]);
      xp *= x;
    }
  }
  return m;
}

int expansion_order(const OpExpansion& e) { return static_cast<int>(e.size()) - 1; }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool is_nonneg_integer(double v) { return v >= 0.0 && std::floor(v) == v && v < 64.0; }

// x^nu as a jet; tolerates x0 = 0 for integer nu.
Jet jet_power(const Jet& x, double nu) {
  if (nu == 0.0) return Jet::constant(1.0, x.order());
  if (x.value() > 0.0) return pow(x, nu);
  if (is_nonneg_integer(nu)) return ipow(x, static_cast<int>(nu));
  if (x.order() == 0) return Jet::constant(nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity(), 0);
  throw std::domain_error("derivative of x^nu at x = 0 is not finite");
}

// x^nu e^{-rate x}, formed in log space when x > 0 so large x cannot overflow.
Jet power_exp(const Jet& x, double nu, double rate) {
  if (x.value() > 0.0) return exp(log(x) * nu - x * rate);
  return jet_power(x, nu) * exp(x * -rate);
}

double param(const FamilyParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Weight::Weight(std::string label, Support support, EvalFn eval, DerivFn deriv)
    : label_(std::move(label)),
      support_(support),
      eval_(std::make_shared<const EvalFn>(std::move(eval))),
      deriv_(std::move(deriv)) {}

Weight Weight::from_jet(std::string label, Support support, std::function<Jet(const Jet&)> expr) {
  auto shared = std::make_shared<std::function<Jet(const Jet&)>>(std::move(expr));
  EvalFn eval = [shared](double x) { return (*shared)(Jet::variable(x, 0)).value(); };
  DerivFn deriv = [shared](double x, int order) {
    const Jet j = (*shared)(Jet::variable(x, order));
    std::vector<double> d(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = j.derivative(k);
    return d;
  };
  return Weight(std::move(label), support, std::move(eval), std::move(deriv));
}

double Weight::operator()(double x) const {
  if (!support_.contains(x)) return 0.0;
  return (*eval_)(x);
}

int Weight::max_derivative_order() const {
  return deriv_ ? std::numeric_limits<int>::max() : kMaxNumericOrder;
}

std::vector<double> Weight::derivatives(double x, int order) const {
  if (order < 0) throw std::invalid_argument("negative derivative order");
  if (!support_.contains(x)) throw std::domain_error("point outside the weight's support");
  if (deriv_) return deriv_(x, order);
  if (order > kMaxNumericOrder)
    throw std::domain_error("weight '" + label_ + "' has no analytic derivatives of order " +
                            std::to_string(order));
  return numeric_derivatives(x, order);
}

std::vector<double> Weight::numeric_derivatives(double x, int order) const {
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  const auto& f = *eval_;
  out[0] = f(x);
  for (int k = 1; k <= order; ++k) {
    double h = std::max(std::abs(x), 1.0) *
               std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (k + 2));
    const double half = 0.5 * k * h;
    enum { central, forward, backward } mode = central;
    if (x - half < support_.lo || x + half > support_.hi) {
      if (x + k * h <= support_.hi && x >= support_.lo && x - half < support_.lo) mode = forward;
      else if (x - k * h >= support_.lo) mode = backward;
      else {
        // Tiny support: shrink the stencil to fit.
        const double room = std::min(x - support_.lo, support_.hi - x);
        h = std::max(room, 1e-300) / k;
        mode = central;
      }
    }
    auto stencil = [&](double step) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) {
        const double c = binomial(k, i) * ((i % 2) ? -1.0 : 1.0);
        double t;
        if (mode == central) t = x + (0.5 * k - i) * step;
        else if (mode == forward) t = x + (k - i) * step;
        else t = x - i * step;
        s += c * f(t);
      }
      return s / std::pow(step, k);
    };
    const double d1 = stencil(h);
    const double d2 = stencil(0.5 * h);
    out[static_cast<std::size_t>(k)] = mode == central ? (4.0 * d2 - d1) / 3.0 : 2.0 * d2 - d1;
  }
  return out;
}

Weight Weight::with_operator_hook(double nu, OperatorFn hook) const {
  Weight w = *this;
  w.hook_nu_ = nu;
  w.hook_ = std::make_shared<const OperatorFn>(std::move(hook));
  return w;
}

const Weight::OperatorFn* Weight::operator_hook(double nu) const {
  if (hook_ && hook_nu_ && std::abs(*hook_nu_ - nu) < 1e-12) return hook_.get();
  return nullptr;
}

int required_derivative_order(const MatrixSpace& space, int j) {
  if (j < 1) throw std::invalid_argument("induced weight index must be >= 1");
  return space.is_hankel_class() ? 2 * (j - 1) : j - 1;
}

double apply_derivative_op(const MatrixSpace& space, const Weight& w, int j, double x) {
  const int order = required_derivative_order(space, j);
  if (!w.support().contains(x)) throw std::domain_error("apply_derivative_op: x outside support");
  if (j == 1) return w(x);
  if (space.is_hankel_class())
    if (const auto* hook = w.operator_hook(space.nu())) return (*hook)(x, j - 1);
  if (order > w.max_derivative_order())
    throw std::domain_error("insufficient derivative order for weight '" + w.label() + "'");
  const OpExpansion e = operator_expansion(space, j - 1);
  const int order_needed = expansion_order(e);
  const double lo = w.support().lo;
  struct Eval {
    double value, magnitude;
  };
  auto eval = [&](double t) {
    const auto d = w.derivatives(t, order_needed);
    return Eval{evaluate_expansion(e, d, t), expansion_magnitude(e, d, t)};
  };
  Eval r;
  try {
    r = eval(x);
  } catch (const std::domain_error&) {
    if (x != lo) throw;
    // Singular derivatives at the left end (x^nu with fractional nu): take the value just inside.
    return eval(x + 1e-9 * std::max(1.0, std::abs(x))).value;
  }
  // Next to a singular left end the terms of the expansion can cancel to
  // round-off. There the result is continued as a power law from the
  // nearest points where the expansion is still accurate.
  constexpr double kCancel = 1e-8;
  const double d = x - lo;
  if (!(std::abs(r.value) < kCancel * r.magnitude) || !std::isfinite(lo) || !(d > 0.0) || d > 1e-3)
    return r.value;
  for (double d1 = 4.0 * d; d1 < 1e-2; d1 *= 4.0) {
    const Eval a = eval(lo + d1);
    if (std::abs(a.value) < kCancel * a.magnitude) continue;
    const Eval b = eval(lo + 2.0 * d1);
    if (!(a.value * b.value > 0.0) || std::abs(b.value) < kCancel * b.magnitude) break;
    const double p = std::log(b.value / a.value) / std::log(2.0);
    return a.value * std::pow(d / d1, p);
  }
  return r.value;
}

WeightVector induced_weights(const MatrixSpace& space, const Weight& w) {
  WeightVector out;
  out.push_back(w);
  for (int j = 2; j <= space.n(); ++j) {
    out.emplace_back(w.label() + "#" + std::to_string(j), w.support(),
                     [space, w, j](double x) { return apply_derivative_op(space, w, j, x); });
  }
  return out;
}

std::vector<double> support_samples(const Support& s, int count, double scale) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = (i + 0.5) / count;
    double x;
    if (s.bounded_below() && s.bounded_above()) x = s.lo + t * (s.hi - s.lo);
    else if (s.bounded_below()) x = s.lo + scale * t / (1.0 - t);
    else if (s.bounded_above()) x = s.hi - scale * (1.0 - t) / t;
    else x = scale * std::tan(std::numbers::pi * (t - 0.5));
    xs.push_back(x);
  }
  return xs;
}

AdmissibilityReport admissibility_check(const MatrixSpace& space, const Weight& w,
                                        const QuadratureSpec& spec) {
  AdmissibilityReport rep;
  const int n = space.n();
  const Support& sup = w.support();

  const auto samples = support_samples(sup, 1000);
  double peak = 0.0;
  for (double x : samples) peak = std::max(peak, std::abs(w(x)));
  for (double x : samples) {
    const double v = w(x);
    if (!std::isfinite(v) || v < -1e-14 * peak) {
      rep.nonnegative = false;
      rep.diagnostics.push_back("negative or non-finite value " + fmt(v) + " at x=" + fmt(x));
      break;
    }
  }
  if (!(peak > 0.0)) {
    rep.nonzero = false;
    rep.diagnostics.push_back("weight vanishes on all 1000 sample points");
  }

  if (required_derivative_order(space, n) > w.max_derivative_order() &&
      !(space.is_hankel_class() && w.operator_hook(space.nu()))) {
    rep.derivatives_available = false;
    rep.diagnostics.push_back("numeric derivatives cap: order " +
                              std::to_string(required_derivative_order(space, n)) + " requested");
    return rep;
  }

  std::vector<int> kappas{1};
  if (n > 1) kappas.push_back(n);
  for (int j = 1; j <= n; ++j) {
    for (int kappa : kappas) {
      RealFn integrand = [&](double x) {
        const double v = apply_derivative_op(space, w, j, x);
        return std::pow(std::abs(x), kappa - 1) * std::abs(v);
      };
      try {
        const auto r = integrate(integrand, sup.lo, sup.hi, spec);
        if (!std::isfinite(r.value)) throw DivergenceError("non-finite integral");
      } catch (const DivergenceError& e) {
        rep.integrable = false;
        rep.diagnostics.push_back("condition (ii) fails at kappa=" + std::to_string(kappa) +
                                  ", j=" + std::to_string(j) + ": " + e.what());
      }
    }
  }

  if (space.is_hankel_class() && sup.lo == 0.0) {
    const double nu = space.nu();
    const OpExpansion unit{Poly{1.0}};
    for (int l = 0; l + 2 <= n; ++l) {
      // x^(nu+1) d x^(-nu) u = x u' - nu u, with u = D^l w.
      const OpExpansion u = operator_expansion(space, l);
      const OpExpansion g = expansion_axpy(expansion_times_x(expansion_derivative(u)), -nu, u);
      auto eval_g = [&](double x) {
        return evaluate_expansion(g, w.derivatives(x, expansion_order(g)), x);
      };
      try {
        const double ref_x = std::isfinite(sup.hi) ? std::min(1.0, 0.5 * sup.hi) : 1.0;
        const double ref = std::max(1.0, std::abs(eval_g(ref_x)));
        const double near = eval_g(1e-10);
        const double mid = eval_g(1e-6);
        if (!(std::abs(near) <= 1e-4 * ref) || std::abs(near) > std::abs(mid) + 1e-12) {
          rep.boundary = false;
          rep.diagnostics.push_back("boundary limit at 0 does not vanish for l=" + std::to_string(l) +
                                    " (value " + fmt(near) + ")");
        }
      } catch (const std::domain_error& e) {
        rep.boundary = false;
        rep.diagnostics.push_back(std::string("boundary limit not evaluable: ") + e.what());
      }
    }
  }
  return rep;
}

namespace {

// g_p(x) = x^(p/2) K_p(2 sqrt x), with g_p' = -g_{p-1} and K_{-q} = K_q.
double bessel_g(double p, double x) {
  const double z = 2.0 * std::sqrt(x);
  return std::pow(x, 0.5 * p) * boost::math::cyl_bessel_k(std::abs(p), z);
}

Weight bessel_k_family(double mu, double nu) {
  const double p = mu - nu;
  const std::string label = "bessel_k(mu=" + fmt(mu) + ",nu=" + fmt(nu) + ")";
  auto eval = [p, nu](double x) {
    if (x <= 0.0) return 0.0;
    return std::pow(x, nu) * bessel_g(p, x);
  };
  auto deriv = [p, nu](double x, int order) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k derivatives need x > 0");
    Jet g(order);
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) fact *= k;
      g[static_cast<std::size_t>(k)] = ((k % 2) ? -1.0 : 1.0) * bessel_g(p - k, x) / fact;
    }
    const Jet r = jet_power(Jet::variable(x, order), nu) * g;
    std::vector<double> d(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = r.derivative(k);
    return d;
  };
  return Weight(label, Support::half_line(), eval, deriv);
}

}  // namespace

std::vector<std::string> family_names() {
  return {"gaussian_shifted", "gaussian_radial", "laguerre_H2", "ginibre",      "jacobi",
          "cauchy_lorentz",   "lognormal",       "gumbel_deformed", "cosh_power", "bessel_k",
          "sinh_exp",         "exponential",     "heaviside",   "power_heaviside", "indicator_gap",
          "indicator_unit",   "beyond"};
}

Weight make_family(const std::string& name, const FamilyParams& p) {
  if (name == "gaussian_shifted") {
    const double alpha = param(p, "alpha", 0.0);
    return Weight::from_jet("gaussian_shifted(alpha=" + fmt(alpha) + ")", Support::real_line(),
                            [alpha](const Jet& x) {
                              const Jet d = x - alpha;
                              return exp(d * d * -0.5);
                            });
  }
  if (name == "gaussian_radial" || name == "ginibre" || name == "exponential") {
    const double nu = param(p, "nu", 0.0);
    const double eps = param(p, name == "exponential" ? "scale" : "eps", 1.0);
    require(nu > -1.0, name + ": nu must exceed -1");
    require(eps > 0.0, name + ": scale must be positive");
    return Weight::from_jet(name + "(nu=" + fmt(nu) + ",eps=" + fmt(eps) + ")", Support::half_line(),
                            [nu, eps](const Jet& x) { return power_exp(x, nu, 1.0 / eps); });
  }
  if (name == "laguerre_H2") {
    const double n = param(p, "n", 1.0);
    const double nu = param(p, "nu", 0.0);
    require(n >= 1.0 && std::floor(n) == n, "laguerre_H2: n must be a positive integer");
    require(nu > -1.0, "laguerre_H2: nu must exceed -1");
    const double e = n + nu - 1.0;
    return Weight::from_jet("laguerre_H2(n=" + fmt(n) + ",nu=" + fmt(nu) + ")", Support::half_line(),
                            [e](const Jet& x) { return power_exp(x, e, 1.0); });
  }
  if (name == "jacobi") {
    const double n = param(p, "n", 1.0);
    const double nu = param(p, "nu", 0.0);
    const double mu = param(p, "mu", 0.0);
    require(nu > -1.0 && mu > -1.0, "jacobi: nu and mu must exceed -1");
    require(n >= 1.0 && std::floor(n) == n, "jacobi: n must be a positive integer");
    const double e = n + mu - 1.0;
    return Weight::from_jet("jacobi(n=" + fmt(n) + ",nu=" + fmt(nu) + ",mu=" + fmt(mu) + ")",
                            Support::interval(0.0, 1.0),
                            [nu, e](const Jet& x) { return jet_power(x, nu) * jet_power(1.0 - x, e); });
  }
  if (name == "cauchy_lorentz") {
    const double n = param(p, "n", 1.0);
    const double nu = param(p, "nu", 0.0);
    const double mu = param(p, "mu", 0.0);
    require(nu > -1.0 && mu > -1.0, "cauchy_lorentz: nu and mu must exceed -1");
    require(n >= 1.0 && std::floor(n) == n, "cauchy_lorentz: n must be a positive integer");
    const double e = n + nu + mu + 1.0;
    return Weight::from_jet("cauchy_lorentz(n=" + fmt(n) + ",nu=" + fmt(nu) + ",mu=" + fmt(mu) + ")",
                            Support::half_line(),
                            [nu, e](const Jet& x) { return jet_power(x, nu) * pow(1.0 + x, -e); });
  }
  if (name == "lognormal") {
    const double alpha = param(p, "alpha", 0.0);
    const double sigma = param(p, "sigma", 1.0);
    require(sigma > 0.0, "lognormal: sigma must be positive");
    auto expr = [alpha, sigma](const Jet& x) {
      const Jet l = log(x) - alpha;
      return exp(l * l * (-0.5 / (sigma * sigma))) / x;
    };
    Weight w = Weight::from_jet("lognormal(alpha=" + fmt(alpha) + ",sigma=" + fmt(sigma) + ")",
                                Support::half_line(), expr);
    return Weight(w.label(), w.support(),
                  [expr](double x) { return x > 0.0 ? expr(Jet::variable(x, 0)).value() : 0.0; },
                  [w](double x, int order) { return w.derivatives(x, order); });
  }
  if (name == "gumbel_deformed") {
    const double alpha = param(p, "alpha", 1.0);
    require(alpha > 0.0, "gumbel_deformed: alpha must be positive");
    return Weight::from_jet("gumbel_deformed(alpha=" + fmt(alpha) + ")", Support::real_line(),
                            [alpha](const Jet& x) { return exp(-exp(-x) - x * alpha); });
  }
  if (name == "cosh_power") {
    const double mu = param(p, "mu", 1.0);
    require(mu > 0.0, "cosh_power: mu must be positive");
    return Weight::from_jet("cosh_power(mu=" + fmt(mu) + ")", Support::real_line(),
                            [mu](const Jet& x) { return pow(cosh(x), -mu); });
  }
  if (name == "sinh_exp") {
    const double alpha = param(p, "alpha", 2.0);
    const double mu = param(p, "mu", 1.0);
    require(alpha > mu && mu >= 0.0, "sinh_exp: need alpha > mu >= 0");
    return Weight::from_jet("sinh_exp(alpha=" + fmt(alpha) + ",mu=" + fmt(mu) + ")", Support::half_line(),
                            [alpha, mu](const Jet& x) {
                              return exp(x * -alpha) * jet_power(sinh(x), mu);
                            });
  }
  if (name == "bessel_k") {
    const double mu = param(p, "mu", 0.0);
    const double nu = param(p, "nu", 0.0);
    require(nu > -1.0 && mu > -1.0, "bessel_k: mu and nu must exceed -1");
    return bessel_k_family(mu, nu);
  }
  if (name == "heaviside") {
    return Weight::from_jet("heaviside", Support::half_line(),
                            [](const Jet& x) { return Jet::constant(1.0, x.order()); });
  }
  if (name == "power_heaviside") {
    const double nu = param(p, "nu", 1.0);
    require(nu >= 0.0, "power_heaviside: nu must be non-negative");
    return Weight::from_jet("power_heaviside(nu=" + fmt(nu) + ")", Support::half_line(),
                            [nu](const Jet& x) { return jet_power(x, nu); });
  }
  if (name == "indicator_unit") {
    return Weight::from_jet("indicator_unit", Support::interval(0.0, 1.0),
                            [](const Jet& x) { return Jet::constant(1.0, x.order()); });
  }
  if (name == "indicator_gap") {
    // Indicator of [0,1] u [2,3].
    auto eval = [](double x) { return (x <= 1.0 || x >= 2.0) ? 1.0 : 0.0; };
    auto deriv = [eval](double x, int order) {
      std::vector<double> d(static_cast<std::size_t>(order) + 1, 0.0);
      d[0] = eval(x);
      return d;
    };
    return Weight("indicator_gap", Support::interval(0.0, 3.0), eval, deriv);
  }
  if (name == "beyond") {
    const double a = param(p, "a", 0.2);
    require(a > 0.0, "beyond: a must be positive");
    Weight w = Weight::from_jet("beyond(a=" + fmt(a) + ")", Support::interval(0.0, a),
                                [a](const Jet& x) { return exp(-1.0 / (a - x)); });
    return Weight(w.label(), w.support(),
                  [w, a](double x) { return x < a ? std::exp(-1.0 / (a - x)) : 0.0; },
                  [w, a](double x, int order) {
                    if (x >= a) return std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0);
                    return w.derivatives(x, order);
                  });
  }
  throw std::invalid_argument("unknown weight family '" + name + "'");
}

}  // namespace polya
