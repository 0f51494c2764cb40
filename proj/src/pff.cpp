#include "polya/pff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "polya/parallel.hpp"

namespace polya {

namespace {

bool strictly_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

struct Grid {
  std::vector<double> xs, ys;
};

// Trial t of the search: uniform, clustered or arithmetic grids.
Grid trial_grid(std::uint64_t seed, long t, int n, int mode, double range) {
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * u(rng); };
  Grid g;
  g.xs.resize(static_cast<std::size_t>(n));
  g.ys.resize(static_cast<std::size_t>(n));
  switch (mode) {
    case 0:
      for (auto& x : g.xs) x = uni(-range, range);
      for (auto& y : g.ys) y = uni(-range, range);
      break;
    case 1: {
      const double s = uni(0.01, 1.0) * range / n;
      const double cx = uni(-range, range);
      const double cy = uni(-range, range);
      for (auto& x : g.xs) x = cx + uni(0.0, s * n);
      for (auto& y : g.ys) y = cy + uni(0.0, s * n);
      break;
    }
    default: {
      const double h = uni(0.05, 1.0) * range / n;
      const double x0 = uni(-range, range);
      const double y0 = uni(-range, range);
      const double hy = h * uni(0.2, 2.0);
      for (int i = 0; i < n; ++i) {
        g.xs[static_cast<std::size_t>(i)] = x0 + h * i;
        g.ys[static_cast<std::size_t>(i)] = y0 + hy * i;
      }
      break;
    }
  }
  std::sort(g.xs.begin(), g.xs.end());
  std::sort(g.ys.begin(), g.ys.end());
  return g;
}

double auto_range(const Weight& f) {
  const auto samples = support_samples(f.support(), 2000);
  double peak = 0.0;
  for (double x : samples) peak = std::max(peak, std::abs(f(x)));
  double reach = 0.0;
  for (double x : samples)
    if (std::abs(f(x)) >= 1e-6 * peak) reach = std::max(reach, std::abs(x));
  return std::clamp(reach, 1.0, 50.0);
}

}  // namespace

PffVerdict pff_check_grid(const Weight& f, int order, std::span<const double> xs,
                          std::span<const double> ys) {
  const int n = static_cast<int>(xs.size());
  if (n < 1 || static_cast<int>(ys.size()) != n) throw std::invalid_argument("grids must have equal positive length");
  if (n > order) throw std::invalid_argument("grid size exceeds the tested order");
  if (!strictly_increasing(xs) || !strictly_increasing(ys))
    throw std::invalid_argument("grid entries must be strictly increasing");
  MatrixXr m(n, n);
  double scale = 0.0;
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      m(b, c) = f(xs[static_cast<std::size_t>(b)] - ys[static_cast<std::size_t>(c)]);
      scale = std::max(scale, std::abs(m(b, c)));
    }
  const double det = m.determinant();
  const double vv = vandermonde(xs) * vandermonde(ys);
  PffVerdict v;
  v.order_tested = n;
  v.grids_tested = 1;
  const double signed_det = vv > 0.0 ? det : -det;
  if (signed_det < -1e-10 * std::pow(scale, n)) {
    v.is_pff = false;
    v.witness = PffWitness{{xs.begin(), xs.end()}, {ys.begin(), ys.end()}, det, vv * det};
  }
  return v;
}

PffVerdict pff_order_check(const Weight& f, int order, const GridSampler& sampler) {
  if (order < 1) throw std::invalid_argument("order must be positive");
  if (sampler.trials < 1) throw std::invalid_argument("trial count must be positive");

  bool integrable = true;
  try {
    RealFn g = [&f](double x) { return std::abs(f(x)); };
    integrate(g, f.support().lo, f.support().hi);
  } catch (const DivergenceError&) {
    integrable = false;
  }
  if (!integrable && sampler.strict_integrability)
    throw std::invalid_argument("pff_order_check: f is not integrable");

  PffVerdict verdict;
  verdict.order_tested = order;

  // n = 1: non-negativity.
  const double range = sampler.range > 0.0 ? sampler.range : auto_range(f);
  std::vector<double> probe = support_samples(f.support(), 2000);
  for (int i = 0; i < 2000; ++i) probe.push_back(-range + 2.0 * range * (i + 0.5) / 2000.0);
  for (double z : probe) {
    const double v = f(z);
    if (v < 0.0) {
      verdict.is_pff = false;
      verdict.grids_tested = 1;
      verdict.witness = PffWitness{{z}, {0.0}, v, v};
      return verdict;
    }
  }

  std::vector<int> sizes;
  if (order >= 2) {
    if (integrable) sizes.push_back(order);
    else
      for (int n = 2; n <= order; ++n) sizes.push_back(n);
  }
  if (sizes.empty()) {
    verdict.grids_tested = 1;
    return verdict;
  }

  const long trials = sampler.trials;
  const std::size_t kinds = sizes.size();
  auto grid_for = [&](long t) {
    const int n = sizes[static_cast<std::size_t>(t) % kinds];
    const int mode = static_cast<int>((static_cast<std::size_t>(t) / kinds) % 3);
    return trial_grid(sampler.seed, t, n, mode, range);
  };
  std::atomic<long> first_hit{trials};
  parallel_for(
      static_cast<std::size_t>(trials),
      [&](std::size_t i) {
        const long t = static_cast<long>(i);
        if (t >= first_hit.load(std::memory_order_relaxed)) return;
        const Grid g = grid_for(t);
        if (!strictly_increasing(g.xs) || !strictly_increasing(g.ys)) return;
        const auto v = pff_check_grid(f, order, g.xs, g.ys);
        if (!v.is_pff) {
          long cur = first_hit.load();
          while (t < cur && !first_hit.compare_exchange_weak(cur, t)) {
          }
        }
      },
      sampler.workers);

  const long hit = first_hit.load();
  if (hit < trials) {
    const Grid g = grid_for(hit);
    auto v = pff_check_grid(f, order, g.xs, g.ys);
    v.order_tested = order;
    v.grids_tested = hit + 2;
    return v;
  }
  verdict.grids_tested = trials + 1;
  return verdict;
}

namespace {

struct PoleGroup {
  double delta;
  int multiplicity;
};

// k-th derivative of the inverse Laplace transform of prod_j 1/(1 + delta_j s)
// by residues of s^k F(s) e^{sx}.
double laplace_residue_sum(const std::vector<PoleGroup>& groups, double x, int k) {
  const bool right = x >= 0.0;
  double total = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double d = groups[g].delta;
    if ((d > 0.0) != right) continue;
    const int mu = groups[g].multiplicity;
    const double p = -1.0 / d;
    const Jet s = Jet::variable(p, mu - 1);
    Jet h = exp(s * x) * ipow(s, k) * std::pow(1.0 / d, mu);
    for (std::size_t o = 0; o < groups.size(); ++o) {
      if (o == g) continue;
      const double dd = groups[o].delta;
      const Jet factor = (s + 1.0 / dd) * dd;  // 1 + dd s
      h = h / ipow(factor, groups[o].multiplicity);
    }
    total += h[static_cast<std::size_t>(mu - 1)];
  }
  return right ? total : -total;
}

Weight laplace_closed_form(const std::vector<PoleGroup>& groups, double shift) {
  bool any_pos = false;
  bool any_neg = false;
  for (const auto& g : groups) (g.delta > 0.0 ? any_pos : any_neg) = true;
  Support sup = Support::real_line();
  if (!any_neg) sup.lo = shift;
  if (!any_pos) sup.hi = shift;
  auto eval = [groups, shift](double x) { return laplace_residue_sum(groups, x - shift, 0); };
  auto deriv = [groups, shift](double x, int order) {
    std::vector<double> d(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = laplace_residue_sum(groups, x - shift, k);
    return d;
  };
  return Weight("laplace_pff", sup, eval, deriv);
}

// e^{z^2} erfc(z); the continued fraction avoids overflow for large z.
double erfcx(double z) {
  if (z < 3.0) return std::exp(z * z) * std::erfc(z);
  double t = z;
  for (int k = 80; k >= 1; --k) t = z + 0.5 * k / t;
  return 1.0 / (std::sqrt(std::numbers::pi) * t);
}

// Exponential density e^{-t/d}/|d| (on the side of sign d) convolved with a
// centred normal density of variance var.
double exp_normal(double d, double var, double x) {
  if (d < 0.0) return exp_normal(-d, var, -x);
  const double sigma = std::sqrt(var);
  const double z = (var / d - x) / (sigma * std::numbers::sqrt2);
  if (z < 3.0) return std::exp(var / (2.0 * d * d) - x / d) * std::erfc(z) / (2.0 * d);
  return std::exp(-x * x / (2.0 * var)) * erfcx(z) / (2.0 * d);
}

// Simple poles with a Gaussian factor: sum_j c_j (exp_j * normal), where the
// c_j are the partial-fraction weights. Derivatives follow from
// d g' + g = normal, which holds for either sign of d.
Weight laplace_normal_closed_form(const std::vector<PoleGroup>& groups, double shift, double var) {
  std::vector<double> coeff;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    double c = 1.0;
    for (std::size_t k = 0; k < groups.size(); ++k)
      if (k != j) c /= 1.0 - groups[k].delta / groups[j].delta;
    coeff.push_back(c);
  }
  auto deriv = [groups, coeff, shift, var](double x, int order) {
    const double u = x - shift;
    const Jet v = Jet::variable(u, std::max(order - 1, 0));
    const Jet normal = exp(v * v * (-0.5 / var)) * (1.0 / std::sqrt(2.0 * std::numbers::pi * var));
    std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
    for (std::size_t j = 0; j < groups.size(); ++j) {
      const double d = groups[j].delta;
      double g = exp_normal(d, var, u);
      out[0] += coeff[j] * g;
      for (int k = 1; k <= order; ++k) {
        g = (normal.derivative(k - 1) - g) / d;
        out[static_cast<std::size_t>(k)] += coeff[j] * g;
      }
    }
    return out;
  };
  return Weight("laplace_pff", Support::real_line(), [deriv](double x) { return deriv(x, 0)[0]; }, deriv);
}

}  // namespace

Weight make_laplace_pff(std::vector<double> deltas, double shift, double gamma, LaplaceSupport support) {
  if (deltas.size() > 32) throw std::invalid_argument("make_laplace_pff: at most 32 factors");
  if (!(shift >= 0.0) || !(gamma >= 0.0)) throw std::invalid_argument("make_laplace_pff: shift and gamma must be >= 0");
  for (double d : deltas)
    if (!std::isfinite(d) || d == 0.0) throw std::invalid_argument("make_laplace_pff: delta_j must be finite and non-zero");
  if (support == LaplaceSupport::half_line) {
    if (gamma != 0.0) throw std::invalid_argument("make_laplace_pff: half_line requires gamma = 0");
    for (double d : deltas)
      if (d < 0.0) throw std::invalid_argument("make_laplace_pff: half_line requires delta_j > 0");
  }
  if (deltas.empty() && gamma == 0.0) throw std::invalid_argument("make_laplace_pff: no factors (point mass)");

  std::sort(deltas.begin(), deltas.end());
  std::vector<PoleGroup> groups;
  for (double d : deltas) {
    if (!groups.empty() && std::abs(groups.back().delta - d) <= 1e-12 * std::abs(d)) ++groups.back().multiplicity;
    else groups.push_back({d, 1});
  }

  const bool simple = std::all_of(groups.begin(), groups.end(), [](const PoleGroup& g) { return g.multiplicity == 1; });
  std::optional<Weight> base;
  if (gamma > 0.0 && simple && !groups.empty()) {
    base = laplace_normal_closed_form(groups, shift, 2.0 * gamma);
  } else if (!groups.empty()) {
    // Multiplicities above 4 are split into chunks that are convolved numerically.
    std::vector<std::vector<PoleGroup>> chunks;
    std::vector<PoleGroup> rest = groups;
    while (!rest.empty()) {
      std::vector<PoleGroup> chunk, next;
      for (const auto& g : rest) {
        const int take = std::min(4, g.multiplicity);
        chunk.push_back({g.delta, take});
        if (g.multiplicity > take) next.push_back({g.delta, g.multiplicity - take});
      }
      chunks.push_back(chunk);
      rest = next;
    }
    base = laplace_closed_form(chunks[0], shift);
    for (std::size_t c = 1; c < chunks.size(); ++c)
      base = convolve_weights({ConvolutionKind::additive, 0.0}, *base, laplace_closed_form(chunks[c], 0.0));
  }
  if (gamma > 0.0 && !(simple && !groups.empty())) {
    const double var = 2.0 * gamma;
    Weight gauss = Weight::from_jet("normal", Support::real_line(), [var](const Jet& x) {
      return exp(x * x * (-0.5 / var)) * (1.0 / std::sqrt(2.0 * std::numbers::pi * var));
    });
    if (!base) {
      const double s = shift;
      return Weight::from_jet("laplace_pff", Support::real_line(), [var, s](const Jet& x) {
        const Jet d = x - s;
        return exp(d * d * (-0.5 / var)) * (1.0 / std::sqrt(2.0 * std::numbers::pi * var));
      });
    }
    base = convolve_weights({ConvolutionKind::additive, 0.0}, *base, gauss);
  }
  std::string label = "laplace_pff(deltas=";
  for (std::size_t i = 0; i < deltas.size(); ++i) label += (i ? ";" : "") + std::to_string(deltas[i]);
  label += ",shift=" + std::to_string(shift) + ",gamma=" + std::to_string(gamma) + ")";
  const Weight& b = *base;
  return Weight(label, b.support(), [b](double x) { return b(x); },
                b.has_analytic_derivatives()
                    ? Weight::DerivFn([b](double x, int order) { return b.derivatives(x, order); })
                    : Weight::DerivFn());
}

Weight bridge_G(const Weight& w) {
  const Support& s = w.support();
  if (s.lo < 0.0) throw std::invalid_argument("bridge_G: weight must live on the half line");
  const double inf = std::numeric_limits<double>::infinity();
  Support out{std::isinf(s.hi) ? -inf : -std::log(s.hi), s.lo <= 0.0 ? inf : -std::log(s.lo)};
  auto eval = [w](double x) {
    const double u = std::exp(-x);
    return w(u) * u;
  };
  Weight::DerivFn deriv;
  if (w.has_analytic_derivatives()) {
    deriv = [w](double x, int order) {
      const Jet u = exp(-Jet::variable(x, order));
      const auto d = w.derivatives(u.value(), order);
      std::vector<double> coeffs(d.size());
      double fact = 1.0;
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        coeffs[k] = d[k] / fact;
      }
      const Jet r = compose(coeffs, u) * u;
      std::vector<double> out(static_cast<std::size_t>(order) + 1);
      for (int k = 0; k <= order; ++k) out[static_cast<std::size_t>(k)] = r.derivative(k);
      return out;
    };
  }
  return Weight("bridge_G(" + w.label() + ")", out, eval, deriv);
}

Weight lift_to_M(const Weight& wt, double nu, const QuadratureSpec& spec, std::vector<std::string>* warnings) {
  const Support& s = wt.support();
  if (s.lo < 0.0) throw std::invalid_argument("lift_to_M: weight must be supported in [0, inf)");
  if (!(nu > -1.0)) throw std::invalid_argument("lift_to_M: nu must exceed -1");
  if (warnings && s.lo == 0.0) {
    const auto probe = support_samples(s, 200);
    double peak = 0.0;
    for (double x : probe) peak = std::max(peak, std::abs(wt(x)));
    if (std::abs(wt(1e-12)) > 1e-8 * peak)
      warnings->push_back("lift_to_M: " + wt.label() +
                          " does not vanish at 0; boundary terms of the derivative identities may not vanish");
  }
  const double inv_gamma = std::exp(-std::lgamma(nu + 1.0));
  const double inf = std::numeric_limits<double>::infinity();
  const double ulo = s.lo > 0.0 ? std::log(s.lo) : -inf;
  const double uhi = std::isinf(s.hi) ? inf : std::log(s.hi);

  // k-th x-derivative of the lift of f: int phi^(k)(x e^{-u}) e^{-ku} f(e^u) du, phi(t) = t^nu e^{-t}.
  auto kth = [nu, inv_gamma, ulo, uhi, spec](const RealFn& f, double x, int k) {
    if (x == 0.0 && k == 0) {
      // Limit x -> 0: with t = x/y the value is int t^(nu-1) e^{-t} f(x/t) dt / Gamma(nu+1).
      const double f0 = f(0.0);
      if (nu > 0.0) return f0 / nu;
      if (f0 != 0.0) return std::numeric_limits<double>::infinity();
      x = std::numeric_limits<double>::min();
    }
    if (!(x > 0.0)) throw std::domain_error("lift_to_M: evaluation at x <= 0");
    RealFn g = [&](double u) {
      const double y = std::exp(u);
      const double t = x / y;
      // e^{-t} underflows long before the polynomial factors of phi^(k) matter.
      if (!(y > 0.0) || std::isinf(y) || t > 745.0) return 0.0;
      const double fy = f(y);
      if (fy == 0.0) return 0.0;
      if (k == 0) return std::pow(t, nu) * std::exp(-t) * fy;
      const Jet tj = Jet::variable(t, k);
      const Jet phi = (nu == 0.0 ? Jet::constant(1.0, k) : pow(tj, nu)) * exp(-tj);
      return phi.derivative(k) * std::exp(-k * u) * fy;
    };
    // Centre the integration near the kernel's peak at y ~ sqrt(x).
    const double centre = std::clamp(0.5 * std::log(x), ulo, uhi);
    RealFn shifted = [&](double v) { return g(centre + v); };
    const double width = 1.0 + 0.5 * std::abs(std::log(x));
    return inv_gamma * integrate_scaled(shifted, ulo - centre, uhi - centre, width, spec).value;
  };
  const RealFn base = [wt](double y) { return wt(y); };
  auto eval = [kth, base](double x) { return kth(base, x, 0); };
  auto deriv = [kth, base](double x, int order) {
    std::vector<double> d(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = kth(base, x, k);
    return d;
  };
  // The radial operator maps the lift of f to the lift of -f', so no x-derivatives are needed.
  auto hook = [kth, wt](double x, int m) {
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    const RealFn dm = [wt, m, sign](double y) { return sign * wt.derivatives(y, m)[static_cast<std::size_t>(m)]; };
    return kth(dm, x, 0);
  };
  return Weight("lift_M(" + wt.label() + ",nu=" + std::to_string(nu) + ")", Support::half_line(), eval, deriv)
      .with_operator_hook(nu, hook);
}

Ensemble beyond_theorem_example(double a, const QuadratureSpec& spec) {
  if (!(a > 0.0 && a < 0.25)) throw std::invalid_argument("beyond_theorem_example: need 0 < a < 1/4");
  const MatrixSpace space(SpaceKind::Mnu, 2, 0.0);
  const Weight w = make_family("beyond", {{"a", a}});
  Ensemble e = Ensemble::polya(space, w, spec);
  const int grid = 100;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double x = a * (i + 0.5) / grid;
      const double y = a * (j + 0.5) / grid;
      const auto d = joint_density_checked(e, SpectralPoint({x, y}));
      if (d.positivity_violation)
        throw std::runtime_error("beyond_theorem_example: negative joint density at (" + std::to_string(x) +
                                 ", " + std::to_string(y) + ")");
    }
  return e;
}

}  // namespace polya
