#include "polya/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "polya/special.hpp"

namespace polya {

double normalize(const MatrixSpace& space, const Weight& w, const QuadratureSpec& spec) {
  const int n = space.n();
  const TransformKind kind = TransformKind::for_space(space);
  double c = 1.0;
  if (space.kind() == SpaceKind::G) {
    for (int j = 1; j <= n; ++j) {
      const double m = univariate_transform(kind, w, Complex(j, 0.0), spec).real();
      if (m == 0.0) throw std::domain_error("normalize: vanishing Mellin moment");
      c /= factorial(j) * m;
    }
  } else {
    const double t0 = univariate_transform(kind, w, 0.0, spec).real();
    if (t0 == 0.0) throw std::domain_error("normalize: weight has zero mass");
    for (int j = 1; j <= n; ++j) {
      c /= factorial(j) * t0;
      if (space.is_hankel_class())
        c *= std::exp(std::lgamma(1.0 + space.nu()) - std::lgamma(j + space.nu()));
    }
  }
  if (!std::isfinite(c) || c == 0.0) throw std::domain_error("normalize: degenerate constant");
  return c;
}

Ensemble Ensemble::polynomial(const MatrixSpace& space, WeightVector ws, const QuadratureSpec& spec) {
  if (static_cast<int>(ws.size()) != space.n())
    throw std::invalid_argument("polynomial ensemble needs n weights");
  const double c = polynomial_normalization(ws, spec);
  return Ensemble(space, std::move(ws), std::nullopt, c);
}

Ensemble Ensemble::polya(const MatrixSpace& space, const Weight& w, const QuadratureSpec& spec) {
  const double c = normalize(space, w, spec);
  return Ensemble(space, induced_weights(space, w), w, c);
}

double Ensemble::weight_value(int b, double x) const { return weights_[static_cast<std::size_t>(b)](x); }

DensityValue joint_density_checked(const Ensemble& e, const SpectralPoint& a, double tol) {
  const int n = e.space().n();
  if (a.size() != n) throw std::invalid_argument("joint_density: wrong number of entries");
  DensityValue out;
  const auto& v = a.values();
  const double delta = vandermonde(v);
  if (delta == 0.0) return out;
  MatrixXr m(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) m(b, c) = e.weight_value(b, v[static_cast<std::size_t>(c)]);
  out.value = e.norm() * delta * m.determinant();
  out.positivity_violation = out.value < -10.0 * tol;
  return out;
}

double joint_density(const Ensemble& e, const SpectralPoint& a) { return joint_density_checked(e, a).value; }

std::function<double(double)> marginal_density(const Ensemble& e, const QuadratureSpec& spec) {
  const int n = e.space().n();
  MatrixXr gram(n, n);
  for (int r = 0; r < n; ++r)
    for (int b = 0; b < n; ++b) {
      const Weight& w = e.weights()[static_cast<std::size_t>(b)];
      RealFn g = [&w, r](double x) {
        const double v = w(x);
        return v == 0.0 ? 0.0 : std::pow(x, r) * v;
      };
      gram(r, b) = integrate(g, w.support().lo, w.support().hi, spec).value;
    }
  MatrixXr coef(n, n);
  for (int r = 0; r < n; ++r)
    for (int b = 0; b < n; ++b) {
      double minor = 1.0;
      if (n > 1) {
        MatrixXr sub(n - 1, n - 1);
        for (int i = 0, si = 0; i < n; ++i) {
          if (i == r) continue;
          for (int j = 0, sj = 0; j < n; ++j) {
            if (j == b) continue;
            sub(si, sj++) = gram(i, j);
          }
          ++si;
        }
        minor = sub.determinant();
      }
      coef(r, b) = e.norm() * factorial(n - 1) * (((r + b) % 2) ? -1.0 : 1.0) * minor;
    }
  WeightVector ws = e.weights();
  return [coef, ws, n](double x) {
    double s = 0.0;
    for (int b = 0; b < n; ++b) {
      const double w = ws[static_cast<std::size_t>(b)](x);
      if (w == 0.0) continue;
      double xr = 1.0;
      for (int r = 0; r < n; ++r) {
        s += coef(r, b) * xr * w;
        xr *= x;
      }
    }
    return s;
  };
}

ConvolutionKind ConvolutionKind::for_space(const MatrixSpace& space) {
  switch (space.kind()) {
    case SpaceKind::H2: return {additive, 0.0};
    case SpaceKind::G: return {multiplicative, 0.0};
    default: return {hankel, space.nu()};
  }
}

namespace {

double additive_value(const Weight& f, const Weight& g, double x, int k, const QuadratureSpec& spec) {
  const double lo = std::max(f.support().lo, x - g.support().hi);
  const double hi = std::min(f.support().hi, x - g.support().lo);
  if (!(lo < hi)) return 0.0;
  RealFn h = [&](double y) {
    const double fy = f(y);
    if (fy == 0.0) return 0.0;
    return k == 0 ? fy * g(x - y) : fy * g.derivative(x - y, k);
  };
  return integrate(h, lo, hi, spec).value;
}

double log_or_inf(double v, double sign_inf) {
  if (v <= 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(v)) return sign_inf;
  return std::log(v);
}

double multiplicative_value(const Weight& f, const Weight& g, double x, int k,
                            const QuadratureSpec& spec) {
  if (!(x > 0.0)) return 0.0;
  if (f.support().lo < 0.0 || g.support().lo < 0.0)
    throw std::domain_error("multiplicative convolution needs weights on the half line");
  const double inf = std::numeric_limits<double>::infinity();
  const double lo = std::max(log_or_inf(f.support().lo, inf),
                             std::log(x) - log_or_inf(g.support().hi, inf));
  const double hi = std::min(log_or_inf(f.support().hi, inf),
                             std::log(x) - log_or_inf(g.support().lo, inf));
  if (!(lo < hi)) return 0.0;
  RealFn h = [&](double u) {
    const double y = std::exp(u);
    const double t = x / y;
    if (!(y > 0.0) || !(t > 0.0) || std::isinf(y) || std::isinf(t)) return 0.0;
    const double fy = f(y);
    if (fy == 0.0) return 0.0;
    if (k == 0) return fy * g(t);
    const double gk = g.derivative(t, k);
    // Avoid 0 * inf once e^{-ku} overflows far out in the tail.
    return gk == 0.0 ? 0.0 : fy * gk * std::exp(-k * u);
  };
  // Split near the bulk so the tails start where the integrand decays.
  const double centre = std::clamp(0.5 * std::log(x), lo, hi);
  const double width = 1.0 + 0.5 * std::abs(std::log(x));
  return integrate_scaled(h, lo, centre, width, spec).value + integrate_scaled(h, centre, hi, width, spec).value;
}

bool smooth_everywhere(const Weight& w, bool half_line) {
  if (!w.has_analytic_derivatives()) return false;
  if (half_line) return w.support().lo == 0.0 && std::isinf(w.support().hi);
  return std::isinf(w.support().lo) && std::isinf(w.support().hi);
}

// H_nu f * H_nu g tabulated on an adaptive grid with local cubic interpolation.
class HankelProduct {
 public:
  HankelProduct(double nu, const Weight& f, const Weight& g, const QuadratureSpec& spec) {
    auto eval = [&](double s) {
      return univariate_transform(TransformKind::hankel(nu), f, s, spec).real() *
             univariate_transform(TransformKind::hankel(nu), g, s, spec).real();
    };
    const double p0 = eval(0.0);
    const double scale = std::max(std::abs(p0), 1e-300);
    std::map<double, double> table{{0.0, p0}};
    int quiet = 0;
    for (int k = 0; k < 200; ++k) {
      const double s = 1e-3 * std::pow(2.0, 0.5 * k);
      const double v = eval(s);
      table[s] = v;
      quiet = std::abs(v) < 1e-13 * scale ? quiet + 1 : 0;
      if (quiet >= 3 || s > 1e6) break;
    }
    const double abs_tol = 1e-11 * scale;
    for (int pass = 0; pass < 30; ++pass) {
      load(table);
      std::vector<std::pair<double, double>> added;
      for (std::size_t i = 0; i + 1 < s_.size(); ++i) {
        const double m = 0.5 * (s_[i] + s_[i + 1]);
        if (m <= s_[i] || m >= s_[i + 1]) continue;
        const double v = eval(m);
        if (std::abs(v - interpolate(m)) > abs_tol + 1e-9 * std::abs(v)) added.emplace_back(m, v);
      }
      if (added.empty() || table.size() > 6000) break;
      for (const auto& [s, v] : added) table[s] = v;
    }
    load(table);
  }

  double operator()(double s) const {
    if (s < 0.0 || s > s_.back()) return 0.0;
    return interpolate(s);
  }
  double smax() const { return s_.back(); }

 private:
  void load(const std::map<double, double>& table) {
    s_.clear();
    p_.clear();
    for (const auto& [s, v] : table) {
      s_.push_back(s);
      p_.push_back(v);
    }
  }

  double interpolate(double s) const {
    const std::size_t n = s_.size();
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t i = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    if (i + 1 >= n) i = n - 2;
    std::size_t first = i == 0 ? 0 : i - 1;
    if (first + 4 > n) first = n >= 4 ? n - 4 : 0;
    const std::size_t count = std::min<std::size_t>(4, n);
    double r = 0.0;
    for (std::size_t a = first; a < first + count; ++a) {
      double l = p_[a];
      for (std::size_t b = first; b < first + count; ++b)
        if (b != a) l *= (s - s_[b]) / (s_[a] - s_[b]);
      r += l;
    }
    return r;
  }

  std::vector<double> s_;
  std::vector<double> p_;
};

// Support of f *_nu g. With unbounded supports the inverse transform has an
// absolute noise floor near 1e-12 of the peak; the support is cut where the
// values first fall below 1e-10 of the peak so tail moments remain finite.
Support hankel_support(const Support& f, const Support& g, const std::function<double(double)>& eval) {
  if (std::isfinite(f.hi) && std::isfinite(g.hi)) {
    const double r = std::sqrt(f.hi) + std::sqrt(g.hi);
    return {0.0, r * r};
  }
  constexpr double kFloor = 1e-10;
  double peak = 0.0;
  double last_above = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x = 1e-3 * std::pow(2.0, 0.5 * k);
    if (x > 1e9) break;
    const double v = std::abs(eval(x));
    if (v >= peak) {
      peak = v;
    } else if (v < kFloor * peak) {
      // Locate the crossing; the coarse grid can overshoot well into the noise.
      double lo = last_above, hi = x;
      for (int it = 0; it < 20 && hi - lo > 1e-3 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (eval(mid) < kFloor * peak ? hi : lo) = mid;
      }
      return {0.0, hi};
    }
    last_above = x;
  }
  return Support::half_line();
}

std::uint64_t key_of(double x) {
  std::uint64_t k;
  std::memcpy(&k, &x, sizeof k);
  return k;
}

struct ValueCache {
  std::mutex mutex;
  std::unordered_map<std::uint64_t, double> values;
  std::map<std::pair<std::uint64_t, int>, std::vector<double>> derivs;
  std::map<std::pair<std::uint64_t, int>, double> hooks;
};

std::string kind_label(const ConvolutionKind& kind) {
  switch (kind.kind) {
    case ConvolutionKind::additive: return "*";
    case ConvolutionKind::multiplicative: return "(*)";
    case ConvolutionKind::hankel: return "*_" + std::to_string(kind.nu);
  }
  return "?";
}

}  // namespace

double univariate_convolution(const ConvolutionKind& kind, const Weight& f, const Weight& g, double x,
                              const QuadratureSpec& spec) {
  switch (kind.kind) {
    case ConvolutionKind::additive: return additive_value(f, g, x, 0, spec);
    case ConvolutionKind::multiplicative: return multiplicative_value(f, g, x, 0, spec);
    case ConvolutionKind::hankel: {
      if (f.support().lo < 0.0 || g.support().lo < 0.0)
        throw std::domain_error("Hankel convolution needs weights on the half line");
      if (x < 0.0) return 0.0;
      HankelProduct p(kind.nu, f, g, spec);
      return inverse_hankel([&p](double s) { return p(s); }, kind.nu, x, spec);
    }
  }
  return 0.0;
}

Weight convolve_weights(const ConvolutionKind& kind, const Weight& f, const Weight& g,
                        const QuadratureSpec& spec) {
  auto cache = std::make_shared<ValueCache>();
  const std::string label = "(" + f.label() + ")" + kind_label(kind) + "(" + g.label() + ")";

  if (kind.kind == ConvolutionKind::hankel) {
    if (f.support().lo < 0.0 || g.support().lo < 0.0)
      throw std::domain_error("Hankel convolution needs weights on the half line");
    auto product = std::make_shared<const HankelProduct>(kind.nu, f, g, spec);
    const double nu = kind.nu;
    auto eval = [cache, product, nu, spec](double x) {
      const auto key = key_of(x);
      {
        std::lock_guard lock(cache->mutex);
        if (auto it = cache->values.find(key); it != cache->values.end()) return it->second;
      }
      const double v = inverse_hankel([&](double s) { return (*product)(s); }, nu, x, spec);
      std::lock_guard lock(cache->mutex);
      cache->values.emplace(key, v);
      return v;
    };
    Weight w(label, hankel_support(f.support(), g.support(), eval), eval);
    // (x^nu d x^(1-nu) d) acts as multiplication by -s on the transform side.
    return w.with_operator_hook(nu, [cache, product, nu, spec](double x, int m) {
      const auto key = std::make_pair(key_of(x), m);
      {
        std::lock_guard lock(cache->mutex);
        if (auto it = cache->hooks.find(key); it != cache->hooks.end()) return it->second;
      }
      const double v = inverse_hankel(
          [&](double s) { return std::pow(-s, m) * (*product)(s); }, nu, x, spec);
      std::lock_guard lock(cache->mutex);
      cache->hooks.emplace(key, v);
      return v;
    });
  }

  const bool additive = kind.kind == ConvolutionKind::additive;
  Support sup;
  if (additive) {
    sup = {f.support().lo + g.support().lo, f.support().hi + g.support().hi};
  } else {
    if (f.support().lo < 0.0 || g.support().lo < 0.0)
      throw std::domain_error("multiplicative convolution needs weights on the half line");
    sup = {f.support().lo * g.support().lo, f.support().hi * g.support().hi};
    if (std::isnan(sup.hi)) sup.hi = std::numeric_limits<double>::infinity();
  }

  // Put the factor we can differentiate in the second slot.
  const Weight* a = &f;
  const Weight* b = &g;
  bool analytic = smooth_everywhere(g, !additive);
  if (!analytic && smooth_everywhere(f, !additive)) {
    std::swap(a, b);
    analytic = true;
  }
  const Weight first = *a;
  const Weight second = *b;

  auto value_at = [first, second, additive, spec](double x, int k) {
    return additive ? additive_value(first, second, x, k, spec)
                    : multiplicative_value(first, second, x, k, spec);
  };
  auto eval = [cache, value_at](double x) {
    const auto key = key_of(x);
    {
      std::lock_guard lock(cache->mutex);
      if (auto it = cache->values.find(key); it != cache->values.end()) return it->second;
    }
    const double v = value_at(x, 0);
    std::lock_guard lock(cache->mutex);
    cache->values.emplace(key, v);
    return v;
  };
  Weight::DerivFn deriv;
  if (analytic) {
    deriv = [cache, value_at](double x, int order) {
      const auto key = std::make_pair(key_of(x), order);
      {
        std::lock_guard lock(cache->mutex);
        if (auto it = cache->derivs.find(key); it != cache->derivs.end()) return it->second;
      }
      std::vector<double> d(static_cast<std::size_t>(order) + 1);
      for (int k = 0; k <= order; ++k) d[static_cast<std::size_t>(k)] = value_at(x, k);
      std::lock_guard lock(cache->mutex);
      cache->derivs.emplace(key, d);
      return d;
    };
  }
  return Weight(label, sup, eval, deriv);
}

Weight convolve_polya(const MatrixSpace& space, const Weight& w1, const Weight& w2,
                      const QuadratureSpec& spec) {
  return convolve_weights(ConvolutionKind::for_space(space), w1, w2, spec);
}

WeightVector convolve_mixed(const MatrixSpace& space, const WeightVector& ws, const Weight& w,
                            const QuadratureSpec& spec) {
  if (static_cast<int>(ws.size()) != space.n())
    throw std::invalid_argument("convolve_mixed: weight vector length must equal n");
  WeightVector out;
  for (const auto& wb : ws) out.push_back(convolve_polya(space, wb, w, spec));
  return out;
}

}  // namespace polya
