#include "polya/quadrature.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <queue>
#include <vector>

namespace polya {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<T, 15> fv;
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(c - h * kXgk[j]);
    fv[14 - j] = f(c + h * kXgk[j]);
  }
  T kron = fv[7] * kWgk[7];
  T gauss = fv[7] * kWg[3];
  for (int j = 0; j < 7; ++j) {
    kron += (fv[j] + fv[14 - j]) * kWgk[j];
    if (j % 2 == 1) gauss += (fv[j] + fv[14 - j]) * kWg[j / 2];
  }
  const T mean = kron * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  resasc *= std::abs(h);
  double err = std::abs((kron - gauss) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kron * h));
  if (!std::isfinite(std::abs(kron))) err = std::numeric_limits<double>::infinity();
  return {a, b, kron * h, err};
}

template <class T, class F>
QuadResult<T> adaptive(const F& f, double a, double b, const QuadratureSpec& spec) {
  QuadResult<T> out;
  if (a == b) return out;
  std::priority_queue<Segment<T>> heap;
  auto first = gk15<T>(f, a, b);
  out.evaluations = 15;
  T total = first.value;
  double err = first.error;
  heap.push(first);
  int subdivisions = 1;
  while (err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) &&
         subdivisions < spec.max_subdivisions) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;
    }
    auto left = gk15<T>(f, worst.a, mid);
    auto right = gk15<T>(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to limit drift from incremental updates.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = esum;
  if (!std::isfinite(std::abs(sum))) throw DivergenceError("integrand is not finite on the interval");
  return out;
}

template <class T, class F>
QuadResult<T> tail_doubling(const F& f, double a, double direction, double scale,
                            const QuadratureSpec& spec) {
  QuadResult<T> out;
  double start = a;
  double length = scale;
  double prev_mag = -1.0;
  int growing = 0;
  int small = 0;
  QuadratureSpec local = spec;
  for (int piece = 0; piece < 90; ++piece) {
    const double end = start + direction * length;
    auto r = direction > 0 ? adaptive<T>(f, start, end, local) : adaptive<T>(f, end, start, local);
    const T contribution = direction > 0 ? r.value : r.value;
    out.value += contribution;
    out.error += r.error;
    out.evaluations += r.evaluations;
    const double mag = std::abs(contribution);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
    // Growth only signals divergence once |f| itself has stopped rising. The
    // first piece never counts, so f is not evaluated at the finite end point.
    const bool grew = prev_mag > 0.0 && mag > tol && mag >= 0.9 * prev_mag;
    if (grew && !(std::abs(f(end)) > std::abs(f(start)))) {
      if (++growing >= 3) throw DivergenceError("tail increments do not decay");
    } else {
      growing = 0;
    }
    if (mag <= 0.1 * tol) {
      if (++small >= 2 && piece >= 5) return out;
    } else {
      small = 0;
    }
    prev_mag = mag;
    start = end;
    length *= 2.0;
  }
  throw DivergenceError("tail did not converge after 90 doublings");
}

template <class T, class F>
QuadResult<T> tail_map(const F& f, double a, double direction, double scale,
                       const QuadratureSpec& spec) {
  auto g = [&](double t) -> T {
    if (t >= 1.0) return T{};
    const double u = 1.0 - t;
    const double x = a + direction * scale * t / u;
    const T v = f(x);
    return v * (scale / (u * u));
  };
  auto r = adaptive<T>(g, 0.0, 1.0, spec);
  return r;
}

template <class T, class F>
QuadResult<T> integrate_any(const F& f, double a, double b, double scale, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("integrate: NaN bound");
  if (a > b) {
    auto r = integrate_any<T>(f, b, a, scale, spec);
    r.value = r.value * -1.0;
    return r;
  }
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) return adaptive<T>(f, a, b, spec);
  auto tail = [&](double from, double dir) {
    return spec.tail_cutoff_strategy == TailStrategy::doubling
               ? tail_doubling<T>(f, from, dir, scale, spec)
               : tail_map<T>(f, from, dir, scale, spec);
  };
  if (lo_inf && hi_inf) {
    auto r1 = tail(0.0, -1.0);
    auto r2 = tail(0.0, 1.0);
    r1.value += r2.value;
    r1.error += r2.error;
    r1.evaluations += r2.evaluations;
    return r1;
  }
  if (hi_inf) return tail(a, 1.0);
  return tail(b, -1.0);
}

template <class T, class F>
QuadResult<T> oscillatory(const F& f, double a, const std::function<double(int)>& breakpoint,
                          const QuadratureSpec& spec) {
  spec.validate();
  QuadResult<T> out;
  std::vector<T> partial;
  T sum{};
  double lo = a;
  int small = 0;
  T last_euler{};
  bool have_euler = false;
  constexpr int kEulerWindow = 16;
  constexpr int kMaxTerms = 4000;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double hi = breakpoint(k);
    if (!(hi > lo)) throw std::invalid_argument("oscillatory breakpoints must increase");
    auto r = adaptive<T>(f, lo, hi, spec);
    out.evaluations += r.evaluations;
    out.error += r.error;
    sum += r.value;
    partial.push_back(sum);
    lo = hi;
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(sum));
    if (std::abs(r.value) <= 0.1 * tol) {
      if (++small >= 3 && k >= 4) {
        out.value = sum;
        return out;
      }
    } else {
      small = 0;
    }
    if (k >= 2 * kEulerWindow) {
      std::vector<T> level(partial.end() - kEulerWindow, partial.end());
      for (int l = kEulerWindow - 1; l > 0; --l)
        for (int i = 0; i < l; ++i) level[i] = (level[i] + level[i + 1]) * 0.5;
      if (have_euler && std::abs(level[0] - last_euler) <= tol) {
        out.value = level[0];
        out.error += std::abs(level[0] - last_euler);
        return out;
      }
      last_euler = level[0];
      have_euler = true;
    }
  }
  throw DivergenceError("oscillatory tail did not converge; last partial sum magnitude " +
                        std::to_string(std::abs(sum)));
}

}  // namespace

QuadResult<double> integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_any<double>(f, a, b, 1.0, spec);
}
QuadResult<std::complex<double>> integrate(const ComplexFn& f, double a, double b,
                                           const QuadratureSpec& spec) {
  return integrate_any<std::complex<double>>(f, a, b, 1.0, spec);
}
QuadResult<double> integrate_scaled(const RealFn& f, double a, double b, double scale,
                                    const QuadratureSpec& spec) {
  return integrate_any<double>(f, a, b, scale, spec);
}
QuadResult<std::complex<double>> integrate_scaled(const ComplexFn& f, double a, double b,
                                                  double scale, const QuadratureSpec& spec) {
  return integrate_any<std::complex<double>>(f, a, b, scale, spec);
}

QuadResult<double> integrate_oscillatory(const RealFn& f, double a,
                                         const std::function<double(int)>& breakpoint,
                                         const QuadratureSpec& spec) {
  return oscillatory<double>(f, a, breakpoint, spec);
}
QuadResult<std::complex<double>> integrate_oscillatory(const ComplexFn& f, double a,
                                                       const std::function<double(int)>& breakpoint,
                                                       const QuadratureSpec& spec) {
  return oscillatory<std::complex<double>>(f, a, breakpoint, spec);
}

FixedRule gauss_legendre_rule(double a, double b, int panels, int order) {
  std::vector<double> x(static_cast<std::size_t>(order));
  std::vector<double> w(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) {
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
        break;
      }
    }
  }
  FixedRule rule;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(lo + 0.5 * h * (1.0 - x[static_cast<std::size_t>(i)]));
      rule.weights.push_back(0.5 * h * w[static_cast<std::size_t>(i)]);
    }
  }
  return rule;
}

}  // namespace polya
