#include "polya/haarmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "polya/parallel.hpp"
#include "polya/special.hpp"
#include "polya/transforms.hpp"

namespace polya {

namespace {

constexpr long kChunk = 4096;

MatrixXc complex_ginibre(int rows, int cols, std::mt19937_64& rng, double variance = 1.0) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
  MatrixXc z(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      z(i, j) = Complex(re, im);
    }
  return z;
}

MatrixXc unitary(int n, std::mt19937_64& rng) {
  const MatrixXc z = complex_ginibre(n, n, rng);
  Eigen::HouseholderQR<MatrixXc> qr(z);
  MatrixXc q = qr.householderQ();
  const MatrixXc& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double m = std::abs(d);
    if (m > 0.0) q.col(j) *= d / m;
  }
  return q;
}

MatrixXc orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXr z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = nd(rng);
  Eigen::HouseholderQR<MatrixXr> qr(z);
  MatrixXr q = qr.householderQ();
  const MatrixXr& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q.cast<Complex>();
}

// Quaternionic Gram-Schmidt in the block basis with J_b = [[0, I], [-I, 0]],
// then reordered to the interleaved basis.
MatrixXc symplectic(int n, std::mt19937_64& rng) {
  const MatrixXc a = complex_ginibre(n, n, rng);
  const MatrixXc b = complex_ginibre(n, n, rng);
  auto twist = [n](const Eigen::VectorXcd& v) {  // T v = -J_b conj(v)
    Eigen::VectorXcd t(2 * n);
    t.head(n) = v.tail(n).conjugate() * -1.0;
    t.tail(n) = v.head(n).conjugate();
    return t;
  };
  MatrixXc k(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd v(2 * n);
    v.head(n) = a.col(j);
    v.tail(n) = -b.col(j).conjugate();
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < j; ++i) {
        v -= k.col(i) * k.col(i).dot(v);
        v -= k.col(n + i) * k.col(n + i).dot(v);
      }
    v /= v.norm();
    k.col(j) = v;
    k.col(n + j) = twist(v);
  }
  // block index j -> 2j, n + j -> 2j + 1
  Eigen::VectorXi perm(2 * n);
  for (int j = 0; j < n; ++j) {
    perm(j) = 2 * j;
    perm(n + j) = 2 * j + 1;
  }
  MatrixXc out(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) out(perm(r), perm(c)) = k(r, c);
  return out;
}

struct Moments {
  long count = 0;
  double mean_re = 0.0, mean_im = 0.0, m2_re = 0.0, m2_im = 0.0;

  void add(Complex z) {
    ++count;
    const double dr = z.real() - mean_re;
    mean_re += dr / count;
    m2_re += dr * (z.real() - mean_re);
    const double di = z.imag() - mean_im;
    mean_im += di / count;
    m2_im += di * (z.imag() - mean_im);
  }
};

Moments merge(const Moments& a, const Moments& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  Moments m;
  m.count = a.count + b.count;
  const double w = static_cast<double>(a.count) * static_cast<double>(b.count) / m.count;
  const double dr = b.mean_re - a.mean_re;
  const double di = b.mean_im - a.mean_im;
  m.mean_re = a.mean_re + dr * b.count / m.count;
  m.mean_im = a.mean_im + di * b.count / m.count;
  m.m2_re = a.m2_re + b.m2_re + dr * dr * w;
  m.m2_im = a.m2_im + b.m2_im + di * di * w;
  return m;
}

Moments pairwise(const std::vector<Moments>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(pairwise(parts, lo, mid), pairwise(parts, mid, hi));
}

// Taylor coefficient of k(x, y) = phi(x y) of order (p, q) at (x0, y0),
// given phi^(m)(x0 y0).
template <class T>
T product_kernel_taylor(const std::function<T(int)>& phi_derivative, double x0, double y0, int p, int q) {
  T sum{};
  for (int g = 0; g <= std::min(p, q); ++g) {
    const int m = p + q - g;
    const double c = std::pow(y0, p - g) * std::pow(x0, q - g) /
                     (factorial(p - g) * factorial(q - g) * factorial(g));
    sum += phi_derivative(m) * c;
  }
  return sum;
}

void check_points(std::span<const double> a, std::span<const double> s) {
  if (a.empty() || a.size() != s.size()) throw std::invalid_argument("a and s must have equal positive length");
}

std::vector<double> ascending_eigenvalues(const MatrixXc& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

int GroupKind::dimension() const {
  switch (kind) {
    case Unitary:
    case Orthogonal: return n;
    case Symplectic: return 2 * n;
    case ProductUnitary: return 2 * n + nu;
  }
  return n;
}

GroupKind GroupKind::for_space(const MatrixSpace& space) {
  const int n = space.n();
  switch (space.kind()) {
    case SpaceKind::H2:
    case SpaceKind::G: return {Unitary, n, 0};
    case SpaceKind::Mnu: return {ProductUnitary, n, static_cast<int>(space.nu())};
    case SpaceKind::H1even: return {Orthogonal, 2 * n, 0};
    case SpaceKind::H1odd: return {Orthogonal, 2 * n + 1, 0};
    case SpaceKind::H4: return {Symplectic, n, 0};
  }
  return {Unitary, n, 0};
}

MatrixXc symplectic_form(int n) {
  MatrixXc j = MatrixXc::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    j(2 * i, 2 * i + 1) = 1.0;
    j(2 * i + 1, 2 * i) = -1.0;
  }
  return j;
}

MatrixXc haar_sample(const GroupKind& g, std::mt19937_64& rng) {
  if (g.n < 1 || g.nu < 0) throw std::invalid_argument("group dimensions must be positive");
  switch (g.kind) {
    case GroupKind::Unitary: return unitary(g.n, rng);
    case GroupKind::Orthogonal: return orthogonal(g.n, rng);
    case GroupKind::Symplectic: return symplectic(g.n, rng);
    case GroupKind::ProductUnitary: {
      MatrixXc k = MatrixXc::Zero(2 * g.n + g.nu, 2 * g.n + g.nu);
      k.topLeftCorner(g.n, g.n) = unitary(g.n, rng);
      k.bottomRightCorner(g.n + g.nu, g.n + g.nu) = unitary(g.n + g.nu, rng);
      return k;
    }
  }
  return {};
}

MatrixXc haar_sample(const GroupKind& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_sample(g, rng);
}

McReport monte_carlo(long n_samples, std::uint64_t seed,
                     const std::function<Complex(std::mt19937_64&)>& draw) {
  if (n_samples < 1) throw std::invalid_argument("monte_carlo: need at least one sample");
  const long chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(static_cast<std::size_t>(chunks));
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const long begin = static_cast<long>(c) * kChunk;
    const long end = std::min(n_samples, begin + kChunk);
    Moments m;
    for (long i = begin; i < end; ++i) m.add(draw(rng));
    parts[c] = m;
  });
  const Moments total = pairwise(parts, 0, parts.size());
  McReport r;
  r.estimate = Complex(total.mean_re, total.mean_im);
  const double var = total.count > 1 ? (total.m2_re + total.m2_im) / (total.count - 1) : 0.0;
  r.std_error = std::sqrt(std::max(0.0, var) / total.count);
  r.n_samples = n_samples;
  r.seed = seed;
  return r;
}

IntegralKind IntegralKind::bk_on(const MatrixSpace& space) {
  if (!space.is_hankel_class()) throw std::invalid_argument("Berezin-Karpelevich needs Mnu, H1 or H4");
  return {bk, space.kind(), space.nu()};
}

double IntegralKind::bessel_order() const {
  switch (space) {
    case SpaceKind::H1even: return -0.5;
    case SpaceKind::H1odd:
    case SpaceKind::H4: return 0.5;
    default: return nu;
  }
}

Complex group_integral_closed(const IntegralKind& kind, std::span<const double> a,
                              std::span<const double> s) {
  check_points(a, s);
  const int n = static_cast<int>(a.size());
  const int pairs = n * (n - 1) / 2;
  switch (kind.kind) {
    case IntegralKind::hciz: {
      std::function<Complex(double, double, int, int)> taylor = [](double x, double y, int p, int q) {
        const Complex e = std::exp(Complex(0.0, x * y));
        std::function<Complex(int)> d = [e](int m) { return std::pow(Complex(0.0, 1.0), m) * e; };
        return product_kernel_taylor<Complex>(d, x, y, p, q);
      };
      const Complex ratio = det_over_vandermonde_2d<Complex>(n, a, s, taylor);
      return superfactorial(n) * ratio / std::pow(Complex(0.0, 1.0), pairs);
    }
    case IntegralKind::bk: {
      const double nu = kind.bessel_order();
      for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] > 0.0) || s[i] < 0.0) throw std::domain_error("bk: need a > 0 and s >= 0");
      std::function<double(double, double, int, int)> taylor = [nu](double x, double y, int p, int q) {
        const double z = x * y;
        std::function<double(int)> d = [nu, z](int m) { return hankel_kernel_derivative(nu, m, z); };
        return product_kernel_taylor<double>(d, x, y, p, q);
      };
      const double ratio = det_over_vandermonde_2d<double>(n, a, s, taylor);
      double pre = 1.0;
      for (int j = 0; j < n; ++j) pre *= std::exp(std::lgamma(j + nu + 1.0) - std::lgamma(nu + 1.0)) * factorial(j);
      return pre * ratio * ((pairs % 2) ? -1.0 : 1.0);
    }
    case IntegralKind::gn: {
      for (double v : a)
        if (!(v > 0.0)) throw std::domain_error("gn: need a > 0");
      const double c = 0.5 * (n + 1);
      std::function<double(double, double, int, int)> taylor = [c](double x, double y, int p, int q) {
        const Jet xj = Jet::variable(x, p);
        const Jet r = ipow(log(xj), q) * pow(xj, y - c) / factorial(q);
        return r[static_cast<std::size_t>(p)];
      };
      return superfactorial(n) * det_over_vandermonde_2d<double>(n, a, s, taylor);
    }
  }
  return 0.0;
}

McReport group_integral_mc(const IntegralKind& kind, std::span<const double> a,
                           std::span<const double> s, long n_samples, std::uint64_t seed) {
  check_points(a, s);
  if (n_samples < 1000) throw std::invalid_argument("group_integral_mc: need at least 1000 samples");
  const int n = static_cast<int>(a.size());
  const std::vector<double> av(a.begin(), a.end());
  const std::vector<double> sv(s.begin(), s.end());
  switch (kind.kind) {
    case IntegralKind::hciz: {
      const GroupKind g{GroupKind::Unitary, n, 0};
      return monte_carlo(n_samples, seed, [&](std::mt19937_64& rng) {
        const MatrixXc k = haar_sample(g, rng);
        double phase = 0.0;
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) phase += av[static_cast<std::size_t>(b)] * sv[static_cast<std::size_t>(c)] * std::norm(k(b, c));
        return std::exp(Complex(0.0, phase));
      });
    }
    case IntegralKind::bk: {
      const MatrixSpace space(kind.space, n, kind.nu);
      const MatrixXc A = embed_iota(space, av);
      const MatrixXc S = embed_iota(space, sv);
      const GroupKind g = GroupKind::for_space(space);
      return monte_carlo(n_samples, seed, [&](std::mt19937_64& rng) {
        const MatrixXc k = haar_sample(g, rng);
        const double t = (k.adjoint() * A * k * S).trace().real();
        return std::exp(Complex(0.0, t));
      });
    }
    case IntegralKind::gn: {
      for (double v : av)
        if (!(v > 0.0)) throw std::domain_error("gn: need a > 0");
      std::vector<double> expo(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        const double next = j + 1 < n ? sv[static_cast<std::size_t>(j + 1)] : 0.5 * (n - 1);
        expo[static_cast<std::size_t>(j)] = sv[static_cast<std::size_t>(j)] - next - 1.0;
      }
      const GroupKind g{GroupKind::Unitary, n, 0};
      Eigen::VectorXcd adiag(n);
      for (int j = 0; j < n; ++j) adiag(j) = av[static_cast<std::size_t>(j)];
      return monte_carlo(n_samples, seed, [&](std::mt19937_64& rng) {
        const MatrixXc k = haar_sample(g, rng);
        const MatrixXc m = k * adiag.asDiagonal() * k.adjoint();
        Eigen::LLT<MatrixXc> llt(m);
        const MatrixXc& l = llt.matrixLLT();
        double log_minor = 0.0;
        double log_value = 0.0;
        for (int j = 0; j < n; ++j) {
          log_minor += 2.0 * std::log(l(j, j).real());
          log_value += expo[static_cast<std::size_t>(j)] * log_minor;
        }
        return Complex(std::exp(log_value), 0.0);
      });
    }
  }
  return {};
}

Complex group_integral_rank_one(const IntegralKind& kind, double a, double s, const QuadratureSpec& spec) {
  switch (kind.kind) {
    case IntegralKind::hciz: return std::exp(Complex(0.0, a * s));
    case IntegralKind::gn:
      if (!(a > 0.0)) throw std::domain_error("gn: need a > 0");
      return std::pow(a, s - 1.0);
    case IntegralKind::bk: {
      if (!(a > 0.0) || s < 0.0) throw std::domain_error("bk: need a > 0 and s >= 0");
      const double nu = kind.bessel_order();
      const double r = 2.0 * std::sqrt(a * s);
      if (nu == -0.5) return std::cos(r);
      // t = cos(theta) with density proportional to sin^(2 nu)(theta)
      const double norm = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(nu + 0.5) - std::lgamma(nu + 1.0));
      RealFn g = [r, nu](double th) { return std::cos(r * std::cos(th)) * std::pow(std::sin(th), 2.0 * nu); };
      return integrate(g, 0.0, std::numbers::pi, spec).value / norm;
    }
  }
  return 0.0;
}

double vandermonde_neg_inverse(std::span<const double> x) {
  double p = 1.0;
  for (std::size_t b = 0; b < x.size(); ++b)
    for (std::size_t c = b + 1; c < x.size(); ++c) p *= 1.0 / x[b] - 1.0 / x[c];
  return p;
}

GroupIdentity polya_group_identity(const MatrixSpace& space, const Weight& w, const SpectralPoint& x,
                                   const SpectralPoint& y, long n_samples, std::uint64_t seed,
                                   const QuadratureSpec& spec) {
  const int n = space.n();
  x.validate_for(space);
  y.validate_for(space);
  const Ensemble e = Ensemble::polya(space, w, spec);
  const double cm = space_constant(space);
  const auto& xv = x.values();
  const auto& yv = y.values();

  // C_n det[w_b(a_c)] / Delta(a), with the confluent limit if needed.
  auto det_ratio = [&e, n](const std::vector<double>& pts) {
    std::function<double(int, double, int)> entry = [&e](int b, double t, int q) {
      if (q == 0) return e.weight_value(b, t);
      const Weight& wb = e.weights()[static_cast<std::size_t>(b)];
      return wb.support().contains(t) ? wb.derivative(t, q) / factorial(q) : 0.0;
    };
    return e.norm() * det_over_vandermonde<double>(n, pts, entry);
  };

  GroupIdentity out;
  const GroupKind g = GroupKind::for_space(space);
  if (space.kind() == SpaceKind::H2) {
    const double pre = vandermonde(yv) * vandermonde(xv);
    out.lhs = monte_carlo(n_samples, seed, [&](std::mt19937_64& rng) {
      const MatrixXc k = haar_sample(g, rng);
      MatrixXc z = -k * Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(xv.data(), n)).cast<Complex>().asDiagonal() * k.adjoint();
      for (int i = 0; i < n; ++i) z(i, i) += yv[static_cast<std::size_t>(i)];
      return Complex(pre * det_ratio(ascending_eigenvalues(z)) / cm, 0.0);
    });
    MatrixXr m(n, n);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) m(b, c) = w(yv[static_cast<std::size_t>(b)] - xv[static_cast<std::size_t>(c)]);
    const double f0 = univariate_transform(TransformKind::fourier(), w, 0.0, spec).real();
    out.rhs = m.determinant() / (std::pow(f0, n) * factorial(n) * cm);
    return out;
  }
  if (space.kind() == SpaceKind::G) {
    const double pre = vandermonde(yv) * vandermonde_neg_inverse(xv);
    Eigen::VectorXcd xi(n), ys(n);
    for (int j = 0; j < n; ++j) {
      xi(j) = 1.0 / std::sqrt(xv[static_cast<std::size_t>(j)]);
      ys(j) = std::sqrt(yv[static_cast<std::size_t>(j)]);
    }
    out.lhs = monte_carlo(n_samples, seed, [&](std::mt19937_64& rng) {
      const MatrixXc k = haar_sample(g, rng);
      const MatrixXc m = xi.asDiagonal() * k * ys.asDiagonal();
      return Complex(pre * det_ratio(ascending_eigenvalues(m * m.adjoint())) / cm, 0.0);
    });
    MatrixXr m(n, n);
    double mellin = 1.0;
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) m(b, c) = w(yv[static_cast<std::size_t>(b)] / xv[static_cast<std::size_t>(c)]);
    for (int j = 1; j <= n; ++j) mellin *= univariate_transform(TransformKind::mellin(), w, Complex(j, 0.0), spec).real();
    out.rhs = m.determinant() / (factorial(n) * cm * mellin);
    return out;
  }

  // Mnu, H1, H4
  const double nu = space.nu();
  const MatrixXc X = embed_iota(space, xv);
  const MatrixXc Y = embed_iota(space, yv);
  const double pre = vandermonde(yv) * vandermonde(xv);
  out.lhs = monte_carlo(n_samples, seed, [&](std::mt19937_64& rng) {
    const MatrixXc k = haar_sample(g, rng);
    const MatrixXc z = Y - k * X * k.adjoint();
    const auto ev = ascending_eigenvalues(z);
    std::vector<double> a(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const double l = ev[ev.size() - 1 - static_cast<std::size_t>(j)];
      a[static_cast<std::size_t>(n - 1 - j)] = l * l;
    }
    double detpow = 1.0;
    for (double v : a) detpow *= std::pow(v, nu);
    return Complex(pre * det_ratio(a) / (cm * detpow), 0.0);
  });

  const double c1 = space_constant(space.with_n(1));
  const double h0 = univariate_transform(TransformKind::hankel(nu), w, 0.0, spec).real();
  auto p1 = [&](double a) {
    if (!(a > 0.0)) return 0.0;
    return w(a) / (h0 * c1 * std::pow(a, nu));
  };
  auto i1 = [&](double yy, double xx) {
    const double r = 2.0 * std::sqrt(xx * yy);
    if (nu == -0.5) return 0.5 * (p1(yy + xx - r) + p1(yy + xx + r));
    const double norm = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(nu + 0.5) - std::lgamma(nu + 1.0));
    RealFn g1 = [&](double th) { return p1(yy + xx - r * std::cos(th)) * std::pow(std::sin(th), 2.0 * nu); };
    return integrate(g1, 0.0, std::numbers::pi, spec).value / norm;
  };
  MatrixXr m(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) m(b, c) = i1(yv[static_cast<std::size_t>(b)], xv[static_cast<std::size_t>(c)]);
  out.rhs = std::pow(c1, n) / (factorial(n) * cm) * m.determinant();
  return out;
}

SampleFamily SampleFamily::parse(const std::string& text) {
  SampleFamily f;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (name == "gaussian") f.kind = gaussian;
  else if (name == "laguerre") f.kind = laguerre;
  else if (name == "ginibre") f.kind = ginibre;
  else if (name == "jacobi") f.kind = jacobi;
  else throw std::invalid_argument("unknown sample family '" + name + "'");
  if (colon == std::string::npos) return f;
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string kv = rest.substr(pos, comma - pos);
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad family parameter '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const double val = std::stod(kv.substr(eq + 1));
    if (key == "eps") f.eps = val;
    else if (key == "nu") f.nu = static_cast<int>(val);
    else if (key == "mu") f.mu = static_cast<int>(val);
    else throw std::invalid_argument("unknown family parameter '" + key + "'");
    pos = comma + 1;
  }
  return f;
}

MatrixXc sample_matrix(const MatrixSpace& space, const SampleFamily& family, std::mt19937_64& rng) {
  const int n = space.n();
  const double eps = family.eps;
  if (!(eps > 0.0)) throw std::invalid_argument("gaussian scale must be positive");
  std::normal_distribution<double> nd(0.0, 1.0);
  auto normal = [&](double var) { return std::sqrt(var) * nd(rng); };
  switch (family.kind) {
    case SampleFamily::gaussian:
      switch (space.kind()) {
        case SpaceKind::H2: {
          MatrixXc h(n, n);
          for (int i = 0; i < n; ++i) {
            h(i, i) = normal(eps);
            for (int j = i + 1; j < n; ++j) {
              const double re = normal(0.5 * eps);
              const double im = normal(0.5 * eps);
              h(i, j) = Complex(re, im);
              h(j, i) = Complex(re, -im);
            }
          }
          return h;
        }
        case SpaceKind::Mnu: {
          const int m = n + static_cast<int>(space.nu());
          const MatrixXc y = complex_ginibre(n, m, rng, eps);
          MatrixXc h = MatrixXc::Zero(n + m, n + m);
          h.topRightCorner(n, m) = y;
          h.bottomLeftCorner(m, n) = y.adjoint();
          return h;
        }
        case SpaceKind::H1even:
        case SpaceKind::H1odd: {
          const int d = space.ambient_dimension();
          MatrixXc h = MatrixXc::Zero(d, d);
          for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
              const double v = normal(0.5 * eps);
              h(i, j) = Complex(0.0, v);
              h(j, i) = Complex(0.0, -v);
            }
          return h;
        }
        case SpaceKind::H4: {
          MatrixXc p(n, n), q(n, n);
          for (int i = 0; i < n; ++i) {
            p(i, i) = normal(0.5 * eps);
            {
              const double re = normal(0.5 * eps);
              const double im = normal(0.5 * eps);
              q(i, i) = Complex(re, im);
            }
            for (int j = i + 1; j < n; ++j) {
              const double pr = normal(0.25 * eps);
              const double pi = normal(0.25 * eps);
              p(i, j) = Complex(pr, pi);
              p(j, i) = Complex(pr, -pi);
              const double qr = normal(0.25 * eps);
              const double qi = normal(0.25 * eps);
              q(i, j) = Complex(qr, qi);
              q(j, i) = Complex(qr, qi);
            }
          }
          MatrixXc h(2 * n, 2 * n);
          h.topLeftCorner(n, n) = p;
          h.topRightCorner(n, n) = q;
          h.bottomLeftCorner(n, n) = q.conjugate();
          h.bottomRightCorner(n, n) = -p.conjugate();
          return h;
        }
        case SpaceKind::G: break;
      }
      break;
    case SampleFamily::laguerre:
      if (space.kind() == SpaceKind::H2) {
        if (family.nu < 0) throw std::invalid_argument("laguerre: nu must be >= 0");
        const MatrixXc wm = complex_ginibre(n, n + family.nu, rng);
        return wm * wm.adjoint();
      }
      break;
    case SampleFamily::ginibre:
      if (space.kind() == SpaceKind::G) {
        if (family.nu < 0) throw std::invalid_argument("ginibre: nu must be >= 0");
        if (family.nu == 0) return complex_ginibre(n, n, rng);
        const MatrixXc wm = complex_ginibre(n, n + family.nu, rng);
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(wm * wm.adjoint());
        return es.operatorSqrt() * unitary(n, rng);
      }
      break;
    case SampleFamily::jacobi:
      if (space.kind() == SpaceKind::G) {
        if (family.nu < 0 || family.mu < 0) throw std::invalid_argument("jacobi: nu, mu must be >= 0");
        const MatrixXc u = unitary(2 * n + family.nu + family.mu, rng);
        const MatrixXc t = u.topLeftCorner(n, n + family.nu);
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(t * t.adjoint());
        return es.operatorSqrt() * unitary(n, rng);
      }
      break;
  }
  throw std::invalid_argument("sample family is not compatible with space " + space.name());
}

SpectralPoint spectrum_of(const MatrixSpace& space, const MatrixXc& m) {
  const int n = space.n();
  if (space.kind() == SpaceKind::H2) return SpectralPoint(ascending_eigenvalues(m));
  if (space.kind() == SpaceKind::G) return SpectralPoint(ascending_eigenvalues(m * m.adjoint()));
  const auto ev = ascending_eigenvalues(m);
  std::vector<double> a;
  for (int j = 0; j < n; ++j) {
    const double l = ev[ev.size() - 1 - static_cast<std::size_t>(j)];
    a.push_back(l * l);
  }
  return SpectralPoint(a);
}

SpectralPoint sample_matrix_ensemble(const MatrixSpace& space, const SampleFamily& family,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return spectrum_of(space, sample_matrix(space, family, rng));
}

Weight family_weight(const MatrixSpace& space, const SampleFamily& family) {
  const double n = space.n();
  switch (family.kind) {
    case SampleFamily::gaussian:
      if (space.kind() == SpaceKind::H2) {
        const double eps = family.eps;
        return Weight::from_jet("gaussian(eps=" + std::to_string(eps) + ")", Support::real_line(),
                                [eps](const Jet& x) { return exp(x * x * (-0.5 / eps)); });
      }
      if (space.kind() != SpaceKind::G)
        return make_family("gaussian_radial", {{"nu", space.nu()}, {"eps", family.eps}});
      break;
    case SampleFamily::laguerre:
      if (space.kind() == SpaceKind::H2) return make_family("laguerre_H2", {{"n", n}, {"nu", double(family.nu)}});
      break;
    case SampleFamily::ginibre:
      if (space.kind() == SpaceKind::G) return make_family("ginibre", {{"nu", double(family.nu)}});
      break;
    case SampleFamily::jacobi:
      if (space.kind() == SpaceKind::G)
        return make_family("jacobi", {{"n", n}, {"nu", double(family.nu)}, {"mu", double(family.mu)}});
      break;
  }
  throw std::invalid_argument("sample family is not compatible with space " + space.name());
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& density,
                   const Support& support, const QuadratureSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t count = samples.size();
  // CDF on a grid of sample quantiles.
  const std::size_t knots = std::min<std::size_t>(1000, count);
  std::vector<double> grid;
  for (std::size_t i = 0; i <= knots; ++i) {
    const double v = samples[std::min(count - 1, i * (count - 1) / knots)];
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  RealFn rho = [&density](double x) { return density(x); };
  QuadratureSpec local = spec;
  local.rel_tol = std::max(spec.rel_tol, 1e-7);
  local.abs_tol = std::max(spec.abs_tol, 1e-11);
  std::vector<double> cdf(grid.size());
  cdf[0] = integrate(rho, support.lo, grid[0], local).value;
  for (std::size_t i = 1; i < grid.size(); ++i) cdf[i] = cdf[i - 1] + integrate(rho, grid[i - 1], grid[i], local).value;
  double d = 0.0;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = samples[i];
    while (seg + 1 < grid.size() && grid[seg + 1] < x) ++seg;
    double f;
    if (seg + 1 >= grid.size()) f = cdf.back();
    else {
      const double t = (x - grid[seg]) / (grid[seg + 1] - grid[seg]);
      f = cdf[seg] + std::clamp(t, 0.0, 1.0) * (cdf[seg + 1] - cdf[seg]);
    }
    d = std::max({d, std::abs(f - static_cast<double>(i) / count), std::abs(f - static_cast<double>(i + 1) / count)});
  }
  return d;
}

double empirical_convolution_check(const MatrixSpace& space, const SampleFamily& f1, const SampleFamily& f2,
                                   long n_samples, std::uint64_t seed, const QuadratureSpec& spec) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  const int n = space.n();
  const bool product = space.kind() == SpaceKind::G;
  std::vector<double> pooled(static_cast<std::size_t>(n_samples) * static_cast<std::size_t>(n));
  const long chunks = (n_samples + kChunk - 1) / kChunk;
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const long begin = static_cast<long>(c) * kChunk;
    const long end = std::min(n_samples, begin + kChunk);
    for (long i = begin; i < end; ++i) {
      const MatrixXc x1 = sample_matrix(space, f1, rng);
      const MatrixXc x2 = sample_matrix(space, f2, rng);
      const SpectralPoint sp = spectrum_of(space, product ? MatrixXc(x1 * x2) : MatrixXc(x1 + x2));
      for (int j = 0; j < n; ++j)
        pooled[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
            sp.values()[static_cast<std::size_t>(j)];
    }
  });
  const Weight target = convolve_polya(space, family_weight(space, f1), family_weight(space, f2), spec);
  const Ensemble e = Ensemble::polya(space, target, spec);
  return ks_distance(std::move(pooled), marginal_density(e, spec), target.support(), spec);
}

}  // namespace polya
