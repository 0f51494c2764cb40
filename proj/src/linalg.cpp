#include "polya/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polya {

double vandermonde(std::span<const double> a) {
  double p = 1.0;
  for (std::size_t b = 0; b < a.size(); ++b)
    for (std::size_t c = b + 1; c < a.size(); ++c) p *= a[c] - a[b];
  return p;
}

DividedDifferences divided_differences(std::span<const double> points, double merge_tol) {
  DividedDifferences dd;
  std::vector<double> t(points.begin(), points.end());
  std::sort(t.begin(), t.end());
  const std::size_t n = t.size();

  // Merge clusters into exact repeats at the cluster mean.
  std::vector<int> owner(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && t[j] - t[j - 1] <= merge_tol * std::max(1.0, std::fabs(t[j]))) ++j;
    double mean = 0.0;
    for (std::size_t k = i; k < j; ++k) mean += t[k];
    mean /= static_cast<double>(j - i);
    if (j - i > 1) dd.confluent = true;
    dd.max_order = std::max(dd.max_order, static_cast<int>(j - i) - 1);
    for (std::size_t k = i; k < j; ++k) {
      t[k] = mean;
      owner[k] = static_cast<int>(dd.nodes.size());
    }
    dd.nodes.push_back(mean);
    i = j;
  }
  dd.sorted_points = t;

  const int nodes = static_cast<int>(dd.nodes.size());
  const int orders = dd.max_order + 1;
  // table[i][j] for i <= j, stored row by row of the Newton tableau
  std::vector<std::vector<MatrixXr>> table(n, std::vector<MatrixXr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    table[i][i] = MatrixXr::Zero(nodes, orders);
    table[i][i](owner[i], 0) = 1.0;
  }
  for (std::size_t len = 1; len < n; ++len) {
    for (std::size_t i = 0; i + len < n; ++i) {
      const std::size_t j = i + len;
      if (t[j] == t[i]) {
        table[i][j] = MatrixXr::Zero(nodes, orders);
        table[i][j](owner[i], static_cast<int>(len)) = 1.0;
      } else {
        table[i][j] = (table[i + 1][j] - table[i][j - 1]) / (t[j] - t[i]);
      }
    }
  }
  for (std::size_t c = 0; c < n; ++c) dd.weights.push_back(table[0][c]);
  return dd;
}

template <class T>
T det_over_vandermonde(int n, std::span<const double> points,
                       const std::function<T(int, double, int)>& entry) {
  if (static_cast<int>(points.size()) != n) throw std::invalid_argument("point count mismatch");
  if (n == 0) return T(1);
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  auto dd = divided_differences(points);
  Mat m(n, n);
  if (!dd.confluent) {
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) m(b, c) = entry(b, points[static_cast<std::size_t>(c)], 0);
    return m.determinant() / vandermonde(points);
  }
  const int nodes = static_cast<int>(dd.nodes.size());
  for (int b = 0; b < n; ++b) {
    std::vector<T> values(static_cast<std::size_t>(nodes * (dd.max_order + 1)));
    for (int u = 0; u < nodes; ++u)
      for (int q = 0; q <= dd.max_order; ++q)
        values[static_cast<std::size_t>(u * (dd.max_order + 1) + q)] = entry(b, dd.nodes[static_cast<std::size_t>(u)], q);
    for (int c = 0; c < n; ++c) {
      T s(0);
      const auto& w = dd.weights[static_cast<std::size_t>(c)];
      for (int u = 0; u < nodes; ++u)
        for (int q = 0; q <= dd.max_order; ++q)
          if (w(u, q) != 0.0) s += w(u, q) * values[static_cast<std::size_t>(u * (dd.max_order + 1) + q)];
      m(b, c) = s;
    }
  }
  return m.determinant();
}

template <class T>
T det_over_vandermonde_2d(int n, std::span<const double> xs, std::span<const double> ys,
                          const std::function<T(double, double, int, int)>& taylor) {
  if (static_cast<int>(xs.size()) != n || static_cast<int>(ys.size()) != n)
    throw std::invalid_argument("point count mismatch");
  if (n == 0) return T(1);
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  auto dx = divided_differences(xs);
  auto dy = divided_differences(ys);
  Mat m(n, n);
  if (!dx.confluent && !dy.confluent) {
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        m(b, c) = taylor(xs[static_cast<std::size_t>(b)], ys[static_cast<std::size_t>(c)], 0, 0);
    return m.determinant() / (vandermonde(xs) * vandermonde(ys));
  }
  const int nu = static_cast<int>(dx.nodes.size());
  const int nv = static_cast<int>(dy.nodes.size());
  const int pp = dx.max_order + 1;
  const int qq = dy.max_order + 1;
  std::vector<T> k(static_cast<std::size_t>(nu * nv * pp * qq));
  auto at = [&](int u, int v, int p, int q) -> T& {
    return k[static_cast<std::size_t>(((u * nv + v) * pp + p) * qq + q)];
  };
  for (int u = 0; u < nu; ++u)
    for (int v = 0; v < nv; ++v)
      for (int p = 0; p < pp; ++p)
        for (int q = 0; q < qq; ++q)
          at(u, v, p, q) = taylor(dx.nodes[static_cast<std::size_t>(u)], dy.nodes[static_cast<std::size_t>(v)], p, q);
  for (int b = 0; b < n; ++b) {
    const auto& wx = dx.weights[static_cast<std::size_t>(b)];
    for (int c = 0; c < n; ++c) {
      const auto& wy = dy.weights[static_cast<std::size_t>(c)];
      T s(0);
      for (int u = 0; u < nu; ++u)
        for (int p = 0; p < pp; ++p) {
          if (wx(u, p) == 0.0) continue;
          for (int v = 0; v < nv; ++v)
            for (int q = 0; q < qq; ++q)
              if (wy(v, q) != 0.0) s += wx(u, p) * wy(v, q) * at(u, v, p, q);
        }
      m(b, c) = s;
    }
  }
  return m.determinant();
}

template Complex det_over_vandermonde<Complex>(int, std::span<const double>,
                                               const std::function<Complex(int, double, int)>&);
template double det_over_vandermonde<double>(int, std::span<const double>,
                                             const std::function<double(int, double, int)>&);
template Complex det_over_vandermonde_2d<Complex>(int, std::span<const double>, std::span<const double>,
                                                  const std::function<Complex(double, double, int, int)>&);
template double det_over_vandermonde_2d<double>(int, std::span<const double>, std::span<const double>,
                                                const std::function<double(double, double, int, int)>&);

}  // namespace polya
