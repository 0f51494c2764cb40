#pragma once

// Determinants and Vandermonde ratios, including confluent limits.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace polya {

using Complex = std::complex<double>;
using MatrixXr = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;

/// prod_{b<c} (a_c - a_b); returns 1 for fewer than two entries.
double vandermonde(std::span<const double> a);

/// Weights of the (Hermite) divided differences of a point set.
///
/// After sorting and merging points closer than `merge_tol * max(1, |t|)`,
/// column c of `weights` expresses f[t_1, ..., t_{c+1}] as
///   sum_{u, q} weights[c](u, q) * f^(q)(nodes[u]) / q!.
struct DividedDifferences {
  std::vector<double> nodes;            // distinct (merged) nodes
  std::vector<double> sorted_points;    // the merged, sorted sequence t_1..t_n
  int max_order = 0;                    // largest derivative order needed
  std::vector<MatrixXr> weights;        // one (nodes x (max_order+1)) matrix per prefix
  bool confluent = false;               // true if any points were merged
};

DividedDifferences divided_differences(std::span<const double> points, double merge_tol = 1e-9);

/// det[g_b(t_c)] / Delta_n(t) for b, c = 1..n, with the confluent limit when
/// points coincide. `entry(b, t, q)` returns the q-th Taylor coefficient
/// g_b^(q)(t) / q!; only q = 0 is requested for distinct points.
template <class T>
T det_over_vandermonde(int n, std::span<const double> points,
                       const std::function<T(int b, double t, int q)>& entry);

/// det[k(x_b, y_c)] / (Delta_n(x) Delta_n(y)). `taylor(x, y, p, q)` returns
/// the Taylor coefficient of order (p, q) of k at (x, y).
template <class T>
T det_over_vandermonde_2d(int n, std::span<const double> xs, std::span<const double> ys,
                          const std::function<T(double x, double y, int p, int q)>& taylor);

extern template Complex det_over_vandermonde<Complex>(int, std::span<const double>,
                                                      const std::function<Complex(int, double, int)>&);
extern template double det_over_vandermonde<double>(int, std::span<const double>,
                                                    const std::function<double(int, double, int)>&);
extern template Complex det_over_vandermonde_2d<Complex>(
    int, std::span<const double>, std::span<const double>,
    const std::function<Complex(double, double, int, int)>&);
extern template double det_over_vandermonde_2d<double>(
    int, std::span<const double>, std::span<const double>,
    const std::function<double(double, double, int, int)>&);

}  // namespace polya
