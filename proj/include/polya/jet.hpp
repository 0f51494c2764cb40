#pragma once

// Truncated Taylor series arithmetic. A Jet of order K at a point x0 holds
// the coefficients c_0..c_K of f(x0 + h) = sum_k c_k h^k, so that the k-th
// derivative is k! * c_k. Used for exact derivatives of the built-in weights.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace polya {

template <class T>
class BasicJet {
 public:
  BasicJet() = default;
  explicit BasicJet(int order, T value = T(0)) : c_(static_cast<std::size_t>(order) + 1, T(0)) {
    c_[0] = value;
  }

  static BasicJet variable(T x0, int order) {
    BasicJet j(order, x0);
    if (order >= 1) j.c_[1] = T(1);
    return j;
  }
  static BasicJet constant(T v, int order) { return BasicJet(order, v); }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](std::size_t k) const { return c_[k]; }
  T& operator[](std::size_t k) { return c_[k]; }
  T value() const { return c_[0]; }
  const std::vector<T>& coefficients() const { return c_; }

  // k-th derivative at the expansion point.
  T derivative(int k) const {
    T f(1);
    for (int i = 2; i <= k; ++i) f *= T(i);
    return c_[static_cast<std::size_t>(k)] * f;
  }

  BasicJet& operator+=(const BasicJet& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  BasicJet& operator-=(const BasicJet& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  BasicJet& operator+=(T v) { c_[0] += v; return *this; }
  BasicJet& operator-=(T v) { c_[0] -= v; return *this; }
  BasicJet& operator*=(T v) {
    for (auto& x : c_) x *= v;
    return *this;
  }

  friend BasicJet operator+(BasicJet a, const BasicJet& b) { return a += b; }
  friend BasicJet operator-(BasicJet a, const BasicJet& b) { return a -= b; }
  friend BasicJet operator+(BasicJet a, T v) { return a += v; }
  friend BasicJet operator+(T v, BasicJet a) { return a += v; }
  friend BasicJet operator-(BasicJet a, T v) { return a -= v; }
  friend BasicJet operator-(T v, const BasicJet& a) { return -a + v; }
  friend BasicJet operator*(BasicJet a, T v) { return a *= v; }
  friend BasicJet operator*(T v, BasicJet a) { return a *= v; }
  friend BasicJet operator-(BasicJet a) { return a *= T(-1); }

  friend BasicJet operator*(const BasicJet& a, const BasicJet& b) {
    BasicJet r(a.order());
    const std::size_t n = a.c_.size();
    for (std::size_t k = 0; k < n; ++k) {
      T s(0);
      for (std::size_t j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }

  friend BasicJet operator/(const BasicJet& a, const BasicJet& b) {
    if (b.c_[0] == T(0)) throw std::domain_error("jet division by zero");
    BasicJet r(a.order());
    const std::size_t n = a.c_.size();
    for (std::size_t k = 0; k < n; ++k) {
      T s = a.c_[k];
      for (std::size_t j = 0; j < k; ++j) s -= r.c_[j] * b.c_[k - j];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }
  friend BasicJet operator/(BasicJet a, T v) { return a *= T(1) / v; }
  friend BasicJet operator/(T v, const BasicJet& b) { return constant(v, b.order()) / b; }

  friend BasicJet exp(const BasicJet& a) {
    BasicJet r(a.order());
    const std::size_t n = a.c_.size();
    using std::exp;
    r.c_[0] = exp(a.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      T s(0);
      for (std::size_t j = 1; j <= k; ++j) s += T(static_cast<double>(j)) * a.c_[j] * r.c_[k - j];
      r.c_[k] = s / T(static_cast<double>(k));
    }
    return r;
  }

  friend BasicJet log(const BasicJet& a) {
    BasicJet r(a.order());
    const std::size_t n = a.c_.size();
    using std::log;
    r.c_[0] = log(a.c_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      T s(0);
      for (std::size_t j = 1; j < k; ++j) s += T(static_cast<double>(j)) * r.c_[j] * a.c_[k - j];
      r.c_[k] = (a.c_[k] - s / T(static_cast<double>(k))) / a.c_[0];
    }
    return r;
  }

  // a^p for real exponent p; requires a_0 != 0.
  friend BasicJet pow(const BasicJet& a, double p) {
    BasicJet r(a.order());
    const std::size_t n = a.c_.size();
    using std::pow;
    if (a.c_[0] == T(0)) throw std::domain_error("jet pow at zero base");
    r.c_[0] = pow(a.c_[0], p);
    for (std::size_t k = 1; k < n; ++k) {
      T s(0);
      for (std::size_t j = 1; j <= k; ++j)
        s += T(p * static_cast<double>(j) - static_cast<double>(k - j)) * a.c_[j] * r.c_[k - j];
      r.c_[k] = s / (T(static_cast<double>(k)) * a.c_[0]);
    }
    return r;
  }

  friend BasicJet ipow(const BasicJet& a, int m) {
    BasicJet r = constant(T(1), a.order());
    for (int i = 0; i < m; ++i) r = r * a;
    return r;
  }

  friend BasicJet sqrt(const BasicJet& a) { return pow(a, 0.5); }
  friend BasicJet cosh(const BasicJet& a) { return (exp(a) + exp(-a)) * T(0.5); }
  friend BasicJet sinh(const BasicJet& a) { return (exp(a) - exp(-a)) * T(0.5); }

 private:
  std::vector<T> c_;
};

using Jet = BasicJet<double>;

// Evaluates outer(inner(x0 + h)) given the Taylor coefficients of `outer`
// around inner.value().
template <class T>
BasicJet<T> compose(const std::vector<T>& outer, const BasicJet<T>& inner) {
  const int order = inner.order();
  BasicJet<T> delta = inner;
  delta[0] = T(0);
  BasicJet<T> r(order, T(0));
  for (int k = std::min<int>(order, static_cast<int>(outer.size()) - 1); k >= 0; --k) {
    r = r * delta;
    r[0] += outer[static_cast<std::size_t>(k)];
  }
  return r;
}

}  // namespace polya
