#pragma once

// Forward-mode dual numbers. A Dual<T> carries a value and one directional
// derivative; nesting Dual<Dual<double>> gives second directional
// derivatives (used for Hessian-vector products).

#include <cmath>
#include <type_traits>

namespace equimid {

template <typename T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit lift of constants
  constexpr Dual(T value, T deriv) : v(value), d(deriv) {}
};

template <typename T>
struct is_dual : std::false_type {};
template <typename T>
struct is_dual<Dual<T>> : std::true_type {};

/// Innermost primal value of a (possibly nested) dual.
inline double primal(double x) { return x; }
template <typename T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

template <typename T>
constexpr Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <typename T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <typename T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <typename T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <typename T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  const T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

template <typename T>
constexpr Dual<T> operator+(const Dual<T>& a, double s) {
  return {a.v + s, a.d};
}
template <typename T>
constexpr Dual<T> operator-(const Dual<T>& a, double s) {
  return {a.v - s, a.d};
}
template <typename T>
constexpr Dual<T> operator*(double s, const Dual<T>& a) {
  return {s * a.v, s * a.d};
}
template <typename T>
constexpr Dual<T> operator*(const Dual<T>& a, double s) {
  return {a.v * s, a.d * s};
}

template <typename T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

template <typename T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return {e, e * a.d};
}

template <typename T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}

template <typename T>
Dual<T> abs(const Dual<T>& a) {
  return primal(a) < 0.0 ? -a : a;
}

/// Power with a constant exponent; avoids log(base) so negative bases with
/// integral exponents differentiate correctly.
template <typename T>
Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  if (p == 0.0) return Dual<T>(1.0);
  return {pow(a.v, p), p * pow(a.v, p - 1.0) * a.d};
}

template <typename T>
Dual<T> pow(const Dual<T>& a, const Dual<T>& b) {
  using std::log;
  using std::pow;
  const T value = pow(a.v, b.v);
  return {value, b.v * pow(a.v, b.v - 1.0) * a.d + value * log(a.v) * b.d};
}

template <typename T>
const Dual<T>& min(const Dual<T>& a, const Dual<T>& b) {
  return primal(b) < primal(a) ? b : a;
}

template <typename T>
const Dual<T>& max(const Dual<T>& a, const Dual<T>& b) {
  return primal(a) < primal(b) ? b : a;
}

}  // namespace equimid
