#ifndef MINK_HYPERDUAL_HPP
#define MINK_HYPERDUAL_HPP

#include <cmath>

namespace mink {

// Hyper-dual number a + b*e1 + c*e2 + d*e1*e2 with e1^2 = e2^2 = 0.
// Seeding e1 = dx_i, e2 = dx_j and evaluating f yields f, df/dx_i,
// df/dx_j and d2f/dx_i dx_j in one pass, with no truncation error.
struct HyperDual {
  double v = 0.0;    // value
  double d1 = 0.0;   // first direction
  double d2 = 0.0;   // second direction
  double d12 = 0.0;  // mixed second derivative

  constexpr HyperDual() = default;
  constexpr HyperDual(double value) : v(value) {}
  constexpr HyperDual(double value, double e1, double e2, double e12)
      : v(value), d1(e1), d2(e2), d12(e12) {}
};

constexpr HyperDual operator+(const HyperDual& a, const HyperDual& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}

constexpr HyperDual operator-(const HyperDual& a, const HyperDual& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}

constexpr HyperDual operator-(const HyperDual& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }

constexpr HyperDual operator*(const HyperDual& a, const HyperDual& b) {
  return {a.v * b.v,
          a.v * b.d1 + a.d1 * b.v,
          a.v * b.d2 + a.d2 * b.v,
          a.v * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.v};
}

// Lifts a scalar function through the chain rule: needs f, f' and f'' at a.v.
constexpr HyperDual chain(const HyperDual& a, double f, double df, double ddf) {
  return {f, df * a.d1, df * a.d2, df * a.d12 + ddf * a.d1 * a.d2};
}

inline HyperDual operator/(const HyperDual& a, const HyperDual& b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline HyperDual sqrt(const HyperDual& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (a.v * s));
}

inline HyperDual exp(const HyperDual& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

inline HyperDual log(const HyperDual& a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

inline HyperDual sin(const HyperDual& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}

inline HyperDual cos(const HyperDual& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

inline HyperDual sinh(const HyperDual& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return chain(a, s, c, s);
}

inline HyperDual cosh(const HyperDual& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return chain(a, c, s, c);
}

inline HyperDual asinh(const HyperDual& a) {
  const double w = 1.0 + a.v * a.v;
  const double rw = std::sqrt(w);
  return chain(a, std::asinh(a.v), 1.0 / rw, -a.v / (w * rw));
}

// Constant rational exponent only; the parser guarantees q is a constant.
inline HyperDual pow(const HyperDual& a, double q) {
  const double f = std::pow(a.v, q);
  const double df = q * std::pow(a.v, q - 1.0);
  const double ddf = q * (q - 1.0) * std::pow(a.v, q - 2.0);
  return chain(a, f, df, ddf);
}

}  // namespace mink

#endif  // MINK_HYPERDUAL_HPP
