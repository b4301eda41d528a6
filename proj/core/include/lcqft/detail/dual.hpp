#pragma once

#include <cmath>

namespace lcqft::detail {

// First-order dual number: carries a value and a directional derivative.
// Used to differentiate the wave-operator stencil coefficients with respect
// to a metric perturbation, exactly (no finite-difference truncation error).
struct Dual {
  double v = 0.0;  // value
  double d = 0.0;  // derivative

  Dual() = default;
  Dual(double value) : v(value) {}
  Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
inline Dual sqrt(Dual a) {
  const double r = std::sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

}  // namespace lcqft::detail
