#ifndef QTT_DERIV_HPP_
#define QTT_DERIV_HPP_

#include <cmath>

#include "qtt/types.hpp"

namespace qtt {

namespace detail {

inline double magnitude(const Complex& z) { return std::abs(z); }
inline double magnitude(const VectorXcd& v) { return v.norm(); }

inline bool finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}
inline bool finite(const VectorXcd& v) { return v.allFinite(); }

}  // namespace detail

template <typename T>
struct DerivResult {
  T value;
  double error_estimate;  // difference between the two Richardson levels
};

// Central-difference d^order/dlambda^order f at lambda = 0 with one
// Richardson level.  f is sampled at +-h, +-2h (plus 0 for order 2); T may
// be a scalar amplitude or a whole state vector.
template <typename F>
auto lambda_derivative(F&& f, int order, double h)
    -> DerivResult<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  if (!(h > 0.0)) throw NumericalDomainError("lambda_derivative: h must be positive");
  if (order != 1 && order != 2)
    throw NumericalDomainError("lambda_derivative: order must be 1 or 2");

  const T fp1 = f(h), fm1 = f(-h), fp2 = f(2.0 * h), fm2 = f(-2.0 * h);
  if (!detail::finite(fp1) || !detail::finite(fm1) || !detail::finite(fp2) ||
      !detail::finite(fm2))
    throw NumericalDomainError("lambda_derivative: non-finite sample");

  T coarse, fine;
  if (order == 1) {
    fine = (fp1 - fm1) / (2.0 * h);
    coarse = (fp2 - fm2) / (4.0 * h);
  } else {
    const T f0 = f(0.0);
    if (!detail::finite(f0)) throw NumericalDomainError("lambda_derivative: non-finite sample");
    fine = (fp1 - 2.0 * f0 + fm1) / (h * h);
    coarse = (fp2 - 2.0 * f0 + fm2) / (4.0 * h * h);
  }
  T extrapolated = (4.0 * fine - coarse) / 3.0;
  return {extrapolated, detail::magnitude(T(extrapolated - fine))};
}

// Shared default differentiation step: h = 1e-4 * max(E, |V|_max, 1).
inline double default_lambda_step(double energy_scale, double vmax) {
  return 1e-4 * std::max({energy_scale, vmax, 1.0});
}

}  // namespace qtt

#endif  // QTT_DERIV_HPP_
