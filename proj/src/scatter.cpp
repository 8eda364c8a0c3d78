#include "qtt/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qtt {

namespace {

// Two-port scattering matrix in local wave bases:
// [b_l; a_r] = [[r, tp], [t, rp]] [a_l; b_r].
struct Smat {
  Complex r{0.0, 0.0};
  Complex t{1.0, 0.0};
  Complex rp{0.0, 0.0};
  Complex tp{1.0, 0.0};
};

Smat interface(Complex ka, Complex kb) {
  const Complex s = ka + kb;
  return {(ka - kb) / s, 2.0 * ka / s, (kb - ka) / s, 2.0 * kb / s};
}

// Uniform slab of width L; exp(ikL) decays for evanescent k = i kappa, so
// the composition stays bounded however opaque the slab.
Smat slab(Complex k, double len) {
  const Complex ph = std::exp(kI * k * len);
  return {Complex{0.0, 0.0}, ph, Complex{0.0, 0.0}, ph};
}

// Redheffer star product, a on the left of b.
Smat star(const Smat& a, const Smat& b) {
  const Complex d = 1.0 / (1.0 - a.rp * b.r);
  Smat s;
  s.t = b.t * d * a.t;
  s.r = a.r + a.tp * b.r * d * a.t;
  s.rp = b.rp + b.t * a.rp * d * b.tp;
  s.tp = a.tp * d * b.tp;
  return s;
}

}  // namespace

ScatteringResult scattering_amplitudes(const PotentialSpec& v, const RegionOfInterest& omega,
                                       double lambda, double p, const Units& units) {
  ScatteringResult res = scattering_amplitudes(composite_potential(v, omega, lambda), p, units);
  res.lambda = lambda;
  return res;
}

ScatteringResult scattering_amplitudes(const PotentialSpec& v, double p, const Units& units) {
  if (!(p > 0.0)) throw NumericalDomainError("scattering_amplitudes: p must be positive");
  if (v.time_dependent())
    throw NumericalDomainError("scattering_amplitudes: potential must be static");
  v.validate();

  ScatteringResult res;
  res.p = p;
  if (v.segments.empty()) return res;

  const double mu = units.mass;
  const double e2mu = p * p;  // 2 mu E

  // Full partition of the support, zero-height gaps included.
  std::vector<double> cuts;
  for (const auto& s : v.segments) {
    if (cuts.empty() || cuts.back() != s.x_lo) cuts.push_back(s.x_lo);
    cuts.push_back(s.x_hi);
  }
  const double x_lo = cuts.front(), x_hi = cuts.back();

  auto wavenumber = [&](double height) {
    double q2 = e2mu - 2.0 * mu * height;
    if (std::abs(q2) < 1e-14 * std::max(e2mu, 1.0)) {
      q2 += 1e-12 * std::max(e2mu, 1.0);  // evanescent-propagating degeneracy
      res.degenerate_perturbed = true;
    }
    return std::sqrt(Complex(q2, 0.0));  // principal branch: Re>=0, Im>=0
  };

  const Complex k_free{p, 0.0};
  Smat total;
  Complex k_prev = k_free;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const Complex k = wavenumber(v.value(mid));
    total = star(star(total, interface(k_prev, k)), slab(k, cuts[i + 1] - cuts[i]));
    k_prev = k;
  }
  total = star(total, interface(k_prev, k_free));

  // Re-reference amplitudes to the global plane waves exp(+-ipx).
  res.T = total.t * std::exp(-kI * p * (x_hi - x_lo));
  res.R = total.r * std::exp(2.0 * kI * p * x_lo);
  return res;
}

PotentialSpec mirrored(const PotentialSpec& v) {
  PotentialSpec out;
  out.schedule = v.schedule;
  for (auto it = v.segments.rbegin(); it != v.segments.rend(); ++it)
    out.segments.push_back({-it->x_hi, -it->x_lo, it->height, it->profile});
  out.validate();
  return out;
}

ScatteringResult rectangular_barrier_oracle(double v0, double d, double p,
                                            const Units& units) {
  if (!(p > 0.0) || !(d > 0.0))
    throw NumericalDomainError("rectangular_barrier_oracle: need p > 0, d > 0");
  const double mu = units.mass;
  const Complex q = std::sqrt(Complex(p * p - 2.0 * mu * v0, 0.0));
  const Complex z = q * d;
  // sin(z)/z, series near the E = V0 branch point
  const Complex sinc = (std::abs(z) < 1e-6)
                           ? 1.0 - z * z / 6.0 + z * z * z * z / 120.0
                           : std::sin(z) / z;
  const Complex denom = 2.0 * p * std::cos(z) - kI * (p * p + q * q) * d * sinc;
  ScatteringResult res;
  res.p = p;
  res.T = 2.0 * p * std::exp(-kI * Complex(p * d, 0.0)) / denom;
  res.R = kI * (q * q - Complex(p * p, 0.0)) * d * sinc / denom;
  return res;
}

Complex step_reflection_oracle(double v0, double p, const Units& units) {
  if (!(p > 0.0)) throw NumericalDomainError("step_reflection_oracle: p must be positive");
  const double kappa2 = 2.0 * units.mass * v0 - p * p;
  if (!(kappa2 > 0.0))
    throw NumericalDomainError("step_reflection_oracle: requires total reflection, p^2 < 2 mu V0");
  const double kappa = std::sqrt(kappa2);
  return Complex(p, -kappa) / Complex(p, kappa);
}

}  // namespace qtt
