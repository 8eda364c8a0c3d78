#include "qtt/ctime.hpp"

#include <cmath>

#include "qtt/deriv.hpp"
#include "qtt/quadrature.hpp"

namespace qtt {

namespace {

struct AmplitudeDerivs {
  Complex T0, R0;    // amplitudes at lambda = 0
  Complex dT, dR;    // first lambda-derivatives
  double err;        // combined Richardson error estimate
};

AmplitudeDerivs amplitude_derivs(const PotentialSpec& v, const RegionOfInterest& omega,
                                 double p, const Units& units) {
  const double h = scattering_lambda_step(v, p, units);
  ScatteringResult at0 = scattering_amplitudes(v, omega, 0.0, p, units);
  auto ft = [&](double lam) { return scattering_amplitudes(v, omega, lam, p, units).T; };
  auto fr = [&](double lam) { return scattering_amplitudes(v, omega, lam, p, units).R; };
  const auto dt = lambda_derivative(ft, 1, h);
  const auto dr = lambda_derivative(fr, 1, h);
  return {at0.T, at0.R, dt.value, dr.value, dt.error_estimate + dr.error_estimate};
}

Complex nth_log_derivative(const std::function<Complex(double)>& f, Complex f0, int n,
                           double h, double* err) {
  if (n == 1) {
    const auto d = lambda_derivative(f, 1, h);
    if (err) *err = d.error_estimate / std::abs(f0);
    return kI * d.value / f0;
  }
  const auto d2 = lambda_derivative(f, 2, h);
  if (err) *err = d2.error_estimate / std::abs(f0);
  return -d2.value / f0;  // (i)^2 d^2 f / f
}

}  // namespace

double scattering_lambda_step(const PotentialSpec& v, double p, const Units& units) {
  const double energy = p * p / (2.0 * units.mass);
  return default_lambda_step(energy, v.max_abs_height());
}

ComplexTime tunnelling_time(const PotentialSpec& v, const RegionOfInterest& omega, double p,
                            const Units& units) {
  return channel_moment(v, omega, p, /*reflected=*/false, 1, units);
}

ComplexTime reflection_time(const PotentialSpec& v, const RegionOfInterest& omega, double p,
                            const Units& units) {
  return channel_moment(v, omega, p, /*reflected=*/true, 1, units);
}

ComplexTime channel_moment(const PotentialSpec& v, const RegionOfInterest& omega, double p,
                           bool reflected, int n, const Units& units) {
  if (n != 1 && n != 2) throw NumericalDomainError("channel_moment: n must be 1 or 2");
  const double h = scattering_lambda_step(v, p, units);
  const ScatteringResult at0 = scattering_amplitudes(v, omega, 0.0, p, units);
  const Complex amp0 = reflected ? at0.R : at0.T;
  if (std::abs(amp0) <= kPostSelectionThreshold)
    throw PostSelectionError(reflected ? "reflection amplitude vanishes"
                                       : "transmission amplitude vanishes");
  std::function<Complex(double)> f = [&](double lam) {
    const ScatteringResult s = scattering_amplitudes(v, omega, lam, p, units);
    return reflected ? s.R : s.T;
  };
  ComplexTime out;
  out.value = nth_log_derivative(f, amp0, n, h, &out.error_estimate);
  out.role = n == 2 ? TimeRole::kMoment
                    : (reflected ? TimeRole::kReflection : TimeRole::kTunnelling);
  return out;
}

double dwell_time_monochromatic(const PotentialSpec& v, const RegionOfInterest& omega,
                                double p, const Units& units) {
  const AmplitudeDerivs d = amplitude_derivs(v, omega, p, units);
  const Complex dwell = kI * (std::conj(d.T0) * d.dT + std::conj(d.R0) * d.dR);
  const double scale = std::max(std::abs(dwell), 1.0);
  if (std::abs(dwell.imag()) > 1e-6 * scale)
    throw NumericalDomainError("dwell_time_monochromatic: imaginary residue exceeds tolerance");
  return dwell.real();
}

double swp_time_monochromatic_all(const PotentialSpec& v, const RegionOfInterest& omega,
                                  double p, const Units& units) {
  const AmplitudeDerivs d = amplitude_derivs(v, omega, p, units);
  return std::sqrt(std::norm(d.dT) + std::norm(d.dR));
}

MomentumDistribution MomentumDistribution::gaussian(double p0, double sigma, int n_nodes) {
  if (!(sigma > 0.0)) throw NumericalDomainError("MomentumDistribution: sigma must be positive");
  const double lo = std::max(p0 - 6.0 * sigma, 1e-6 * sigma);
  const double hi = p0 + 6.0 * sigma;
  if (!(lo < hi)) throw NumericalDomainError("MomentumDistribution: empty p window");
  GaussLegendre gl(n_nodes, lo, hi);
  MomentumDistribution dist;
  dist.nodes = gl.nodes;
  dist.weights = gl.weights;
  dist.values.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double u = (gl.nodes[i] - p0) / sigma;
    dist.values[i] = std::exp(-0.25 * u * u);
  }
  // normalise int |A|^2 dp = 1 on the quadrature
  double nrm = 0.0;
  for (int i = 0; i < n_nodes; ++i) nrm += gl.weights[i] * std::norm(dist.values[i]);
  dist.values /= std::sqrt(nrm);
  return dist;
}

double MomentumDistribution::norm_defect() const {
  double nrm = 0.0;
  for (int i = 0; i < nodes.size(); ++i) nrm += weights[i] * std::norm(values[i]);
  return std::abs(nrm - 1.0);
}

namespace {

// Shared quadrature core: accumulates channel weights and |amplitude
// derivative|^2 integrals over the packet.
struct PacketSums {
  double w_tunn = 0.0, w_refl = 0.0;
  double s_tunn = 0.0, s_refl = 0.0;  // int |A|^2 |dT|^2, int |A|^2 |dR|^2
};

PacketSums packet_sums(const MomentumDistribution& a, const PotentialSpec& v,
                       const RegionOfInterest& omega, const Units& units) {
  PacketSums s;
  for (int i = 0; i < a.nodes.size(); ++i) {
    const double p = a.nodes[i];
    const double w = a.weights[i] * std::norm(a.values[i]);
    const double h = scattering_lambda_step(v, p, units);
    const ScatteringResult at0 = scattering_amplitudes(v, omega, 0.0, p, units);
    auto ft = [&](double lam) { return scattering_amplitudes(v, omega, lam, p, units).T; };
    auto fr = [&](double lam) { return scattering_amplitudes(v, omega, lam, p, units).R; };
    const Complex dT = lambda_derivative(ft, 1, h).value;
    const Complex dR = lambda_derivative(fr, 1, h).value;
    s.w_tunn += w * std::norm(at0.T);
    s.w_refl += w * std::norm(at0.R);
    s.s_tunn += w * std::norm(dT);
    s.s_refl += w * std::norm(dR);
  }
  return s;
}

}  // namespace

double channel_weight(const MomentumDistribution& a, const PotentialSpec& v,
                      const RegionOfInterest& omega, Selection sel, const Units& units) {
  const PacketSums s = packet_sums(a, v, omega, units);
  switch (sel) {
    case Selection::kTunnelled: return s.w_tunn;
    case Selection::kReflected: return s.w_refl;
    default: return s.w_tunn + s.w_refl;
  }
}

double swp_time_wavepacket(const MomentumDistribution& a, const PotentialSpec& v,
                           const RegionOfInterest& omega, Selection sel, const Units& units) {
  const PacketSums s = packet_sums(a, v, omega, units);
  double w = s.w_tunn + s.w_refl, num = s.s_tunn + s.s_refl;
  if (sel == Selection::kTunnelled) {
    w = s.w_tunn;
    num = s.s_tunn;
  } else if (sel == Selection::kReflected) {
    w = s.w_refl;
    num = s.s_refl;
  }
  if (w < kPostSelectionThreshold)
    throw PostSelectionError("swp_time_wavepacket: selected channel weight vanishes");
  return std::sqrt(num / w);
}

double two_path_time(Complex a1, double tau1, Complex a2, double tau2) {
  return std::abs(two_path_moment(a1, tau1, a2, tau2, 1));
}

Complex two_path_moment(Complex a1, double tau1, Complex a2, double tau2, int n) {
  const Complex denom = a1 + a2;
  if (std::abs(denom) == 0.0)
    throw PostSelectionError("two_path: total destructive interference, A1 + A2 = 0");
  return (a1 * std::pow(tau1, n) + a2 * std::pow(tau2, n)) / denom;
}

}  // namespace qtt
