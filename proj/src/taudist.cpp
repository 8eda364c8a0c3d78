#include "qtt/taudist.hpp"

#include <cmath>

#include "qtt/ctime.hpp"
#include "qtt/scatter.hpp"

namespace qtt {

AmplitudeFn propagation_amplitude(const Wavefunction& psi_i, const Wavefunction& psi_f,
                                  const PotentialSpec& v, const RegionOfInterest& omega,
                                  double t1, double t2, const Units& units,
                                  const PropagationOptions& opts) {
  return [=](double lambda) {
    const Wavefunction out = propagate(psi_i, v, omega, lambda, t1, t2, units, opts);
    return psi_f.inner(out);
  };
}

AmplitudeFn transmission_amplitude(const PotentialSpec& v, const RegionOfInterest& omega,
                                   double p, const Units& units) {
  return [=](double lambda) { return scattering_amplitudes(v, omega, lambda, p, units).T; };
}

AmplitudeFn reflection_amplitude(const PotentialSpec& v, const RegionOfInterest& omega,
                                 double p, const Units& units) {
  return [=](double lambda) { return scattering_amplitudes(v, omega, lambda, p, units).R; };
}

AmplitudeDistribution conditioned_amplitude(const AmplitudeFn& f, double t1, double t2,
                                            double lambda_max, int n_lambda, Window window) {
  if (n_lambda < 256 || (n_lambda & (n_lambda - 1)) != 0)
    throw NumericalDomainError("conditioned_amplitude: n_lambda must be a power of two >= 256");
  if (!(lambda_max > 0.0))
    throw NumericalDomainError("conditioned_amplitude: lambda_max must be positive");
  const double span = t2 - t1;
  const double dtau = M_PI / lambda_max;
  if (span > 0.0 && !(dtau < span / 8.0))
    throw NumericalDomainError(
        "conditioned_amplitude: tau resolution too coarse (Nyquist), increase lambda_max");

  const int n = n_lambda;
  const double dlam = 2.0 * lambda_max / n;
  VectorXcd samples(n);
  bool any_nonzero = false;
  for (int i = 0; i < n; ++i) {
    const double lam = -lambda_max + i * dlam;
    Complex val = f(lam);
    if (window == Window::kHann) val *= 0.5 * (1.0 + std::cos(M_PI * lam / lambda_max));
    samples[i] = val;
    if (std::abs(val) > kPostSelectionThreshold) any_nonzero = true;
  }
  if (!any_nonzero)
    throw PostSelectionError("conditioned_amplitude: amplitude vanishes for every lambda");

  AmplitudeDistribution dist;
  dist.lambda_max = lambda_max;
  dist.n_lambda = n;
  dist.window = window;
  dist.t_span = span;
  dist.tau_grid.resize(n);
  dist.amplitudes.resize(n);
  // A(tau_j) = (dlam / 2 pi) sum_i F(lambda_i) exp(i lambda_i tau_j),
  // tau_j = j * dtau for j in [-n/2, n/2); sum(A) dtau == F(0) exactly.
  for (int jj = 0; jj < n; ++jj) {
    const int j = jj - n / 2;
    const double tau = j * dtau;
    Complex acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const double lam = -lambda_max + i * dlam;
      acc += samples[i] * std::exp(kI * lam * tau);
    }
    dist.tau_grid[jj] = tau;
    dist.amplitudes[jj] = acc * (dlam / (2.0 * M_PI));
  }
  return dist;
}

Complex moment(const AmplitudeDistribution& dist, int n) {
  if (n < 0 || n > 2) throw NumericalDomainError("moment: n must be 0, 1 or 2");
  Complex num{0.0, 0.0}, den{0.0, 0.0};
  for (int j = 0; j < dist.tau_grid.size(); ++j) {
    den += dist.amplitudes[j];
    num += std::pow(dist.tau_grid[j], n) * dist.amplitudes[j];
  }
  if (std::abs(den) <= kPostSelectionThreshold)
    throw PostSelectionError("moment: vanishing integrated amplitude");
  Complex m = num / den;
  // The Hann window has unit gain and zero slope at lambda = 0; only the
  // second moment picks up its curvature.
  if (n == 2 && dist.window == Window::kHann)
    m -= 0.5 * std::pow(M_PI / dist.lambda_max, 2);
  return m;
}

std::pair<double, double> accurate_measurement_probability(const AmplitudeDistribution& dist) {
  const double dtau = dist.dtau();
  double p_acc = 0.0;
  Complex total{0.0, 0.0};
  for (int j = 0; j < dist.tau_grid.size(); ++j) {
    p_acc += std::norm(dist.amplitudes[j] * dtau);
    total += dist.amplitudes[j] * dtau;
  }
  return {p_acc, std::norm(total)};
}

double leaked_mass_fraction(const AmplitudeDistribution& dist) {
  const double dtau = dist.dtau();
  double inside = 0.0, outside = 0.0;
  for (int j = 0; j < dist.tau_grid.size(); ++j) {
    const double tau = dist.tau_grid[j];
    const double m = std::norm(dist.amplitudes[j]);
    if (tau < -dtau || tau > dist.t_span + dtau)
      outside += m;
    else
      inside += m;
  }
  const double total = inside + outside;
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace qtt
