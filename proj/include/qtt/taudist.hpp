#ifndef QTT_TAUDIST_HPP_
#define QTT_TAUDIST_HPP_

#include <functional>

#include "qtt/evolve.hpp"
#include "qtt/model.hpp"
#include "qtt/types.hpp"

namespace qtt {

enum class Window { kNone, kHann };

// Sampled traversal-time amplitude distribution A(tau) on a uniform tau
// grid; normalisation is fixed by sum(A) * dtau = <psiF|U(0)|psiI>.
struct AmplitudeDistribution {
  VectorXd tau_grid;
  VectorXcd amplitudes;
  double lambda_max = 0.0;
  int n_lambda = 0;
  Window window = Window::kHann;
  double t_span = 0.0;  // t2 - t1 of the underlying transition

  double dtau() const { return M_PI / lambda_max; }
};

// <psiF|U(lambda)|psiI> as a function of lambda.
using AmplitudeFn = std::function<Complex(double)>;

// Time-dependent backend (one propagation per lambda sample).
AmplitudeFn propagation_amplitude(const Wavefunction& psi_i, const Wavefunction& psi_f,
                                  const PotentialSpec& v, const RegionOfInterest& omega,
                                  double t1, double t2, const Units& units = {},
                                  const PropagationOptions& opts = {});

// Stationary backends: T(p, lambda) or R(p, lambda) for monochromatic
// in/out channels.
AmplitudeFn transmission_amplitude(const PotentialSpec& v, const RegionOfInterest& omega,
                                   double p, const Units& units = {});
AmplitudeFn reflection_amplitude(const PotentialSpec& v, const RegionOfInterest& omega,
                                 double p, const Units& units = {});

// Sample F on a uniform lambda grid over [-lambda_max, lambda_max) and
// Fourier-transform to the tau axis.
AmplitudeDistribution conditioned_amplitude(const AmplitudeFn& f, double t1, double t2,
                                            double lambda_max, int n_lambda,
                                            Window window = Window::kHann);

// int tau^n A dtau / int A dtau (n = 0, 1, 2), window-gain corrected.
Complex moment(const AmplitudeDistribution& dist, int n);

// (P_acc, P_free) = (int |A|^2 dtau, |int A dtau|^2); P_acc uses the
// per-bin convention |A_j dtau|^2 / dtau summed over bins.
std::pair<double, double> accurate_measurement_probability(const AmplitudeDistribution& dist);

// Fraction of |A|^2 mass outside [-dtau, t_span + dtau].
double leaked_mass_fraction(const AmplitudeDistribution& dist);

}  // namespace qtt

#endif  // QTT_TAUDIST_HPP_
