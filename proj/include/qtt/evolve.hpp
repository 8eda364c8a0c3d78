#ifndef QTT_EVOLVE_HPP_
#define QTT_EVOLVE_HPP_

#include <vector>

#include "qtt/ctime.hpp"
#include "qtt/model.hpp"
#include "qtt/types.hpp"

namespace qtt {

// Complex wavefunction sampled on the grid midpoints, with its time stamp.
struct Wavefunction {
  SpatialGrid grid;
  VectorXcd values;
  double t = 0.0;

  double norm() const { return std::sqrt(grid.dx() * values.squaredNorm()); }
  // Norm fraction within 5% of either grid edge.
  double edge_norm() const;
  Complex inner(const Wavefunction& other) const;  // <this|other> dx-weighted
};

Wavefunction gaussian_packet(const SpatialGrid& grid, double x0, double p0, double sigma_x,
                             double t = 0.0);

// Closed-form free evolution of gaussian_packet(x0, p0, sigma_x); test oracle.
Wavefunction free_gaussian_analytic(const SpatialGrid& grid, double x0, double p0,
                                    double sigma_x, double t, const Units& units = {});

struct PropagationOptions {
  double dt = 0.0;                 // 0: use dt_factor * mu * dx^2
  double dt_factor = 0.2;
  double edge_tolerance = 1e-6;    // wrap-around guard on the final state
  bool check_edges = true;
};

// U_part(t2, t1 | lambda) by second-order Strang splitting with a spectral
// kinetic step.  t2 < t1 propagates backwards.  Throws NumericalDomainError
// when amplitude reaches the grid edges (periodic wrap-around).
Wavefunction propagate(const Wavefunction& psi, const PotentialSpec& v,
                       const RegionOfInterest& omega, double lambda, double t1, double t2,
                       const Units& units = {}, const PropagationOptions& opts = {});

struct ConditionedState {
  int n = 0;              // moment order
  VectorXcd values;       // not normalised for n >= 1
  double error_estimate = 0.0;
};

// |psi^(n)> = (i)^n d^n/dlambda^n U(lambda)|psiI> at lambda = 0, n = 0..n_max.
std::vector<ConditionedState> conditioned_states(const Wavefunction& psi_i,
                                                 const PotentialSpec& v,
                                                 const RegionOfInterest& omega, double t1,
                                                 double t2, int n_max,
                                                 const Units& units = {},
                                                 const PropagationOptions& opts = {});

// tau^n(psi_f, psi_i) = <psi_f|psi^(n)> / <psi_f|psi^(0)> (psi_f given at t2).
Complex conditioned_moment(const std::vector<ConditionedState>& states,
                           const Wavefunction& psi_f, const SpatialGrid& grid, int n);

// int dt' int_Omega dx psi_F^*(x,t') psi_I(x,t') / <psi_F|U|psi_I>.
ComplexTime complex_time_spacetime_integral(const Wavefunction& psi_i,
                                            const Wavefunction& psi_f,
                                            const PotentialSpec& v,
                                            const RegionOfInterest& omega, double t1,
                                            double t2, const Units& units = {},
                                            const PropagationOptions& opts = {});

// int dt' int_Omega |psi(x,t')|^2 dx.
double dwell_time_stopwatch(const Wavefunction& psi_i, const PotentialSpec& v,
                            const RegionOfInterest& omega, double t1, double t2,
                            const Units& units = {}, const PropagationOptions& opts = {});

// || psi^(1) ||: the no-post-selection clock reading in operator form.
double swp_all_operator_form(const Wavefunction& psi_i, const PotentialSpec& v,
                             const RegionOfInterest& omega, double t1, double t2,
                             const Units& units = {}, const PropagationOptions& opts = {});

}  // namespace qtt

#endif  // QTT_EVOLVE_HPP_
