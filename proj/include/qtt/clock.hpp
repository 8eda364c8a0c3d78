#ifndef QTT_CLOCK_HPP_
#define QTT_CLOCK_HPP_

#include <functional>
#include <vector>

#include "qtt/evolve.hpp"
#include "qtt/model.hpp"
#include "qtt/types.hpp"

namespace qtt {

// (2j+1)-component spin state, amplitudes indexed by m = -j .. j.
struct SpinState {
  double j = 0.5;
  VectorXcd amplitudes;  // size 2j+1, entry i corresponds to m = i - j

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double m_of(int i) const { return i - j; }
  void normalise() { amplitudes /= amplitudes.norm(); }
};

// SWP basis |beta^k> with angles phi_k = 2 pi k / (2j+1).
struct ClockBasis {
  double j = 0.5;

  int dim() const { return static_cast<int>(std::lround(2.0 * j)) + 1; }
  double phi(int k) const { return 2.0 * M_PI * k / dim(); }
  double tau(int k, double omega_l) const { return phi(k) / omega_l; }
  SpinState beta(int k) const;                 // beta^k_m = e^{-im phi_k}/sqrt(2j+1)
  static SpinState rotated_uniform(double j, double theta);  // e^{-im theta}/sqrt(2j+1)
};

// G_SWP(phi) = (2j+1)^{-1} sin[(2j+1) phi/2] / sin[phi/2], evaluated as the
// finite cosine sum (removable singularities handled exactly).
double gswp(double phi, double j);
double gswp_d1(double phi, double j);
double gswp_d2(double phi, double j);

// Q(j) = sum_k phi_k |<beta^k|j_z|beta^0>|^2: linear calibration constant.
double q_factor(double j);

// Quadratic calibration constant of the modified (gamma_I = beta^j) clock:
// free-running reading T' = q2_factor(j) * omega^2 * tau^3 + O(omega^3).
double q2_factor(double j);

// Q'(j) = 2 Im sum_k phi_k <gammaI|beta^k><beta^k|j_z|gammaI>: dwell-probe
// calibration constant for a general initial spin state.
double qprime_factor(const SpinState& gamma_i);

struct ClockConfig {
  double j = 0.5;
  double omega_l = 0.0;
  SpinState gamma_i;  // defaults to beta^0 when amplitudes are empty
};

// Particle (x) spin state: one unnormalised particle component per m,
// weighted by gamma_i and propagated in V + m omega_L Theta_Omega.
struct JointState {
  SpatialGrid grid;
  double j = 0.5;
  double omega_l = 0.0;
  std::vector<VectorXcd> components;  // size 2j+1, index i <-> m = i - j

  double total_norm() const;
};

struct Postselector {
  enum class Kind { kAll, kTransmitted, kReflected, kBound, kFree, kMask };
  Kind kind = Kind::kAll;
  double x_split = 0.0;      // kTransmitted: x > x_split; kReflected: x < x_split
  VectorXcd bound_state;     // kBound / kFree reference state
  VectorXd mask;             // kMask: 0/1 grid mask

  static Postselector all() { return {}; }
  static Postselector transmitted(double x_split);
  static Postselector reflected(double x_split);

  // Apply the projector to a particle component.
  VectorXcd apply(const VectorXcd& psi, const SpatialGrid& grid) const;
};

JointState evolve_coupled(const Wavefunction& psi_i, const ClockConfig& cfg,
                          const PotentialSpec& v, const RegionOfInterest& omega, double t1,
                          double t2, const Units& units = {},
                          const PropagationOptions& opts = {});

struct Readout {
  VectorXd probabilities;  // P(k, N), k = 0..2j, sums to 1
  double t_omega = 0.0;    // sum_k tau_k P(k)
};

// Standard readout with tau_k = phi_k / omega_L.
Readout readout(const JointState& joint, const Postselector& sel);

// Appendix readout: gamma_I = beta^j, signed times tau'_{k-j}.
Readout readout_modified(const JointState& joint, const Postselector& sel);

struct Extraction {
  double value = 0.0;
  double error_estimate = 0.0;
};

// T_SWP from the weak-coupling slope of T_Omega(omega): two-point Richardson
// on the two smallest omegas, T_SWP = sqrt(slope / Q(j)).
Extraction weak_limit_extract(const std::function<double(double)>& t_omega_of_omega,
                              double j, const std::vector<double>& omega_grid);

// T'_SWP from the quadratic coefficient of the modified clock,
// T'_SWP = (c2 / q2_factor(j))^{1/3}.
Extraction modified_clock_extract(const std::function<double(double)>& t_omega_of_omega,
                                  double j, const std::vector<double>& omega_grid);

// Default geometric omega grid: max rotation omega * j * span <= max_rotation.
std::vector<double> default_omega_grid(double j, double span, int n_points = 6,
                                       double max_rotation = 0.2);

// Dwell time via the general-Larmor probe: delta T_Omega / Q'(j),
// extrapolated omega -> 0.  gamma_i must not be a beta basis state.
Extraction dwell_probe(const Wavefunction& psi_i, const PotentialSpec& v,
                       const RegionOfInterest& omega, const SpinState& gamma_i,
                       double t1, double t2, const std::vector<double>& omega_grid,
                       const Units& units = {}, const PropagationOptions& opts = {});

}  // namespace qtt

#endif  // QTT_CLOCK_HPP_
