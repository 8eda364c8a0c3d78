#ifndef QTT_IONISE_HPP_
#define QTT_IONISE_HPP_

#include <array>
#include <optional>

#include "qtt/ctime.hpp"
#include "qtt/evolve.hpp"
#include "qtt/model.hpp"
#include "qtt/types.hpp"

namespace qtt {

// Tunnel-ionisation toy model: a well [0, a] of depth v_w closed on the left
// by a high repulsive wall, a barrier [a, a+d] whose height is transiently
// lowered by a smooth pulse v_b(t) = v_b0 - f_strength * s(t), and the
// region of interest Omega = the barrier slab.
struct IonisationModel {
  Units units{};
  double v_w = 2.0;
  double a = 2.0;
  double d = 3.0;
  double v_b0 = 3.0;
  double f_strength = 4.5;
  double t1 = 0.0;
  double t_pulse = 30.0;  // pulse support is [t1, t_pulse]
  double t2 = 30.0;       // measurement time; (t_pulse, t2] is free drift
  double wall_height = 1e3;

  SpatialGrid grid{-6.5, 93.5, 1024};
  RegionOfInterest omega{2.0, 5.0};  // keep equal to [a, a+d]

  // Continuum modes above this momentum are dropped from the free channel.
  double p_max = 6.0;

  // Bound-state refinement (spectral filtering against the actual stepping
  // operator): number of Hann-filtered time-average passes and their length.
  int refine_passes = 3;
  double refine_span = 60.0;

  PotentialSpec static_potential() const;  // pulse off (s = 0)
  PotentialSpec pulsed_potential() const;  // scheduled barrier height
  double time_step() const;                // shared dt for every propagation
};

struct BoundState {
  double energy = 0.0;
  Wavefunction state;
};

// Unique negative-energy eigenpair of the symmetric tridiagonal
// finite-difference Hamiltonian of the static potential; throws
// NumericalDomainError when there are zero or several bound levels.
BoundState bound_state(const PotentialSpec& v, const SpatialGrid& grid,
                       const Units& units = {});

// Model plus its cached initial state and continuum basis.  psi0 is the
// finite-difference bound state refined into an eigenstate of the split-step
// propagator, so that pulse-free evolution conserves the bound amplitude to
// high accuracy.  The free channel is spanned by the positive-energy
// eigenvectors of the static split-step Hamiltonian (spectral kinetic term
// plus the sampled potential), so |C|^2 + int |B|^2 dp = 1 holds by basis
// completeness rather than by a far-field approximation.
struct PreparedIonisation {
  IonisationModel model;
  BoundState fd;       // raw finite-difference eigenpair
  Wavefunction psi0;   // propagator-adapted initial state
  double energy = 0.0; // refined level
  VectorXd p_nodes;    // continuum momenta p_k = sqrt(2 E_k), ascending
  VectorXd p_weights;  // local momentum-space cell widths
  MatrixXd modes;      // unit-norm eigenvectors, one column per p_k
};

PreparedIonisation prepare(const IonisationModel& model);

// Final-state decomposition psi(t2) = C psi0 + "free" remainder, with the
// free part resolved onto the prepared continuum modes; B is reported as a
// momentum density, int |B|^2 dp = sum_k p_weights[k] |B_k|^2.
struct IonisationResult {
  Complex c{0.0, 0.0};
  VectorXd p_nodes;
  VectorXd p_weights;
  VectorXcd b;
  double w_ion = 0.0;               // int |B|^2 dp
  double completeness_defect = 0.0; // | |C|^2 + int |B|^2 dp - 1 |
};

IonisationResult run_ionisation(const PreparedIonisation& prep, double lambda);

// Five-point lambda scan (0, +-h, +-2h) shared by every time observable.
struct IonisationScan {
  PreparedIonisation prep;
  double h = 0.0;
  std::array<Complex, 5> c{};        // index i <-> lambda = (i - 2) h
  std::array<VectorXcd, 5> phi{};    // free parts at t2
  std::array<VectorXcd, 5> b{};      // B(p_k, lambda_i)
  VectorXd p_nodes;
  VectorXd p_weights;
  double completeness_defect = 0.0;  // at lambda = 0

  // B(p, lambda_i) at the stored momentum node nearest to p.
  Complex b_at(int lambda_index, double p) const;
};

IonisationScan scan_ionisation(const PreparedIonisation& prep);

struct ChannelMoments {
  ComplexTime first;
  ComplexTime second;
};

// Complex times of the bound channel, tau^n = (i)^n C^{-1} d^n C / dlambda^n.
ChannelMoments bound_channel_moments(const IonisationScan& scan);

// Complex times of the free channel at momentum p, from B(p, lambda).
ChannelMoments free_channel_moments(const IonisationScan& scan, double p);

struct SwpIonisationTimes {
  double t_bound = 0.0;
  std::optional<double> t_free;  // absent when the free channel is empty
  double t_all = 0.0;
  double w_ion = 0.0;
};

// Calibrated clock readings per channel; t_all is the weighted combination
// t_all^2 = (1 - w_ion) t_bound^2 + w_ion t_free^2 (exact by construction).
SwpIonisationTimes swp_times_ionisation(const IonisationScan& scan);

// Channel-averaged real dwell time Re i [C* dC + int B* dB dp]; the
// imaginary residue is written to *imag_residue when given.
double dwell_ionisation(const IonisationScan& scan, double* imag_residue = nullptr);

}  // namespace qtt

#endif  // QTT_IONISE_HPP_
