#ifndef QTT_SCATTER_HPP_
#define QTT_SCATTER_HPP_

#include "qtt/model.hpp"
#include "qtt/types.hpp"

namespace qtt {

// Complex transmission / reflection amplitudes at fixed momentum.
// Convention: unit-amplitude incident plane wave exp(ipx) from the left;
// T multiplies exp(ipx) on the far side, R multiplies exp(-ipx) on the
// near side, so V = 0 gives T = 1, R = 0.
struct ScatteringResult {
  double p = 0.0;
  double lambda = 0.0;
  Complex T{1.0, 0.0};
  Complex R{0.0, 0.0};
  bool degenerate_perturbed = false;  // an E == segment-height degeneracy was nudged

  double unitarity_defect() const { return std::abs(std::norm(T) + std::norm(R) - 1.0); }
};

// Amplitudes for the static composite potential V + lambda * Theta_Omega,
// by scattering-matrix (Redheffer) composition over the merged segments.
ScatteringResult scattering_amplitudes(const PotentialSpec& v, const RegionOfInterest& omega,
                                       double lambda, double p, const Units& units = {});

// Same, for an already-composed static spec.
ScatteringResult scattering_amplitudes(const PotentialSpec& v, double p,
                                       const Units& units = {});

// Spec with the segment order mirrored (x -> -x); reciprocity checks.
PotentialSpec mirrored(const PotentialSpec& v);

// Closed-form rectangular barrier on [0, d], both E < V0 and E > V0 branches.
ScatteringResult rectangular_barrier_oracle(double v0, double d, double p,
                                            const Units& units = {});

// Total-reflection step amplitude R = (p - i kappa)/(p + i kappa); requires
// 0 < p^2 < 2 mu V0.
Complex step_reflection_oracle(double v0, double p, const Units& units = {});

}  // namespace qtt

#endif  // QTT_SCATTER_HPP_
