#ifndef QTT_CTIME_HPP_
#define QTT_CTIME_HPP_

#include <functional>

#include "qtt/model.hpp"
#include "qtt/scatter.hpp"
#include "qtt/types.hpp"

namespace qtt {

enum class TimeRole { kTunnelling, kReflection, kDwellComponent, kMoment };

// A complex value in time units plus the differentiation error estimate.
struct ComplexTime {
  Complex value{0.0, 0.0};
  double error_estimate = 0.0;
  TimeRole role = TimeRole::kMoment;
};

// Amplitude threshold below which a log-derivative is meaningless in double
// precision; such channels raise PostSelectionError.
inline constexpr double kPostSelectionThreshold = 1e-12;

// Differentiation step for lambda-derivatives of scattering amplitudes.
double scattering_lambda_step(const PotentialSpec& v, double p, const Units& units);

// tau_tunn = i d/dlambda ln T(p, lambda)|_0.
ComplexTime tunnelling_time(const PotentialSpec& v, const RegionOfInterest& omega, double p,
                            const Units& units = {});

// tau_refl = i d/dlambda ln R(p, lambda)|_0.
ComplexTime reflection_time(const PotentialSpec& v, const RegionOfInterest& omega, double p,
                            const Units& units = {});

// Higher moment tau^n (n = 1 or 2) of the chosen channel.
ComplexTime channel_moment(const PotentialSpec& v, const RegionOfInterest& omega, double p,
                           bool reflected, int n, const Units& units = {});

// i [T* dT + R* dR]; real within tolerance, the real part is returned.
double dwell_time_monochromatic(const PotentialSpec& v, const RegionOfInterest& omega,
                                double p, const Units& units = {});

// [ |dT|^2 + |dR|^2 ]^{1/2}: the calibrated no-post-selection clock reading
// for a nearly monochromatic packet.
double swp_time_monochromatic_all(const PotentialSpec& v, const RegionOfInterest& omega,
                                  double p, const Units& units = {});

// Incident-packet momentum amplitude A(p) on a Gauss-Legendre p grid,
// normalised so that int |A|^2 dp = 1.
struct MomentumDistribution {
  VectorXd nodes;
  VectorXd weights;
  VectorXcd values;

  static MomentumDistribution gaussian(double p0, double sigma, int n_nodes = 512);
  double norm_defect() const;  // | int |A|^2 dp - 1 |
};

enum class Selection { kTunnelled, kReflected, kAll };

// Wave-packet SWP times by p-quadrature.
double swp_time_wavepacket(const MomentumDistribution& a, const PotentialSpec& v,
                           const RegionOfInterest& omega, Selection sel,
                           const Units& units = {});

// Channel probability W(sel) for the same quadrature.
double channel_weight(const MomentumDistribution& a, const PotentialSpec& v,
                      const RegionOfInterest& omega, Selection sel, const Units& units = {});

// |(A1 tau1 + A2 tau2)/(A1 + A2)|: the two-path calibrated reading.
double two_path_time(Complex a1, double tau1, Complex a2, double tau2);

// n-th two-path moment (A1 tau1^n + A2 tau2^n)/(A1 + A2).
Complex two_path_moment(Complex a1, double tau1, Complex a2, double tau2, int n);

}  // namespace qtt

#endif  // QTT_CTIME_HPP_
