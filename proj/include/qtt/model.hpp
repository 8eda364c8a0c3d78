#ifndef QTT_MODEL_HPP_
#define QTT_MODEL_HPP_

#include <map>
#include <string>
#include <vector>

#include "qtt/types.hpp"

namespace qtt {

// Region of interest Omega = [a, b].
struct RegionOfInterest {
  double a = 0.0;
  double b = 1.0;

  RegionOfInterest() = default;
  RegionOfInterest(double a_, double b_);

  bool contains(double x) const { return x >= a && x <= b; }
  double width() const { return b - a; }
};

// Piecewise-linear height-vs-time profile.
struct TimeProfile {
  std::vector<double> times;    // strictly increasing
  std::vector<double> heights;  // same length

  double at(double t) const;  // throws NumericalDomainError outside [front, back]
  double t_min() const { return times.front(); }
  double t_max() const { return times.back(); }
};

// One constant-height slab.  When `profile` names an entry of the owning
// spec's schedule, the time-dependent profile value is added to `height`
// (so a lambda shift composes with a schedule).
struct Segment {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double height = 0.0;
  std::string profile;  // empty for static segments
};

// Piecewise-constant 1D potential; zero outside the listed segments.
struct PotentialSpec {
  std::vector<Segment> segments;  // sorted by x_lo, non-overlapping
  std::map<std::string, TimeProfile> schedule;

  void validate() const;  // throws SchemaError on overlap / non-finite heights
  bool time_dependent() const { return !schedule.empty(); }
  double height_at(const Segment& s, double t) const;
  double value(double x, double t = 0.0) const;
  double max_abs_height() const;
  // Support of the segment list; (0,0) when empty.
  std::pair<double, double> support() const;

  static PotentialSpec rectangular_barrier(double v0, double x_lo, double x_hi);
  static PotentialSpec free_space() { return {}; }
};

// Uniform cell grid; wavefunctions and potentials are sampled at cell
// midpoints x_i = x_min + (i + 1/2) dx.
struct SpatialGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_points = 256;

  SpatialGrid() = default;
  SpatialGrid(double x_min_, double x_max_, int n_points_);

  double dx() const { return (x_max - x_min) / n_points; }
  double midpoint(int i) const { return x_min + (i + 0.5) * dx(); }
  VectorXd midpoints() const;
  // 1 for cells whose midpoint lies in [omega.a, omega.b], else 0.
  VectorXd indicator(const RegionOfInterest& omega) const;
};

// V(x) + lambda * Theta_Omega(x), as a new piecewise-constant spec.
// Omega boundaries are inserted as breakpoints where needed.
PotentialSpec composite_potential(const PotentialSpec& v, const RegionOfInterest& omega,
                                  double lambda);

// Midpoint samples of v on g at time t.
VectorXd sample_potential(const PotentialSpec& v, const SpatialGrid& g, double t = 0.0);

// JSON round trip for the published schema
// {"segments":[{"x_lo":..,"x_hi":..,"height":..,"profile":..}],"schedule":{...}}.
std::string potential_to_json(const PotentialSpec& v);
PotentialSpec potential_from_json(const std::string& text);

}  // namespace qtt

#endif  // QTT_MODEL_HPP_
