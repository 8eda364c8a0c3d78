#include "qtt/clock.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "qtt/ctime.hpp"

namespace qtt {

namespace {

int spin_dim(double j) {
  const double two_j = 2.0 * j;
  const int tj = static_cast<int>(std::lround(two_j));
  if (tj < 1 || std::abs(two_j - tj) > 1e-12)
    throw SchemaError("spin size j must be a positive integer or half-integer");
  return tj + 1;
}

}  // namespace

SpinState ClockBasis::beta(int k) const {
  return rotated_uniform(j, phi(k));
}

SpinState ClockBasis::rotated_uniform(double j, double theta) {
  const int dim = spin_dim(j);
  SpinState s;
  s.j = j;
  s.amplitudes.resize(dim);
  const double c = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < dim; ++i) {
    const double m = i - j;
    s.amplitudes[i] = c * std::exp(-kI * (m * theta));
  }
  return s;
}

double gswp(double phi, double j) {
  const int dim = spin_dim(j);
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += std::cos((i - j) * phi);
  return acc / dim;
}

double gswp_d1(double phi, double j) {
  const int dim = spin_dim(j);
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc -= (i - j) * std::sin((i - j) * phi);
  return acc / dim;
}

double gswp_d2(double phi, double j) {
  const int dim = spin_dim(j);
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc -= (i - j) * (i - j) * std::cos((i - j) * phi);
  return acc / dim;
}

double q_factor(double j) {
  const int dim = spin_dim(j);
  double q = 0.0;
  for (int k = 1; k < dim; ++k) {
    const double phi_k = 2.0 * M_PI * k / dim;
    Complex elem{0.0, 0.0};  // <beta^k|j_z|beta^0>
    for (int i = 0; i < dim; ++i) {
      const double m = i - j;
      elem += m * std::exp(kI * (m * phi_k));
    }
    elem /= static_cast<double>(dim);
    q += phi_k * std::norm(elem);
  }
  return q;
}

double q2_factor(double j) {
  const int dim = spin_dim(j);
  if (dim % 2 == 0)
    throw NumericalDomainError("q2_factor: modified clock requires integer j");
  double q2 = 0.0;
  for (int l = -(dim - 1) / 2; l <= (dim - 1) / 2; ++l) {
    const double phi_l = 2.0 * M_PI * l / dim;
    q2 -= phi_l * gswp_d1(phi_l, j) * gswp_d2(phi_l, j);
  }
  return q2;
}

double qprime_factor(const SpinState& gamma_i) {
  const ClockBasis basis{gamma_i.j};
  const int dim = basis.dim();
  Complex acc{0.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    const SpinState bk = basis.beta(k);
    Complex ov{0.0, 0.0}, jz{0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
      ov += std::conj(gamma_i.amplitudes[i]) * bk.amplitudes[i];
      jz += std::conj(bk.amplitudes[i]) * (i - gamma_i.j) * gamma_i.amplitudes[i];
    }
    acc += basis.phi(k) * ov * jz;
  }
  return 2.0 * acc.imag();
}

double JointState::total_norm() const {
  double acc = 0.0;
  for (const auto& c : components) acc += c.squaredNorm();
  return std::sqrt(acc * grid.dx());
}

Postselector Postselector::transmitted(double x_split) {
  Postselector s;
  s.kind = Kind::kTransmitted;
  s.x_split = x_split;
  return s;
}

Postselector Postselector::reflected(double x_split) {
  Postselector s;
  s.kind = Kind::kReflected;
  s.x_split = x_split;
  return s;
}

VectorXcd Postselector::apply(const VectorXcd& psi, const SpatialGrid& grid) const {
  switch (kind) {
    case Kind::kAll:
      return psi;
    case Kind::kTransmitted:
    case Kind::kReflected: {
      VectorXcd out = psi;
      for (int i = 0; i < grid.n_points; ++i) {
        const bool right = grid.midpoint(i) > x_split;
        if (kind == Kind::kTransmitted ? !right : right) out[i] = Complex{0.0, 0.0};
      }
      return out;
    }
    case Kind::kBound: {
      const Complex ov = grid.dx() * bound_state.dot(psi);
      return VectorXcd(ov * bound_state);
    }
    case Kind::kFree: {
      const Complex ov = grid.dx() * bound_state.dot(psi);
      return VectorXcd(psi - ov * bound_state);
    }
    case Kind::kMask: {
      VectorXcd out = psi;
      for (int i = 0; i < grid.n_points; ++i)
        if (mask[i] == 0.0) out[i] = Complex{0.0, 0.0};
      return out;
    }
  }
  throw SchemaError("Postselector: unknown kind");
}

JointState evolve_coupled(const Wavefunction& psi_i, const ClockConfig& cfg,
                          const PotentialSpec& v, const RegionOfInterest& omega, double t1,
                          double t2, const Units& units, const PropagationOptions& opts) {
  const int dim = spin_dim(cfg.j);
  SpinState gamma = cfg.gamma_i;
  if (gamma.amplitudes.size() == 0) gamma = ClockBasis{cfg.j}.beta(0);
  if (gamma.dim() != dim) throw SchemaError("evolve_coupled: gamma_i dimension mismatch");
  if (std::abs(gamma.amplitudes.norm() - 1.0) > 1e-9)
    throw SchemaError("evolve_coupled: gamma_i must be unit norm");

  JointState joint{psi_i.grid, cfg.j, cfg.omega_l, {}};
  joint.components.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const double m = i - cfg.j;
    // The coupling omega_L j_z Theta_Omega is diagonal in m: each component
    // sees the particle potential shifted by m omega_L inside Omega.
    const Wavefunction out =
        propagate(psi_i, v, omega, m * cfg.omega_l, t1, t2, units, opts);
    joint.components[i] = gamma.amplitudes[i] * out.values;
  }
  return joint;
}

namespace {

Readout readout_impl(const JointState& joint, const Postselector& sel, int k_origin) {
  const ClockBasis basis{joint.j};
  const int dim = basis.dim();
  const double dx = joint.grid.dx();
  const double c = 1.0 / std::sqrt(static_cast<double>(dim));

  VectorXd weights(dim);
  double total = 0.0;
  for (int k = 0; k < dim; ++k) {
    // <beta^k|Psi> as a particle wavefunction
    VectorXcd chi = VectorXcd::Zero(joint.grid.n_points);
    for (int i = 0; i < dim; ++i) {
      const double m = i - joint.j;
      chi += c * std::exp(kI * (m * basis.phi(k))) * joint.components[i];
    }
    const VectorXcd proj = sel.apply(chi, joint.grid);
    weights[k] = dx * proj.squaredNorm();
    total += weights[k];
  }
  if (total <= kPostSelectionThreshold)
    throw PostSelectionError("readout: empty post-selection");

  Readout out;
  out.probabilities = weights / total;
  if (joint.omega_l != 0.0) {
    for (int k = 0; k < dim; ++k) {
      const double phi = basis.phi(k) - basis.phi(k_origin);
      out.t_omega += (phi / joint.omega_l) * out.probabilities[k];
    }
  }
  return out;
}

}  // namespace

Readout readout(const JointState& joint, const Postselector& sel) {
  return readout_impl(joint, sel, 0);
}

Readout readout_modified(const JointState& joint, const Postselector& sel) {
  const int dim = ClockBasis{joint.j}.dim();
  if (dim % 2 == 0)
    throw NumericalDomainError("readout_modified: requires integer j");
  return readout_impl(joint, sel, (dim - 1) / 2);
}

namespace {

// Linear extrapolation to omega -> 0 from the two smallest grid points.
double richardson_pair(double w1, double v1, double w2, double v2) {
  return (w2 * v1 - w1 * v2) / (w2 - w1);
}

std::pair<double, double> two_smallest(std::vector<double> grid) {
  if (grid.size() < 2)
    throw NumericalDomainError("omega grid needs at least two points");
  std::sort(grid.begin(), grid.end());
  if (!(grid.front() > 0.0))
    throw NumericalDomainError("omega grid must be positive");
  if (grid.back() < 10.0 * grid.front())
    throw NumericalDomainError("omega grid must span at least one decade");
  return {grid[0], grid[1]};
}

}  // namespace

Extraction weak_limit_extract(const std::function<double(double)>& t_omega_of_omega,
                              double j, const std::vector<double>& omega_grid) {
  const auto [w1, w2] = two_smallest(omega_grid);
  const double s1 = t_omega_of_omega(w1) / w1;
  const double s2 = t_omega_of_omega(w2) / w2;
  const double slope = richardson_pair(w1, s1, w2, s2);
  if (!(slope > 0.0))
    throw NumericalDomainError("weak_limit_extract: non-positive slope (non-weak regime?)");
  const double q = q_factor(j);
  const double t_swp = std::sqrt(slope / q);
  const double err = std::abs(slope - s1) / (2.0 * std::sqrt(slope * q));
  return {t_swp, err};
}

Extraction modified_clock_extract(const std::function<double(double)>& t_omega_of_omega,
                                  double j, const std::vector<double>& omega_grid) {
  const auto [w1, w2] = two_smallest(omega_grid);
  const double c1 = t_omega_of_omega(w1) / (w1 * w1);
  const double c2 = t_omega_of_omega(w2) / (w2 * w2);
  const double c = richardson_pair(w1, c1, w2, c2);
  const double q2 = q2_factor(j);
  const double ratio = c / q2;
  if (!(ratio > 0.0))
    throw NumericalDomainError("modified_clock_extract: non-positive cubic coefficient");
  const double t = std::cbrt(ratio);
  const double err = std::abs(c - c1) / (3.0 * q2 * t * t);
  return {t, std::abs(err)};
}

std::vector<double> default_omega_grid(double j, double span, int n_points,
                                       double max_rotation) {
  if (!(span > 0.0)) throw NumericalDomainError("default_omega_grid: span must be positive");
  std::vector<double> grid(n_points);
  double w = max_rotation / (std::max(j, 0.5) * span);
  for (int i = n_points - 1; i >= 0; --i) {
    grid[i] = w;
    w *= 0.5;
  }
  return grid;
}

Extraction dwell_probe(const Wavefunction& psi_i, const PotentialSpec& v,
                       const RegionOfInterest& omega, const SpinState& gamma_i,
                       double t1, double t2, const std::vector<double>& omega_grid,
                       const Units& units, const PropagationOptions& opts) {
  const double qp = qprime_factor(gamma_i);
  if (std::abs(qp) < 1e-10)
    throw NumericalDomainError("dwell_probe: degenerate probe, Q'(j) vanishes");

  const ClockBasis basis{gamma_i.j};
  const int dim = basis.dim();
  // free-spin baseline sum_k tau_k |<beta^k|gammaI>|^2 (times omega)
  double baseline_phi = 0.0;
  for (int k = 0; k < dim; ++k) {
    const SpinState bk = basis.beta(k);
    const Complex ov = bk.amplitudes.dot(gamma_i.amplitudes);
    baseline_phi += basis.phi(k) * std::norm(ov);
  }

  auto delta_t = [&](double w) {
    ClockConfig cfg{gamma_i.j, w, gamma_i};
    const JointState joint = evolve_coupled(psi_i, cfg, v, omega, t1, t2, units, opts);
    const Readout r = readout(joint, Postselector::all());
    return r.t_omega - baseline_phi / w;
  };

  const auto [w1, w2] = two_smallest(omega_grid);
  const double d1 = delta_t(w1), d2 = delta_t(w2);
  const double d0 = richardson_pair(w1, d1, w2, d2);
  return {d0 / qp, std::abs(d0 - d1) / std::abs(qp)};
}

}  // namespace qtt
