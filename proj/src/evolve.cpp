#include "qtt/evolve.hpp"

#include <cmath>
#include <functional>
#include <map>

#include <unsupported/Eigen/FFT>

#include "qtt/deriv.hpp"

namespace qtt {

double Wavefunction::edge_norm() const {
  const int n = grid.n_points;
  const int edge = std::max(1, n / 20);
  double acc = 0.0;
  for (int i = 0; i < edge; ++i)
    acc += std::norm(values[i]) + std::norm(values[n - 1 - i]);
  return std::sqrt(acc * grid.dx());
}

Complex Wavefunction::inner(const Wavefunction& other) const {
  return grid.dx() * values.dot(other.values);  // Eigen dot conjugates this
}

Wavefunction gaussian_packet(const SpatialGrid& grid, double x0, double p0, double sigma_x,
                             double t) {
  Wavefunction psi{grid, VectorXcd(grid.n_points), t};
  const double c = std::pow(2.0 * M_PI * sigma_x * sigma_x, -0.25);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.midpoint(i);
    const double u = (x - x0) / sigma_x;
    psi.values[i] = c * std::exp(Complex(-0.25 * u * u, p0 * (x - x0)));
  }
  psi.values /= psi.norm();
  return psi;
}

Wavefunction free_gaussian_analytic(const SpatialGrid& grid, double x0, double p0,
                                    double sigma_x, double t, const Units& units) {
  if (t == 0.0) return gaussian_packet(grid, x0, p0, sigma_x);
  const double mu = units.mass;
  const double alpha = 1.0 / (4.0 * sigma_x * sigma_x);
  const Complex c0 = std::pow(2.0 * M_PI * sigma_x * sigma_x, -0.25);
  const Complex a = Complex(alpha, 0.0) - kI * mu / (2.0 * t);
  const Complex pref =
      c0 * std::sqrt(mu / (2.0 * M_PI * kI * t)) * std::sqrt(M_PI / a);
  Wavefunction psi{grid, VectorXcd(grid.n_points), t};
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.midpoint(i);
    const Complex b = Complex(2.0 * alpha * x0, p0 - mu * x / t);
    psi.values[i] = pref * std::exp(b * b / (4.0 * a) +
                                    Complex(-alpha * x0 * x0, -p0 * x0 + mu * x * x / (2.0 * t)));
  }
  return psi;
}

namespace {

using StepObserver = std::function<void(int step, double t)>;

// Strang-split stepping engine advancing several states at once under the
// same composite potential; observer fires at every step boundary
// (including step 0 at t1).
void run_steps(std::vector<VectorXcd>& states, const SpatialGrid& grid,
               const PotentialSpec& v, const RegionOfInterest& omega, double lambda,
               double t1, double t2, const Units& units, const PropagationOptions& opts,
               const StepObserver& observe) {
  const int n = grid.n_points;
  const double dx = grid.dx();
  const double span = t2 - t1;
  if (span == 0.0) {
    if (observe) observe(0, t1);
    return;
  }
  const double dt_mag = opts.dt > 0.0 ? opts.dt : opts.dt_factor * units.mass * dx * dx;
  const int n_steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt_mag)));
  const double dt = span / n_steps;

  // spectral kinetic phases, FFT frequency order
  VectorXcd kin_half(n), kin_full(n);
  const double dk = 2.0 * M_PI / (grid.x_max - grid.x_min);
  for (int i = 0; i < n; ++i) {
    const double k = dk * (i < n / 2 ? i : i - n);
    kin_half[i] = std::exp(-kI * (k * k / (2.0 * units.mass)) * (0.5 * dt));
    kin_full[i] = kin_half[i] * kin_half[i];
  }

  const VectorXd mask = grid.indicator(omega);
  const bool static_v = !v.time_dependent();
  VectorXcd pot_phase(n);
  auto build_pot_phase = [&](double t) {
    const VectorXd vt = sample_potential(v, grid, t);
    for (int i = 0; i < n; ++i)
      pot_phase[i] = std::exp(-kI * ((vt[i] + lambda * mask[i]) * dt));
  };
  if (static_v) build_pot_phase(t1);

  Eigen::FFT<double> fft;
  std::vector<VectorXcd> freq(states.size(), VectorXcd(n));
  if (observe) observe(0, t1);
  for (std::size_t s = 0; s < states.size(); ++s) {
    fft.fwd(freq[s], states[s]);
    freq[s] = freq[s].cwiseProduct(kin_half);
  }
  for (int step = 0; step < n_steps; ++step) {
    if (!static_v) build_pot_phase(t1 + (step + 0.5) * dt);
    for (std::size_t s = 0; s < states.size(); ++s) {
      fft.inv(states[s], freq[s]);
      states[s] = states[s].cwiseProduct(pot_phase);
      fft.fwd(freq[s], states[s]);
      freq[s] = freq[s].cwiseProduct(step + 1 == n_steps ? kin_half : kin_full);
    }
    if (observe && step + 1 < n_steps) {
      // observer needs position-space states; only materialise when asked
      for (std::size_t s = 0; s < states.size(); ++s) {
        VectorXcd tmp(n);
        fft.inv(tmp, VectorXcd(freq[s].cwiseProduct(kin_half.cwiseInverse())));
        states[s] = tmp;
      }
      observe(step + 1, t1 + (step + 1) * dt);
      for (std::size_t s = 0; s < states.size(); ++s) {
        fft.fwd(freq[s], states[s]);
        freq[s] = freq[s].cwiseProduct(kin_half);
      }
    }
  }
  for (std::size_t s = 0; s < states.size(); ++s) fft.inv(states[s], freq[s]);
  if (observe) observe(n_steps, t2);
}

}  // namespace

Wavefunction propagate(const Wavefunction& psi, const PotentialSpec& v,
                       const RegionOfInterest& omega, double lambda, double t1, double t2,
                       const Units& units, const PropagationOptions& opts) {
  std::vector<VectorXcd> states{psi.values};
  run_steps(states, psi.grid, v, omega, lambda, t1, t2, units, opts, nullptr);
  Wavefunction out{psi.grid, std::move(states[0]), t2};
  if (opts.check_edges && out.edge_norm() > opts.edge_tolerance)
    throw NumericalDomainError("propagate: wavefunction reached the grid edge (domain too small)");
  return out;
}

std::vector<ConditionedState> conditioned_states(const Wavefunction& psi_i,
                                                 const PotentialSpec& v,
                                                 const RegionOfInterest& omega, double t1,
                                                 double t2, int n_max, const Units& units,
                                                 const PropagationOptions& opts) {
  if (n_max < 0 || n_max > 2)
    throw NumericalDomainError("conditioned_states: n_max must be 0, 1 or 2");
  const double h = default_lambda_step(0.0, v.max_abs_height());
  std::map<double, VectorXcd> cache;
  auto u = [&](double lam) -> const VectorXcd& {
    auto it = cache.find(lam);
    if (it == cache.end())
      it = cache.emplace(lam, propagate(psi_i, v, omega, lam, t1, t2, units, opts).values)
               .first;
    return it->second;
  };

  std::vector<ConditionedState> out;
  out.push_back({0, u(0.0), 0.0});
  if (n_max >= 1) {
    auto d1 = lambda_derivative([&](double lam) { return u(lam); }, 1, h);
    out.push_back({1, kI * d1.value, d1.error_estimate});
  }
  if (n_max >= 2) {
    auto d2 = lambda_derivative([&](double lam) { return u(lam); }, 2, h);
    out.push_back({2, -d2.value, d2.error_estimate});
  }
  return out;
}

Complex conditioned_moment(const std::vector<ConditionedState>& states,
                           const Wavefunction& psi_f, const SpatialGrid& grid, int n) {
  if (n < 0 || n >= static_cast<int>(states.size()))
    throw NumericalDomainError("conditioned_moment: order not available");
  const double dx = grid.dx();
  const Complex denom = dx * psi_f.values.dot(states[0].values);
  if (std::abs(denom) <= kPostSelectionThreshold)
    throw PostSelectionError("conditioned_moment: vanishing transition amplitude");
  return dx * psi_f.values.dot(states[n].values) / denom;
}

ComplexTime complex_time_spacetime_integral(const Wavefunction& psi_i,
                                            const Wavefunction& psi_f,
                                            const PotentialSpec& v,
                                            const RegionOfInterest& omega, double t1,
                                            double t2, const Units& units,
                                            const PropagationOptions& opts) {
  PropagationOptions back = opts;
  back.check_edges = false;
  const Wavefunction phi1 = propagate(psi_f, v, omega, 0.0, t2, t1, units, back);

  const VectorXd mask = psi_i.grid.indicator(omega);
  const double dx = psi_i.grid.dx();
  std::vector<VectorXcd> states{psi_i.values, phi1.values};
  Complex integral{0.0, 0.0};
  double prev_t = t1;
  bool first = true;
  Complex prev_val{0.0, 0.0};
  auto overlap_in_omega = [&]() {
    Complex acc{0.0, 0.0};
    for (int i = 0; i < mask.size(); ++i)
      if (mask[i] != 0.0) acc += std::conj(states[1][i]) * states[0][i];
    return acc * dx;
  };
  run_steps(states, psi_i.grid, v, omega, 0.0, t1, t2, units, opts,
            [&](int /*step*/, double t) {
              const Complex val = overlap_in_omega();
              if (!first) integral += 0.5 * (t - prev_t) * (val + prev_val);
              prev_t = t;
              prev_val = val;
              first = false;
            });
  const Complex denom = dx * psi_f.values.dot(states[0]);
  if (std::abs(denom) <= kPostSelectionThreshold)
    throw PostSelectionError("complex_time_spacetime_integral: vanishing transition amplitude");
  return {integral / denom, 0.0, TimeRole::kMoment};
}

double dwell_time_stopwatch(const Wavefunction& psi_i, const PotentialSpec& v,
                            const RegionOfInterest& omega, double t1, double t2,
                            const Units& units, const PropagationOptions& opts) {
  const VectorXd mask = psi_i.grid.indicator(omega);
  const double dx = psi_i.grid.dx();
  std::vector<VectorXcd> states{psi_i.values};
  double integral = 0.0, prev_t = t1, prev_val = 0.0;
  bool first = true;
  run_steps(states, psi_i.grid, v, omega, 0.0, t1, t2, units, opts,
            [&](int /*step*/, double t) {
              double val = 0.0;
              for (int i = 0; i < mask.size(); ++i)
                if (mask[i] != 0.0) val += std::norm(states[0][i]);
              val *= dx;
              if (!first) integral += 0.5 * (t - prev_t) * (val + prev_val);
              prev_t = t;
              prev_val = val;
              first = false;
            });
  return integral;
}

double swp_all_operator_form(const Wavefunction& psi_i, const PotentialSpec& v,
                             const RegionOfInterest& omega, double t1, double t2,
                             const Units& units, const PropagationOptions& opts) {
  const auto states = conditioned_states(psi_i, v, omega, t1, t2, 1, units, opts);
  return std::sqrt(psi_i.grid.dx()) * states[1].values.norm();
}

}  // namespace qtt
