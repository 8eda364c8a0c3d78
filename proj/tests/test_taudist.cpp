#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qtt/ctime.hpp"
#include "qtt/taudist.hpp"

using namespace qtt;

namespace {

const PotentialSpec kBarrier = PotentialSpec::rectangular_barrier(1.0, 0.0, 2.0);
const RegionOfInterest kBarrierRegion{0.0, 2.0};

AmplitudeDistribution barrier_dist(Window w = Window::kHann) {
  const auto f = transmission_amplitude(kBarrier, kBarrierRegion, 1.0);
  return conditioned_amplitude(f, 0.0, 12.0, 6.0, 1024, w);
}

int peak_bin(const AmplitudeDistribution& d) {
  int best = 0;
  for (int j = 1; j < d.amplitudes.size(); ++j)
    if (std::abs(d.amplitudes[j]) > std::abs(d.amplitudes[best])) best = j;
  return best;
}

}  // namespace

TEST_CASE("integrated amplitude restores the unbiased transition amplitude") {
  const auto f = transmission_amplitude(kBarrier, kBarrierRegion, 1.0);
  for (Window w : {Window::kHann, Window::kNone}) {
    const auto dist = conditioned_amplitude(f, 0.0, 12.0, 6.0, 1024, w);
    const Complex total = dist.amplitudes.sum() * dist.dtau();
    CHECK(std::abs(total - f(0.0)) < 1e-6);
  }
}

TEST_CASE("argument checks") {
  const AmplitudeFn one = [](double) { return Complex{1.0, 0.0}; };
  CHECK_THROWS_AS(conditioned_amplitude(one, 0.0, 12.0, 6.0, 300, Window::kNone),
                  NumericalDomainError);
  CHECK_THROWS_AS(conditioned_amplitude(one, 0.0, 12.0, 6.0, 128, Window::kNone),
                  NumericalDomainError);
  // dtau = pi / lambda_max must resolve the interval: here it does not
  CHECK_THROWS_AS(conditioned_amplitude(one, 0.0, 1.0, 6.0, 1024, Window::kNone),
                  NumericalDomainError);
  const AmplitudeFn zero = [](double) { return Complex{0.0, 0.0}; };
  CHECK_THROWS_AS(conditioned_amplitude(zero, 0.0, 12.0, 6.0, 1024, Window::kNone),
                  PostSelectionError);
}

TEST_CASE("a pure phase law concentrates at the forced duration") {
  // a field covering the whole grid multiplies the evolution by
  // exp(-i lambda (t2 - t1)); the distribution must collapse onto that time
  const double t2 = 6.0;
  const Complex amp0{0.55, -0.3};
  const AmplitudeFn f = [&](double lam) { return amp0 * std::exp(-kI * (lam * t2)); };
  const auto dist = conditioned_amplitude(f, 0.0, t2, 8.0, 1024);
  const int peak = peak_bin(dist);
  CHECK(std::abs(dist.tau_grid[peak] - t2) <= 2.0 * dist.dtau());
  CHECK(std::abs(moment(dist, 0) - Complex{1.0, 0.0}) < 1e-12);
  CHECK(std::abs(moment(dist, 1) - Complex{t2, 0.0}) < 1e-4);
}

TEST_CASE("a region the packet never visits concentrates at zero") {
  const SpatialGrid grid{-30.0, 30.0, 256};
  const auto psi_i = gaussian_packet(grid, -10.0, 0.0, 3.0);
  const RegionOfInterest far_away{20.0, 25.0};
  const double t2 = 4.0;
  PropagationOptions opts;
  opts.check_edges = false;  // truncated Gaussian tail, irrelevant here
  const auto psi_f =
      propagate(psi_i, PotentialSpec::free_space(), far_away, 0.0, 0.0, t2, Units{}, opts);
  const auto f = propagation_amplitude(psi_i, psi_f, PotentialSpec::free_space(), far_away,
                                       0.0, t2, Units{}, opts);
  const auto dist = conditioned_amplitude(f, 0.0, t2, 16.0, 256);
  const int peak = peak_bin(dist);
  CHECK(std::abs(dist.tau_grid[peak]) <= 2.0 * dist.dtau());
  CHECK(std::abs(moment(dist, 1)) < 1e-3);
  CHECK(leaked_mass_fraction(dist) < 0.01);
}

TEST_CASE("free packet crossing a region: first moment is the classical time") {
  const SpatialGrid grid{-60.0, 60.0, 256};
  const auto psi_i = gaussian_packet(grid, -18.0, 1.0, 5.0);
  const RegionOfInterest omega{0.0, 2.0};
  const double t2 = 36.0;
  PropagationOptions opts;
  opts.check_edges = false;
  const auto psi_f =
      propagate(psi_i, PotentialSpec::free_space(), omega, 0.0, 0.0, t2, Units{}, opts);
  const auto f = propagation_amplitude(psi_i, psi_f, PotentialSpec::free_space(), omega,
                                       0.0, t2, Units{}, opts);
  // the tau grid must cover the full duration: n/2 * dtau > t2
  const auto dist = conditioned_amplitude(f, 0.0, t2, 12.0, 512);
  CHECK(leaked_mass_fraction(dist) < 0.01);

  const Complex m1 = moment(dist, 1);
  // cross-check against the lambda-derivative estimator on the same states
  const auto states = conditioned_states(psi_i, PotentialSpec::free_space(), omega, 0.0, t2,
                                         1, Units{}, opts);
  const Complex deriv = conditioned_moment(states, psi_f, grid, 1);
  CHECK(std::abs(m1 - deriv) / std::abs(deriv) < 1e-3);

  const double width = grid.indicator(omega).sum() * grid.dx();
  CHECK(std::abs(m1.real() - width) / width < 0.02);
}

TEST_CASE("barrier channel moments agree with the derivative estimator") {
  SUBCASE("transmission") {
    const auto dist = barrier_dist();
    const Complex m1 = moment(dist, 1);
    const auto tt = tunnelling_time(kBarrier, kBarrierRegion, 1.0);
    CHECK(std::abs(m1 - tt.value) / std::abs(tt.value) < 1e-3);
    CHECK(leaked_mass_fraction(dist) < 0.01);
  }
  SUBCASE("reflection") {
    const auto f = reflection_amplitude(kBarrier, kBarrierRegion, 1.0);
    const auto dist = conditioned_amplitude(f, 0.0, 12.0, 6.0, 1024);
    const Complex m1 = moment(dist, 1);
    const auto tr = reflection_time(kBarrier, kBarrierRegion, 1.0);
    CHECK(std::abs(m1 - tr.value) / std::abs(tr.value) < 1e-3);
  }
}

TEST_CASE("windowed and unwindowed moments agree when the support rule holds") {
  // the raw barrier amplitude does not decay in lambda, so the unwindowed
  // transform is Gibbs-dominated and fails the support rule; a smoothly
  // decaying amplitude keeps both reconstructions in-band
  const auto base = transmission_amplitude(kBarrier, kBarrierRegion, 1.0);
  const AmplitudeFn f = [&](double lam) { return base(lam) * std::exp(-lam * lam / 9.0); };
  const auto hann = conditioned_amplitude(f, 0.0, 12.0, 6.0, 1024, Window::kHann);
  const auto none = conditioned_amplitude(f, 0.0, 12.0, 6.0, 1024, Window::kNone);
  REQUIRE(leaked_mass_fraction(hann) < 0.01);
  REQUIRE(leaked_mass_fraction(none) < 0.01);
  const Complex mh = moment(hann, 1);
  const Complex mn = moment(none, 1);
  CHECK(std::abs(mh - mn) / std::abs(mh) < 1e-2);
  const Complex mh2 = moment(hann, 2);
  const Complex mn2 = moment(none, 2);
  CHECK(std::abs(mh2 - mn2) / std::abs(mh2) < 1e-2);
  // the Gaussian factor is even in lambda, so the first moment still
  // estimates the physical channel time
  const auto tt = tunnelling_time(kBarrier, kBarrierRegion, 1.0);
  CHECK(std::abs(mh - tt.value) / std::abs(tt.value) < 0.05);
}

TEST_CASE("observation probabilities") {
  const double lambda_max = 6.0, t2 = 12.0;
  const double dtau = M_PI / lambda_max;
  SUBCASE("single-bin concentration makes observation free") {
    // phase law with a duration that is an exact bin multiple
    const double t0 = 4.0 * dtau;
    const AmplitudeFn f = [&](double lam) { return std::exp(-kI * (lam * t0)); };
    const auto dist = conditioned_amplitude(f, 0.0, t2, lambda_max, 1024, Window::kNone);
    const auto [p_acc, p_free] = accurate_measurement_probability(dist);
    CHECK(std::abs(p_acc - p_free) < 1e-6);
    CHECK(std::abs(p_acc - 1.0) < 1e-6);
  }
  SUBCASE("two interfering durations suppress the unobserved probability") {
    const double ta = 2.0 * dtau, tb = 7.0 * dtau;
    const AmplitudeFn f = [&](double lam) {
      return 0.5 * (std::exp(-kI * (lam * ta)) - std::exp(-kI * (lam * tb)));
    };
    const auto dist = conditioned_amplitude(f, 0.0, t2, lambda_max, 1024, Window::kNone);
    const auto [p_acc, p_free] = accurate_measurement_probability(dist);
    CHECK(p_free < 1e-12);
    CHECK(p_acc > 0.1);
  }
  SUBCASE("tunnelling fixture: observation changes the probability") {
    const auto [p_acc, p_free] = accurate_measurement_probability(barrier_dist());
    const auto amps = scattering_amplitudes(kBarrier, 1.0);
    CHECK(std::abs(p_free - std::norm(amps.T)) < 1e-3);
    CHECK(std::abs(p_acc - p_free) > 1e-3);
    // pinned on first run; guards against silent reconstruction changes
    CHECK(p_free == doctest::Approx(0.0706508).epsilon(1e-4));
  }
}
