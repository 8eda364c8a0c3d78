#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qtt/ctime.hpp"
#include "qtt/deriv.hpp"

using namespace qtt;

namespace {

const PotentialSpec kBarrier = PotentialSpec::rectangular_barrier(1.0, 0.0, 2.0);
const RegionOfInterest kBarrierRegion{0.0, 2.0};

// Opaque slab standing in for a semi-infinite step.
const PotentialSpec kStep = PotentialSpec::rectangular_barrier(1.0, 0.0, 40.0);
const RegionOfInterest kStepRegion{0.0, 40.0};

// Channel times differentiated through the closed-form barrier amplitudes
// with V0 -> V0 + lambda; independent of the scattering-matrix code path.
Complex oracle_time(double v0, double d, double p, bool reflected) {
  auto f = [&](double lam) {
    const auto r = rectangular_barrier_oracle(v0 + lam, d, p);
    return reflected ? r.R : r.T;
  };
  const auto d1 = lambda_derivative(f, 1, 1e-4);
  return kI * d1.value / f(0.0);
}

}  // namespace

TEST_CASE("free-segment tunnelling time is the classical duration") {
  const auto tau = tunnelling_time(PotentialSpec::free_space(), {0.0, 2.0}, 1.0);
  CHECK(std::abs(tau.value - 2.0) < 1e-8);
  CHECK(tau.role == TimeRole::kTunnelling);
}

TEST_CASE("free-segment time scales as d and 1/p") {
  for (double d : {0.5, 1.0, 3.0})
    for (double p : {0.5, 1.0, 2.0}) {
      const auto tau = tunnelling_time(PotentialSpec::free_space(), {0.0, d}, p);
      CHECK(std::abs(tau.value - d / p) < 1e-7);
    }
  Units heavy;
  heavy.mass = 3.0;
  const auto tau = tunnelling_time(PotentialSpec::free_space(), {0.0, 2.0}, 1.0, heavy);
  CHECK(std::abs(tau.value - 6.0) < 1e-7);
}

TEST_CASE("barrier channel times match oracle differentiation") {
  for (double p : {0.7, 1.0, 1.8}) {
    const auto tt = tunnelling_time(kBarrier, kBarrierRegion, p);
    CHECK(std::abs(tt.value - oracle_time(1.0, 2.0, p, false)) < 1e-6);
    const auto tr = reflection_time(kBarrier, kBarrierRegion, p);
    CHECK(std::abs(tr.value - oracle_time(1.0, 2.0, p, true)) < 1e-6);
  }
}

TEST_CASE("barrier fixture values") {
  const auto tt = tunnelling_time(kBarrier, kBarrierRegion, 1.0);
  CHECK(tt.value.real() == doctest::Approx(0.96403).epsilon(1e-4));
  CHECK(tt.value.imag() == doctest::Approx(-1.92806).epsilon(1e-4));
  const auto tr = reflection_time(kBarrier, kBarrierRegion, 1.0);
  CHECK(tr.value.real() == doctest::Approx(0.96403).epsilon(1e-4));
  CHECK(tr.value.imag() == doctest::Approx(0.14657).epsilon(1e-4));
  CHECK(dwell_time_monochromatic(kBarrier, kBarrierRegion, 1.0) ==
        doctest::Approx(0.964028).epsilon(1e-4));
  CHECK(swp_time_monochromatic_all(kBarrier, kBarrierRegion, 1.0) ==
        doctest::Approx(1.10089).epsilon(1e-4));
}

TEST_CASE("a free particle never reflects") {
  CHECK_THROWS_AS(reflection_time(PotentialSpec::free_space(), {0.0, 2.0}, 1.0),
                  PostSelectionError);
}

TEST_CASE("total-reflection step: all three times coincide at p over kappa V0") {
  // V0 = 1, p = 1, mu = 1: kappa = 1, so p / (kappa V0) = 1.
  const auto tr = reflection_time(kStep, kStepRegion, 1.0);
  CHECK(tr.value.real() == doctest::Approx(1.0).epsilon(1e-6));
  const double dwell = dwell_time_monochromatic(kStep, kStepRegion, 1.0);
  CHECK(dwell == doctest::Approx(1.0).epsilon(1e-6));
  const double swp = swp_time_monochromatic_all(kStep, kStepRegion, 1.0);
  CHECK(swp == doctest::Approx(dwell).epsilon(1e-6));
}

TEST_CASE("free dwell time is mu d over p") {
  for (double p : {0.5, 1.0, 2.0})
    CHECK(dwell_time_monochromatic(PotentialSpec::free_space(), {0.0, 2.0}, p) ==
          doctest::Approx(2.0 / p).epsilon(1e-7));
}

TEST_CASE("dwell decomposition and positivity") {
  for (double p : {0.6, 1.0, 1.5, 2.2}) {
    const auto amps = scattering_amplitudes(kBarrier, p);
    const auto tt = tunnelling_time(kBarrier, kBarrierRegion, p);
    const auto tr = reflection_time(kBarrier, kBarrierRegion, p);
    const double recomposed = std::norm(amps.T) * tt.value.real() +
                              std::norm(amps.R) * tr.value.real();
    const double dwell = dwell_time_monochromatic(kBarrier, kBarrierRegion, p);
    CHECK(std::abs(dwell - recomposed) < 1e-8);
    CHECK(dwell >= 0.0);
  }
}

TEST_CASE("channel moments: first moment reproduces the channel time") {
  const auto tt = tunnelling_time(kBarrier, kBarrierRegion, 1.0);
  const auto m1 = channel_moment(kBarrier, kBarrierRegion, 1.0, false, 1);
  CHECK(std::abs(m1.value - tt.value) < 1e-10);
  const auto m2 = channel_moment(kBarrier, kBarrierRegion, 1.0, false, 2);
  CHECK(std::isfinite(std::abs(m2.value)));
}

TEST_CASE("clock-to-dwell ratio for a free region") {
  for (double pd : {M_PI / 2.0, M_PI, 2.0 * M_PI, 5.0}) {
    const double p = 1.0;
    const double d = pd;
    const RegionOfInterest omega{0.0, d};
    const double dwell = dwell_time_monochromatic(PotentialSpec::free_space(), omega, p);
    const double swp = swp_time_monochromatic_all(PotentialSpec::free_space(), omega, p);
    const double sinc = std::sin(pd) / pd;
    CHECK(swp / dwell == doctest::Approx(std::sqrt(1.0 + sinc * sinc)).epsilon(1e-6));
  }
  // at p d = pi the correction vanishes identically
  const double swp = swp_time_monochromatic_all(PotentialSpec::free_space(), {0.0, M_PI}, 1.0);
  CHECK(swp == doctest::Approx(M_PI).epsilon(1e-8));
}

TEST_CASE("narrow packets reduce to the monochromatic formulas") {
  const auto a = MomentumDistribution::gaussian(1.0, 0.005);
  CHECK(a.norm_defect() < 1e-8);
  const double t_tunn = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kTunnelled);
  const double t_refl = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kReflected);
  const double t_all = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kAll);
  const auto tt = tunnelling_time(kBarrier, kBarrierRegion, 1.0);
  const auto tr = reflection_time(kBarrier, kBarrierRegion, 1.0);
  CHECK(t_tunn == doctest::Approx(std::abs(tt.value)).epsilon(1e-4));
  CHECK(t_refl == doctest::Approx(std::abs(tr.value)).epsilon(1e-4));
  CHECK(t_all ==
        doctest::Approx(swp_time_monochromatic_all(kBarrier, kBarrierRegion, 1.0)).epsilon(1e-4));
}

TEST_CASE("split readings recombine into the unconditional one") {
  const auto a = MomentumDistribution::gaussian(0.9, 0.08);
  const double t_tunn = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kTunnelled);
  const double t_refl = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kReflected);
  const double t_all = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kAll);
  const double w_tunn = channel_weight(a, kBarrier, kBarrierRegion, Selection::kTunnelled);
  const double w_refl = channel_weight(a, kBarrier, kBarrierRegion, Selection::kReflected);
  CHECK(w_tunn + w_refl == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(t_all * t_all -
                 (w_tunn * t_tunn * t_tunn + w_refl * t_refl * t_refl)) < 1e-10);
}

TEST_CASE("sub-barrier Gaussian packet readings are finite and positive") {
  const auto a = MomentumDistribution::gaussian(0.8, 0.05);
  const double t_tunn = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kTunnelled);
  const double t_refl = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kReflected);
  const double t_all = swp_time_wavepacket(a, kBarrier, kBarrierRegion, Selection::kAll);
  CHECK(t_tunn > 0.0);
  CHECK(t_refl > 0.0);
  CHECK(t_all > 0.0);
  CHECK(std::isfinite(t_tunn));
  CHECK(std::isfinite(t_refl));
  CHECK(std::isfinite(t_all));
}

TEST_CASE("packet with no reflected component rejects that selection") {
  const auto a = MomentumDistribution::gaussian(1.0, 0.05);
  CHECK_THROWS_AS(
      swp_time_wavepacket(a, PotentialSpec::free_space(), {0.0, 2.0}, Selection::kReflected),
      PostSelectionError);
}

TEST_CASE("two-path reading cancels or explodes by interference") {
  CHECK(two_path_time({0.5, 0.0}, 1.0, {-0.25, 0.0}, 2.0) == doctest::Approx(0.0));
  CHECK(two_path_time({0.5, 0.0}, 1.0, {-0.499, 0.0}, 2.0) ==
        doctest::Approx(498.0).epsilon(1e-10));
  CHECK(two_path_time({0.3, 0.4}, 1.7, {0.0, 0.0}, 5.0) == doctest::Approx(1.7));
  CHECK_THROWS_AS(two_path_time({0.5, 0.0}, 1.0, {-0.5, 0.0}, 2.0), PostSelectionError);
}

TEST_CASE("two-path moments do not factorize") {
  const Complex a1{0.5, 0.0}, a2{-0.25, 0.0};
  const Complex m1 = two_path_moment(a1, 1.0, a2, 2.0, 1);
  const Complex m2 = two_path_moment(a1, 1.0, a2, 2.0, 2);
  CHECK(std::abs(m2 - m1 * m1) > 1e-6);
}
