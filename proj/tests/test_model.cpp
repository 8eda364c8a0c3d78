#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qtt/model.hpp"

using namespace qtt;

namespace {

// Pointwise probe of a spec on a fixed set of positions.
void check_values(const PotentialSpec& v, std::initializer_list<std::pair<double, double>> xs) {
  for (const auto& [x, expected] : xs) CHECK(v.value(x) == doctest::Approx(expected).epsilon(1e-14));
}

}  // namespace

TEST_CASE("composite potential over empty base is the shifted region") {
  const auto v = composite_potential(PotentialSpec::free_space(), {0.0, 2.0}, 0.5);
  REQUIRE(v.segments.size() == 1);
  CHECK(v.segments[0].x_lo == 0.0);
  CHECK(v.segments[0].x_hi == 2.0);
  CHECK(v.segments[0].height == 0.5);
  check_values(v, {{-0.5, 0.0}, {1.0, 0.5}, {2.5, 0.0}});
}

TEST_CASE("composite potential cancels a barrier with lambda = -height") {
  const auto base = PotentialSpec::rectangular_barrier(1.0, 0.0, 2.0);
  const auto v = composite_potential(base, {0.0, 2.0}, -1.0);
  check_values(v, {{0.5, 0.0}, {1.5, 0.0}, {2.5, 0.0}});
}

TEST_CASE("composite potential overlays a staggered region") {
  const auto base = PotentialSpec::rectangular_barrier(1.0, 0.0, 2.0);
  const auto v = composite_potential(base, {1.0, 3.0}, 0.2);
  check_values(v, {{0.5, 1.0}, {1.5, 1.2}, {2.5, 0.2}, {3.5, 0.0}});
}

TEST_CASE("composite potential is idempotent at lambda = 0 and additive in lambda") {
  PotentialSpec base;
  base.segments = {{-1.0, 0.5, 0.7, ""}, {0.5, 2.0, -1.3, ""}, {3.0, 4.0, 2.0, ""}};
  const RegionOfInterest omega{0.0, 3.5};
  const auto at0 = composite_potential(base, omega, 0.0);
  const auto once = composite_potential(base, omega, 0.9);
  const auto twice = composite_potential(composite_potential(base, omega, 0.4), omega, 0.5);
  for (double x = -2.0; x < 5.0; x += 0.03) {
    CHECK(at0.value(x) == doctest::Approx(base.value(x)).epsilon(1e-14));
    CHECK(twice.value(x) == doctest::Approx(once.value(x)).epsilon(1e-14));
  }
}

TEST_CASE("sampling a composite differs from the base by lambda exactly inside the region") {
  PotentialSpec base;
  base.segments = {{-1.0, 1.0, 0.3, ""}};
  const RegionOfInterest omega{-0.25, 2.0};
  const SpatialGrid grid{-4.0, 4.0, 256};
  const double lambda = 0.77;
  const VectorXd v0 = sample_potential(base, grid);
  const VectorXd v1 = sample_potential(composite_potential(base, omega, lambda), grid);
  const VectorXd mask = grid.indicator(omega);
  for (int i = 0; i < grid.n_points; ++i)
    CHECK(v1[i] - v0[i] == doctest::Approx(lambda * mask[i]).epsilon(1e-14));
}

TEST_CASE("sample_potential basics") {
  const SpatialGrid grid{-5.0, 5.0, 256};
  SUBCASE("free space samples to zero") {
    CHECK(sample_potential(PotentialSpec::free_space(), grid).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("a step is zero to the left and one to the right") {
    const auto step = PotentialSpec::rectangular_barrier(1.0, 0.0, 5.0);
    const VectorXd v = sample_potential(step, grid);
    for (int i = 0; i < grid.n_points; ++i)
      CHECK(v[i] == (grid.midpoint(i) >= 0.0 ? 1.0 : 0.0));
  }
  SUBCASE("schedules evaluate at the requested time") {
    PotentialSpec v = PotentialSpec::rectangular_barrier(1.0, 0.0, 2.0);
    v.segments[0].profile = "ramp";
    v.schedule["ramp"] = TimeProfile{{0.0, 0.5, 1.0}, {0.0, -0.5, 0.0}};
    const VectorXd s = sample_potential(v, grid, 0.5);
    for (int i = 0; i < grid.n_points; ++i) {
      const double x = grid.midpoint(i);
      CHECK(s[i] == doctest::Approx(x >= 0.0 && x < 2.0 ? 0.5 : 0.0));
    }
    CHECK_THROWS_AS(sample_potential(v, grid, 2.0), NumericalDomainError);
  }
}

TEST_CASE("time profiles interpolate linearly and reject out-of-domain times") {
  const TimeProfile p{{0.0, 1.0, 3.0}, {0.0, 2.0, -2.0}};
  CHECK(p.at(0.5) == doctest::Approx(1.0));
  CHECK(p.at(1.0) == doctest::Approx(2.0));
  CHECK(p.at(2.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(p.at(-0.1), NumericalDomainError);
  CHECK_THROWS_AS(p.at(3.1), NumericalDomainError);
}

TEST_CASE("grid construction enforces its invariants") {
  CHECK_THROWS_AS(SpatialGrid(0.0, 1.0, 255), SchemaError);
  CHECK_THROWS_AS(SpatialGrid(0.0, 1.0, 300), SchemaError);
  CHECK_THROWS_AS(SpatialGrid(1.0, 0.0, 256), SchemaError);
  const SpatialGrid g{0.0, 1.0, 512};
  CHECK(g.dx() == doctest::Approx(1.0 / 512));
  CHECK(g.midpoint(0) == doctest::Approx(0.5 * g.dx()));
}

TEST_CASE("region membership is decided by the cell midpoint") {
  const SpatialGrid g{0.0, 1.0, 256};
  const RegionOfInterest omega{0.25, 0.75};
  const VectorXd mask = g.indicator(omega);
  for (int i = 0; i < g.n_points; ++i)
    CHECK(mask[i] == (omega.contains(g.midpoint(i)) ? 1.0 : 0.0));
  CHECK_THROWS_AS(RegionOfInterest(1.0, 1.0), SchemaError);
}

TEST_CASE("potential JSON round trip") {
  PotentialSpec v = PotentialSpec::rectangular_barrier(1.5, -1.0, 2.0);
  v.segments.push_back({3.0, 4.0, -0.5, "pulse"});
  v.schedule["pulse"] = TimeProfile{{0.0, 1.0}, {0.0, -0.25}};
  const auto back = potential_from_json(potential_to_json(v));
  REQUIRE(back.segments.size() == v.segments.size());
  for (std::size_t i = 0; i < v.segments.size(); ++i) {
    CHECK(back.segments[i].x_lo == v.segments[i].x_lo);
    CHECK(back.segments[i].x_hi == v.segments[i].x_hi);
    CHECK(back.segments[i].height == v.segments[i].height);
    CHECK(back.segments[i].profile == v.segments[i].profile);
  }
  CHECK(back.value(3.5, 1.0) == doctest::Approx(-0.75));
}

TEST_CASE("malformed potential JSON raises schema errors") {
  CHECK_THROWS_AS(potential_from_json("{not json"), SchemaError);
  CHECK_THROWS_AS(potential_from_json(R"({"segments":[{"x_lo":0}]})"), SchemaError);
  CHECK_THROWS_AS(potential_from_json(R"({"segments":[{"x_lo":1,"x_hi":0,"height":1}]})"),
                  SchemaError);
}

TEST_CASE("validate rejects overlap, reversed bounds, and unknown schedules") {
  PotentialSpec v;
  v.segments = {{0.0, 2.0, 1.0, ""}, {1.0, 3.0, 1.0, ""}};
  CHECK_THROWS_AS(v.validate(), SchemaError);
  v.segments = {{0.0, 1.0, 1.0, "missing"}};
  CHECK_THROWS_AS(v.validate(), SchemaError);
}
