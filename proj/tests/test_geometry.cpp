#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "refugia/geometry.hpp"

using namespace refugia;
namespace {
constexpr double kPi = std::numbers::pi;

RingSpec ring_fixture(int n = 256) {
  RingSpec r;
  r.circumference = 2.0 * kPi;
  r.refuge_start = 0.0;
  r.refuge_length = kPi;
  r.resolution = n;
  return r;
}

RectSpec rect_fixture(int nx = 128, int ny = 64) {
  RectSpec r;
  r.outer_min = {0.0, 0.0};
  r.outer_max = {2.0, 1.0};
  r.hole_min = {0.8, 0.4};
  r.hole_max = {1.2, 0.6};
  r.resolution = {nx, ny};
  return r;
}
}  // namespace

TEST_CASE("ring measures are the prescribed arc lengths") {
  const Grid g = build_grid(ring_fixture());
  const Measures m = measures(g);
  CHECK(m.omega == doctest::Approx(2.0 * kPi).epsilon(1e-13));
  CHECK(m.omega0 == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(m.omega1 == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(std::abs(m.omega0 + m.omega1 - m.omega) <= 1e-12 * m.omega);
  CHECK(!g.interface_faces.empty());
}

TEST_CASE("rect measures are the box areas") {
  const Grid g = build_grid(rect_fixture());
  const Measures m = measures(g);
  CHECK(m.omega == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(m.omega0 == doctest::Approx(0.08).epsilon(1e-13));
  CHECK(m.omega1 == doctest::Approx(1.92).epsilon(1e-13));
}

TEST_CASE("measures are identical across refinement") {
  const Measures coarse = measures(build_grid(rect_fixture()));
  const Measures fine = measures(build_grid(rect_fixture(256, 128)));
  CHECK(coarse.omega == doctest::Approx(fine.omega).epsilon(1e-12));
  CHECK(coarse.omega0 == doctest::Approx(fine.omega0).epsilon(1e-12));
  CHECK(coarse.omega1 == doctest::Approx(fine.omega1).epsilon(1e-12));
}

TEST_CASE("degenerate refuge specs are rejected") {
  RingSpec full = ring_fixture();
  full.refuge_length = full.circumference;
  CHECK_THROWS_AS(build_grid(full), Error);
  try {
    build_grid(full);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::refuge_touches_boundary);
  }

  RectSpec touching = rect_fixture();
  touching.hole_min[0] = 0.0;
  CHECK_THROWS_AS(build_grid(touching), Error);
}

TEST_CASE("every node carries exactly one label and the indicator matches") {
  const Grid g = build_grid(rect_fixture());
  const Field ind = indicator_omega1(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    const bool in1 = g.label[i] == Region::Omega1;
    CHECK(ind.values[i] == (in1 ? 1.0 : 0.0));
  }
}

TEST_CASE("integrate is linear and resolves constants to measures") {
  const Grid g = build_grid(ring_fixture());
  CHECK(integrate(g, constant_field(g, Region::Omega, 1.0)) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-13));
  CHECK(integrate(g, constant_field(g, Region::Omega1, 1.0)) ==
        doctest::Approx(kPi).epsilon(1e-13));

  const Grid r = build_grid(rect_fixture());
  CHECK(integrate(r, indicator_omega1(r)) == doctest::Approx(1.92).epsilon(1e-13));
}

TEST_CASE("partition of unity for random fields") {
  const Grid g = build_grid(rect_fixture(32, 16));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Field f = constant_field(g, Region::Omega, 0.0);
  for (int i = 0; i < g.num_nodes(); ++i) f.values[i] = unif(rng);
  const Field ind = indicator_omega1(g);
  Field f1 = f, f0 = f;
  f1.values = f.values.cwiseProduct(ind.values);
  f0.values = f.values - f1.values;
  CHECK(integrate(g, f) ==
        doctest::Approx(integrate(g, f1) + integrate(g, f0)).epsilon(1e-13));
}

TEST_CASE("region mismatch is reported") {
  const Grid g = build_grid(ring_fixture());
  Field f = constant_field(g, Region::Omega1, 1.0);
  f.values.resize(3);
  CHECK_THROWS_AS(integrate(g, f), Error);
}

TEST_CASE("restriction and zero extension round trip") {
  const Grid g = build_grid(ring_fixture(64));
  const Field f = field_from_function(g, Region::Omega, [](double x, double) {
    return std::cos(x) + 2.0;
  });
  const Field r1 = restrict_to(g, f, Region::Omega1);
  const Field back = extend_by_zero(g, r1);
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (g.label[i] == Region::Omega1)
      CHECK(back.values[i] == f.values[i]);
    else
      CHECK(back.values[i] == 0.0);
  }
}

TEST_CASE("interface grading keeps measures exact and refines toward the faces") {
  RectSpec rc = rect_fixture();
  rc.interface_grading = 6;
  const Grid g = build_grid(rc);
  const Measures m = measures(g);
  CHECK(m.omega == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m.omega0 == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(m.omega1 == doctest::Approx(1.92).epsilon(1e-12));
  // the cells touching each interface face are the finest on their axis
  double finest = 1e9;
  for (int i = 0; i < g.num_nodes(); ++i) finest = std::min(finest, g.weight[i]);
  CHECK(finest < 1e-7);  // fine x fine corner cells

  RingSpec rs = ring_fixture();
  rs.interface_grading = 5;
  const Grid rg = build_grid(rs);
  const Measures rm = measures(rg);
  CHECK(rm.omega0 == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(rm.omega1 == doctest::Approx(kPi).epsilon(1e-12));
}
