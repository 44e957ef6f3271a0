#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gtp/errors.hpp"
#include "gtp/geometry.hpp"

using namespace gtp;
constexpr double kPi = std::numbers::pi;

namespace {

Point P(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point P3(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

// brute-force distance to the ellipse boundary by dense sampling and golden refinement
double ellipse_distance_oracle(double a, double b, const Point& x) {
  auto dist = [&](double th) { return std::hypot(a * std::cos(th) - x[0], b * std::sin(th) - x[1]); };
  const int M = 20000;
  int best = 0;
  for (int k = 1; k < M; ++k)
    if (dist(2 * kPi * k / M) < dist(2 * kPi * best / M)) best = k;
  double lo = 2 * kPi * (best - 1) / M, hi = 2 * kPi * (best + 1) / M;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (dist(m1) < dist(m2))
      hi = m2;
    else
      lo = m1;
  }
  return dist(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("distances on simple domains") {
  const auto hs = Domain::half_space(2);
  CHECK(distance_to_boundary(hs, P(0.3, -7)) == doctest::Approx(0.3));
  CHECK(distance_to_boundary(hs, P(0.0, 1)) == 0.0);
  CHECK_THROWS_AS(distance_to_boundary(hs, P(-0.1, 0)), DomainError);

  const auto ball = Domain::ball(2.0, 3);
  CHECK(distance_to_boundary(ball, P3(0.5, 0.5, 0.5)) == doctest::Approx(2.0 - std::sqrt(0.75)).epsilon(1e-15));
  CHECK(distance_to_boundary(ball, P3(0, 0, 0)) == 2.0);
  CHECK_THROWS_AS(distance_to_boundary(ball, P3(2, 1, 0)), DomainError);
  CHECK_THROWS_AS(ball.contains(P(0, 0)), DomainError);
}

TEST_CASE("ellipse distance against brute force") {
  const auto e = Domain::ellipse(2.0, 1.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  int tested = 0;
  while (tested < 60) {
    const Point x = P(2 * U(rng), U(rng));
    if (!e.contains(x)) continue;
    ++tested;
    CHECK(distance_to_boundary(e, x) == doctest::Approx(ellipse_distance_oracle(2, 1, x)).epsilon(1e-9));
    const Point y = e.nearest_boundary_point(x);
    CHECK(std::abs(y[0] * y[0] / 4 + y[1] * y[1] - 1) <= 1e-12);
    CHECK((y - x).norm() == doctest::Approx(distance_to_boundary(e, x)).epsilon(1e-12));
  }
  // medial axis point: center has distance b
  CHECK(distance_to_boundary(e, P(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("superellipse with exponent 2 reproduces the ellipse") {
  const auto s = Domain::superellipse(2.0, 1.0, 2.0);
  const auto e = Domain::ellipse(2.0, 1.0);
  for (const Point& x : {P(0.3, 0.2), P(-1.2, 0.5), P(1.7, -0.1), P(0, 0)})
    CHECK(std::abs(s.boundary_distance(x) - e.boundary_distance(x)) <= 1e-5);
  CHECK(s.curvatures(P(2, 0))[0] == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("curvatures") {
  const auto e = Domain::ellipse(2.0, 1.0);
  CHECK(e.curvatures(P(2, 0))[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.curvatures(P(0, 1))[0] == doctest::Approx(0.25).epsilon(1e-12));
  const auto b = Domain::ball(1.5, 4);
  Point y = Point::Zero(4);
  y[2] = 1.5;
  const auto k = b.curvatures(y);
  REQUIRE(k.size() == 3);
  for (double v : k) CHECK(v == doctest::Approx(1 / 1.5));
  const auto hs = Domain::half_space(3);
  for (double v : hs.curvatures(P3(0, 1, 2))) CHECK(v == 0.0);

  const auto ci = curvatures_and_pi(Domain::ball(1.0, 3), P3(1, 0, 0), 0.25);
  CHECK(ci.pi_gamma == doctest::Approx(0.5625));
  CHECK_FALSE(ci.condition_violated);
  CHECK(curvatures_and_pi(Domain::ball(1.0, 2), P(1, 0), 1.0).condition_violated);
}

TEST_CASE("segment crossing on the ball") {
  const auto b = Domain::ball(1.0, 2);
  const auto c = b.segment_crossing(P(0.5, 0), P(1, 0));
  REQUIRE(c.has_value());
  CHECK(*c == doctest::Approx(0.5).epsilon(1e-12));
  // x + s e with |x + s e| = 1, solved directly
  const Point x = P(0.2, 0.3), dir = P(0.9, 0.7);
  const double A = dir.squaredNorm(), B = 2 * x.dot(dir), C = x.squaredNorm() - 1;
  const double s = (-B + std::sqrt(B * B - 4 * A * C)) / (2 * A);
  const auto c2 = b.segment_crossing(x, dir);
  REQUIRE(c2.has_value());
  CHECK(*c2 == doctest::Approx(s).epsilon(1e-10));
  CHECK_FALSE(b.segment_crossing(P(0, 0), P(0.5, 0)).has_value());
}

TEST_CASE("touching ball validation") {
  const auto b = Domain::ball(1.0, 2);
  const auto cfg = validate_touching_ball(b, P(0.5, 0), 0.5);
  CHECK(cfg.contact[0] == doctest::Approx(1.0));
  CHECK(cfg.pi_gamma == doctest::Approx(0.5));
  try {
    validate_touching_ball(b, P(0.4, 0), 0.5);
    FAIL("expected NotTouching");
  } catch (const GeometryError& e) {
    CHECK(e.kind == GeometryError::Kind::NotTouching);
  }
  try {
    validate_touching_ball(b, P(0, 0), 1.0);
    FAIL("expected NonUniqueContact");
  } catch (const GeometryError& e) {
    CHECK(e.kind == GeometryError::Kind::NonUniqueContact);
  }
  try {
    validate_touching_ball(b, P(2, 0), 0.5);
    FAIL("expected Outside");
  } catch (const GeometryError& e) {
    CHECK(e.kind == GeometryError::Kind::Outside);
  }
  // the ellipse touches at the vertex
  const auto e = Domain::ellipse(2.0, 1.0);
  const auto ce = validate_touching_ball(e, P(1.75, 0), 0.25);
  CHECK(ce.pi_gamma == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sphere area and ball volume") {
  CHECK(unit_sphere_area(1) == doctest::Approx(2.0));
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * kPi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * kPi));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(4.0 / 3 * kPi * 8));
  CHECK(ball_volume(4, 1.0) == doctest::Approx(kPi * kPi / 2));
}

TEST_CASE("ball parallel area matches an arc-length count") {
  const auto b = Domain::ball(1.0, 2);
  const auto cfg = validate_touching_ball(b, P(0.5, 0), 0.5);
  for (double s : {0.01, 0.1, 0.3, 0.6, 0.95}) {
    const double rs = 1.0 - s;
    const int M = 200000;
    int in = 0;
    for (int k = 0; k < M; ++k) {
      const double th = 2 * kPi * (k + 0.5) / M;
      if (std::hypot(rs * std::cos(th) - 0.5, rs * std::sin(th)) < 0.5) ++in;
    }
    const double oracle = 2 * kPi * rs * in / M;
    CHECK(parallel_area(b, cfg, s).area == doctest::Approx(oracle).epsilon(1e-4));
  }
  CHECK(parallel_area(b, cfg, 0.0).area == 0.0);
  CHECK(parallel_area(b, cfg, 1.0).area == 0.0);
}

TEST_CASE("parallel area: Monte Carlo agrees with the analytic formula") {
  for (int N : {2, 3}) {
    const auto b = Domain::ball(1.0, N);
    Point x = Point::Zero(N);
    x[0] = 0.5;
    const auto cfg = validate_touching_ball(b, x, 0.5, 2000);
    for (double s : {0.05, 0.2, 0.5}) {
      const auto exact = parallel_area(b, cfg, s);
      const auto mc = parallel_area(b, cfg, s, AreaMethod::MonteCarlo);
      CHECK_FALSE(mc.analytic);
      // shell averaging bias is second order in the shell width
      CHECK(std::abs(mc.area - exact.area) <= 3 * mc.std_error + 1e-3 * exact.area);
    }
  }
}

TEST_CASE("parallel area small-distance limit") {
  for (int N : {2, 3, 4}) {
    const double R = 0.5;
    const auto hs = Domain::half_space(N);
    Point x = Point::Zero(N);
    x[0] = R;
    const auto cfg_h = validate_touching_ball(hs, x, R, 2000);
    const double s = 1e-6;
    CHECK(parallel_area(hs, cfg_h, s).area / std::pow(s, 0.5 * (N - 1)) ==
          doctest::Approx(parallel_area_limit(N, R, 1.0)).epsilon(1e-5));
    const auto b = Domain::ball(1.0, N);
    const auto cfg_b = validate_touching_ball(b, x, R, 2000);
    CHECK(parallel_area(b, cfg_b, s).area / std::pow(s, 0.5 * (N - 1)) ==
          doctest::Approx(parallel_area_limit(N, R, cfg_b.pi_gamma)).epsilon(1e-4));
  }
  CHECK_THROWS_AS(parallel_area_limit(2, 0.5, 0.0), DomainError);
}

TEST_CASE("bounding boxes and boundary samples") {
  const auto e = Domain::ellipse(2.0, 1.0);
  CHECK(e.box_min()[0] == doctest::Approx(-2.0));
  CHECK(e.box_max()[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(Domain::half_space(2).box_min(), DomainError);
  for (const auto& y : e.boundary_samples(50)) CHECK(e.boundary_distance(y) <= 1e-12);
  CHECK_THROWS_AS(e.boundary_samples(0), DomainError);
  CHECK_THROWS_AS(Domain::ellipse(0, 1), DomainError);
  CHECK_THROWS_AS(Domain::superellipse(1, 1, 1.5), DomainError);
}
