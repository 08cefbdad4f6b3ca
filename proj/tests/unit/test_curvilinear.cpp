#include "ppens/curvilinear.hpp"
#include "ppens/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace ppens;

namespace {
const double kPi = std::acos(-1.0);
auto zero = [](double, double) { return 0.0; };
}  // namespace

TEST_CASE("polar map metric and orthogonality") {
  auto polar = polar_map();
  for (double r : {0.2, 1.0, 3.0})
    for (double th : {0.0, 0.7, 2.0, 5.5}) {
      auto [s_r, s_th] = metric_factors(polar, r, th);
      CHECK(s_r == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(s_th == doctest::Approx(r).epsilon(1e-15));
      CHECK(orthogonality_defect(polar, r, th) <= 1e-15);
      Vec2 x = polar.position(r, th);
      CHECK(x.norm() == doctest::Approx(r));
    }
  CHECK_THROWS_AS(metric_factors(polar, 0.0, 1.0), Error);
}

TEST_CASE("polar divergence examples") {
  auto polar = polar_map();
  // u_r = 1/r is a point source: divergence free away from the origin
  CHECK(std::abs(divergence_curvilinear(polar, [](double r, double) { return 1.0 / r; }, zero, 0.8,
                                        0.3, 1e-3)) <= 1e-6);
  // u = (x, y) has divergence 2
  CHECK(divergence_curvilinear(polar, [](double r, double) { return r; }, zero, 0.8, 0.3, 1e-3) ==
        doctest::Approx(2.0).epsilon(1e-6));
  // pure rotation u_theta = r
  CHECK(std::abs(divergence_curvilinear(polar, zero, [](double r, double) { return r; }, 1.3, 2.0,
                                        1e-3)) <= 1e-12);
  CHECK_THROWS_AS(divergence_curvilinear(polar, zero, zero, 1.0, 0.0, 0.0), Error);
}

TEST_CASE("identity map agrees with the Cartesian divergence") {
  auto id = identity_map();
  auto u = [](double x, double y) { return std::sin(x) * y; };
  auto v = [](double x, double y) { return x * x + std::cos(y); };
  for (auto [x, y] : {std::pair{0.3, 0.4}, {1.2, -0.5}, {-2.0, 0.1}}) {
    double exact = std::cos(x) * y - std::sin(y);
    CHECK(divergence_curvilinear(id, u, v, x, y, 1e-4) == doctest::Approx(exact).epsilon(1e-7));
  }
  auto sc = scaled_map(2.0, 0.5);
  auto [a, b] = metric_factors(sc, 0.1, 0.2);
  CHECK(a == 2.0);
  CHECK(b == 0.5);
}

TEST_CASE("divergence converges at second order in the step") {
  auto polar = polar_map();
  auto ur = [](double r, double th) { return r * r * std::cos(th); };
  auto ut = [](double r, double th) { return std::sin(2 * th) * r; };
  // (1/r) d_r(r * r^2 cos) + (1/r) d_th(r sin 2th) = 3 r cos th + 2 cos 2th
  const double r = 1.1, th = 0.6;
  const double exact = 3 * r * std::cos(th) + 2 * std::cos(2 * th);
  double e1 = std::abs(divergence_curvilinear(polar, ur, ut, r, th, 1e-2) - exact);
  double e2 = std::abs(divergence_curvilinear(polar, ur, ut, r, th, 5e-3) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("divergence is linear in the field") {
  auto polar = polar_map();
  auto f1 = [](double r, double th) { return r * std::sin(th); };
  auto f2 = [](double r, double th) { return std::exp(-r) * std::cos(3 * th); };
  auto sum = [&](double r, double th) { return 2 * f1(r, th) - 3 * f2(r, th); };
  const double r = 0.9, th = 1.7, s = 1e-3;
  double lhs = divergence_curvilinear(polar, sum, f2, r, th, s);
  double rhs = 2 * divergence_curvilinear(polar, f1, zero, r, th, s) -
               3 * divergence_curvilinear(polar, f2, zero, r, th, s) +
               divergence_curvilinear(polar, zero, f2, r, th, s);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("Robin boundary residual") {
  auto polar = polar_map();
  auto ur = [](double r, double th) { return (1.0 - r) * std::cos(th); };
  auto gt = [](double, double th) { return std::sin(th); };
  for (double th = 0.0; th < 2 * kPi; th += 0.5)
    CHECK(std::abs(robin_bc_residual(polar, 1.0, ur, gt, th, 1e-3)) <= 1e-6);
  // a tangential field that is not consistent leaves a residual
  auto bad = [](double, double th) { return 2.0 * std::sin(th); };
  CHECK(std::abs(robin_bc_residual(polar, 1.0, ur, bad, 0.0, 1e-3)) ==
        doctest::Approx(1.0).epsilon(1e-5));
}
