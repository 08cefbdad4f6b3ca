#include "support.hpp"

#include "ppens/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace ppens;
using test::max_abs;

namespace {

FlowProblem expanding_flow() {
  VectorField zero = [](const Vec2&, double) { return Vec2(0, 0); };
  FlowProblem p{zero, zero, zero, [](const Vec2& x, double) { return Vec2(x.x(), 0.0); }};
  return p;
}

// least-squares slope of log v against t
double decay_rate(const std::vector<StepMonitors>& ms, double StepMonitors::*field) {
  double st = 0, sl = 0, stt = 0, stl = 0;
  int n = 0;
  for (std::size_t k = ms.size() / 2; k < ms.size(); ++k) {
    double t = ms[k].t, l = std::log(ms[k].*field);
    st += t, sl += l, stt += t * t, stl += t * l;
    ++n;
  }
  return -(n * stl - st * sl) / (n * stt - st * st);
}

}  // namespace

TEST_CASE("stable_dt") {
  CHECK(stable_dt(1.0, 0.025, 0.2) == doctest::Approx(1.25e-4).epsilon(1e-14));
  CHECK(stable_dt(0.5, 0.1, 0.2) == doctest::Approx(4e-3).epsilon(1e-14));
  CHECK_THROWS_AS(stable_dt(1.0, 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(stable_dt(0.0, 0.1, 0.2), ConfigError);
}

TEST_CASE("recommend_lambda") {
  CHECK(recommend_lambda(1e-3, 1e-4, 4.0, 1.0) == doctest::Approx(40.0));
  CHECK(recommend_lambda(0.5, 1.0, 2.0, 4.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(recommend_lambda(0.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("config validation") {
  auto mc = square_case();
  auto geo = make_geometry(mc.domain, 8);
  SolverConfig bad;
  bad.lambda = -1.0;
  CHECK_THROWS_AS(Solver(geo, mc.problem(), bad), ConfigError);
  FlowProblem missing = mc.problem();
  missing.g_t = nullptr;
  CHECK_THROWS_AS(Solver(geo, missing, SolverConfig{}), ConfigError);
}

TEST_CASE("zero steps leave the state alone") {
  auto mc = square_case();
  auto geo = make_geometry(mc.domain, 12);
  Solver s(geo, mc.problem(), SolverConfig{});
  FlowState st = s.initial_state(0.0);
  auto res = s.run(st, 0);
  CHECK(res.monitors.empty());
  CHECK(res.state.vel == st.vel);
  CHECK(res.state.p == st.p);
  CHECK(res.state.t == st.t);
}

TEST_CASE("a step advances time by dt and keeps boundary data consistent") {
  auto mc = square_case();
  auto geo = make_geometry(mc.domain, 16);
  Solver s(geo, mc.problem(), SolverConfig{});
  FlowState st = s.initial_state(0.0);
  StepMonitors m = s.step(st);
  CHECK(m.step == 1);
  CHECK(st.t == doctest::Approx(s.dt()));
  CHECK(s.dt() == doctest::Approx(stable_dt(1.0, 1.0 / 16, 0.2)));
  CHECK(std::abs(m.compat) <= 1e-10);
  Vector y = s.extension().extend(st.vel, mc.velocity, st.t);
  CHECK(max_abs(y - st.y(geo.cls.n_inner_edges())) == 0.0);
}

TEST_CASE("square case stays nearly divergence free") {
  auto mc = square_case();
  auto geo = make_geometry(mc.domain, 40);
  SolverConfig cfg;
  cfg.lambda = 10.0;
  Solver s(geo, mc.problem(), cfg);
  auto res = s.run(s.initial_state(0.0), 1000);
  CHECK(res.monitors.back().div_inf <= 1e-5);
  CHECK(res.state.vel.allFinite());
}

TEST_CASE("normal drift decays at rate lambda") {
  auto geo = make_geometry(test::unit_square(), 20);
  SolverConfig cfg;
  cfg.lambda = 20.0;
  Solver s(geo, expanding_flow(), cfg);
  auto res = s.run(s.initial_state(0.0), static_cast<long>(std::lround(0.3 / s.dt())));
  CHECK(decay_rate(res.monitors, &StepMonitors::drift_inf) == doctest::Approx(20.0).epsilon(0.2));
}

TEST_CASE("unstable step size is reported") {
  auto mc = square_case();
  auto geo = make_geometry(mc.domain, 20);
  SolverConfig cfg;
  cfg.cfl_c = 0.4;
  Solver s(geo, mc.problem(), cfg);
  CHECK_THROWS_AS(s.run(s.initial_state(0.0), 3000), InstabilityError);
}

TEST_CASE("runs are deterministic") {
  auto mc = irregular_case();
  auto geo = make_geometry(mc.domain, 20);
  Solver a(geo, mc.problem(), SolverConfig{});
  Solver b(geo, mc.problem(), SolverConfig{});
  auto ra = a.run(a.initial_state(0.0), 50);
  auto rb = b.run(b.initial_state(0.0), 50);
  CHECK(ra.state.vel == rb.state.vel);
  CHECK(ra.state.p == rb.state.p);
}
