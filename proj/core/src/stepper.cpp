#include "ppens/stepper.hpp"

#include "ppens/error.hpp"

#include <cmath>

namespace ppens {

double stable_dt(double mu, double h, double cfl_c) {
  if (!(mu > 0.0)) throw ConfigError("stepper", "mu must be positive");
  if (!(h > 0.0)) throw ConfigError("stepper", "h must be positive");
  if (!(cfl_c > 0.0)) throw ConfigError("stepper", "stability constant C must be positive");
  return cfl_c * h * h / mu;
}

double recommend_lambda(double eps, double delta, double gamma, double c_m) {
  if (!(eps > 0.0 && delta > 0.0 && gamma > 0.0 && c_m > 0.0))
    throw ConfigError("stepper", "lambda model inputs must be positive");
  return eps * gamma / (delta * c_m);
}

namespace {

SolverConfig validated(SolverConfig cfg, double h) {
  if (!(cfg.mu > 0.0)) throw ConfigError("stepper", "mu must be positive");
  if (!(cfg.lambda >= 0.0)) throw ConfigError("stepper", "lambda must be non-negative");
  if (cfg.dt < 0.0) throw ConfigError("stepper", "dt must be positive");
  if (cfg.dt == 0.0) cfg.dt = stable_dt(cfg.mu, h, cfg.cfl_c);
  return cfg;
}

}  // namespace

Solver::Solver(const Geometry& geo, FlowProblem problem, SolverConfig cfg)
    : geo_(geo),
      problem_(std::move(problem)),
      cfg_(validated(cfg, geo.grid.h())),
      dt_(cfg_.dt),
      psys_(assemble_pressure_matrix(geo)),
      ext_(geo),
      op_(geo) {
  if (!problem_.force || !problem_.g || !problem_.g_t || !problem_.initial_velocity)
    throw ConfigError("stepper", "flow problem is missing a field");
}

Vector Solver::solve_pressure_at(const FlowState& state, long step, PoissonRhs& rhs) const {
  Vector lap = op_.laplacian(state.vel);
  if (cfg_.advect) {
    Vector adv = op_.advection(state.vel);
    rhs = assemble_poisson_rhs(geo_, psys_, state, problem_, cfg_.mu, cfg_.lambda, lap, &adv);
  } else {
    rhs = assemble_poisson_rhs(geo_, psys_, state, problem_, cfg_.mu, cfg_.lambda, lap, nullptr);
  }
  if (hook_) hook_(rhs, step);
  return solve_pressure(psys_, rhs, cfg_.project);
}

Vector Solver::pressure(const FlowState& state, PoissonRhs* rhs_out) const {
  PoissonRhs rhs;
  Vector p = solve_pressure_at(state, step_index_, rhs);
  if (rhs_out) *rhs_out = rhs;
  return p;
}

FlowState Solver::initial_state(double t0) const {
  FlowState s;
  s.t = t0;
  s.vel = sample_velocity(geo_, problem_.initial_velocity, t0);
  ext_.apply(s.vel, problem_.g, t0);
  s.p = pressure(s);
  return s;
}

StepMonitors Solver::measure(const FlowState& state) const {
  const auto& cls = geo_.cls;
  StepMonitors m;
  m.t = state.t;
  for (int id : cls.inner_pressure)
    m.div_inf = std::max(m.div_inf, std::abs(node_divergence(geo_, state.vel, id)));
  for (int j = 0; j < cls.n_ghost(); ++j) {
    const auto& bp = cls.boundary_points[j];
    Vec2 u = extrapolate_velocity(geo_, state.vel, j);
    m.drift_inf = std::max(m.drift_inf, std::abs(bp.normal.dot(u - problem_.g(bp.point, state.t))));
  }
  return m;
}

StepMonitors Solver::step(FlowState& state) {
  const int ni = geo_.cls.n_inner_edges();
  PoissonRhs rhs;
  Vector lap = op_.laplacian(state.vel);
  Vector adv;
  if (cfg_.advect) {
    adv = op_.advection(state.vel);
    rhs = assemble_poisson_rhs(geo_, psys_, state, problem_, cfg_.mu, cfg_.lambda, lap, &adv);
  } else {
    rhs = assemble_poisson_rhs(geo_, psys_, state, problem_, cfg_.mu, cfg_.lambda, lap, nullptr);
  }
  if (hook_) hook_(rhs, step_index_);
  state.p = solve_pressure(psys_, rhs, cfg_.project);

  Vector rate = cfg_.mu * lap - op_.pressure_gradient(state.p) + op_.forcing(problem_.force, state.t);
  if (cfg_.advect) rate -= adv;
  state.vel.head(ni) += dt_ * rate;
  state.t += dt_;
  ext_.apply(state.vel, problem_.g, state.t);
  ++step_index_;

  if (!state.vel.allFinite() || !state.p.allFinite())
    throw InstabilityError(step_index_, "non-finite velocity or pressure");

  StepMonitors m = measure(state);
  m.step = step_index_;
  m.defect = rhs.defect;
  m.compat = compatibility_residual(psys_, rhs);
  return m;
}

Solver::RunResult Solver::run(FlowState state, long n_steps, const Callback& cb) {
  if (n_steps < 0) throw ConfigError("stepper", "step count must be non-negative");
  RunResult out;
  out.monitors.reserve(static_cast<std::size_t>(n_steps));
  for (long k = 0; k < n_steps; ++k) {
    StepMonitors m = step(state);
    if (cb) cb(state, m);
    out.monitors.push_back(m);
  }
  if (n_steps > 0) state.p = pressure(state);
  out.state = std::move(state);
  return out;
}

}  // namespace ppens
