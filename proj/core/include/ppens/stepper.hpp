#pragma once

#include "ppens/momentum.hpp"
#include "ppens/poisson.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ppens {

struct SolverConfig {
  double mu = 1.0;
  double lambda = 10.0;
  double dt = 0.0;      ///< 0 means stable_dt(mu, h, cfl_c)
  double cfl_c = 0.2;
  bool advect = false;
  bool project = true;
  std::uint64_t seed = 0;
};

struct StepMonitors {
  long step = 0;
  double t = 0.0;
  double div_inf = 0.0;    ///< max |div u| over inner nodes
  double drift_inf = 0.0;  ///< max |n.(u - g)| over boundary points
  double defect = 0.0;     ///< projection constant of the pressure solve
  double compat = 0.0;     ///< compatibility residual of the rhs actually solved
};

/// dt = C h^2 / mu.
double stable_dt(double mu, double h, double cfl_c);

/// lambda = eps * Gamma / (delta * C_M).
double recommend_lambda(double eps, double delta, double gamma, double c_m);

/// Hook that may modify the pressure right-hand side before it is solved.
using RhsHook = std::function<void(PoissonRhs&, long step)>;

/// Forward Euler march on a fixed geometry. Per step: pressure at t^n, inner
/// velocity update, boundary extension at t^{n+1}, monitors.
class Solver {
 public:
  Solver(const Geometry& geo, FlowProblem problem, SolverConfig cfg);

  /// u0 on inner edges, boundary velocities from the extension, pressure at t0.
  FlowState initial_state(double t0 = 0.0) const;

  StepMonitors step(FlowState& state);

  struct RunResult {
    FlowState state;
    std::vector<StepMonitors> monitors;
  };
  using Callback = std::function<void(const FlowState&, const StepMonitors&)>;

  /// Runs n_steps steps, then recomputes the pressure for the final state.
  RunResult run(FlowState state, long n_steps, const Callback& cb = {});

  /// Pressure consistent with the velocities of `state` at state.t.
  Vector pressure(const FlowState& state, PoissonRhs* rhs_out = nullptr) const;

  StepMonitors measure(const FlowState& state) const;

  void set_rhs_hook(RhsHook hook) { hook_ = std::move(hook); }

  double dt() const { return dt_; }
  long steps_taken() const { return step_index_; }
  const SolverConfig& config() const { return cfg_; }
  const Geometry& geometry() const { return geo_; }
  const PressureSystem& pressure_system() const { return psys_; }
  const BoundaryExtension& extension() const { return ext_; }
  const MomentumOperator& momentum() const { return op_; }

 private:
  Vector solve_pressure_at(const FlowState& state, long step, PoissonRhs& rhs) const;

  const Geometry& geo_;
  FlowProblem problem_;
  SolverConfig cfg_;
  double dt_;
  PressureSystem psys_;
  BoundaryExtension ext_;
  MomentumOperator op_;
  RhsHook hook_;
  long step_index_ = 0;
};

}  // namespace ppens
