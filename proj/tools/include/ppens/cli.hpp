#pragma once

#include "ppens/mms.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ppens::cli {

/// Everything a command needs. Filled from flags, then a config file, then
/// defaults (flags win).
struct RunSpec {
  std::string command;
  std::string case_name = "square";
  int n = 40;
  std::vector<int> sizes;
  double t_final = 0.0;  ///< 0 means use `steps`
  long steps = 0;
  std::vector<double> lambdas{10.0};
  double mu = 1.0;
  double cfl = 0.2;
  std::uint64_t seed = 1;
  bool perturb = false;
  bool project = true;
  int samples = 200;        ///< time samples written by drift
  double row_y = 0.4872;    ///< drift cross-section height
  std::string out = "ppens-out";

  double lambda() const { return lambdas.front(); }
};

/// Throws ConfigError("cli", ...) on inconsistent input.
void validate(const RunSpec& spec);

/// "square" or "irregular".
ManufacturedCase make_case(const std::string& name, double mu);

SolverConfig solver_config(const RunSpec& spec, double lambda);

struct RunOutcome {
  Geometry geo;
  FlowState state;
  std::vector<StepMonitors> monitors;
  ErrorSet errors;
  double dt = 0.0;
};

/// One manufactured run to t_final (or for `steps` steps) without writing files.
RunOutcome run_case(const RunSpec& spec);

struct DriftResult {
  std::vector<double> lambdas;
  std::vector<long> steps;                  ///< sample step indices
  std::vector<double> t;                    ///< sample times
  std::vector<std::vector<double>> u_err;   ///< [lambda][sample]
  std::vector<std::vector<Vec2>> section;   ///< [lambda] (x, u) along the cross-section row
};

/// u error against time for each lambda on one geometry.
DriftResult drift_study(const RunSpec& spec);

struct DecayFit {
  double rate = 0.0;       ///< r in v ~ A exp(-r t)
  double log_amp = 0.0;
};

/// Least-squares line through (t, log v). Needs two positive samples.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& v);

/// Least-squares slope of log v against t (growth rate, may be negative).
double log_slope(const std::vector<double>& t, const std::vector<double>& v);

struct AttractorResult {
  std::vector<StepMonitors> series;
  DecayFit div_fit;
  DecayFit drift_fit;
  double max_compat = 0.0;  ///< largest |compatibility residual| of a solved rhs
};

/// Unit square, f = g = 0, u0 = (x, 0), projection on. The fit window is the
/// second half of the run.
AttractorResult appendix_a(const RunSpec& spec);

struct PolarCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass() const;
};

/// Metric factors, the divergence and Robin examples in polar coordinates, and
/// the refinement ratio of the centered differences.
std::vector<PolarCheck> polar_checks();

void cmd_run(const RunSpec& spec, std::ostream& log);
ConvergenceReport cmd_converge(const RunSpec& spec, std::ostream& log);
void cmd_drift(const RunSpec& spec, std::ostream& log);
void cmd_appendix_a(const RunSpec& spec, std::ostream& log);
void cmd_polar_demo(const RunSpec& spec, std::ostream& log);

/// Parses argv and dispatches. Returns 0, 1 on solver errors, 2 on bad input.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ppens::cli
