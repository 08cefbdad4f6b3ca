#pragma once

#include "ppens/stepper.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace ppens {

using ScalarField = std::function<double(const Vec2& x, double t)>;
using TensorField = std::function<Eigen::Matrix2d(const Vec2& x, double t)>;

/// Closed-form incompressible flow with everything needed to drive and check
/// a run. velocity_gradient rows are (u_x, u_y) and (v_x, v_y).
struct ManufacturedCase {
  std::string name;
  std::shared_ptr<const DomainShape> domain;
  double mu = 1.0;
  VectorField velocity;
  VectorField velocity_t;
  VectorField velocity_laplacian;
  TensorField velocity_gradient;
  ScalarField pressure;
  VectorField pressure_gradient;

  /// f = u_t + grad p - mu Lap u.
  Vec2 force(const Vec2& x, double t) const;
  /// Forcing, boundary data (the exact velocity) and exact initial data.
  FlowProblem problem() const;
};

/// Unit square, no-slip walls.
ManufacturedCase square_case(double mu = 1.0);

/// 2x2 square minus the disk of radius 1/4 at (3/4, 1), periodic in y with
/// period 2; stream function cos(t) * sum_k r^2 exp(-2r) over shifted copies.
ManufacturedCase irregular_case(double mu = 1.0, int k_max = 12);

enum class Channel { U, V, P };

/// Max error over inner edges (U, V) or inner nodes (P). For P both fields are
/// shifted to zero mean over the inner nodes first when `gauge` is set.
double linf_error(const Geometry& geo, const FlowState& state, const ManufacturedCase& mc,
                  Channel channel, double t, bool gauge = true);

/// Errors of compact centered u_x (at nodes) and u_y (at cell centers) built
/// from inner edges only, at points inside the domain.
std::pair<double, double> derivative_errors(const Geometry& geo, const Vector& vel,
                                            const ManufacturedCase& mc, double t);

/// Adds an independent uniform [0, 1] draw to every b entry. The stream is
/// keyed by (seed, step), so equal inputs give equal draws.
void perturbed_pressure_bc(PoissonRhs& rhs, std::uint64_t seed, long step);

/// Solver hook applying perturbed_pressure_bc every step.
RhsHook make_perturbation(std::uint64_t seed);

struct ErrorSet {
  double u = 0, v = 0, p = 0, ux = 0, uy = 0, div = 0;
};

ErrorSet measure_errors(const Geometry& geo, const FlowState& state, const ManufacturedCase& mc);

/// Number of steps and dt landing exactly on t_final with dt <= C h^2 / mu.
std::pair<long, double> steps_for(double t_final, double mu, double h, double cfl_c);

struct ConvergenceRow {
  int n = 0;
  double h = 0;
  long steps = 0;
  double dt = 0;
  bool diverged = false;
  ErrorSet err;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<ErrorSet> slopes;  ///< log(err ratio)/log(h ratio) between consecutive rows
};

ConvergenceReport convergence_study(const ManufacturedCase& mc, const std::vector<int>& sizes,
                                    double t_final, SolverConfig cfg);

}  // namespace ppens
