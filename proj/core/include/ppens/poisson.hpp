#pragma once

#include "ppens/flow.hpp"

#include <array>
#include <memory>
#include <vector>

namespace ppens {

/// Stacked pressure system [L; B] p = [a; b] over inner then ghost nodes.
struct PressureSystem {
  SparseMatrix L;  ///< N_a x N, 5-point Laplacian rows (1/h^2)
  SparseMatrix B;  ///< N_b x N, normal-derivative rows (1/h)
  SparseMatrix A;  ///< [L; B]
  std::shared_ptr<const SingularSquareSolver> solver;

  /// Left null vector of A scaled so its boundary entries sum to one. A
  /// right-hand side is solvable iff flux . [a; b] = 0.
  Vector flux;

  /// Nodes used by each B row.
  std::vector<std::array<int, 6>> neumann_nodes;

  /// Per boundary point and component: six inner-edge slots and affine
  /// extrapolation weights used to carry inner-edge data to the boundary point.
  std::vector<std::array<int, 6>> extrap_slots;   // index 2*j + comp
  std::vector<std::array<double, 6>> extrap_weights;

  /// Edge midpoints where the forcing is sampled for the interior source, and
  /// for each inner node the (E, W, N, S) entries of that list.
  std::vector<Vec2> source_pos;
  std::vector<int> source_comp;
  std::vector<std::array<int, 4>> source_index;

  int n_inner() const { return static_cast<int>(L.rows()); }
  int n_ghost() const { return static_cast<int>(B.rows()); }
};

PressureSystem assemble_pressure_matrix(const Geometry& geo);

struct PoissonRhs {
  Vector a;  ///< per inner node
  Vector b;  ///< per boundary point
  double defect = 0.0;  ///< last projection constant
};

/// Right-hand side for the pressure at time `state.t`. `lap_inner` is the
/// discrete velocity Laplacian at inner edges; `adv_inner` the advection term
/// or null when advection is off.
PoissonRhs assemble_poisson_rhs(const Geometry& geo, const PressureSystem& sys, const FlowState& state,
                                const FlowProblem& problem, double mu, double lambda,
                                const Vector& lap_inner, const Vector* adv_inner);

/// Convenience form that computes the Laplacian (and advection) itself.
PoissonRhs assemble_poisson_rhs(const Geometry& geo, const PressureSystem& sys, const FlowState& state,
                                const FlowProblem& problem, double mu, double lambda, bool advect);

/// Constant C such that subtracting it from every b entry makes the system
/// solvable; the discrete form of (flux through the boundary - source)/area.
double solvability_defect(const PressureSystem& sys, const PoissonRhs& rhs);

/// flux . [a; b]: zero for a solvable right-hand side.
double compatibility_residual(const PressureSystem& sys, const PoissonRhs& rhs);

/// Minimal-norm least-squares pressure. With `project` the defect is first
/// removed from b (and stored in rhs.defect).
Vector solve_pressure(const PressureSystem& sys, PoissonRhs& rhs, bool project);

}  // namespace ppens
