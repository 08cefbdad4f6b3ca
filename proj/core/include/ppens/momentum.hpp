#pragma once

#include "ppens/flow.hpp"

#include <array>
#include <optional>
#include <vector>

namespace ppens {

/// Stencil tables for the explicit momentum update at inner edges.
class MomentumOperator {
 public:
  explicit MomentumOperator(const Geometry& geo);

  /// 5-point Laplacian at each inner edge.
  Vector laplacian(const Vector& vel) const;
  /// (p_right - p_left)/h for u-edges, (p_top - p_bottom)/h for v-edges.
  Vector pressure_gradient(const Vector& p) const;
  /// Centered (u . grad) u at each inner edge.
  Vector advection(const Vector& vel) const;
  /// Forcing sampled at the inner edges.
  Vector forcing(const VectorField& f, double t) const;

  /// mu*Lap(u) - grad(p) - advection + f at every inner edge.
  Vector rate(const Vector& vel, const Vector& p, const Vector& f_inner, double mu,
              bool advect) const;

 private:
  const Geometry& geo_;
  std::vector<std::array<int, 4>> nbr_;    // velocity slots E, W, N, S
  std::vector<std::array<int, 2>> pnode_;  // pressure unknowns low, high
  std::vector<std::array<int, 4>> cross_;  // other-component slots around the edge, -1 if absent
  std::vector<Vec2> pos_;
  std::vector<int> comp_;
};

/// One-shot form of MomentumOperator::rate for a given state.
Vector interior_rhs(const Geometry& geo, const FlowState& state, const Vector& p,
                    const VectorField& f, double mu, bool advect);

/// Velocity at boundary point j, extrapolated with row j of its own u- and v-patches.
Vec2 extrapolate_velocity(const Geometry& geo, const Vector& vel, int j);

/// Reconstructs boundary velocities from inner ones: exact discrete
/// divergence at divergence nodes (D y = s) and tangential boundary data in
/// the least-squares sense (E y = t).
class BoundaryExtension {
 public:
  explicit BoundaryExtension(const Geometry& geo);

  /// -(inner-edge contributions) to h*div at each divergence node.
  Vector divergence_target(const Vector& vel) const;
  /// Tangential data minus the inner-edge part of each E row.
  Vector tangential_target(const Vector& vel, const VectorField& g, double t) const;

  /// New boundary velocity vector y for the inner values in `vel` and g at t.
  Vector extend(const Vector& vel, const VectorField& g, double t) const;
  /// Writes extend() into the tail of `vel`.
  void apply(Vector& vel, const VectorField& g, double t) const;

  const SparseMatrix& d() const { return d_; }
  const SparseMatrix& e() const { return e_; }
  const SparseMatrix& kernel() const { return solver_->kernel(); }
  const ConstrainedLeastSquares& solver() const { return *solver_; }

 private:
  const Geometry& geo_;
  SparseMatrix d_, d_inner_;
  SparseMatrix e_, e_inner_;
  std::vector<Vec2> target_pos_;
  std::vector<Vec2> target_tangent_;
  std::optional<ConstrainedLeastSquares> solver_;
};

}  // namespace ppens
