#pragma once

#include "ppens/geometry.hpp"
#include "ppens/sparsela.hpp"

#include <functional>

namespace ppens {

using VectorField = std::function<Vec2(const Vec2& x, double t)>;

/// Data of the continuous problem: forcing f, boundary velocity g and its
/// time derivative, and the initial velocity.
struct FlowProblem {
  VectorField force;
  VectorField g;
  VectorField g_t;
  VectorField initial_velocity;
};

/// Discrete fields at one time level. `vel` holds one value per velocity edge
/// in classification slot order: inner edges first, then the boundary
/// velocities y. `p` holds inner then ghost pressures.
struct FlowState {
  Vector vel;
  Vector p;
  double t = 0.0;

  auto inner(int n_inner) { return vel.head(n_inner); }
  auto inner(int n_inner) const { return vel.head(n_inner); }
  auto y(int n_inner) { return vel.tail(vel.size() - n_inner); }
  auto y(int n_inner) const { return vel.tail(vel.size() - n_inner); }
};

/// `field` sampled at each velocity edge midpoint: u on u-edges, v on v-edges.
Vector sample_velocity(const Geometry& geo, const VectorField& field, double t);

/// Discrete divergence (u_E - u_W + v_N - v_S)/h at a pressure node. Edges
/// missing from the velocity vector count as zero.
double node_divergence(const Geometry& geo, const Vector& vel, int node);

}  // namespace ppens
