#include "ppens/poisson.hpp"

#include "ppens/error.hpp"
#include "ppens/local_fit.hpp"
#include "ppens/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ppens {
namespace {

constexpr double kFitThreshold = 1e-2;

// Six pressure unknowns around boundary point j for the quadratic normal
// derivative: the owning ghost first, then the nearest inner nodes that keep
// the interpolation well posed. Other ghosts are left out so the stencil stays
// one-sided; mixing in ghosts across the boundary can zero the owner's weight
// and makes the coupled scheme unstable.
std::array<int, 6> neumann_stencil(const Geometry& geo, int j) {
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  const int ghost = cls.ghost_pressure[j];
  const Vec2 xb = cls.boundary_points[j].point;
  auto [gi, gj] = g.node_ij(ghost);

  for (int reach : {4, 6}) {
    std::vector<std::pair<double, int>> cand;
    for (int dj = -reach; dj <= reach; ++dj)
      for (int di = -reach; di <= reach; ++di) {
        int id = g.node_id(gi + di, gj + dj);
        if (id < 0 || id == ghost || cls.pressure_index[id] < 0) continue;
        if (cls.node_kind[id] != NodeKind::Inner) continue;
        cand.emplace_back(g.displacement(xb, g.node_pos(id)).norm(), id);
      }
    std::sort(cand.begin(), cand.end());
    std::vector<int> chosen{ghost};
    std::vector<Vec2> pts{g.displacement(xb, g.node_pos(ghost))};
    for (const auto& [d, id] : cand) {
      if (chosen.size() == 6) break;
      pts.push_back(g.displacement(xb, g.node_pos(id)));
      if (relative_min_singular(quadratic_design(pts, Vec2::Zero(), g.h())) > kFitThreshold) {
        chosen.push_back(id);
      } else {
        pts.pop_back();
      }
    }
    if (chosen.size() == 6) {
      std::array<int, 6> out{};
      std::copy(chosen.begin(), chosen.end(), out.begin());
      return out;
    }
  }
  throw PoissonError("no well-posed six-node Neumann stencil at boundary point " +
                     std::to_string(j));
}

// Inner edges of one component near boundary point j whose own Laplacian
// stencil avoids boundary edges, with weights for the affine least-squares
// value at the point. Edges next to the boundary are skipped because their
// Laplacian is only first-order accurate.
void boundary_extrapolation(const Geometry& geo, int j, int comp, std::array<int, 6>& slots,
                            std::array<double, 6>& weights) {
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  const Vec2 xb = cls.boundary_points[j].point;
  auto [gi, gj] = g.node_ij(cls.ghost_pressure[j]);
  auto interior = [&](int e) {
    if (!cls.in_cu(e) || cls.is_boundary_edge(e)) return false;
    auto [i, jj] = g.edge_ij(e);
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      if (cls.is_boundary_edge(g.edge_id(comp, i + di, jj + dj))) return false;
    }
    return true;
  };
  for (int reach : {5, 8}) {
    std::vector<std::pair<double, int>> cand;
    for (int dj = -reach; dj <= reach; ++dj)
      for (int di = -reach; di <= reach; ++di) {
        int e = g.edge_id(comp, gi + di, gj + dj);
        if (e < 0 || !interior(e)) continue;
        cand.emplace_back(g.displacement(xb, g.edge_pos(e)).norm(), e);
      }
    if (cand.size() < 6) continue;
    std::sort(cand.begin(), cand.end());
    std::vector<Vec2> pts;
    std::vector<int> edges;
    for (int k = 0; k < 6; ++k) {
      pts.push_back(g.displacement(xb, g.edge_pos(cand[k].second)));
      edges.push_back(cand[k].second);
    }
    if (affine_conditioning(pts, Vec2::Zero(), g.h()) < kFitThreshold) {
      // the nearest six are nearly collinear; take them one at a time instead
      pts.clear();
      edges.clear();
      for (const auto& [dist, e] : cand) {
        if (edges.size() == 6) break;
        pts.push_back(g.displacement(xb, g.edge_pos(e)));
        if (pts.size() >= 3 && affine_conditioning(pts, Vec2::Zero(), g.h()) < kFitThreshold) {
          pts.pop_back();
          continue;
        }
        edges.push_back(e);
      }
      if (edges.size() < 6) continue;
    }
    Eigen::MatrixXd w = affine_fit_weights(pts, {Vec2::Zero()}, Vec2::Zero(), g.h());
    for (int k = 0; k < 6; ++k) {
      slots[k] = cls.edge_slot[edges[k]];
      weights[k] = w(0, k);
    }
    return;
  }
  throw PoissonError("cannot extrapolate inner-edge data to boundary point " + std::to_string(j));
}

}  // namespace

PressureSystem assemble_pressure_matrix(const Geometry& geo) {
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  const int na = cls.n_inner();
  const int nb = cls.n_ghost();
  const int n = na + nb;
  const double h = g.h();
  PressureSystem sys;

  using T = Eigen::Triplet<double>;
  std::vector<T> tl, tb, ta;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int k = 0; k < na; ++k) {
    auto [i, j] = g.node_ij(cls.inner_pressure[k]);
    tl.emplace_back(k, k, -4.0 / (h * h));
    for (int q = 0; q < 4; ++q) {
      int nb_idx = cls.pressure_index[g.node_id(i + di[q], j + dj[q])];
      if (nb_idx < 0) throw PoissonError("inner node stencil leaves the computational nodes");
      tl.emplace_back(k, nb_idx, 1.0 / (h * h));
    }
  }

  sys.neumann_nodes.resize(nb);
  for (int j = 0; j < nb; ++j) {
    auto nodes = neumann_stencil(geo, j);
    sys.neumann_nodes[j] = nodes;
    std::vector<Vec2> pts;
    for (int id : nodes) pts.push_back(g.displacement(cls.boundary_points[j].point, g.node_pos(id)));
    Eigen::Matrix<double, 2, 6> grad = quadratic_gradient_weights(pts, Vec2::Zero(), h);
    Eigen::Matrix<double, 1, 6> w = cls.boundary_points[j].normal.transpose() * grad;
    for (int k = 0; k < 6; ++k) tb.emplace_back(j, cls.pressure_index[nodes[k]], w(k));
  }

  sys.L.resize(na, n);
  sys.L.setFromTriplets(tl.begin(), tl.end());
  sys.B.resize(nb, n);
  sys.B.setFromTriplets(tb.begin(), tb.end());
  ta = tl;
  for (const auto& t : tb) ta.emplace_back(t.row() + na, t.col(), t.value());
  sys.A.resize(n, n);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.A.makeCompressed();

  try {
    sys.solver = std::make_shared<SingularSquareSolver>(sys.A, Vector::Ones(n));
  } catch (const LinearAlgebraError& ex) {
    throw PoissonError(std::string("pressure system is not a well-posed Neumann problem: ") +
                       ex.what());
  }
  sys.flux = sys.solver->left_null();
  const double bsum = sys.flux.tail(nb).sum();
  if (std::abs(bsum) < 1e-14 * sys.flux.cwiseAbs().sum())
    throw PoissonError("pressure system has no boundary flux functional");
  sys.flux /= bsum;

  sys.extrap_slots.resize(2 * nb);
  sys.extrap_weights.resize(2 * nb);
  for (int j = 0; j < nb; ++j)
    for (int c = 0; c < 2; ++c)
      boundary_extrapolation(geo, j, c, sys.extrap_slots[2 * j + c], sys.extrap_weights[2 * j + c]);

  std::map<int, int> seen;  // grid edge id -> source index
  auto source = [&](int e) {
    auto [it, fresh] = seen.emplace(e, static_cast<int>(sys.source_pos.size()));
    if (fresh) {
      sys.source_pos.push_back(g.edge_pos(e));
      sys.source_comp.push_back(g.edge_comp(e));
    }
    return it->second;
  };
  sys.source_index.resize(na);
  for (int k = 0; k < na; ++k) {
    auto [i, j] = g.node_ij(cls.inner_pressure[k]);
    sys.source_index[k] = {source(g.edge_id(0, i, j)), source(g.edge_id(0, i - 1, j)),
                           source(g.edge_id(1, i, j)), source(g.edge_id(1, i, j - 1))};
  }
  return sys;
}

namespace {

double extrapolate(const PressureSystem& sys, int idx, const Vector& inner_values) {
  double v = 0.0;
  for (int k = 0; k < 6; ++k) v += sys.extrap_weights[idx][k] * inner_values(sys.extrap_slots[idx][k]);
  return v;
}

}  // namespace

PoissonRhs assemble_poisson_rhs(const Geometry& geo, const PressureSystem& sys, const FlowState& state,
                                const FlowProblem& problem, double mu, double lambda,
                                const Vector& lap_inner, const Vector* adv_inner) {
  const auto& cls = geo.cls;
  const int na = cls.n_inner();
  const int nb = cls.n_ghost();
  const double t = state.t;
  const double inv_h = 1.0 / geo.grid.h();
  if (state.vel.size() != cls.n_velocities() || lap_inner.size() != cls.n_inner_edges())
    throw PoissonError("state does not match the geometry");

  PoissonRhs rhs;
  const int ns = static_cast<int>(sys.source_pos.size());
  Vector fs(ns);
  for (int s = 0; s < ns; ++s) {
    Vec2 f = problem.force(sys.source_pos[s], t);
    fs(s) = sys.source_comp[s] == 0 ? f.x() : f.y();
  }
  rhs.a.resize(na);
  for (int k = 0; k < na; ++k) {
    const auto& q = sys.source_index[k];
    rhs.a(k) = (fs(q[0]) - fs(q[1]) + fs(q[2]) - fs(q[3])) * inv_h;
  }
  if (adv_inner) {
    // Source -div((u.grad)u) where all four edges of the node are inner.
    const auto& g = geo.grid;
    for (int k = 0; k < na; ++k) {
      auto [i, j] = g.node_ij(cls.inner_pressure[k]);
      const std::array<int, 4> es{g.edge_id(0, i, j), g.edge_id(0, i - 1, j), g.edge_id(1, i, j),
                                  g.edge_id(1, i, j - 1)};
      bool ok = std::all_of(es.begin(), es.end(),
                            [&](int e) { return cls.in_cu(e) && !cls.is_boundary_edge(e); });
      if (!ok) continue;
      const Vector& n = *adv_inner;
      rhs.a(k) -= (n(cls.edge_slot[es[0]]) - n(cls.edge_slot[es[1]]) + n(cls.edge_slot[es[2]]) -
                   n(cls.edge_slot[es[3]])) *
                  inv_h;
    }
  }

  rhs.b.resize(nb);
  for (int j = 0; j < nb; ++j) {
    const auto& bp = cls.boundary_points[j];
    Vec2 lap(extrapolate(sys, 2 * j, lap_inner), extrapolate(sys, 2 * j + 1, lap_inner));
    Vec2 u = extrapolate_velocity(geo, state.vel, j);
    Vec2 gv = problem.g(bp.point, t);
    Vec2 val = problem.force(bp.point, t) - problem.g_t(bp.point, t) + mu * lap;
    if (adv_inner) val -= Vec2(extrapolate(sys, 2 * j, *adv_inner), extrapolate(sys, 2 * j + 1, *adv_inner));
    rhs.b(j) = bp.normal.dot(val) + lambda * bp.normal.dot(u - gv);
  }
  return rhs;
}

PoissonRhs assemble_poisson_rhs(const Geometry& geo, const PressureSystem& sys, const FlowState& state,
                                const FlowProblem& problem, double mu, double lambda, bool advect) {
  MomentumOperator op(geo);
  Vector lap = op.laplacian(state.vel);
  if (advect) {
    Vector adv = op.advection(state.vel);
    return assemble_poisson_rhs(geo, sys, state, problem, mu, lambda, lap, &adv);
  }
  return assemble_poisson_rhs(geo, sys, state, problem, mu, lambda, lap, nullptr);
}

double compatibility_residual(const PressureSystem& sys, const PoissonRhs& rhs) {
  const int na = sys.n_inner();
  if (rhs.a.size() != na || rhs.b.size() != sys.n_ghost())
    throw PoissonError("right-hand side does not match the pressure system");
  return sys.flux.head(na).dot(rhs.a) + sys.flux.tail(sys.n_ghost()).dot(rhs.b);
}

double solvability_defect(const PressureSystem& sys, const PoissonRhs& rhs) {
  // the boundary part of flux sums to one
  return compatibility_residual(sys, rhs);
}

Vector solve_pressure(const PressureSystem& sys, PoissonRhs& rhs, bool project) {
  const int na = sys.n_inner();
  rhs.defect = solvability_defect(sys, rhs);
  if (project) rhs.b.array() -= rhs.defect;
  Vector full(na + sys.n_ghost());
  full << rhs.a, rhs.b;
  return sys.solver->solve(full);
}

}  // namespace ppens
