#include "ppens/momentum.hpp"

#include "ppens/error.hpp"

#include <algorithm>

namespace ppens {

Vector sample_velocity(const Geometry& geo, const VectorField& field, double t) {
  const auto& cls = geo.cls;
  Vector out(cls.n_velocities());
  auto put = [&](int e) {
    Vec2 w = field(geo.grid.edge_pos(e), t);
    out(cls.edge_slot[e]) = geo.grid.edge_comp(e) == 0 ? w.x() : w.y();
  };
  for (int e : cls.inner_edges) put(e);
  for (int e : cls.boundary_edges) put(e);
  return out;
}

double node_divergence(const Geometry& geo, const Vector& vel, int node) {
  const auto& g = geo.grid;
  auto [i, j] = g.node_ij(node);
  auto val = [&](int e) { return geo.cls.in_cu(e) ? vel(geo.cls.edge_slot[e]) : 0.0; };
  return (val(g.edge_id(0, i, j)) - val(g.edge_id(0, i - 1, j)) + val(g.edge_id(1, i, j)) -
          val(g.edge_id(1, i, j - 1))) /
         g.h();
}

MomentumOperator::MomentumOperator(const Geometry& geo) : geo_(geo) {
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  const int n = cls.n_inner_edges();
  nbr_.resize(n);
  pnode_.resize(n);
  cross_.resize(n);
  pos_.resize(n);
  comp_.resize(n);
  auto slot = [&](int e) { return cls.in_cu(e) ? cls.edge_slot[e] : -1; };
  for (int k = 0; k < n; ++k) {
    int e = cls.inner_edges[k];
    int c = g.edge_comp(e);
    auto [i, j] = g.edge_ij(e);
    comp_[k] = c;
    pos_[k] = g.edge_pos(e);
    nbr_[k] = {slot(g.edge_id(c, i + 1, j)), slot(g.edge_id(c, i - 1, j)),
               slot(g.edge_id(c, i, j + 1)), slot(g.edge_id(c, i, j - 1))};
    if (std::any_of(nbr_[k].begin(), nbr_[k].end(), [](int s) { return s < 0; }))
      throw MomentumError("inner edge with incomplete stencil");
    auto [a, b] = g.edge_nodes(e);
    pnode_[k] = {cls.pressure_index[a], cls.pressure_index[b]};
    if (c == 0)
      cross_[k] = {slot(g.edge_id(1, i, j)), slot(g.edge_id(1, i + 1, j)),
                   slot(g.edge_id(1, i, j - 1)), slot(g.edge_id(1, i + 1, j - 1))};
    else
      cross_[k] = {slot(g.edge_id(0, i, j)), slot(g.edge_id(0, i - 1, j)),
                   slot(g.edge_id(0, i, j + 1)), slot(g.edge_id(0, i - 1, j + 1))};
  }
}

Vector MomentumOperator::laplacian(const Vector& vel) const {
  const double inv_h2 = 1.0 / (geo_.grid.h() * geo_.grid.h());
  const int n = static_cast<int>(nbr_.size());
  Vector out(n);
  for (int k = 0; k < n; ++k) {
    const auto& s = nbr_[k];
    out(k) = (vel(s[0]) + vel(s[1]) + vel(s[2]) + vel(s[3]) - 4.0 * vel(k)) * inv_h2;
  }
  return out;
}

Vector MomentumOperator::pressure_gradient(const Vector& p) const {
  const double inv_h = 1.0 / geo_.grid.h();
  const int n = static_cast<int>(pnode_.size());
  Vector out(n);
  for (int k = 0; k < n; ++k) out(k) = (p(pnode_[k][1]) - p(pnode_[k][0])) * inv_h;
  return out;
}

Vector MomentumOperator::advection(const Vector& vel) const {
  const double inv_2h = 0.5 / geo_.grid.h();
  const int n = static_cast<int>(nbr_.size());
  Vector out(n);
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    int cnt = 0;
    for (int s : cross_[k]) {
      if (s < 0) continue;
      sum += vel(s);
      ++cnt;
    }
    double other = cnt > 0 ? sum / cnt : 0.0;
    const auto& s = nbr_[k];
    double dx = (vel(s[0]) - vel(s[1])) * inv_2h;
    double dy = (vel(s[2]) - vel(s[3])) * inv_2h;
    out(k) = comp_[k] == 0 ? vel(k) * dx + other * dy : other * dx + vel(k) * dy;
  }
  return out;
}

Vector MomentumOperator::forcing(const VectorField& f, double t) const {
  const int n = static_cast<int>(pos_.size());
  Vector out(n);
  for (int k = 0; k < n; ++k) {
    Vec2 w = f(pos_[k], t);
    out(k) = comp_[k] == 0 ? w.x() : w.y();
  }
  return out;
}

Vector MomentumOperator::rate(const Vector& vel, const Vector& p, const Vector& f_inner, double mu,
                              bool advect) const {
  Vector r = mu * laplacian(vel) - pressure_gradient(p) + f_inner;
  if (advect) r -= advection(vel);
  return r;
}

Vector interior_rhs(const Geometry& geo, const FlowState& state, const Vector& p,
                    const VectorField& f, double mu, bool advect) {
  if (state.vel.size() != geo.cls.n_velocities() || p.size() != geo.cls.n_pressure())
    throw MomentumError("state does not match the geometry");
  MomentumOperator op(geo);
  return op.rate(state.vel, p, op.forcing(f, state.t), mu, advect);
}

Vec2 extrapolate_velocity(const Geometry& geo, const Vector& vel, int j) {
  Vec2 out;
  for (int c = 0; c < 2; ++c) {
    const Patch& p = geo.cls.patches[2 * j + c];
    int row = 0;
    for (int k = 0; k < 3; ++k)
      if (p.targets[k] == j) row = k;
    double v = 0.0;
    for (int m = 0; m < 6; ++m) v += p.weights(row, m) * vel(geo.cls.edge_slot[p.edges[m]]);
    out(c) = v;
  }
  return out;
}

BoundaryExtension::BoundaryExtension(const Geometry& geo) : geo_(geo) {
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  const int ni = cls.n_inner_edges();
  const int m = cls.n_boundary_edges();
  const int md = cls.n_divergence();
  if (static_cast<int>(cls.patches.size()) != 2 * cls.n_ghost())
    throw MomentumError("patches missing; build them before the extension");

  using T = Eigen::Triplet<double>;
  std::vector<T> td, tdi;
  for (int r = 0; r < md; ++r) {
    auto [i, j] = g.node_ij(cls.divergence_nodes[r]);
    const std::array<std::pair<int, double>, 4> terms{{{g.edge_id(0, i, j), 1.0},
                                                       {g.edge_id(0, i - 1, j), -1.0},
                                                       {g.edge_id(1, i, j), 1.0},
                                                       {g.edge_id(1, i, j - 1), -1.0}}};
    for (auto [e, sgn] : terms) {
      int s = cls.edge_slot[e];
      if (s >= ni)
        td.emplace_back(r, s - ni, sgn);
      else
        tdi.emplace_back(r, s, sgn);
    }
  }
  d_.resize(md, m);
  d_.setFromTriplets(td.begin(), td.end());
  d_inner_.resize(md, ni);
  d_inner_.setFromTriplets(tdi.begin(), tdi.end());

  const int nb = cls.n_ghost();
  std::vector<T> te, tei;
  for (int j = 0; j < nb; ++j) {
    const Patch& pu = cls.patches[2 * j];
    const Patch& pv = cls.patches[2 * j + 1];
    for (int k = 0; k < 3; ++k) {
      const int row = 3 * j + k;
      const auto& bp = cls.boundary_points[pu.targets[k]];
      Vec2 tan(-bp.normal.y(), bp.normal.x());
      target_pos_.push_back(bp.point);
      target_tangent_.push_back(tan);
      for (int c = 0; c < 2; ++c) {
        const Patch& p = c == 0 ? pu : pv;
        const double tc = tan(c);
        if (tc == 0.0) continue;
        for (int q = 0; q < 6; ++q) {
          int s = cls.edge_slot[p.edges[q]];
          double w = tc * p.weights(k, q);
          if (s >= ni)
            te.emplace_back(row, s - ni, w);
          else
            tei.emplace_back(row, s, w);
        }
      }
    }
  }
  e_.resize(3 * nb, m);
  e_.setFromTriplets(te.begin(), te.end());
  e_inner_.resize(3 * nb, ni);
  e_inner_.setFromTriplets(tei.begin(), tei.end());
  try {
    solver_.emplace(d_, e_);
  } catch (const LinearAlgebraError& ex) {
    throw MomentumError(std::string("flawed boundary implementation: ") + ex.what());
  }
}

Vector BoundaryExtension::divergence_target(const Vector& vel) const {
  return -(d_inner_ * vel.head(geo_.cls.n_inner_edges()));
}

Vector BoundaryExtension::tangential_target(const Vector& vel, const VectorField& g, double t) const {
  const int rows = static_cast<int>(target_pos_.size());
  Vector out(rows);
  for (int r = 0; r < rows; ++r) out(r) = target_tangent_[r].dot(g(target_pos_[r], t));
  out -= e_inner_ * vel.head(geo_.cls.n_inner_edges());
  return out;
}

Vector BoundaryExtension::extend(const Vector& vel, const VectorField& g, double t) const {
  return solver_->solve(divergence_target(vel), tangential_target(vel, g, t));
}

void BoundaryExtension::apply(Vector& vel, const VectorField& g, double t) const {
  const int ni = geo_.cls.n_inner_edges();
  vel.tail(vel.size() - ni) = extend(vel, g, t);
}

}  // namespace ppens
