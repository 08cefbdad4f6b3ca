#include "ppens/geometry.hpp"

#include "ppens/error.hpp"
#include "ppens/local_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ppens {

StaggeredGrid::StaggeredGrid(int nx, int ny, double h, Vec2 origin, bool periodic_y, int halo)
    : nx_(nx), ny_(ny), h_(h), origin_(origin), periodic_(periodic_y), halo_(halo) {
  if (nx < 4 || ny < 4) throw GeometryError("grid needs at least 4 cells per axis");
  if (!(h > 0.0)) throw GeometryError("grid spacing must be positive");
  if (halo < 1) throw GeometryError("grid halo must be at least 1");
  sx_ = nx + 1 + 2 * halo;
  sy_ = periodic_y ? ny : ny + 1 + 2 * halo;
}

int StaggeredGrid::wrap_j(int j) const {
  if (!periodic_) return j;
  int r = j % ny_;
  return r < 0 ? r + ny_ : r;
}

int StaggeredGrid::node_id(int i, int j) const {
  j = wrap_j(j);
  int ii = i - i_min();
  int jj = j - j_min();
  if (ii < 0 || ii >= sx_ || jj < 0 || jj >= sy_) return -1;
  return ii + sx_ * jj;
}

std::array<int, 2> StaggeredGrid::node_ij(int id) const {
  return {id % sx_ + i_min(), id / sx_ + j_min()};
}

int StaggeredGrid::edge_id(int comp, int i, int j) const {
  int a = node_id(i, j);
  int b = comp == 0 ? node_id(i + 1, j) : node_id(i, j + 1);
  if (a < 0 || b < 0) return -1;
  return comp * num_nodes() + a;
}

std::array<int, 2> StaggeredGrid::edge_nodes(int e) const {
  auto [i, j] = edge_ij(e);
  int a = node_id(i, j);
  int b = edge_comp(e) == 0 ? node_id(i + 1, j) : node_id(i, j + 1);
  return {a, b};
}

Vec2 StaggeredGrid::node_pos(int i, int j) const {
  return origin_ + h_ * Vec2(i, wrap_j(j));
}

Vec2 StaggeredGrid::node_pos(int id) const {
  auto [i, j] = node_ij(id);
  return node_pos(i, j);
}

Vec2 StaggeredGrid::edge_pos(int e) const {
  auto [i, j] = edge_ij(e);
  Vec2 off = edge_comp(e) == 0 ? Vec2(0.5 * h_, 0.0) : Vec2(0.0, 0.5 * h_);
  return node_pos(i, j) + off;
}

Vec2 StaggeredGrid::displacement(const Vec2& a, const Vec2& b) const {
  Vec2 d = b - a;
  if (periodic_) {
    const double L = period_y();
    d.y() -= L * std::round(d.y() / L);
  }
  return d;
}

StaggeredGrid build_grid(const DomainShape& domain, int n, bool periodic_y) {
  if (n < 4) throw GeometryError("cell count must be at least 4, got " + std::to_string(n));
  if (periodic_y != domain.periodic_y())
    throw GeometryError("periodic flag does not match the domain " + domain.name());
  Vec2 lo = domain.box_lower();
  Vec2 hi = domain.box_upper();
  double h = (hi.x() - lo.x()) / n;
  double ny_real = (hi.y() - lo.y()) / h;
  int ny = static_cast<int>(std::lround(ny_real));
  if (std::abs(ny_real - ny) > 1e-9 * std::max(1.0, ny_real))
    throw GeometryError("domain height is not a whole number of cells");
  return StaggeredGrid(n, ny, h, lo, periodic_y);
}

namespace {

constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

// Same-component neighbours of an edge in the 5-point stencil.
std::array<int, 4> edge_neighbors(const StaggeredGrid& g, int e) {
  int c = g.edge_comp(e);
  auto [i, j] = g.edge_ij(e);
  std::array<int, 4> out{};
  for (int k = 0; k < 4; ++k) out[k] = g.edge_id(c, i + kDi[k], j + kDj[k]);
  return out;
}

// u and v edges incident to a node, in the order E, W, N, S.
std::array<int, 4> node_edges(const StaggeredGrid& g, int i, int j) {
  return {g.edge_id(0, i, j), g.edge_id(0, i - 1, j), g.edge_id(1, i, j), g.edge_id(1, i, j - 1)};
}

}  // namespace

DomainClassification classify(const StaggeredGrid& grid, const DomainShape& domain) {
  DomainClassification cls;
  const int nn = grid.num_nodes();
  const double tol = 1e-10 * grid.h();
  cls.node_kind.assign(nn, NodeKind::Outside);
  cls.on_closure.assign(nn, 0);
  std::vector<double> sd(nn);
  for (int id = 0; id < nn; ++id) {
    sd[id] = domain.signed_distance(grid.node_pos(id));
    cls.on_closure[id] = sd[id] <= tol ? 1 : 0;
    if (sd[id] < -tol) cls.node_kind[id] = NodeKind::Inner;
  }

  for (int id = 0; id < nn; ++id) {
    if (cls.node_kind[id] != NodeKind::Inner) continue;
    cls.inner_pressure.push_back(id);
    auto [i, j] = grid.node_ij(id);
    for (int k = 0; k < 4; ++k) {
      int nb = grid.node_id(i + kDi[k], j + kDj[k]);
      if (nb < 0) throw GeometryError("inner node stencil leaves the grid; domain exceeds its box");
      if (cls.node_kind[nb] == NodeKind::Outside) cls.node_kind[nb] = NodeKind::Ghost;
    }
  }
  if (cls.inner_pressure.empty()) throw GeometryError("domain contains no grid nodes");

  for (int id = 0; id < nn; ++id) {
    if (cls.node_kind[id] != NodeKind::Ghost) continue;
    cls.ghost_pressure.push_back(id);
    cls.boundary_points.push_back(domain.closest_boundary_point(grid.node_pos(id)));
  }
  cls.pressure_index.assign(nn, -1);
  for (int k = 0; k < cls.n_inner(); ++k) cls.pressure_index[cls.inner_pressure[k]] = k;
  for (int k = 0; k < cls.n_ghost(); ++k)
    cls.pressure_index[cls.ghost_pressure[k]] = cls.n_inner() + k;

  // Ghosts sitting on the boundary also own the edge pointing outward.
  std::vector<std::uint8_t> in_ep(nn, 0);
  for (int id = 0; id < nn; ++id) in_ep[id] = cls.pressure_index[id] >= 0;
  for (int id : cls.ghost_pressure) {
    if (!cls.on_closure[id]) continue;
    auto [i, j] = grid.node_ij(id);
    for (int k = 0; k < 4; ++k) {
      int nb = grid.node_id(i + kDi[k], j + kDj[k]);
      if (nb < 0) throw GeometryError("ghost node stencil leaves the grid");
      if (!in_ep[nb]) {
        in_ep[nb] = 1;
        cls.node_kind[nb] = NodeKind::Extended;
      }
    }
  }

  const int ne = grid.num_edges();
  std::vector<std::uint8_t> in_cu(ne, 0);
  for (int e = 0; e < ne; ++e) {
    auto [a, b] = grid.edge_nodes(e);
    if (a < 0 || b < 0) continue;
    in_cu[e] = in_ep[a] && in_ep[b] && (cls.on_closure[a] || cls.on_closure[b]);
  }
  auto cu = [&](int e) { return e >= 0 && in_cu[e]; };

  for (int e = 0; e < ne; ++e) {
    if (!in_cu[e]) continue;
    auto nb = edge_neighbors(grid, e);
    bool inner = std::all_of(nb.begin(), nb.end(), cu);
    if (inner) {
      auto [a, b] = grid.edge_nodes(e);
      if (cls.pressure_index[a] < 0 || cls.pressure_index[b] < 0)
        throw GeometryError("inner velocity edge without pressure on both ends; domain too thin");
      cls.inner_edges.push_back(e);
    } else {
      cls.boundary_edges.push_back(e);
    }
  }
  if (cls.inner_edges.empty()) throw GeometryError("no inner velocity edges; domain too thin");
  cls.edge_slot.assign(ne, -1);
  for (int k = 0; k < cls.n_inner_edges(); ++k) cls.edge_slot[cls.inner_edges[k]] = k;
  for (int k = 0; k < cls.n_boundary_edges(); ++k)
    cls.edge_slot[cls.boundary_edges[k]] = cls.n_inner_edges() + k;

  // Boundary data is extrapolated from edges whose whole stencil is inner, so
  // each component needs such edges spanning both directions.
  std::array<std::vector<Vec2>, 2> deep;
  for (int e : cls.inner_edges) {
    auto nb = edge_neighbors(grid, e);
    if (std::none_of(nb.begin(), nb.end(), [&](int x) { return cls.is_boundary_edge(x); }))
      deep[grid.edge_comp(e)].push_back(grid.displacement(grid.origin(), grid.edge_pos(e)));
  }
  for (const auto& pts : deep) {
    Vec2 c = Vec2::Zero();
    double r = 0.0;
    for (const Vec2& x : pts) c += x / static_cast<double>(pts.size());
    for (const Vec2& x : pts) r = std::max(r, (x - c).norm());
    if (pts.size() < 6 || affine_conditioning(pts, c, std::max(r, grid.h())) < 1e-2)
      throw GeometryError("too few inner edges clear of the boundary; domain too thin for h");
  }

  for (int id = 0; id < nn; ++id) {
    if (cls.pressure_index[id] < 0 || !cls.on_closure[id]) continue;
    auto [i, j] = grid.node_ij(id);
    auto es = node_edges(grid, i, j);
    if (!std::all_of(es.begin(), es.end(), cu)) continue;
    if (std::any_of(es.begin(), es.end(), [&](int e) { return cls.is_boundary_edge(e); }))
      cls.divergence_nodes.push_back(id);
  }

  // A boundary point must see inner nodes on its own side: every ghost needs
  // an inner neighbour whose reflection through it is not another inner node.
  auto inner = [&](int id) { return id >= 0 && cls.node_kind[id] == NodeKind::Inner; };
  for (int id : cls.ghost_pressure) {
    auto [i, j] = grid.node_ij(id);
    bool one_sided = false;
    for (int k = 0; k < 4; ++k) {
      int a = grid.node_id(i + kDi[k], j + kDj[k]);
      int b = grid.node_id(i - kDi[k], j - kDj[k]);
      if (inner(a) && !inner(b)) one_sided = true;
    }
    if (!one_sided) throw GeometryError("ghost node between two inner nodes; domain too thin for h");
  }
  return cls;
}

namespace {

struct PatchBuilder {
  const StaggeredGrid& g;
  const DomainClassification& cls;

  // Inner edges of one component whose stencil touches a boundary edge.
  std::vector<int> center_candidates(int comp) const {
    std::vector<int> out;
    for (int e : cls.inner_edges) {
      if (g.edge_comp(e) != comp) continue;
      auto nb = edge_neighbors(g, e);
      if (std::any_of(nb.begin(), nb.end(), [&](int x) { return cls.is_boundary_edge(x); }))
        out.push_back(e);
    }
    return out;
  }

  int nearest(const std::vector<int>& edges, const Vec2& x) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    const double tol = 1e-9 * g.h();
    for (int e : edges) {
      double d = g.displacement(x, g.edge_pos(e)).norm();
      if (d < bd - tol) {
        bd = d;
        best = e;
      }
    }
    return best;
  }

  std::array<int, 3> nearest_points(int j) const {
    const int nb = cls.n_ghost();
    if (nb < 3) throw GeometryError("fewer than three boundary points");
    std::vector<int> idx(nb);
    std::iota(idx.begin(), idx.end(), 0);
    const Vec2& x = cls.boundary_points[j].point;
    std::vector<double> dist(nb);
    for (int k = 0; k < nb; ++k) dist[k] = g.displacement(x, cls.boundary_points[k].point).norm();
    std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(), [&](int a, int b) {
      if (dist[a] != dist[b]) return dist[a] < dist[b];
      return a < b;
    });
    return {idx[0], idx[1], idx[2]};
  }
};

}  // namespace

std::vector<Patch> build_patches(const StaggeredGrid& grid, const DomainClassification& cls,
                                 const DomainShape& /*domain*/) {
  PatchBuilder pb{grid, cls};
  const int nb = cls.n_ghost();
  std::array<std::vector<int>, 2> centers{pb.center_candidates(0), pb.center_candidates(1)};
  for (int c = 0; c < 2; ++c)
    if (centers[c].empty()) throw GeometryError("no inner edge touches the boundary");

  std::vector<Patch> patches(2 * nb);
  std::vector<std::uint8_t> covered(grid.num_edges(), 0);
  for (int j = 0; j < nb; ++j) {
    const Vec2& xb = cls.boundary_points[j].point;
    auto targets = pb.nearest_points(j);
    for (int c = 0; c < 2; ++c) {
      Patch& p = patches[2 * j + c];
      p.component = c;
      p.owner = j;
      p.targets = targets;
      int center = pb.nearest(centers[c], xb);
      p.edges[0] = center;
      auto nbrs = edge_neighbors(grid, center);
      for (int k = 0; k < 4; ++k) {
        p.edges[1 + k] = nbrs[k];
        covered[nbrs[k]] = 1;
      }
      covered[center] = 1;
    }
  }

  // Sixth edge: a diagonal neighbour, preferring boundary edges nobody covers
  // yet, then the better-conditioned fit, then the closer one.
  for (int j = 0; j < nb; ++j) {
    const Vec2& xb = cls.boundary_points[j].point;
    for (int c = 0; c < 2; ++c) {
      Patch& p = patches[2 * j + c];
      auto [ci, cj] = grid.edge_ij(p.edges[0]);
      const Vec2 cpos = grid.edge_pos(p.edges[0]);
      int best = -1;
      std::array<double, 3> best_key{};
      for (int di : {-1, 1}) {
        for (int dj : {-1, 1}) {
          int e = grid.edge_id(c, ci + di, cj + dj);
          if (!cls.in_cu(e)) continue;
          std::vector<Vec2> pts;
          for (int k = 0; k < 5; ++k) pts.push_back(grid.displacement(cpos, grid.edge_pos(p.edges[k])));
          pts.push_back(grid.displacement(cpos, grid.edge_pos(e)));
          double cond = affine_conditioning(pts, Vec2::Zero(), grid.h());
          double fresh = (cls.is_boundary_edge(e) && !covered[e]) ? 1.0 : 0.0;
          double dist = grid.displacement(xb, grid.edge_pos(e)).norm() / grid.h();
          std::array<double, 3> key{-fresh, -std::round(cond * 1e9) / 1e9, dist};
          if (best < 0 || key < best_key) {
            best = e;
            best_key = key;
          }
        }
      }
      if (best < 0) throw GeometryError("patch has no admissible sixth edge");
      p.edges[5] = best;
      covered[best] = 1;

      std::vector<Vec2> pts, tgt;
      for (int e : p.edges) pts.push_back(grid.displacement(cpos, grid.edge_pos(e)));
      for (int t : p.targets) tgt.push_back(grid.displacement(cpos, cls.boundary_points[t].point));
      p.weights = quadratic_interpolation_weights(pts, tgt, Vec2::Zero(), grid.h());
    }
  }

  for (int e : cls.boundary_edges)
    if (!covered[e]) throw GeometryError("boundary edge " + std::to_string(e) + " is in no patch");
  return patches;
}

Geometry make_geometry(std::shared_ptr<const DomainShape> domain, int n) {
  StaggeredGrid grid = build_grid(*domain, n, domain->periodic_y());
  DomainClassification cls = classify(grid, *domain);
  cls.patches = build_patches(grid, cls, *domain);
  return Geometry{std::move(domain), grid, std::move(cls)};
}

}  // namespace ppens
