#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ppens {

using Vec2 = Eigen::Vector2d;

/// Closest point on the boundary together with the unit normal pointing out of the domain.
struct BoundaryFoot {
  Vec2 point;
  Vec2 normal;
};

/// Implicit domain. Signed distance is negative inside.
class DomainShape {
 public:
  virtual ~DomainShape() = default;

  virtual double signed_distance(const Vec2& q) const = 0;
  virtual BoundaryFoot closest_boundary_point(const Vec2& q) const = 0;
  bool inside(const Vec2& q) const { return signed_distance(q) < 0.0; }

  virtual Vec2 box_lower() const = 0;
  virtual Vec2 box_upper() const = 0;
  virtual bool periodic_y() const { return false; }
  virtual std::string name() const = 0;
};

class Rectangle : public DomainShape {
 public:
  Rectangle(Vec2 lo, Vec2 hi);
  double signed_distance(const Vec2& q) const override;
  BoundaryFoot closest_boundary_point(const Vec2& q) const override;
  Vec2 box_lower() const override { return lo_; }
  Vec2 box_upper() const override { return hi_; }
  std::string name() const override { return "rectangle"; }

 private:
  Vec2 lo_, hi_;
};

class Disk : public DomainShape {
 public:
  Disk(Vec2 center, double radius);
  double signed_distance(const Vec2& q) const override;
  BoundaryFoot closest_boundary_point(const Vec2& q) const override;
  Vec2 box_lower() const override { return c_ - Vec2(r_, r_); }
  Vec2 box_upper() const override { return c_ + Vec2(r_, r_); }
  std::string name() const override { return "disk"; }

 private:
  Vec2 c_;
  double r_;
};

/// Rectangle with a circular hole. With periodic_y the top and bottom sides are
/// identified and are not part of the boundary.
class RectangleMinusDisk : public DomainShape {
 public:
  RectangleMinusDisk(Vec2 lo, Vec2 hi, Vec2 center, double radius, bool periodic_y);
  double signed_distance(const Vec2& q) const override;
  BoundaryFoot closest_boundary_point(const Vec2& q) const override;
  Vec2 box_lower() const override { return lo_; }
  Vec2 box_upper() const override { return hi_; }
  bool periodic_y() const override { return periodic_; }
  std::string name() const override { return "rectangle-minus-disk"; }

 private:
  Vec2 hole_offset(const Vec2& q) const;

  Vec2 lo_, hi_, c_;
  double r_;
  bool periodic_;
};

/// Uniform staggered layout. Pressure node (i,j) sits at origin + (i h, j h),
/// u-edge (i,j) joins nodes (i,j)-(i+1,j), v-edge (i,j) joins (i,j)-(i,j+1).
/// Node indices extend `halo` layers past the box so ghost values outside the
/// walls have storage. In a periodic direction j wraps modulo ny.
class StaggeredGrid {
 public:
  StaggeredGrid(int nx, int ny, double h, Vec2 origin, bool periodic_y, int halo = 2);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  const Vec2& origin() const { return origin_; }
  bool periodic_y() const { return periodic_; }
  int halo() const { return halo_; }

  int i_min() const { return -halo_; }
  int i_max() const { return nx_ + halo_; }
  int j_min() const { return periodic_ ? 0 : -halo_; }
  int j_max() const { return periodic_ ? ny_ - 1 : ny_ + halo_; }

  /// Pressure nodes inside the box (boundary included).
  int box_nodes_x() const { return nx_ + 1; }
  int box_nodes_y() const { return periodic_ ? ny_ : ny_ + 1; }

  int num_nodes() const { return sx_ * sy_; }
  int num_edges() const { return 2 * num_nodes(); }

  int wrap_j(int j) const;
  /// -1 when (i,j) falls outside the stored range.
  int node_id(int i, int j) const;
  std::array<int, 2> node_ij(int id) const;

  /// Edge ids: component 0 = u, 1 = v; indexed by the lower-left node.
  int edge_id(int comp, int i, int j) const;
  int edge_comp(int e) const { return e / num_nodes(); }
  std::array<int, 2> edge_ij(int e) const { return node_ij(e % num_nodes()); }
  std::array<int, 2> edge_nodes(int e) const;

  Vec2 node_pos(int i, int j) const;
  Vec2 node_pos(int id) const;
  Vec2 edge_pos(int e) const;

  /// b - a, using the nearest periodic image in y.
  Vec2 displacement(const Vec2& a, const Vec2& b) const;
  double period_y() const { return ny_ * h_; }

 private:
  int nx_, ny_;
  double h_;
  Vec2 origin_;
  bool periodic_;
  int halo_;
  int sx_, sy_;
};

/// h = (x extent)/n; the y extent must be a whole number of cells.
StaggeredGrid build_grid(const DomainShape& domain, int n, bool periodic_y);

enum class NodeKind : std::uint8_t { Outside, Inner, Ghost, Extended };

struct Patch {
  int component = 0;
  int owner = -1;                    ///< boundary point the patch was built for
  std::array<int, 6> edges{};        ///< grid edge ids, center first
  std::array<int, 3> targets{};      ///< boundary point indices
  Eigen::Matrix<double, 3, 6> weights;  ///< quadratic interpolant at the targets
};

struct DomainClassification {
  std::vector<NodeKind> node_kind;      ///< per grid node
  std::vector<std::uint8_t> on_closure;  ///< node lies in the closed domain
  std::vector<int> inner_pressure;      ///< node ids, count N_a
  std::vector<int> ghost_pressure;      ///< node ids, count N_b
  std::vector<int> pressure_index;      ///< node id -> unknown (inner first), or -1
  std::vector<BoundaryFoot> boundary_points;  ///< one per ghost node
  std::vector<int> inner_edges;
  std::vector<int> boundary_edges;
  std::vector<int> edge_slot;           ///< edge id -> velocity slot (inner first), or -1
  std::vector<int> divergence_nodes;
  std::vector<Patch> patches;           ///< u-patch then v-patch for each boundary point

  int n_inner() const { return static_cast<int>(inner_pressure.size()); }
  int n_ghost() const { return static_cast<int>(ghost_pressure.size()); }
  int n_pressure() const { return n_inner() + n_ghost(); }
  int n_inner_edges() const { return static_cast<int>(inner_edges.size()); }
  int n_boundary_edges() const { return static_cast<int>(boundary_edges.size()); }
  int n_velocities() const { return n_inner_edges() + n_boundary_edges(); }
  int n_divergence() const { return static_cast<int>(divergence_nodes.size()); }

  bool in_cu(int edge) const { return edge >= 0 && edge_slot[edge] >= 0; }
  bool is_boundary_edge(int edge) const { return in_cu(edge) && edge_slot[edge] >= n_inner_edges(); }
};

DomainClassification classify(const StaggeredGrid& grid, const DomainShape& domain);

std::vector<Patch> build_patches(const StaggeredGrid& grid, const DomainClassification& cls,
                                 const DomainShape& domain);

/// Grid, shape and classification with patches, built together.
struct Geometry {
  std::shared_ptr<const DomainShape> domain;
  StaggeredGrid grid;
  DomainClassification cls;
};

Geometry make_geometry(std::shared_ptr<const DomainShape> domain, int n);

}  // namespace ppens
