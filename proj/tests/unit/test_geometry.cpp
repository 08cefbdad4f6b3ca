#include "support.hpp"

#include "ppens/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace ppens;
using ppens::test::hole_domain;
using ppens::test::unit_square;

TEST_CASE("grid layout on the unit square") {
  auto g = build_grid(*unit_square(), 40, false);
  CHECK(g.h() == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(g.box_nodes_x() == 41);
  CHECK(g.box_nodes_y() == 41);
  CHECK((g.edge_pos(g.edge_id(0, 3, 5)) - Vec2(3.5 * g.h(), 5 * g.h())).norm() < 1e-15);
  CHECK((g.edge_pos(g.edge_id(1, 3, 5)) - Vec2(3 * g.h(), 5.5 * g.h())).norm() < 1e-15);
}

TEST_CASE("periodic grid wraps j") {
  auto g = build_grid(*hole_domain(), 80, true);
  CHECK(g.h() == doctest::Approx(0.025));
  CHECK(g.ny() == 80);
  CHECK(g.node_id(7, 80) == g.node_id(7, 0));
  CHECK(g.node_id(7, -1) == g.node_id(7, 79));
  CHECK(g.displacement(Vec2(0, 0.01), Vec2(0, 1.99)).y() == doctest::Approx(-0.02));
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(build_grid(*unit_square(), 3, false), GeometryError);
  CHECK_THROWS_AS(build_grid(*unit_square(), 8, true), GeometryError);
  CHECK_THROWS_AS(build_grid(*hole_domain(), 8, false), GeometryError);
}

TEST_CASE("shapes: normals are unit and feet lie on the boundary") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.2, 2.2);
  std::vector<std::shared_ptr<const DomainShape>> shapes{
      std::make_shared<Rectangle>(Vec2(0, 0), Vec2(2, 1)),
      std::make_shared<Disk>(Vec2(1, 1), 0.7),
      hole_domain(),
  };
  for (const auto& s : shapes) {
    for (int k = 0; k < 500; ++k) {
      Vec2 q(U(rng), U(rng));
      auto foot = s->closest_boundary_point(q);
      CHECK(std::abs(foot.normal.norm() - 1.0) < 1e-12);
      CHECK(std::abs(s->signed_distance(foot.point)) < 1e-12);
      CHECK(s->inside(q) == (s->signed_distance(q) < 0.0));
    }
  }
}

TEST_CASE("conforming square: ghosts are the wall ring") {
  auto geo = make_geometry(unit_square(), 8);
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  CHECK(cls.n_inner() == 49);
  CHECK(cls.n_ghost() == 28);  // 4 walls of 7 nodes, corners excluded
  CHECK(cls.boundary_points.size() == cls.ghost_pressure.size());
  for (int id : cls.ghost_pressure) {
    auto [i, j] = g.node_ij(id);
    CHECK(((i == 0 || i == 8) != (j == 0 || j == 8)));
  }
  for (int e : cls.boundary_edges) {
    Vec2 x = g.edge_pos(e);
    double wall_dist = std::min({std::abs(x.x()), std::abs(x.y()), std::abs(1 - x.x()), std::abs(1 - x.y())});
    CHECK(wall_dist <= 0.5 * g.h() + 1e-12);
  }
  // the wall nodes again: each touches the wall edges on either side
  CHECK(cls.n_divergence() == 28);
}

TEST_CASE("classification partitions nodes and ghosts are minimal") {
  for (auto [dom, n] : {std::pair{unit_square(), 16}, std::pair{hole_domain(), 32}}) {
    auto geo = make_geometry(dom, n);
    const auto& g = geo.grid;
    const auto& cls = geo.cls;
    std::set<int> inner(cls.inner_pressure.begin(), cls.inner_pressure.end());
    for (int id : cls.ghost_pressure) CHECK(inner.count(id) == 0);
    for (int id : cls.inner_pressure) CHECK(dom->signed_distance(g.node_pos(id)) < 0.0);
    for (int id : cls.ghost_pressure) {
      CHECK(dom->signed_distance(g.node_pos(id)) >= -1e-12);
      auto [i, j] = g.node_ij(id);
      bool serves = false;
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        serves = serves || inner.count(g.node_id(i + di, j + dj)) > 0;
      CHECK(serves);
    }
    for (int id : cls.inner_pressure) {
      auto [i, j] = g.node_ij(id);
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        CHECK(cls.pressure_index[g.node_id(i + di, j + dj)] >= 0);
    }
  }
}

TEST_CASE("hole domain: closed ghost ring and N_e = N_b") {
  auto geo = make_geometry(hole_domain(), 80);
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  CHECK(cls.boundary_points.size() == cls.ghost_pressure.size());
  std::vector<int> ring;
  for (int k = 0; k < cls.n_ghost(); ++k)
    if ((cls.boundary_points[k].point - Vec2(0.75, 1.0)).norm() < 0.25 + 1e-12) ring.push_back(k);
  CHECK(ring.size() > 20);
  // every ring ghost has another ring ghost among its 8 neighbours
  std::set<int> ids;
  for (int k : ring) ids.insert(cls.ghost_pressure[k]);
  for (int k : ring) {
    auto [i, j] = g.node_ij(cls.ghost_pressure[k]);
    int nb = 0;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj)
        if ((di || dj) && ids.count(g.node_id(i + di, j + dj))) ++nb;
    CHECK(nb >= 2);
  }
}

TEST_CASE("divergence nodes touch a boundary edge within sqrt(2) h of the boundary") {
  auto geo = make_geometry(hole_domain(), 32);
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  CHECK(cls.n_divergence() > 0);
  for (int id : cls.divergence_nodes) {
    auto [i, j] = g.node_ij(id);
    std::array<int, 4> es{g.edge_id(0, i, j), g.edge_id(0, i - 1, j), g.edge_id(1, i, j),
                          g.edge_id(1, i, j - 1)};
    CHECK(std::any_of(es.begin(), es.end(), [&](int e) { return cls.is_boundary_edge(e); }));
    CHECK(std::abs(geo.domain->signed_distance(g.node_pos(id))) <= std::sqrt(2.0) * g.h() + 1e-12);
  }
}

TEST_CASE("too thin a disk is rejected") {
  Disk d(Vec2(0, 0), 0.24);
  StaggeredGrid g(10, 10, 0.1, Vec2(-0.5, -0.5), false);
  CHECK_THROWS_AS(classify(g, d), GeometryError);
  Disk ok(Vec2(0, 0), 0.4);
  CHECK_NOTHROW(classify(g, ok));
}

TEST_CASE("classification is invariant under translation by whole cells") {
  auto a = std::make_shared<RectangleMinusDisk>(Vec2(0, 0), Vec2(2, 2), Vec2(0.75, 1.0), 0.25, true);
  auto b = std::make_shared<RectangleMinusDisk>(Vec2(0.5, 0.25), Vec2(2.5, 2.25), Vec2(1.25, 1.25),
                                                0.25, true);
  auto ga = make_geometry(a, 16);
  auto gb = make_geometry(b, 16);
  CHECK(ga.cls.n_inner() == gb.cls.n_inner());
  CHECK(ga.cls.n_ghost() == gb.cls.n_ghost());
  CHECK(ga.cls.n_boundary_edges() == gb.cls.n_boundary_edges());
  CHECK(ga.cls.n_divergence() == gb.cls.n_divergence());
  for (int k = 0; k < ga.cls.n_ghost(); ++k) {
    Vec2 d = gb.cls.boundary_points[k].point - ga.cls.boundary_points[k].point;
    CHECK((d - Vec2(0.5, 0.25)).norm() < 1e-12);
  }
}

TEST_CASE("patches: structure, coverage and exactness") {
  auto geo = make_geometry(hole_domain(), 16);
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  CHECK(cls.patches.size() == 2 * cls.boundary_points.size());

  std::set<int> covered;
  for (const auto& p : cls.patches) {
    bool has_inner = false, has_boundary = false;
    for (int e : p.edges) {
      CHECK(cls.in_cu(e));
      CHECK(g.edge_comp(e) == p.component);
      has_inner = has_inner || !cls.is_boundary_edge(e);
      has_boundary = has_boundary || cls.is_boundary_edge(e);
      covered.insert(e);
    }
    CHECK(has_inner);
    CHECK(has_boundary);
  }
  for (int e : cls.boundary_edges) CHECK(covered.count(e) == 1);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> N01;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = N01(rng), b = N01(rng), c = N01(rng);
    auto f = [&](const Vec2& x) { return a + b * x.x() + c * x.y(); };
    for (const auto& p : cls.patches) {
      Eigen::Matrix<double, 6, 1> vals;
      // sample the same image of the plane the patch sees around its centre
      const Vec2 c0 = g.edge_pos(p.edges[0]);
      for (int k = 0; k < 6; ++k) vals(k) = f(c0 + g.displacement(c0, g.edge_pos(p.edges[k])));
      Eigen::Vector3d ext = p.weights * vals;
      for (int t = 0; t < 3; ++t) {
        Vec2 xt = c0 + g.displacement(c0, cls.boundary_points[p.targets[t]].point);
        worst = std::max(worst, std::abs(ext(t) - f(xt)));
      }
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("patch targets are nearest boundary points") {
  auto geo = make_geometry(hole_domain(), 32);
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  for (int j = 0; j < cls.n_ghost(); ++j) {
    const auto& p = cls.patches[2 * j];
    CHECK(p.owner == j);
    CHECK(std::find(p.targets.begin(), p.targets.end(), j) != p.targets.end());
    double far = 0.0;
    for (int t : p.targets) far = std::max(far, g.displacement(cls.boundary_points[j].point,
                                                               cls.boundary_points[t].point).norm());
    CHECK(far <= 2.0 * g.h());
  }
}

TEST_CASE("axis-aligned wall patch reduces to normal extrapolation") {
  auto geo = make_geometry(unit_square(), 16);
  const auto& g = geo.grid;
  const auto& cls = geo.cls;
  // a field varying only along the wall normal is reproduced exactly by any patch
  for (const auto& p : cls.patches) {
    const Vec2 xb = cls.boundary_points[p.owner].point;
    const Vec2 n = cls.boundary_points[p.owner].normal;
    Eigen::Matrix<double, 6, 1> vals;
    for (int k = 0; k < 6; ++k) {
      double s = n.dot(g.edge_pos(p.edges[k]) - xb);
      vals(k) = 1.0 + 2.0 * s - 3.0 * s * s;
    }
    Eigen::Vector3d ext = p.weights * vals;
    for (int t = 0; t < 3; ++t) {
      double s = n.dot(cls.boundary_points[p.targets[t]].point - xb);
      if (std::abs(cls.boundary_points[p.targets[t]].normal.dot(n) - 1.0) > 1e-12) continue;
      CHECK(ext(t) == doctest::Approx(1.0 + 2.0 * s - 3.0 * s * s).epsilon(1e-10));
    }
  }
}
