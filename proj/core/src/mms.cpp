#include "ppens/mms.hpp"

#include "ppens/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ppens {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vec2 ManufacturedCase::force(const Vec2& x, double t) const {
  return velocity_t(x, t) + pressure_gradient(x, t) - mu * velocity_laplacian(x, t);
}

FlowProblem ManufacturedCase::problem() const {
  FlowProblem fp;
  auto self = std::make_shared<const ManufacturedCase>(*this);
  fp.force = [self](const Vec2& x, double t) { return self->force(x, t); };
  fp.g = velocity;
  fp.g_t = velocity_t;
  fp.initial_velocity = velocity;
  return fp;
}

ManufacturedCase square_case(double mu) {
  ManufacturedCase mc;
  mc.name = "square";
  mc.domain = std::make_shared<Rectangle>(Vec2(0, 0), Vec2(1, 1));
  mc.mu = mu;
  auto shape = [](const Vec2& x) {
    const double sx = std::sin(kPi * x.x()), sy = std::sin(kPi * x.y());
    return Vec2(kPi * std::sin(2 * kPi * x.y()) * sx * sx, -kPi * std::sin(2 * kPi * x.x()) * sy * sy);
  };
  mc.velocity = [shape](const Vec2& x, double t) { return Vec2(std::cos(t) * shape(x)); };
  mc.velocity_t = [shape](const Vec2& x, double t) { return Vec2(-std::sin(t) * shape(x)); };
  mc.velocity_laplacian = [](const Vec2& x, double t) {
    const double c = 2 * kPi * kPi * kPi * std::cos(t);
    return Vec2(c * std::sin(2 * kPi * x.y()) * (2 * std::cos(2 * kPi * x.x()) - 1),
                -c * std::sin(2 * kPi * x.x()) * (2 * std::cos(2 * kPi * x.y()) - 1));
  };
  mc.velocity_gradient = [](const Vec2& x, double t) {
    const double c = kPi * kPi * std::cos(t);
    const double sx = std::sin(kPi * x.x()), sy = std::sin(kPi * x.y());
    const double s2x = std::sin(2 * kPi * x.x()), s2y = std::sin(2 * kPi * x.y());
    Eigen::Matrix2d m;
    m << c * s2x * s2y, 2 * c * std::cos(2 * kPi * x.y()) * sx * sx,
        -2 * c * std::cos(2 * kPi * x.x()) * sy * sy, -c * s2x * s2y;
    return m;
  };
  mc.pressure = [](const Vec2& x, double t) {
    return -std::cos(t) * std::cos(kPi * x.x()) * std::sin(kPi * x.y());
  };
  mc.pressure_gradient = [](const Vec2& x, double t) {
    const double c = kPi * std::cos(t);
    return Vec2(c * std::sin(kPi * x.x()) * std::sin(kPi * x.y()),
                -c * std::cos(kPi * x.x()) * std::cos(kPi * x.y()));
  };
  return mc;
}

namespace {

// Spatial sums over the periodic images of r^2 exp(-2r) centred at (3/4, 1).
struct StreamSums {
  double gx = 0, gy = 0;        // sum G dx, sum G dy         (G = F'/r)
  double dxx = 0, dxy = 0, dyy = 0;  // sums of G' d_a d_b / r + G delta_ab
  double hx = 0, hy = 0;        // sum H' dx / r, sum H' dy / r (H = Lap psi0)
};

StreamSums stream_sums(const Vec2& x, int k_max) {
  StreamSums s;
  const double dx = x.x() - 0.75;
  for (int k = -k_max; k <= k_max; ++k) {
    const double dy = x.y() + 2.0 * k - 1.0;
    const double r2 = dx * dx + dy * dy;
    if (r2 > 625.0) continue;  // r > 25: r^2 exp(-2r) < 1e-18
    const double r = std::sqrt(r2);
    const double e = std::exp(-2.0 * r);
    const double g = 2.0 * (1.0 - r) * e;
    s.gx += g * dx;
    s.gy += g * dy;
    if (r < 1e-300) {
      s.dxx += g;
      s.dyy += g;
      continue;
    }
    const double gp_r = (-6.0 + 4.0 * r) * e / r;
    s.dxx += gp_r * dx * dx + g;
    s.dxy += gp_r * dx * dy;
    s.dyy += gp_r * dy * dy + g;
    const double hp_r = (-18.0 + 28.0 * r - 8.0 * r2) * e / r;
    s.hx += hp_r * dx;
    s.hy += hp_r * dy;
  }
  return s;
}

}  // namespace

ManufacturedCase irregular_case(double mu, int k_max) {
  if (k_max < 8) throw ConfigError("mms", "periodic truncation k_max must be at least 8");
  ManufacturedCase mc;
  mc.name = "irregular";
  mc.domain = std::make_shared<RectangleMinusDisk>(Vec2(0, 0), Vec2(2, 2), Vec2(0.75, 1.0), 0.25, true);
  mc.mu = mu;
  // u = psi_y, v = -psi_x
  mc.velocity = [k_max](const Vec2& x, double t) {
    StreamSums s = stream_sums(x, k_max);
    return Vec2(std::cos(t) * s.gy, -std::cos(t) * s.gx);
  };
  mc.velocity_t = [k_max](const Vec2& x, double t) {
    StreamSums s = stream_sums(x, k_max);
    return Vec2(-std::sin(t) * s.gy, std::sin(t) * s.gx);
  };
  mc.velocity_laplacian = [k_max](const Vec2& x, double t) {
    StreamSums s = stream_sums(x, k_max);
    return Vec2(std::cos(t) * s.hy, -std::cos(t) * s.hx);
  };
  mc.velocity_gradient = [k_max](const Vec2& x, double t) {
    StreamSums s = stream_sums(x, k_max);
    const double c = std::cos(t);
    Eigen::Matrix2d m;
    m << c * s.dxy, c * s.dyy, -c * s.dxx, -c * s.dxy;
    return m;
  };
  mc.pressure = [](const Vec2& x, double t) {
    return std::sin(t) * std::cos(kPi * x.x()) * std::sin(kPi * x.y());
  };
  mc.pressure_gradient = [](const Vec2& x, double t) {
    const double c = kPi * std::sin(t);
    return Vec2(-c * std::sin(kPi * x.x()) * std::sin(kPi * x.y()),
                c * std::cos(kPi * x.x()) * std::cos(kPi * x.y()));
  };
  return mc;
}

double linf_error(const Geometry& geo, const FlowState& state, const ManufacturedCase& mc,
                  Channel channel, double t, bool gauge) {
  const auto& cls = geo.cls;
  const auto& g = geo.grid;
  double err = 0.0;
  if (channel == Channel::P) {
    const int na = cls.n_inner();
    Vector exact(na), num = state.p.head(na);
    for (int k = 0; k < na; ++k) exact(k) = mc.pressure(g.node_pos(cls.inner_pressure[k]), t);
    if (gauge) {
      exact.array() -= exact.mean();
      num.array() -= num.mean();
    }
    return (num - exact).lpNorm<Eigen::Infinity>();
  }
  const int comp = channel == Channel::U ? 0 : 1;
  for (int k = 0; k < cls.n_inner_edges(); ++k) {
    int e = cls.inner_edges[k];
    if (g.edge_comp(e) != comp) continue;
    double exact = mc.velocity(g.edge_pos(e), t)(comp);
    err = std::max(err, std::abs(state.vel(k) - exact));
  }
  return err;
}

std::pair<double, double> derivative_errors(const Geometry& geo, const Vector& vel,
                                            const ManufacturedCase& mc, double t) {
  const auto& cls = geo.cls;
  const auto& g = geo.grid;
  const double h = g.h();
  auto inner_slot = [&](int e) {
    return (cls.in_cu(e) && !cls.is_boundary_edge(e)) ? cls.edge_slot[e] : -1;
  };
  double ex = 0.0, ey = 0.0;
  for (int e : cls.inner_edges) {
    if (g.edge_comp(e) != 0) continue;
    auto [i, j] = g.edge_ij(e);
    // u_x at node (i, j) from u-edges (i-1, j) and (i, j)
    int w = inner_slot(g.edge_id(0, i - 1, j));
    Vec2 node = g.node_pos(i, j);
    if (w >= 0 && mc.domain->inside(node)) {
      double num = (vel(cls.edge_slot[e]) - vel(w)) / h;
      ex = std::max(ex, std::abs(num - mc.velocity_gradient(node, t)(0, 0)));
    }
    // u_y at the cell centre above the edge
    int n = inner_slot(g.edge_id(0, i, j + 1));
    Vec2 cell = g.edge_pos(e) + Vec2(0.0, 0.5 * h);
    if (n >= 0 && mc.domain->inside(cell)) {
      double num = (vel(n) - vel(cls.edge_slot[e])) / h;
      ey = std::max(ey, std::abs(num - mc.velocity_gradient(cell, t)(0, 1)));
    }
  }
  return {ex, ey};
}

void perturbed_pressure_bc(PoissonRhs& rhs, std::uint64_t seed, long step) {
  const auto s = static_cast<std::uint64_t>(step);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index j = 0; j < rhs.b.size(); ++j) rhs.b(j) += dist(rng);
}

RhsHook make_perturbation(std::uint64_t seed) {
  return [seed](PoissonRhs& rhs, long step) { perturbed_pressure_bc(rhs, seed, step); };
}

ErrorSet measure_errors(const Geometry& geo, const FlowState& state, const ManufacturedCase& mc) {
  ErrorSet e;
  e.u = linf_error(geo, state, mc, Channel::U, state.t);
  e.v = linf_error(geo, state, mc, Channel::V, state.t);
  e.p = linf_error(geo, state, mc, Channel::P, state.t);
  std::tie(e.ux, e.uy) = derivative_errors(geo, state.vel, mc, state.t);
  for (int id : geo.cls.inner_pressure)
    e.div = std::max(e.div, std::abs(node_divergence(geo, state.vel, id)));
  return e;
}

std::pair<long, double> steps_for(double t_final, double mu, double h, double cfl_c) {
  if (!(t_final > 0.0)) throw ConfigError("mms", "final time must be positive");
  const double dt_max = stable_dt(mu, h, cfl_c);
  long steps = static_cast<long>(std::ceil(t_final / dt_max - 1e-9));
  steps = std::max(steps, 1L);
  return {steps, t_final / static_cast<double>(steps)};
}

ConvergenceReport convergence_study(const ManufacturedCase& mc, const std::vector<int>& sizes,
                                    double t_final, SolverConfig cfg) {
  if (sizes.size() < 2) throw ConfigError("mms", "a convergence study needs at least two sizes");
  for (std::size_t k = 1; k < sizes.size(); ++k)
    if (sizes[k] <= sizes[k - 1]) throw ConfigError("mms", "sizes must be strictly increasing");
  cfg.mu = mc.mu;
  ConvergenceReport rep;
  for (int n : sizes) {
    Geometry geo = make_geometry(mc.domain, n);
    ConvergenceRow row;
    row.n = n;
    row.h = geo.grid.h();
    std::tie(row.steps, row.dt) = steps_for(t_final, cfg.mu, row.h, cfg.cfl_c);
    SolverConfig c = cfg;
    c.dt = row.dt;
    try {
      Solver solver(geo, mc.problem(), c);
      auto res = solver.run(solver.initial_state(0.0), row.steps);
      row.err = measure_errors(geo, res.state, mc);
    } catch (const InstabilityError&) {
      row.diverged = true;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.err = ErrorSet{nan, nan, nan, nan, nan, nan};
    }
    rep.rows.push_back(row);
  }
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    const auto& a = rep.rows[k - 1];
    const auto& b = rep.rows[k];
    const double lh = std::log(a.h / b.h);
    auto sl = [&](double ea, double eb) { return std::log(ea / eb) / lh; };
    rep.slopes.push_back({sl(a.err.u, b.err.u), sl(a.err.v, b.err.v), sl(a.err.p, b.err.p),
                          sl(a.err.ux, b.err.ux), sl(a.err.uy, b.err.uy), sl(a.err.div, b.err.div)});
  }
  return rep;
}

}  // namespace ppens
