#include "ppens/error.hpp"
#include "ppens/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ppens {
namespace {

struct Candidate {
  double dist;
  BoundaryFoot foot;
};

double normal_angle(const Vec2& n) {
  double a = std::atan2(n.y(), n.x());
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

// Nearest candidate; equidistant feet resolved by the smallest normal angle.
BoundaryFoot pick(const std::vector<Candidate>& cs, double scale) {
  const double tol = 1e-12 * std::max(1.0, scale);
  const Candidate* best = &cs.front();
  for (const auto& c : cs) {
    if (c.dist < best->dist - tol) {
      best = &c;
    } else if (std::abs(c.dist - best->dist) <= tol &&
               normal_angle(c.foot.normal) < normal_angle(best->foot.normal)) {
      best = &c;
    }
  }
  return best->foot;
}

void add_vertical_wall(std::vector<Candidate>& cs, const Vec2& q, double x, double y0, double y1,
                       double nx) {
  Vec2 f(x, std::clamp(q.y(), y0, y1));
  cs.push_back({(q - f).norm(), {f, Vec2(nx, 0.0)}});
}

void add_horizontal_wall(std::vector<Candidate>& cs, const Vec2& q, double y, double x0, double x1,
                         double ny) {
  Vec2 f(std::clamp(q.x(), x0, x1), y);
  cs.push_back({(q - f).norm(), {f, Vec2(0.0, ny)}});
}

double box_sdf(const Vec2& q, const Vec2& lo, const Vec2& hi) {
  Vec2 c = 0.5 * (lo + hi);
  Vec2 half = 0.5 * (hi - lo);
  Vec2 d = (q - c).cwiseAbs() - half;
  Vec2 pos = d.cwiseMax(0.0);
  return pos.norm() + std::min(std::max(d.x(), d.y()), 0.0);
}

}  // namespace

Rectangle::Rectangle(Vec2 lo, Vec2 hi) : lo_(lo), hi_(hi) {
  if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw GeometryError("empty rectangle");
}

double Rectangle::signed_distance(const Vec2& q) const { return box_sdf(q, lo_, hi_); }

BoundaryFoot Rectangle::closest_boundary_point(const Vec2& q) const {
  std::vector<Candidate> cs;
  add_vertical_wall(cs, q, lo_.x(), lo_.y(), hi_.y(), -1.0);
  add_vertical_wall(cs, q, hi_.x(), lo_.y(), hi_.y(), 1.0);
  add_horizontal_wall(cs, q, lo_.y(), lo_.x(), hi_.x(), -1.0);
  add_horizontal_wall(cs, q, hi_.y(), lo_.x(), hi_.x(), 1.0);
  return pick(cs, (hi_ - lo_).norm());
}

Disk::Disk(Vec2 center, double radius) : c_(center), r_(radius) {
  if (!(radius > 0.0)) throw GeometryError("disk radius must be positive");
}

double Disk::signed_distance(const Vec2& q) const { return (q - c_).norm() - r_; }

BoundaryFoot Disk::closest_boundary_point(const Vec2& q) const {
  Vec2 d = q - c_;
  double len = d.norm();
  Vec2 dir = len > 0.0 ? Vec2(d / len) : Vec2(1.0, 0.0);
  return {c_ + r_ * dir, dir};
}

RectangleMinusDisk::RectangleMinusDisk(Vec2 lo, Vec2 hi, Vec2 center, double radius,
                                       bool periodic_y)
    : lo_(lo), hi_(hi), c_(center), r_(radius), periodic_(periodic_y) {
  if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw GeometryError("empty rectangle");
  if (!(radius > 0.0)) throw GeometryError("hole radius must be positive");
  if (center.x() - radius <= lo.x() || center.x() + radius >= hi.x())
    throw GeometryError("hole must lie strictly inside the rectangle");
  if (!periodic_ && (center.y() - radius <= lo.y() || center.y() + radius >= hi.y()))
    throw GeometryError("hole must lie strictly inside the rectangle");
}

Vec2 RectangleMinusDisk::hole_offset(const Vec2& q) const {
  Vec2 d = q - c_;
  if (periodic_) {
    const double L = hi_.y() - lo_.y();
    d.y() -= L * std::round(d.y() / L);
  }
  return d;
}

double RectangleMinusDisk::signed_distance(const Vec2& q) const {
  double outer = periodic_ ? std::max(lo_.x() - q.x(), q.x() - hi_.x()) : box_sdf(q, lo_, hi_);
  double hole = r_ - hole_offset(q).norm();
  return std::max(outer, hole);
}

BoundaryFoot RectangleMinusDisk::closest_boundary_point(const Vec2& q) const {
  std::vector<Candidate> cs;
  if (periodic_) {
    // walls are infinite lines in the periodic direction
    cs.push_back({std::abs(q.x() - lo_.x()), {Vec2(lo_.x(), q.y()), Vec2(-1.0, 0.0)}});
    cs.push_back({std::abs(q.x() - hi_.x()), {Vec2(hi_.x(), q.y()), Vec2(1.0, 0.0)}});
  } else {
    add_vertical_wall(cs, q, lo_.x(), lo_.y(), hi_.y(), -1.0);
    add_vertical_wall(cs, q, hi_.x(), lo_.y(), hi_.y(), 1.0);
    add_horizontal_wall(cs, q, lo_.y(), lo_.x(), hi_.x(), -1.0);
    add_horizontal_wall(cs, q, hi_.y(), lo_.x(), hi_.x(), 1.0);
  }
  Vec2 d = hole_offset(q);
  double len = d.norm();
  Vec2 dir = len > 0.0 ? Vec2(d / len) : Vec2(1.0, 0.0);
  Vec2 center_image = q - d;
  cs.push_back({std::abs(len - r_), {center_image + r_ * dir, -dir}});
  return pick(cs, (hi_ - lo_).norm());
}

}  // namespace ppens
