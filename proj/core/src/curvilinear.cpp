#include "ppens/curvilinear.hpp"

#include "ppens/error.hpp"

#include <cmath>

namespace ppens {

CurvilinearMap identity_map() { return scaled_map(1.0, 1.0); }

CurvilinearMap polar_map() {
  CurvilinearMap m;
  m.position = [](double r, double th) { return Vec2(r * std::cos(th), r * std::sin(th)); };
  m.jacobian = [](double r, double th) {
    Eigen::Matrix2d j;
    j << std::cos(th), -r * std::sin(th), std::sin(th), r * std::cos(th);
    return j;
  };
  return m;
}

CurvilinearMap scaled_map(double a, double b) {
  CurvilinearMap m;
  m.position = [a, b](double eta, double xi) { return Vec2(a * eta, b * xi); };
  m.jacobian = [a, b](double, double) {
    Eigen::Matrix2d j;
    j << a, 0.0, 0.0, b;
    return j;
  };
  return m;
}

std::pair<double, double> metric_factors(const CurvilinearMap& map, double eta, double xi) {
  Eigen::Matrix2d j = map.jacobian(eta, xi);
  const double s_eta = j.col(0).norm();
  const double s_xi = j.col(1).norm();
  if (s_eta < 1e-14 || s_xi < 1e-14)
    throw Error("curvilinear", "degenerate metric at (" + std::to_string(eta) + ", " +
                                   std::to_string(xi) + ")");
  return {s_eta, s_xi};
}

double orthogonality_defect(const CurvilinearMap& map, double eta, double xi) {
  Eigen::Matrix2d j = map.jacobian(eta, xi);
  return std::abs(j.col(0).dot(j.col(1)));
}

double divergence_curvilinear(const CurvilinearMap& map, const CoordinateField& u_eta,
                              const CoordinateField& u_xi, double eta, double xi, double step) {
  if (!(step > 0.0)) throw Error("curvilinear", "difference step must be positive");
  auto flux_eta = [&](double e) { return metric_factors(map, e, xi).second * u_eta(e, xi); };
  auto flux_xi = [&](double x) { return metric_factors(map, eta, x).first * u_xi(eta, x); };
  auto [s_eta, s_xi] = metric_factors(map, eta, xi);
  const double d_eta = (flux_eta(eta + step) - flux_eta(eta - step)) / (2.0 * step);
  const double d_xi = (flux_xi(xi + step) - flux_xi(xi - step)) / (2.0 * step);
  return (d_eta + d_xi) / (s_eta * s_xi);
}

double robin_bc_residual(const CurvilinearMap& map, double eta_b, const CoordinateField& u_eta,
                         const CoordinateField& g_xi, double xi, double step) {
  if (!(step > 0.0)) throw Error("curvilinear", "difference step must be positive");
  auto flux_eta = [&](double e) { return metric_factors(map, e, xi).second * u_eta(e, xi); };
  auto flux_xi = [&](double x) { return metric_factors(map, eta_b, x).first * g_xi(eta_b, x); };
  const double d_eta = (flux_eta(eta_b + step) - flux_eta(eta_b - step)) / (2.0 * step);
  const double d_xi = (flux_xi(xi + step) - flux_xi(xi - step)) / (2.0 * step);
  return d_eta + d_xi;
}

}  // namespace ppens
