#pragma once

#include "ppens/geometry.hpp"

#include <Eigen/Dense>

#include <functional>
#include <utility>

namespace ppens {

/// Orthogonal coordinates (eta, xi) -> (x, y). jacobian columns are
/// (x_eta, y_eta) and (x_xi, y_xi).
struct CurvilinearMap {
  std::function<Vec2(double eta, double xi)> position;
  std::function<Eigen::Matrix2d(double eta, double xi)> jacobian;
};

CurvilinearMap identity_map();
/// x = eta cos(xi), y = eta sin(xi).
CurvilinearMap polar_map();
/// x = a eta, y = b xi.
CurvilinearMap scaled_map(double a, double b);

/// (s_eta, s_xi), the lengths of the jacobian columns.
std::pair<double, double> metric_factors(const CurvilinearMap& map, double eta, double xi);

/// |x_eta x_xi + y_eta y_xi| at a point.
double orthogonality_defect(const CurvilinearMap& map, double eta, double xi);

using CoordinateField = std::function<double(double eta, double xi)>;

/// (d_eta(s_xi u_eta) + d_xi(s_eta u_xi)) / (s_eta s_xi) by centered differences.
double divergence_curvilinear(const CurvilinearMap& map, const CoordinateField& u_eta,
                              const CoordinateField& u_xi, double eta, double xi, double step);

/// d_eta(s_xi u_eta) + d_xi(s_eta g_xi) on the boundary eta = eta_b. Zero
/// when the normal velocity is consistent with a divergence-free flow.
double robin_bc_residual(const CurvilinearMap& map, double eta_b, const CoordinateField& u_eta,
                         const CoordinateField& g_xi, double xi, double step);

}  // namespace ppens
