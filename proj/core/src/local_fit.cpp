#include "ppens/local_fit.hpp"

#include "ppens/error.hpp"

namespace ppens {
namespace {

Eigen::MatrixXd affine_design(const std::vector<Vec2>& pts, const Vec2& center, double scale) {
  Eigen::MatrixXd a(pts.size(), 3);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    Vec2 d = (pts[k] - center) / scale;
    a.row(k) << 1.0, d.x(), d.y();
  }
  return a;
}

}  // namespace

double relative_min_singular(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

Eigen::MatrixXd affine_fit_weights(const std::vector<Vec2>& samples, const std::vector<Vec2>& targets,
                                   const Vec2& center, double scale) {
  Eigen::MatrixXd a = affine_design(samples, center, scale);
  Eigen::MatrixXd t = affine_design(targets, center, scale);
  Eigen::Matrix3d ata = a.transpose() * a;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(ata);
  if (ldlt.info() != Eigen::Success || relative_min_singular(a) < 1e-8)
    throw GeometryError("affine fit is rank deficient");
  return t * ldlt.solve(a.transpose());
}

double affine_conditioning(const std::vector<Vec2>& samples, const Vec2& center, double scale) {
  return relative_min_singular(affine_design(samples, center, scale));
}

Eigen::MatrixXd quadratic_design(const std::vector<Vec2>& samples, const Vec2& center, double scale) {
  Eigen::MatrixXd v(samples.size(), 6);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    Vec2 d = (samples[k] - center) / scale;
    v.row(k) << 1.0, d.x(), d.y(), d.x() * d.x(), d.x() * d.y(), d.y() * d.y();
  }
  return v;
}

Eigen::MatrixXd quadratic_interpolation_weights(const std::vector<Vec2>& samples,
                                               const std::vector<Vec2>& targets, const Vec2& center,
                                               double scale) {
  if (samples.size() != 6) throw GeometryError("quadratic interpolation needs six samples");
  Eigen::Matrix<double, 6, 6> v = quadratic_design(samples, center, scale);
  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(v);
  if (!lu.isInvertible()) throw GeometryError("quadratic interpolation is singular");
  Eigen::MatrixXd t = quadratic_design(targets, center, scale);
  return t * lu.inverse();
}

Eigen::Matrix<double, 2, 6> quadratic_gradient_weights(const std::vector<Vec2>& samples,
                                                       const Vec2& center, double scale) {
  if (samples.size() != 6) throw GeometryError("quadratic interpolation needs six samples");
  Eigen::Matrix<double, 6, 6> v = quadratic_design(samples, center, scale);
  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(v);
  if (!lu.isInvertible()) throw GeometryError("quadratic interpolation is singular");
  Eigen::Matrix<double, 6, 6> inv = lu.inverse();
  return inv.middleRows<2>(1) / scale;
}

}  // namespace ppens
