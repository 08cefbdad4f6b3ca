#pragma once

#include "ppens/geometry.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ppens {

/// Weights W with W * values = affine least-squares fit evaluated at the targets.
/// Coordinates are taken relative to `center` and divided by `scale`.
Eigen::MatrixXd affine_fit_weights(const std::vector<Vec2>& samples, const std::vector<Vec2>& targets,
                                   const Vec2& center, double scale);

/// Ratio of smallest to largest singular value of the affine design matrix.
double affine_conditioning(const std::vector<Vec2>& samples, const Vec2& center, double scale);

/// Design matrix rows [1, x, y, x^2, xy, y^2] in scaled coordinates.
Eigen::MatrixXd quadratic_design(const std::vector<Vec2>& samples, const Vec2& center, double scale);

/// Smallest singular value of the design matrix divided by its largest.
double relative_min_singular(const Eigen::MatrixXd& m);

/// Weights W with W * values = quadratic interpolant through exactly six
/// samples, evaluated at the targets.
Eigen::MatrixXd quadratic_interpolation_weights(const std::vector<Vec2>& samples,
                                               const std::vector<Vec2>& targets, const Vec2& center,
                                               double scale);

/// 2x6 weights giving the gradient at `center` of the quadratic interpolant
/// through exactly six samples. Units are 1/scale.
Eigen::Matrix<double, 2, 6> quadratic_gradient_weights(const std::vector<Vec2>& samples,
                                                       const Vec2& center, double scale);

}  // namespace ppens
