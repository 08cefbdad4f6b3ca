#pragma once

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <memory>

namespace ppens {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct LsqReport {
  double residual_norm = 0.0;
  bool rank_deficient = false;
  int dropped_singular_values = 0;
};

struct LsqResult {
  Vector x;
  LsqReport report;
};

/// Minimal-norm least-squares solution of A x = rhs via sparse QR.
LsqResult lsq_solve(const SparseMatrix& a, const Vector& rhs);

/// Basis of ker D, one column per free variable of the reduced row echelon form.
/// For 0/±1 incidence-like matrices the elimination stays in exact integers.
SparseMatrix kernel_basis(const SparseMatrix& d);

/// Minimal-norm y_p with D y_p = s. Throws when s is not in the range of D.
Vector particular_solution(const SparseMatrix& d, const Vector& s);

/// Least squares for E y = t subject to D y = s, by the nullspace method:
/// y = y_p + P c with c = (E P)^+ (t - E y_p). The affine map (s, t) -> y is
/// precomputed so each solve is two dense products.
class ConstrainedLeastSquares {
 public:
  ConstrainedLeastSquares(const SparseMatrix& d, const SparseMatrix& e);

  Vector solve(const Vector& s, const Vector& t) const;

  const SparseMatrix& kernel() const { return p_; }
  int kernel_dim() const { return static_cast<int>(p_.cols()); }
  int rank_f() const { return rank_f_; }

 private:
  SparseMatrix p_;
  Matrix gs_;  // y = gs_ * s + gt_ * t
  Matrix gt_;
  int rank_f_ = 0;
};

Vector constrained_lsq(const SparseMatrix& d, const Vector& s, const SparseMatrix& e, const Vector& t);

/// Least squares for a square system whose rank deficiency is exactly one,
/// with a known right null vector (the constant field for a Neumann problem).
/// The left null vector is computed once. Each solve projects the right-hand
/// side onto the range, solves a reduced nonsingular system by sparse LU and
/// removes the null component, which gives the minimal-norm solution.
class SingularSquareSolver {
 public:
  SingularSquareSolver(const SparseMatrix& a, const Vector& right_null);

  Vector solve(const Vector& rhs, LsqReport* report = nullptr) const;

  /// Unit-norm left null vector z (z^T A = 0).
  const Vector& left_null() const { return z_; }
  const Vector& right_null() const { return r_; }

 private:
  using LU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

  int n_ = 0;
  int drop_row_ = -1;
  int drop_col_ = -1;
  std::unique_ptr<LU> lu_;
  Vector z_;
  Vector r_;
};

}  // namespace ppens
