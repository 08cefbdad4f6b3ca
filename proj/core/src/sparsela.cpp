#include "ppens/sparsela.hpp"

#include "ppens/error.hpp"

#include <Eigen/SparseQR>

#include <algorithm>
#include <cmath>
#include <vector>

namespace ppens {

LsqResult lsq_solve(const SparseMatrix& a, const Vector& rhs) {
  if (a.rows() != rhs.size())
    throw LinearAlgebraError("lsq_solve: matrix has " + std::to_string(a.rows()) +
                             " rows but rhs has " + std::to_string(rhs.size()));
  const int n = static_cast<int>(a.cols());
  LsqResult out;
  if (n == 0) {
    out.x = Vector();
    out.report.residual_norm = rhs.norm();
    return out;
  }
  SparseMatrix ac = a;
  ac.makeCompressed();
  double max_col = 0.0;
  for (int c = 0; c < n; ++c) max_col = std::max(max_col, ac.col(c).norm());

  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(1e-12 * std::max(max_col, 1e-300));
  qr.compute(ac);
  if (qr.info() != Eigen::Success) throw LinearAlgebraError("sparse QR factorization failed");

  const int r = static_cast<int>(qr.rank());
  Vector qtb = qr.matrixQ().transpose() * rhs;
  SparseMatrix rmat = qr.matrixR();
  SparseMatrix r11 = rmat.topLeftCorner(r, r);
  Vector z = Vector::Zero(n);
  if (r > 0) z.head(r) = r11.triangularView<Eigen::Upper>().solve(Vector(qtb.head(r)));
  Vector x = qr.colsPermutation() * z;

  if (r < n) {
    // Remove the nullspace component to reach the minimal-norm solution.
    Matrix npm = Matrix::Zero(n, n - r);
    if (r > 0) {
      Matrix r12 = Matrix(rmat.topRightCorner(r, n - r));
      npm.topRows(r) = -Matrix(r11.triangularView<Eigen::Upper>().solve(r12));
    }
    npm.bottomRows(n - r).setIdentity();
    Matrix nb = qr.colsPermutation() * npm;
    Eigen::HouseholderQR<Matrix> hq(nb);
    Matrix q = hq.householderQ() * Matrix::Identity(n, n - r);
    x -= q * (q.transpose() * x);
    out.report.rank_deficient = true;
    out.report.dropped_singular_values = n - r;
  }
  out.report.residual_norm = (a * x - rhs).norm();
  out.x = std::move(x);
  return out;
}

SparseMatrix kernel_basis(const SparseMatrix& d) {
  const int rows = static_cast<int>(d.rows());
  const int cols = static_cast<int>(d.cols());
  Matrix m = Matrix(d);
  const double tol = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
  std::vector<int> pivot_col;
  std::vector<char> is_pivot(cols, 0);
  int row = 0;
  for (int c = 0; c < cols && row < rows; ++c) {
    int p = row;
    for (int k = row + 1; k < rows; ++k)
      if (std::abs(m(k, c)) > std::abs(m(p, c))) p = k;
    if (std::abs(m(p, c)) <= tol) continue;
    m.row(p).swap(m.row(row));
    m.row(row) /= m(row, c);
    m(row, c) = 1.0;
    for (int k = 0; k < rows; ++k) {
      if (k == row || m(k, c) == 0.0) continue;
      m.row(k) -= m(k, c) * m.row(row);
      m(k, c) = 0.0;
    }
    pivot_col.push_back(c);
    is_pivot[c] = 1;
    ++row;
  }

  std::vector<Eigen::Triplet<double>> trip;
  int col = 0;
  for (int f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    trip.emplace_back(f, col, 1.0);
    for (int r = 0; r < static_cast<int>(pivot_col.size()); ++r)
      if (std::abs(m(r, f)) > 1e-300) trip.emplace_back(pivot_col[r], col, -m(r, f));
    ++col;
  }
  SparseMatrix p(cols, col);
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

Vector particular_solution(const SparseMatrix& d, const Vector& s) {
  if (d.rows() != s.size()) throw LinearAlgebraError("particular_solution: dimension mismatch");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod{Matrix(d)};
  Vector y = cod.solve(s);
  double res = (d * y - s).norm();
  if (res > 1e-10 * std::max(1.0, s.norm()))
    throw LinearAlgebraError("constraint right-hand side is not in the range of D (residual " +
                             std::to_string(res) + ")");
  return y;
}

ConstrainedLeastSquares::ConstrainedLeastSquares(const SparseMatrix& d, const SparseMatrix& e) {
  if (d.cols() != e.cols()) throw LinearAlgebraError("D and E disagree on the unknown count");
  const auto m = d.cols();
  p_ = kernel_basis(d);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod{Matrix(d)};
  Matrix dp = cod.pseudoInverse();
  const int k = static_cast<int>(p_.cols());
  if (k == 0) {
    gs_ = dp;
    gt_ = Matrix::Zero(m, e.rows());
    return;
  }
  Matrix pd = Matrix(p_);
  Matrix f = e * pd;
  Eigen::ColPivHouseholderQR<Matrix> qr(f);
  qr.setThreshold(1e-10);
  rank_f_ = static_cast<int>(qr.rank());
  if (rank_f_ < k)
    throw LinearAlgebraError("boundary conditions underdetermined: E P has rank " +
                             std::to_string(rank_f_) + " < " + std::to_string(k));
  Matrix fp = qr.solve(Matrix::Identity(f.rows(), f.rows()));
  gt_ = pd * fp;
  gs_ = dp - gt_ * (e * dp);
}

Vector ConstrainedLeastSquares::solve(const Vector& s, const Vector& t) const {
  if (s.size() != gs_.cols() || t.size() != gt_.cols())
    throw LinearAlgebraError("constrained solve: dimension mismatch");
  return gs_ * s + gt_ * t;
}

Vector constrained_lsq(const SparseMatrix& d, const Vector& s, const SparseMatrix& e, const Vector& t) {
  if (d.rows() != s.size() || e.rows() != t.size())
    throw LinearAlgebraError("constrained_lsq: dimension mismatch");
  ConstrainedLeastSquares cls(d, e);
  Vector y = cls.solve(s, t);
  double res = (d * y - s).norm();
  if (res > 1e-10 * std::max(1.0, s.norm()))
    throw LinearAlgebraError("constraint right-hand side is not in the range of D");
  return y;
}

namespace {

SparseMatrix drop_row_col(const SparseMatrix& a, int row, int col) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.nonZeros());
  for (int c = 0; c < a.outerSize(); ++c) {
    if (c == col) continue;
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      if (it.row() == row) continue;
      trip.emplace_back(it.row() - (it.row() > row), c - (c > col), it.value());
    }
  }
  SparseMatrix out(a.rows() - 1, a.cols() - 1);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

}  // namespace

SingularSquareSolver::SingularSquareSolver(const SparseMatrix& a, const Vector& right_null)
    : n_(static_cast<int>(a.rows())), r_(right_null) {
  if (a.rows() != a.cols() || right_null.size() != a.cols())
    throw LinearAlgebraError("singular solver needs a square matrix and matching null vector");
  if (n_ < 2) throw LinearAlgebraError("singular solver needs at least two unknowns");
  const double anorm = Matrix(a.cwiseAbs() * Vector::Ones(n_)).maxCoeff();
  if ((a * r_).lpNorm<Eigen::Infinity>() > 1e-9 * anorm * r_.lpNorm<Eigen::Infinity>())
    throw LinearAlgebraError("supplied vector is not a right null vector");
  r_.normalize();
  r_.cwiseAbs().maxCoeff(&drop_col_);

  SparseMatrix at = a.transpose();
  for (int attempt = 0; attempt < std::min(n_, 16); ++attempt) {
    int row = n_ - 1 - attempt;
    auto lu = std::make_unique<LU>();
    SparseMatrix red = drop_row_col(a, row, drop_col_);
    lu->compute(red);
    if (lu->info() != Eigen::Success) continue;
    // z^T A = 0 with z_row = 1: the other entries solve red^T w = -a(row, ~col).
    Vector arow = at.col(row);
    Vector rhs(n_ - 1);
    for (int c = 0, k = 0; c < n_; ++c)
      if (c != drop_col_) rhs(k++) = -arow(c);
    Vector w = lu->transpose().solve(rhs);
    Vector z(n_);
    for (int i = 0, k = 0; i < n_; ++i) z(i) = (i == row) ? 1.0 : w(k++);
    if (!z.allFinite()) continue;
    z.normalize();
    if ((at * z).lpNorm<Eigen::Infinity>() > 1e-8 * anorm) continue;
    drop_row_ = row;
    lu_ = std::move(lu);
    z_ = z;
    break;
  }
  if (!lu_) throw LinearAlgebraError("matrix rank deficiency exceeds one");
}

Vector SingularSquareSolver::solve(const Vector& rhs, LsqReport* report) const {
  if (rhs.size() != n_) throw LinearAlgebraError("singular solver: dimension mismatch");
  const double beta = z_.dot(rhs);
  Vector b = rhs - beta * z_;
  Vector bred(n_ - 1);
  for (int i = 0, k = 0; i < n_; ++i)
    if (i != drop_row_) bred(k++) = b(i);
  Vector xr = lu_->solve(bred);
  Vector x(n_);
  for (int c = 0, k = 0; c < n_; ++c) x(c) = (c == drop_col_) ? 0.0 : xr(k++);
  x -= r_.dot(x) * r_;
  if (report) {
    report->residual_norm = std::abs(beta);
    report->rank_deficient = true;
    report->dropped_singular_values = 1;
  }
  return x;
}

}  // namespace ppens
