#include "measys/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace measys {

namespace {

Eigen::Index rank_from(const Eigen::VectorXd& sv, double tol_rank) {
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (smax == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol_rank * smax) ++r;
  return r;
}

}  // namespace

Eigen::VectorXd singular_values(const Matrix& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

Matrix nullspace(const Matrix& m, double tol_rank) {
  const auto cols = m.cols();
  if (m.rows() == 0) return Matrix::Identity(cols, cols);
  if (cols == 0) return Matrix(0, 0);
  // Full V is needed: the kernel lives in the trailing columns.
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto r = rank_from(svd.singularValues(), tol_rank);
  return svd.matrixV().rightCols(cols - r);
}

Eigen::Index numerical_rank(const Matrix& m, double tol_rank) {
  return rank_from(singular_values(m), tol_rank);
}

Vector min_norm_solve(const Matrix& m, const Vector& rhs, double tol_rank) {
  if (m.cols() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const auto r = rank_from(sv, tol_rank);
  Vector coeffs = svd.matrixU().leftCols(r).adjoint() * rhs;
  for (Eigen::Index i = 0; i < r; ++i) coeffs(i) /= sv(i);
  return svd.matrixV().leftCols(r) * coeffs;
}

Matrix expm(const Matrix& m) { return m.exp(); }

Matrix integrated_expm(const Matrix& m, double t) {
  const auto n = m.rows();
  Matrix aug = Matrix::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = m * t;
  aug.topRightCorner(n, n) = Matrix::Identity(n, n) * t;
  return expm(aug).topRightCorner(n, n);
}

Matrix expm_gramian(const Matrix& a, const Matrix& g, const Matrix& b, double t) {
  const auto p = a.rows();
  const auto q = b.rows();
  Matrix h = Matrix::Zero(p + q, p + q);
  h.topLeftCorner(p, p) = -a.adjoint() * t;
  h.topRightCorner(p, q) = g * t;
  h.bottomRightCorner(q, q) = b * t;
  const Matrix e = expm(h);
  // Upper-right block equals exp(-A^* t) times the wanted integral.
  return expm(a.adjoint() * t) * e.topRightCorner(p, q);
}

Vector canonical_scale(const Vector& v) {
  if (v.size() == 0) return v;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return v;
  Eigen::Index pivot = 0;
  while (std::abs(v(pivot)) < (1.0 - 1e-9) * top) ++pivot;
  Vector out = v / v(pivot);
  out(pivot) = 1.0;
  return out;
}

Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace measys
