#pragma once

// Fixtures and independent oracles shared by the unit and acceptance suites.
// Nothing here calls into the propagation or block-system code paths it is
// used to check.

#include <cmath>
#include <functional>

#include "measys/coefficients.hpp"

namespace measys::testing {

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Vector vec2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}

/// [[0, -1], [1, 0]]
inline Matrix symplectic_j() { return mat2(0.0, -1.0, 1.0, 0.0); }

inline Problem zero_problem(Window interval) {
  return {symplectic_j(), MeasureMatrix::zero(2, interval), MeasureMatrix::zero(2, interval)};
}

/// Atoms [[0,2],[2,0]] at -0.5 and [[0,-2],[-2,0]] at 0.5 on (-1, 1), zero density.
inline Problem instance_a(MeasureMatrix w = MeasureMatrix::zero(2, {-1.0, 1.0})) {
  const Window iv{-1.0, 1.0};
  const std::vector<Atom> atoms{{-0.5, mat2(0.0, 2.0, 2.0, 0.0)}, {0.5, mat2(0.0, -2.0, -2.0, 0.0)}};
  return {symplectic_j(), MeasureMatrix(2, iv, {iv.lo, iv.hi}, {Matrix::Zero(2, 2)}, atoms), std::move(w)};
}

/// Both atoms [[0,2],[2,0]].
inline Problem instance_b() {
  const Window iv{-1.0, 1.0};
  const std::vector<Atom> atoms{{-0.5, mat2(0.0, 2.0, 2.0, 0.0)}, {0.5, mat2(0.0, 2.0, 2.0, 0.0)}};
  return {symplectic_j(), MeasureMatrix(2, iv, {iv.lo, iv.hi}, {Matrix::Zero(2, 2)}, atoms),
          MeasureMatrix::zero(2, iv)};
}

/// delta-prime interaction: q-atom diag(0, -beta) at 0, w = Lebesgue diag(1, 0).
inline Problem delta_prime(double beta, Window interval = {-1.0, 1.0}) {
  return {symplectic_j(),
          MeasureMatrix(2, interval, {interval.lo, interval.hi}, {Matrix::Zero(2, 2)},
                        {{0.0, mat2(0.0, 0.0, 0.0, -beta)}}),
          MeasureMatrix::uniform(interval, mat2(1.0, 0.0, 0.0, 0.0))};
}

/// Truncated Taylor series of exp(M), evaluated term by term.
inline Matrix taylor_exp(const Matrix& m, int terms = 30) {
  Matrix sum = Matrix::Identity(m.rows(), m.cols());
  Matrix term = sum;
  for (int k = 1; k < terms; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// The same 30-term series applied to m / 2^s with |m / 2^s| <= 1, then
/// squared s times. At |m| = 5 the unscaled series is off by about 5^30/30!.
inline Matrix scaled_taylor_exp(const Matrix& m, int terms = 30) {
  int s = 0;
  double norm = m.norm();
  while (norm > 1.0) {
    norm *= 0.5;
    ++s;
  }
  Matrix e = taylor_exp(m / std::ldexp(1.0, s), terms);
  for (int k = 0; k < s; ++k) e = e * e;
  return e;
}

/// Adaptive Simpson quadrature of a matrix-valued integrand.
inline Matrix adaptive_simpson(const std::function<Matrix(double)>& f, double a, double b, double tol, int depth = 16) {
  std::function<Matrix(double, double, const Matrix&, const Matrix&, const Matrix&, const Matrix&, double, int)> rec;
  rec = [&](double lo, double hi, const Matrix& flo, const Matrix& fmid, const Matrix& fhi, const Matrix& whole,
            double eps, int d) -> Matrix {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const Matrix flm = f(lm);
    const Matrix frm = f(rm);
    const Matrix left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const Matrix right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    const Matrix delta = left + right - whole;
    if (d <= 0 || delta.cwiseAbs().maxCoeff() <= 15.0 * eps) return left + right + delta / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) + rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
  };
  const Matrix fa = f(a);
  const Matrix fb = f(b);
  const Matrix fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Rank from singular values relative to the largest: a separate SVD path
/// (BDC) from the library's Jacobi-based null spaces.
inline Eigen::Index oracle_rank(const Matrix& m, double tol = 1e-10) {
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > tol * sv(0)) ++r;
  return r;
}

}  // namespace measys::testing
