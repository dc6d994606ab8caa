#pragma once

#include <string>
#include <vector>

#include "measys/types.hpp"

namespace measys {

struct Atom {
  double x = 0.0;
  Matrix mass;
};

/// Matrix-valued measure on a finite interval: a piecewise-constant density with
/// respect to length plus finitely many point masses.
///
/// Structural requirements (sorted breakpoints tiling the interval, strictly
/// increasing interior atoms) are reported by validate() rather than enforced
/// here, so malformed inputs can still be inspected. Everything downstream of
/// validation assumes them.
class MeasureMatrix {
 public:
  MeasureMatrix() = default;

  /// Throws ErrorKind::dimension_mismatch if any matrix is not dim x dim or the
  /// breakpoint/value counts disagree.
  MeasureMatrix(Eigen::Index dim, Window interval, std::vector<double> breakpoints,
                std::vector<Matrix> density_values, std::vector<Atom> atoms);

  static MeasureMatrix zero(Eigen::Index dim, Window interval);
  /// Constant density `value` on the whole interval.
  static MeasureMatrix uniform(Window interval, const Matrix& value, std::vector<Atom> atoms = {});

  Eigen::Index dim() const { return dim_; }
  const Window& interval() const { return interval_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Matrix>& density_values() const { return density_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// Point mass at exactly x (zero if none). Throws out_of_interval unless a < x < b.
  Matrix jump(double x) const;

  /// Density on the piece containing x; at a breakpoint the piece to the right
  /// is used (the one to the left at b).
  const Matrix& density_at(double x) const;

  /// Anti-derivative normalized by Q(a) = 0. `left` is the left-continuous
  /// value, `right` includes the atom at x, `balanced` half of it.
  Matrix antiderivative(double x, Side side) const;

  /// Total mass: density integral plus every atom.
  Matrix total() const;

 private:
  Eigen::Index dim_ = 0;
  Window interval_;
  std::vector<double> breakpoints_;
  std::vector<Matrix> density_;
  std::vector<Atom> atoms_;
};

struct Problem {
  Matrix J;
  MeasureMatrix q;
  MeasureMatrix w;

  Eigen::Index dim() const { return J.rows(); }
  const Window& interval() const { return q.interval(); }
};

struct Check {
  std::string name;
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool passed() const;
  const Check* find(const std::string& name) const;
};

/// Checks the structural hypotheses on (J, q, w). Throws dimension_mismatch
/// when the matrices do not share the dimension of J.
ValidationReport validate(const Problem& problem, double tol = 1e-10);

Matrix b_plus(const Problem& problem, double x);
Matrix b_minus(const Problem& problem, double x);

/// B_+ and B_- for a given jump without a position lookup.
inline Matrix b_plus(const Matrix& J, const Matrix& dq) { return J + 0.5 * dq; }
inline Matrix b_minus(const Matrix& J, const Matrix& dq) { return J - 0.5 * dq; }

// Defect helpers shared by validation and the test suites.
double hermitian_defect(const Matrix& m);
double skew_hermitian_defect(const Matrix& m);
double min_hermitian_eigenvalue(const Matrix& m);

}  // namespace measys
