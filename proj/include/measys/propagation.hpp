#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "measys/coefficients.hpp"
#include "measys/function.hpp"

namespace measys {

/// exp(-dx J^{-1} q0): propagator of J u' + q0 u = 0 over a length dx.
/// Throws singular_j if J is not invertible.
Matrix segment_exponential(const Matrix& J, const Matrix& q0, double dx);

/// T = B_+^{-1} B_- with u^+ = T u^- across an atom of q. Throws singular_atom
/// when sigma_min(B_+) <= tol * max(1, sigma_max(B_+)).
Matrix atom_transfer(const Matrix& J, const Matrix& dq, double tol = 1e-9);

/// Relative smallness of B_+: sigma_min / max(1, sigma_max).
double atom_regularity(const Matrix& J, const Matrix& dq);

/// Balanced fundamental matrix of J u' + q u = 0 on a subinterval whose
/// interior atoms are all regular, normalized to the identity at the left end.
///
/// The subinterval is cut at every breakpoint and atom of q and w. On each piece
/// U(x) = exp(M_k (x - t_k)) U^+(t_k) with M_k = -J^{-1} q_k; across a q-atom
/// U^+ = T U^-.
class FundamentalMatrix {
 public:
  /// Throws singular_atom (with position) if an interior q-atom is singular.
  FundamentalMatrix(const Problem& problem, Window sub, double tol_sing = 1e-9);

  const Window& interval() const { return interval_; }
  Eigen::Index dim() const { return J_.rows(); }
  const std::vector<double>& knots() const { return knots_; }

  /// Value at x in [lo, hi]. The endpoints are limits from inside: the identity
  /// at lo, the left limit U(hi) at hi, whatever side is requested.
  Matrix evaluate(double x, Side side) const;

  /// U(hi) = lim_{x -> hi^-} U(x).
  const Matrix& end_value() const { return left_.back(); }

  /// Generator M = -J^{-1} q0 of the piece containing the open segment (s, e).
  const Matrix& generator(double s, double e) const;

  struct Transfer {
    double x = 0.0;
    Matrix matrix;
  };
  const std::vector<Transfer>& transfers() const { return transfers_; }

 private:
  std::size_t piece_of(double x) const;

  Matrix J_;
  Window interval_;
  std::vector<double> knots_;
  std::vector<Matrix> generators_;  // one per piece
  std::vector<Matrix> right_;       // U^+(t_k), k = 0..K-1
  std::vector<Matrix> left_;        // U^-(t_k), k = 1..K (left_[k-1])
  std::vector<Transfer> transfers_;
};

/// Integral of U^* w f over the open interval (lo, upto): density parts in
/// closed form, interior atoms of w as U_bal^* dw f(x). Throws not_representable
/// if f does not cover [lo, upto].
Vector inhomogeneous_integral(const FundamentalMatrix& U, const MeasureMatrix& w, const L2Function& f,
                              double upto);

/// Balanced solution on a window cut at partition points x_0 < ... < x_{N+1}.
/// On (x_j, x_{j+1}): u^-(x) = U_j^-(x) (c_j + J^{-1} int_{(x_j, x)} U_j^* w f).
class PiecewiseSolution {
 public:
  PiecewiseSolution(std::shared_ptr<const Problem> problem, std::vector<double> points,
                    std::vector<std::shared_ptr<const FundamentalMatrix>> fundamentals,
                    std::vector<Vector> coefficients, std::optional<L2Function> rhs = std::nullopt);

  Window window() const { return {points_.front(), points_.back()}; }
  Eigen::Index dim() const { return problem_->dim(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<Vector>& coefficients() const { return coefficients_; }
  const std::optional<L2Function>& rhs() const { return rhs_; }
  const Problem& problem() const { return *problem_; }

  /// Throws out_of_interval outside the closed window. At the window ends the
  /// inside limits are returned for every side.
  Vector value(double x, Side side) const;
  LocalForm local_form(double s, double e) const;
  std::vector<double> knots() const;

  /// Balanced values at the interior partition points x_1..x_N.
  std::vector<Vector> interior_values() const;

  /// I_j(f) over the whole subinterval (zero without a right-hand side).
  const Vector& subinterval_integral(std::size_t j) const { return integrals_[j]; }

 private:
  std::size_t subinterval_of(double x) const;
  Vector homogeneous_shift(std::size_t j, double x, bool include_atom) const;

  std::shared_ptr<const Problem> problem_;
  Matrix J_inv_;
  std::vector<double> points_;
  std::vector<std::shared_ptr<const FundamentalMatrix>> fundamentals_;
  std::vector<Vector> coefficients_;
  std::optional<L2Function> rhs_;
  std::vector<Vector> integrals_;
};

/// Unique balanced solution of J u' + q u = w f on `sub` with balanced value u0
/// at x0 (the right limit when x0 is the left end). Throws singular_atom.
PiecewiseSolution solve_ivp_regular(const Problem& problem, Window sub, double x0, const Vector& u0,
                                    const std::optional<L2Function>& f = std::nullopt,
                                    double tol_sing = 1e-9);

}  // namespace measys
