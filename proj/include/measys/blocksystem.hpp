#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "measys/coefficients.hpp"
#include "measys/function.hpp"
#include "measys/propagation.hpp"

namespace measys {

/// Positions of q-atoms in the open window where B_+ is numerically singular:
/// sigma_min(B_+) <= tol_sing * max(1, sigma_max(B_+)). Sorted.
std::vector<double> find_singular_points(const Problem& problem, Window window, double tol_sing = 1e-9);

enum class PointKind { singular, forced, padded };

const char* to_string(PointKind kind);

/// xi_1 = x_0 < x_1 < ... < x_N < x_{N+1} = xi_2 with N >= 2.
struct Partition {
  std::vector<double> points;
  std::vector<PointKind> kinds;  ///< one per interior point x_1..x_N

  std::size_t interior_count() const { return kinds.size(); }
  Window window() const { return {points.front(), points.back()}; }
  double interior(std::size_t j) const { return points[j]; }  // 1-based as in x_j
};

/// Interior points are the singular points plus any forced ones. Fewer than two
/// are padded: one extra point at the midpoint of the longer adjacent gap, or
/// two at the thirds of an empty window. Throws empty_window if lo >= hi.
Partition make_partition(Window window, const std::vector<double>& singular,
                         const std::vector<double>& forced = {});

/// R(f), I(f), I~(f), F(f) and the right-hand side of the block equation.
struct MomentVectors {
  L2Function f;
  std::vector<Vector> integrals;  ///< I_0(f), ..., I_N(f)
  Vector R;
  Vector I;
  Vector I_tilde;
  Vector rhs;  ///< R - B^* U J^{-1} I
  Vector F;    ///< rhs + B J^{-1} I~
};

/// Matrices coupling the per-subinterval initial vectors c_0..c_N through the
/// jump conditions at x_1..x_N.
///
/// B = Bc^* Uc E_bot + Bc E_top and C = (Uc E_bot + E_top) / 2, where Bc, Uc, Jc
/// are block diagonal with B_+(x_j), U_{j-1}(x_j) and J. B_m, C_m drop the first
/// and last block columns.
class BlockSystem {
 public:
  /// Throws singular_atom if a subinterval contains a singular atom.
  static BlockSystem assemble(const Problem& problem, const Partition& partition, const Tolerances& tol = {});

  Eigen::Index dim() const { return problem_->dim(); }
  std::size_t interior_count() const { return partition_.interior_count(); }
  const Partition& partition() const { return partition_; }
  const Problem& problem() const { return *problem_; }
  const std::shared_ptr<const Problem>& shared_problem() const { return problem_; }
  const Tolerances& tolerances() const { return tol_; }

  const std::vector<std::shared_ptr<const FundamentalMatrix>>& fundamentals() const { return fundamentals_; }
  const Matrix& b_plus_at(std::size_t j) const { return b_plus_[j - 1]; }
  const Matrix& b_minus_at(std::size_t j) const { return b_minus_[j - 1]; }

  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Matrix& B_m() const { return B_m_; }
  const Matrix& C_m() const { return C_m_; }
  const Matrix& calB() const { return calB_; }
  const Matrix& calU() const { return calU_; }
  const Matrix& calJ() const { return calJ_; }
  const Matrix& calJ_inverse() const { return calJ_inv_; }
  const Matrix& J_inverse() const { return J_inv_; }

  /// Throws not_representable if f does not cover the window.
  MomentVectors moments(const L2Function& f) const;

  /// Solution given by c_j = block j of `coefficients` (length n(N+1)).
  PiecewiseSolution reconstruct(const Vector& coefficients, std::optional<L2Function> f = std::nullopt) const;

 private:
  std::shared_ptr<const Problem> problem_;
  Partition partition_;
  Tolerances tol_;
  std::vector<std::shared_ptr<const FundamentalMatrix>> fundamentals_;
  std::vector<Matrix> b_plus_;
  std::vector<Matrix> b_minus_;
  Matrix B_, C_, B_m_, C_m_, calB_, calU_, calJ_, calJ_inv_, J_inv_;
};

/// Singular points of the window, merged with `forced`, padded and assembled.
BlockSystem build_block_system(const Problem& problem, Window window, const Tolerances& tol = {},
                               const std::vector<double>& forced = {});

}  // namespace measys
