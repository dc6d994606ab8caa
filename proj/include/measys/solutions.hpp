#pragma once

#include <optional>
#include <vector>

#include "measys/blocksystem.hpp"

namespace measys {

struct SolutionSet {
  bool consistent = false;
  double residual = 0.0;           ///< ||B u~ - rhs|| at the least-squares solution
  Vector coefficients;             ///< minimum-norm u~ = (c_0, ..., c_N)
  std::optional<PiecewiseSolution> particular;
  std::vector<PiecewiseSolution> kernel_basis;  ///< reconstructions of an orthonormal basis of ker B
  Matrix kernel;                   ///< that basis, column-wise
};

/// Minimum-norm least-squares solution of B u~ = rhs(f). Inconsistency is an
/// outcome (consistent = false), not an error: it means no solution exists on
/// the window for this f.
SolutionSet solve_system(const BlockSystem& bs, const MomentVectors& mv);

/// Homogeneous solutions only (f = 0).
SolutionSet solve_homogeneous(const BlockSystem& bs);

/// Replaces u^ by its orthogonal projection onto ker B_m^* when the distance is
/// within `accept` (relative to max(1, |u^|)); throws not_in_kernel otherwise.
Vector project_onto_kernel_bm_adjoint(const BlockSystem& bs, const Vector& u_hat, double accept = 1e-6);

/// The unique u~ with B u~ = 0 and C u~ = u^ for u^ in ker B_m^*:
/// E_top u~ = -Jc^{-1} Bc^* u^ and E_bot u~ = Jc^{-1} Uc^* Bc u^.
/// Throws not_in_kernel if u^ is not (nearly) in ker B_m^*, inconsistent_lift
/// if the two assignments disagree on the overlap.
Vector lift_kernel_vector(const BlockSystem& bs, const Vector& u_hat);

struct CompactSupportSolution {
  Vector u_hat;
  Vector coefficients;
  double endpoint_defect = 0.0;  ///< |c_0| + |c_N| before they are zeroed
  PiecewiseSolution solution;
};

/// One homogeneous solution per basis vector of ker B^*, each supported in
/// [x_1, x_N]. Basis vectors are scaled so their largest entry is 1.
/// Throws lift_endpoint_nonzero if a lifted c_0 or c_N is not ~0.
std::vector<CompactSupportSolution> compact_support_solutions(const BlockSystem& bs);

struct FunctionalIdentity {
  Complex moment;    ///< u^* F(f)
  Complex integral;  ///< integral of u^* w f over the window
  double defect = 0.0;
};

/// Compares u^* F(f) with the w-integral of u^* f, where u is the homogeneous
/// solution with interior values u^. Throws not_in_kernel.
FunctionalIdentity functional_identity(const BlockSystem& bs, const MomentVectors& mv, const Vector& u_hat);

inline double functional_identity_defect(const BlockSystem& bs, const MomentVectors& mv, const Vector& u_hat) {
  return functional_identity(bs, mv, u_hat).defect;
}

}  // namespace measys
