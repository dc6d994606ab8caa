#include "measys/solutions.hpp"

#include "measys/inner_product.hpp"
#include "measys/linalg.hpp"

namespace measys {

namespace {

std::vector<PiecewiseSolution> reconstruct_columns(const BlockSystem& bs, const Matrix& basis) {
  std::vector<PiecewiseSolution> out;
  out.reserve(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index k = 0; k < basis.cols(); ++k) out.push_back(bs.reconstruct(basis.col(k)));
  return out;
}

// Scale for rounding-level defects of products involving the assembled blocks.
double system_scale(const BlockSystem& bs) { return std::max(1.0, bs.B().norm()) * std::max(1.0, bs.J_inverse().norm()); }

}  // namespace

SolutionSet solve_system(const BlockSystem& bs, const MomentVectors& mv) {
  const auto& tol = bs.tolerances();
  SolutionSet set;
  set.coefficients = min_norm_solve(bs.B(), mv.rhs, tol.rank);
  set.residual = (bs.B() * set.coefficients - mv.rhs).norm();
  set.consistent = set.residual <= tol.solve * (1.0 + mv.rhs.norm());
  if (set.consistent) set.particular = bs.reconstruct(set.coefficients, mv.f);
  set.kernel = nullspace(bs.B(), tol.rank);
  set.kernel_basis = reconstruct_columns(bs, set.kernel);
  return set;
}

SolutionSet solve_homogeneous(const BlockSystem& bs) {
  const auto n = bs.dim();
  const auto window = bs.partition().window();
  return solve_system(bs, bs.moments(L2Function::zero(n, window)));
}

Vector project_onto_kernel_bm_adjoint(const BlockSystem& bs, const Vector& u_hat, double accept) {
  if (u_hat.size() != bs.B_m().rows()) {
    throw Error(ErrorKind::dimension_mismatch, "kernel vector must have nN entries");
  }
  const Matrix K = nullspace(bs.B_m().adjoint(), bs.tolerances().rank);
  const Vector projected = K * (K.adjoint() * u_hat);
  if ((u_hat - projected).norm() > accept * std::max(1.0, u_hat.norm())) {
    throw Error(ErrorKind::not_in_kernel, "vector is not in the kernel of B_m^*");
  }
  return projected;
}

Vector lift_kernel_vector(const BlockSystem& bs, const Vector& u_hat) {
  const Vector u = project_onto_kernel_bm_adjoint(bs, u_hat);
  const auto n = bs.dim();
  const auto N = static_cast<Eigen::Index>(bs.interior_count());
  const Vector top = -bs.calJ_inverse() * (bs.calB().adjoint() * u);                 // c_1..c_N
  const Vector bottom = bs.calJ_inverse() * (bs.calU().adjoint() * (bs.calB() * u));  // c_0..c_{N-1}

  const auto overlap = n * (N - 1);
  const double mismatch = (top.head(overlap) - bottom.tail(overlap)).norm();
  if (mismatch > 10.0 * bs.tolerances().solve * system_scale(bs) * (1.0 + u.norm())) {
    throw Error(ErrorKind::inconsistent_lift, "kernel lift: overlapping assignments disagree");
  }
  Vector lifted(n * (N + 1));
  lifted.head(n) = bottom.head(n);
  lifted.segment(n, overlap) = 0.5 * (top.head(overlap) + bottom.tail(overlap));
  lifted.tail(n) = top.tail(n);
  return lifted;
}

std::vector<CompactSupportSolution> compact_support_solutions(const BlockSystem& bs) {
  const auto n = bs.dim();
  const Matrix K = nullspace(bs.B().adjoint(), bs.tolerances().rank);
  std::vector<CompactSupportSolution> out;
  for (Eigen::Index k = 0; k < K.cols(); ++k) {
    const Vector u_hat = canonical_scale(K.col(k));
    Vector lifted = lift_kernel_vector(bs, u_hat);
    const double defect = lifted.head(n).norm() + lifted.tail(n).norm();
    if (defect > 10.0 * bs.tolerances().solve * system_scale(bs)) {
      throw Error(ErrorKind::lift_endpoint_nonzero, "compact support: lifted end coefficients do not vanish");
    }
    lifted.head(n).setZero();
    lifted.tail(n).setZero();
    out.push_back({u_hat, lifted, defect, bs.reconstruct(lifted)});
  }
  return out;
}

FunctionalIdentity functional_identity(const BlockSystem& bs, const MomentVectors& mv, const Vector& u_hat) {
  const Vector u = project_onto_kernel_bm_adjoint(bs, u_hat);
  const PiecewiseSolution solution = bs.reconstruct(lift_kernel_vector(bs, u));
  const L2Function f = mv.f.window() == solution.window() ? mv.f : mv.f.restrict(solution.window());
  FunctionalIdentity out;
  out.moment = u.dot(mv.F);
  out.integral = inner_product(bs.problem().w, solution, f);
  out.defect = std::abs(out.moment - out.integral);
  return out;
}

}  // namespace measys
