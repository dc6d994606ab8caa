#include "measys/relations.hpp"

#include "measys/linalg.hpp"

namespace measys {

std::vector<KernelElement> kernel_K0(const Problem& problem, Window window, const Tolerances& tol,
                                     const std::vector<double>& forced) {
  const BlockSystem bs = build_block_system(problem, window, tol, forced);
  auto set = solve_homogeneous(bs);
  std::vector<KernelElement> out;
  for (auto& u : set.kernel_basis) {
    const double nsq = norm_squared(problem.w, u);
    // Basis columns are orthonormal coefficient vectors, so the norm is on an absolute scale.
    out.push_back({std::move(u), nsq, nsq <= tol.structure});
  }
  return out;
}

T0Result t0_solve(const BlockSystem& bs, const L2Function& f) {
  const auto& tol = bs.tolerances();
  const auto n = bs.dim();
  const auto N = static_cast<Eigen::Index>(bs.interior_count());
  const MomentVectors mv = bs.moments(f);

  const Matrix K = nullspace(bs.B_m().adjoint(), tol.rank);
  const Vector projection = K * (K.adjoint() * mv.F);
  const double pnorm = projection.norm();

  if (pnorm <= tol.solve * (1.0 + mv.F.norm())) {
    const Vector inner = min_norm_solve(bs.B_m(), mv.F, tol.rank);
    Vector coeffs = Vector::Zero(n * (N + 1));
    coeffs.segment(n, n * (N - 1)) = inner;
    coeffs.tail(n) = -bs.J_inverse() * mv.integrals.back();
    return {bs.reconstruct(coeffs, mv.f), pnorm};
  }

  const Vector r_hat = canonical_scale(projection);
  PiecewiseSolution r = bs.reconstruct(lift_kernel_vector(bs, r_hat));
  const Complex pairing = inner_product(bs.problem().w, r, mv.f);
  OrthogonalityCertificate cert{r_hat, std::move(r), r_hat.dot(mv.F), pairing, pnorm};
  return {std::move(cert), pnorm};
}

T0Result t0_solve(const Problem& problem, Window window, const L2Function& f, const Tolerances& tol,
                  const std::vector<double>& forced) {
  return t0_solve(build_block_system(problem, window, tol, forced), f);
}

PairingReport lagrange_check(const Problem& problem, const PiecewiseSolution& u, const L2Function& f,
                             const PiecewiseSolution& v, const L2Function& g) {
  const Window window = u.window();
  if (!(window == v.window())) throw Error(ErrorKind::window_mismatch, "lagrange check: solution windows differ");
  const L2Function fw = f.window() == window ? f : f.restrict(window);
  const L2Function gw = g.window() == window ? g : g.restrict(window);

  PairingReport report;
  report.lhs = inner_product(problem.w, v, fw) - inner_product(problem.w, gw, u);
  report.boundary_right = v.value(window.hi, Side::left).dot(problem.J * u.value(window.hi, Side::left));
  report.boundary_left = v.value(window.lo, Side::right).dot(problem.J * u.value(window.lo, Side::right));
  report.rhs = report.boundary_right - report.boundary_left;
  report.defect = std::abs(report.lhs - report.rhs);
  return report;
}

}  // namespace measys
