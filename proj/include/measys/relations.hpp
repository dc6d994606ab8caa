#pragma once

#include <variant>
#include <vector>

#include "measys/inner_product.hpp"
#include "measys/solutions.hpp"

namespace measys {

struct KernelElement {
  PiecewiseSolution solution;
  double norm_squared = 0.0;
  bool degenerate = false;  ///< nonzero function with zero w-norm, i.e. [0] in L^2(w)
};

/// Every homogeneous solution on the window (a basis of ker B, reconstructed).
/// Elements whose w-norm vanishes are kept and flagged.
std::vector<KernelElement> kernel_K0(const Problem& problem, Window window, const Tolerances& tol = {},
                                     const std::vector<double>& forced = {});

/// Evidence that f is not orthogonal to the homogeneous solutions: r_hat in
/// ker B_m^* with r_hat^* F(f) != 0, the matching homogeneous solution r and
/// <r, f>. r_hat is the projection of F(f) onto ker B_m^*, scaled so its
/// largest entry is 1.
struct OrthogonalityCertificate {
  Vector r_hat;
  PiecewiseSolution r;
  Complex moment;   ///< r_hat^* F(f)
  Complex pairing;  ///< <r, f>
  double projection_norm = 0.0;  ///< |projection of F(f) onto ker B_m^*|
};

struct T0Result {
  std::variant<PiecewiseSolution, OrthogonalityCertificate> outcome;
  double projection_norm = 0.0;

  bool solved() const { return std::holds_alternative<PiecewiseSolution>(outcome); }
  const PiecewiseSolution& solution() const { return std::get<PiecewiseSolution>(outcome); }
  const OrthogonalityCertificate& certificate() const { return std::get<OrthogonalityCertificate>(outcome); }
};

/// Solution of J u' + q u = w f on the window with u^+(lo) = u^-(hi) = 0, or a
/// certificate that none exists. Solvable iff F(f) has no component in
/// ker B_m^* (relative threshold tol.solve).
T0Result t0_solve(const Problem& problem, Window window, const L2Function& f, const Tolerances& tol = {},
                  const std::vector<double>& forced = {});

/// Variant on an already assembled system.
T0Result t0_solve(const BlockSystem& bs, const L2Function& f);

struct PairingReport {
  Complex lhs;              ///< <v, f> - <g, u>
  Complex rhs;              ///< (v^* J u)^-(hi) - (v^* J u)^+(lo)
  Complex boundary_right;   ///< (v^* J u)^-(hi)
  Complex boundary_left;    ///< (v^* J u)^+(lo)
  double defect = 0.0;
};

/// Lagrange identity for J u' + q u = w f and J v' + q v = w g on a common window.
PairingReport lagrange_check(const Problem& problem, const PiecewiseSolution& u, const L2Function& f,
                             const PiecewiseSolution& v, const L2Function& g);

}  // namespace measys
