#pragma once

#include <vector>

#include "measys/types.hpp"

namespace measys {

/// Singular values in decreasing order.
Eigen::VectorXd singular_values(const Matrix& m);

/// Orthonormal basis of {v : Mv = 0}. Singular values at or below
/// tol_rank * sigma_max count as zero; a zero matrix has a full kernel.
Matrix nullspace(const Matrix& m, double tol_rank = 1e-10);

/// Numerical rank under the same cut as nullspace().
Eigen::Index numerical_rank(const Matrix& m, double tol_rank = 1e-10);

/// Minimum-norm least-squares solution of M x = rhs (same rank cut).
Vector min_norm_solve(const Matrix& m, const Vector& rhs, double tol_rank = 1e-10);

/// exp(M).
Matrix expm(const Matrix& m);

/// Integral of exp(M s) over s in [0, t], read off the upper-right block of
/// exp([[M, I], [0, 0]] t). Never inverts M.
Matrix integrated_expm(const Matrix& m, double t);

/// Integral over s in [0, t] of exp(A s)^* G exp(B s), via the Van Loan block
/// exponential exp([[-A^*, G], [0, B]] t).
Matrix expm_gramian(const Matrix& a, const Matrix& g, const Matrix& b, double t);

/// v divided by its first entry of (nearly) largest modulus, which becomes 1.
/// Zero vectors are returned unchanged.
Vector canonical_scale(const Vector& v);

/// Block-diagonal matrix from equally sized square blocks.
Matrix block_diagonal(const std::vector<Matrix>& blocks);

}  // namespace measys
