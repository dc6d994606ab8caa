#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "measys/blocksystem.hpp"
#include "measys/coefficients.hpp"
#include "measys/function.hpp"

namespace measys::fuzz {

using Rng = std::mt19937_64;

struct Options {
  int max_dim = 3;
  int min_interior = 2;
  int max_interior = 5;
  double atom_range = 2.0;       ///< atom entries uniform in [-atom_range, atom_range]
  double q_density_range = 0.5;  ///< keeps fundamental matrices at desk-scale norms
  double w_density_range = 1.0;
  double min_regularity = 0.05;  ///< rejection threshold for regular q-atoms
  int max_regular_atoms = 2;
  int max_w_atoms = 3;
  /// Chance that two consecutive singular atoms are matched so that a
  /// homogeneous solution is supported between them.
  double compact_probability = 0.3;
};

/// Randomized coefficient set with a window and the interior partition points
/// the instance was designed around (singular atoms plus forced regular points).
struct Instance {
  Problem problem;
  Window window;
  std::vector<double> singular;
  std::vector<double> forced;
};

Instance random_instance(Rng& rng, const Options& opts = {});

/// Random skew-Hermitian matrix with sigma_min >= 0.3.
Matrix random_skew_hermitian(Rng& rng, Eigen::Index n);
Matrix random_hermitian(Rng& rng, Eigen::Index n, double range);
Matrix random_psd(Rng& rng, Eigen::Index n, double range);
Vector random_vector(Rng& rng, Eigen::Index n, double range = 1.0);
double uniform(Rng& rng, double lo, double hi);

/// Hermitian dq with J + dq/2 singular, or an empty matrix if i J is definite
/// (then no such atom exists).
Matrix singular_atom(Rng& rng, const Matrix& J, double range);

/// Piecewise-constant f on the window with a few random pieces and explicit
/// values at every atom of w inside the window.
L2Function random_function(Rng& rng, const Problem& problem, Window window);

enum class Target { block_rhs, endpoint_free };

/// Random f on the window of `bs` whose moment vector is orthogonal to ker B^*
/// (Target::block_rhs, so B u~ = rhs(f) is solvable) or to ker B_m^*
/// (Target::endpoint_free, so the vanishing-endpoint problem is solvable).
///
/// f ranges over piecewise constants on the structure cuts plus point values at
/// atoms of w. Moments are linear in f, so the constraint is a null space.
L2Function constrained_function(Rng& rng, const BlockSystem& bs, Target target);

}  // namespace measys::fuzz
