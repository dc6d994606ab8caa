#include "measys/blocksystem.hpp"

#include <algorithm>

#include "measys/linalg.hpp"

namespace measys {

std::vector<double> find_singular_points(const Problem& problem, Window window, double tol_sing) {
  // Away from q-atoms B_+ = J, which is invertible.
  std::vector<double> out;
  for (const auto& atom : problem.q.atoms()) {
    if (!window.contains_open(atom.x)) continue;
    if (atom_regularity(problem.J, atom.mass) <= tol_sing) out.push_back(atom.x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const char* to_string(PointKind kind) {
  switch (kind) {
    case PointKind::singular: return "singular";
    case PointKind::forced: return "forced";
    case PointKind::padded: return "padded";
  }
  return "unknown";
}

Partition make_partition(Window window, const std::vector<double>& singular, const std::vector<double>& forced) {
  if (!(window.lo < window.hi)) throw Error(ErrorKind::empty_window, "partition: empty window");
  std::vector<double> required(singular);
  required.insert(required.end(), forced.begin(), forced.end());
  for (double x : required) {
    if (!window.contains_open(x)) {
      throw Error(ErrorKind::out_of_interval, "partition: point not strictly inside the window", x);
    }
  }
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());

  std::vector<double> padded;
  if (required.empty()) {
    padded = {window.lo + window.length() / 3.0, window.lo + 2.0 * window.length() / 3.0};
  } else if (required.size() == 1) {
    const double p = required.front();
    padded = {(window.hi - p >= p - window.lo) ? 0.5 * (p + window.hi) : 0.5 * (window.lo + p)};
  }

  std::vector<double> interior(required);
  interior.insert(interior.end(), padded.begin(), padded.end());
  std::sort(interior.begin(), interior.end());

  Partition part;
  part.points.push_back(window.lo);
  for (double x : interior) {
    part.points.push_back(x);
    if (std::find(singular.begin(), singular.end(), x) != singular.end()) {
      part.kinds.push_back(PointKind::singular);
    } else if (std::binary_search(required.begin(), required.end(), x)) {
      part.kinds.push_back(PointKind::forced);
    } else {
      part.kinds.push_back(PointKind::padded);
    }
  }
  part.points.push_back(window.hi);
  return part;
}

BlockSystem BlockSystem::assemble(const Problem& problem, const Partition& partition, const Tolerances& tol) {
  BlockSystem bs;
  bs.problem_ = std::make_shared<const Problem>(problem);
  bs.partition_ = partition;
  bs.tol_ = tol;
  const auto n = problem.dim();
  const auto N = static_cast<Eigen::Index>(partition.interior_count());
  const auto& x = partition.points;

  bs.J_inv_ = problem.J.fullPivLu().inverse();
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    bs.fundamentals_.push_back(std::make_shared<const FundamentalMatrix>(problem, Window{x[j], x[j + 1]}, tol.sing));
  }
  std::vector<Matrix> ends;
  for (Eigen::Index j = 1; j <= N; ++j) {
    const Matrix dq = problem.q.jump(x[static_cast<std::size_t>(j)]);
    bs.b_plus_.push_back(b_plus(problem.J, dq));
    bs.b_minus_.push_back(b_minus(problem.J, dq));
    ends.push_back(bs.fundamentals_[static_cast<std::size_t>(j - 1)]->end_value());
  }

  bs.B_ = Matrix::Zero(n * N, n * (N + 1));
  bs.C_ = Matrix::Zero(n * N, n * (N + 1));
  for (Eigen::Index r = 0; r < N; ++r) {
    const auto j = static_cast<std::size_t>(r);
    bs.B_.block(r * n, r * n, n, n) = -bs.b_minus_[j] * ends[j];
    bs.B_.block(r * n, (r + 1) * n, n, n) = bs.b_plus_[j];
    bs.C_.block(r * n, r * n, n, n) = 0.5 * ends[j];
    bs.C_.block(r * n, (r + 1) * n, n, n) = 0.5 * Matrix::Identity(n, n);
  }
  bs.B_m_ = bs.B_.middleCols(n, n * (N - 1));
  bs.C_m_ = bs.C_.middleCols(n, n * (N - 1));
  bs.calB_ = block_diagonal(bs.b_plus_);
  bs.calU_ = block_diagonal(ends);
  bs.calJ_ = block_diagonal(std::vector<Matrix>(static_cast<std::size_t>(N), problem.J));
  bs.calJ_inv_ = block_diagonal(std::vector<Matrix>(static_cast<std::size_t>(N), bs.J_inv_));
  return bs;
}

MomentVectors BlockSystem::moments(const L2Function& f) const {
  const Window window = partition_.window();
  if (f.dim() != dim() || f.window().lo > window.lo || f.window().hi < window.hi) {
    throw Error(ErrorKind::not_representable, "moments: f does not cover the window");
  }
  const auto n = dim();
  const auto N = static_cast<Eigen::Index>(interior_count());
  const auto& x = partition_.points;

  MomentVectors mv{f.window() == window ? f : f.restrict(window), {}, Vector::Zero(n * N),
                   Vector::Zero(n * N), Vector::Zero(n * N), {}, {}};
  for (std::size_t j = 0; j < fundamentals_.size(); ++j) {
    mv.integrals.push_back(inhomogeneous_integral(*fundamentals_[j], problem_->w, mv.f, x[j + 1]));
  }
  for (Eigen::Index r = 0; r < N; ++r) {
    const double xj = x[static_cast<std::size_t>(r + 1)];
    mv.R.segment(r * n, n) = problem_->w.jump(xj) * mv.f.value(xj, Side::balanced);
    mv.I.segment(r * n, n) = mv.integrals[static_cast<std::size_t>(r)];
  }
  mv.I_tilde.tail(n) = mv.integrals.back();
  mv.rhs = mv.R - calB_.adjoint() * (calU_ * (calJ_inv_ * mv.I));
  mv.F = mv.rhs + calB_ * (calJ_inv_ * mv.I_tilde);
  return mv;
}

PiecewiseSolution BlockSystem::reconstruct(const Vector& coefficients, std::optional<L2Function> f) const {
  const auto n = dim();
  const auto blocks = fundamentals_.size();
  if (coefficients.size() != n * static_cast<Eigen::Index>(blocks)) {
    throw Error(ErrorKind::dimension_mismatch, "reconstruct: coefficient vector must have n(N+1) entries");
  }
  std::vector<Vector> c;
  for (std::size_t j = 0; j < blocks; ++j) c.push_back(coefficients.segment(static_cast<Eigen::Index>(j) * n, n));
  return PiecewiseSolution(problem_, partition_.points, fundamentals_, std::move(c), std::move(f));
}

BlockSystem build_block_system(const Problem& problem, Window window, const Tolerances& tol,
                               const std::vector<double>& forced) {
  const auto singular = find_singular_points(problem, window, tol.sing);
  return BlockSystem::assemble(problem, make_partition(window, singular, forced), tol);
}

}  // namespace measys
