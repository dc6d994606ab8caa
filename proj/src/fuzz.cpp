#include "measys/fuzz.hpp"

#include <algorithm>
#include <map>

#include "measys/linalg.hpp"
#include "measys/propagation.hpp"

namespace measys::fuzz {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Matrix random_complex(Rng& rng, Eigen::Index n, double range) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(uniform(rng, -range, range), uniform(rng, -range, range));
  }
  return m;
}

// Sorted positions in (lo, hi) at least `gap` apart.
std::vector<double> spaced_positions(Rng& rng, int count, double lo, double hi, double gap) {
  std::vector<double> out;
  while (static_cast<int>(out.size()) < count) {
    const double x = uniform(rng, lo, hi);
    if (std::all_of(out.begin(), out.end(), [&](double y) { return std::abs(x - y) >= gap; })) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MeasureMatrix random_measure(Rng& rng, Eigen::Index n, Window interval, bool psd, double range,
                             const std::map<double, Matrix>& atoms) {
  const int pieces = uniform_int(rng, 1, 3);
  std::vector<double> bp{interval.lo};
  for (double x : spaced_positions(rng, pieces - 1, interval.lo + 0.1, interval.hi - 0.1, 0.05)) bp.push_back(x);
  bp.push_back(interval.hi);
  std::vector<Matrix> values;
  for (int k = 0; k < pieces; ++k) values.push_back(psd ? random_psd(rng, n, range) : random_hermitian(rng, n, range));
  std::vector<Atom> list;
  for (const auto& [x, m] : atoms) list.push_back({x, m});
  return MeasureMatrix(n, interval, std::move(bp), std::move(values), std::move(list));
}

// Hermitian dq with (J - dq/2) p = 0, i.e. dq p = 2 J p, plus a random part
// acting on the complement of p. Requires p^* J p = 0.
Matrix closing_atom(Rng& rng, const Matrix& J, const Vector& p_in, double range);

}  // namespace

Vector random_vector(Rng& rng, Eigen::Index n, double range) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(uniform(rng, -range, range), uniform(rng, -range, range));
  return v;
}

Matrix random_hermitian(Rng& rng, Eigen::Index n, double range) {
  const Matrix m = random_complex(rng, n, range);
  return 0.5 * (m + m.adjoint());
}

Matrix random_psd(Rng& rng, Eigen::Index n, double range) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(random_hermitian(rng, n, range));
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

Matrix random_skew_hermitian(Rng& rng, Eigen::Index n) {
  for (;;) {
    const Matrix k = random_complex(rng, n, 1.0);
    Matrix J = k - k.adjoint();
    if (singular_values(J).minCoeff() >= 0.3) return J;
  }
}

Matrix singular_atom(Rng& rng, const Matrix& J, double range) {
  const auto n = J.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0.0, 1.0) * J);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(n - 1);
  if (!(lmin < 0.0 && lmax > 0.0)) return Matrix();
  // v^* J v = 0 is necessary: v^* dq v must be real.
  const double phase = uniform(rng, 0.0, 6.283185307179586);
  Vector v = std::sqrt(lmax) * es.eigenvectors().col(0) +
             std::polar(std::sqrt(-lmin), phase) * es.eigenvectors().col(n - 1);
  v.normalize();
  const Vector y = -2.0 * (J * v);
  const Complex vy = v.dot(y);
  const Matrix P = Matrix::Identity(n, n) - v * v.adjoint();
  Matrix dq = y * v.adjoint() + v * y.adjoint() - vy.real() * (v * v.adjoint()) +
              0.25 * P * random_hermitian(rng, n, range) * P;
  return 0.5 * (dq + dq.adjoint());
}

namespace {

Matrix closing_atom(Rng& rng, const Matrix& J, const Vector& p_in, double range) {
  const auto n = J.rows();
  const Vector p = p_in.normalized();
  const Vector y = 2.0 * (J * p);
  const Complex py = p.dot(y);
  const Matrix P = Matrix::Identity(n, n) - p * p.adjoint();
  Matrix dq = y * p.adjoint() + p * y.adjoint() - py.real() * (p * p.adjoint()) +
              0.25 * P * random_hermitian(rng, n, range) * P;
  return 0.5 * (dq + dq.adjoint());
}

// Replaces the q-atom at `right` so that the solution leaving ker B_+(left)
// arrives in ker B_-(right): that solution then vanishes outside [left, right].
void match_singular_pair(Rng& rng, Problem& problem, double left, double right, double range) {
  const Matrix K = nullspace(b_plus(problem, left), 1e-9);
  if (K.cols() == 0) return;
  const Vector v = K.col(0);
  // Interior atoms of (left, right) are regular, so the propagator exists.
  const FundamentalMatrix U(problem, {left, right});
  const Vector p = U.end_value() * v;
  std::vector<Atom> atoms = problem.q.atoms();
  for (auto& a : atoms) {
    if (a.x == right) a.mass = closing_atom(rng, problem.J, p, range);
  }
  problem.q = MeasureMatrix(problem.dim(), problem.q.interval(), problem.q.breakpoints(), problem.q.density_values(),
                            std::move(atoms));
}

}  // namespace

Instance random_instance(Rng& rng, const Options& opts) {
  const Eigen::Index n = uniform_int(rng, 1, opts.max_dim);
  Matrix J;
  if (n == 1) {
    const double g = uniform(rng, 0.5, 2.0) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0);
    J = Matrix::Constant(1, 1, Complex(0.0, g));
  } else if (n == 2 && uniform_int(rng, 0, 1)) {
    J = Matrix::Zero(2, 2);
    J(0, 1) = -1.0;
    J(1, 0) = 1.0;
  } else {
    J = random_skew_hermitian(rng, n);
  }

  const Window interval{-1.5, 1.5};
  const Window window{-1.0, 1.0};
  const int interior = uniform_int(rng, opts.min_interior, opts.max_interior);
  const bool can_be_singular = singular_atom(rng, J, opts.atom_range).size() > 0;
  const int singular_count = can_be_singular ? uniform_int(rng, 0, interior) : 0;

  const int regular_count = uniform_int(rng, 0, opts.max_regular_atoms);
  auto positions = spaced_positions(rng, interior + regular_count, window.lo + 0.05, window.hi - 0.05, 0.04);
  std::shuffle(positions.begin(), positions.end(), rng);

  Instance inst;
  std::map<double, Matrix> q_atoms;
  std::map<double, Matrix> w_atoms;
  auto regular_atom = [&] {
    for (;;) {
      Matrix dq = random_hermitian(rng, n, opts.atom_range);
      if (atom_regularity(J, dq) >= opts.min_regularity) return dq;
    }
  };
  for (int k = 0; k < interior; ++k) {
    const double x = positions[static_cast<std::size_t>(k)];
    if (k < singular_count) {
      q_atoms[x] = singular_atom(rng, J, opts.atom_range);
      inst.singular.push_back(x);
    } else {
      if (uniform_int(rng, 0, 1)) q_atoms[x] = regular_atom();
      inst.forced.push_back(x);
    }
  }
  for (int k = interior; k < interior + regular_count; ++k) q_atoms[positions[static_cast<std::size_t>(k)]] = regular_atom();

  // Half of the w-atoms reuse a q-atom or partition position.
  const int w_count = uniform_int(rng, 0, opts.max_w_atoms);
  for (int k = 0; k < w_count; ++k) {
    double x = uniform(rng, window.lo + 0.05, window.hi - 0.05);
    if (uniform_int(rng, 0, 1)) x = positions[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(positions.size()) - 1))];
    w_atoms[x] = random_psd(rng, n, opts.atom_range);
  }

  inst.problem.J = J;
  inst.problem.q = random_measure(rng, n, interval, false, opts.q_density_range, q_atoms);
  inst.problem.w = random_measure(rng, n, interval, true, opts.w_density_range, w_atoms);
  inst.window = window;
  std::sort(inst.singular.begin(), inst.singular.end());
  if (inst.singular.size() >= 2 && uniform(rng, 0.0, 1.0) < opts.compact_probability) {
    const auto k = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(inst.singular.size()) - 2));
    match_singular_pair(rng, inst.problem, inst.singular[k], inst.singular[k + 1], opts.atom_range);
  }
  std::sort(inst.forced.begin(), inst.forced.end());
  return inst;
}

L2Function random_function(Rng& rng, const Problem& problem, Window window) {
  const auto n = problem.dim();
  const int pieces = uniform_int(rng, 1, 4);
  std::vector<double> bp{window.lo};
  const double margin = 0.05 * window.length();
  for (double x : spaced_positions(rng, pieces - 1, window.lo + margin, window.hi - margin, margin)) bp.push_back(x);
  bp.push_back(window.hi);
  std::vector<Vector> values;
  for (int k = 0; k < pieces; ++k) values.push_back(random_vector(rng, n));
  std::vector<PointValue> points;
  for (const auto& atom : problem.w.atoms()) {
    if (window.contains_open(atom.x)) points.push_back({atom.x, random_vector(rng, n)});
  }
  return L2Function(window, std::move(bp), std::move(values), std::move(points));
}

L2Function constrained_function(Rng& rng, const BlockSystem& bs, Target target) {
  const auto& problem = bs.problem();
  const auto n = problem.dim();
  const Window window = bs.partition().window();
  std::vector<double> pos(bs.partition().points);
  for (const auto& U : bs.fundamentals()) pos.insert(pos.end(), U->knots().begin(), U->knots().end());
  const auto cuts = merge_knots(window, pos);
  std::vector<double> atoms;
  for (const auto& a : problem.w.atoms()) {
    if (window.contains_open(a.x)) atoms.push_back(a.x);
  }
  const auto pieces = static_cast<Eigen::Index>(cuts.size() - 1);
  const auto m = n * (pieces + static_cast<Eigen::Index>(atoms.size()));

  auto build = [&](const Vector& coeffs) {
    std::vector<Vector> values;
    for (Eigen::Index k = 0; k < pieces; ++k) values.push_back(coeffs.segment(k * n, n));
    std::vector<PointValue> points;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      points.push_back({atoms[a], coeffs.segment((pieces + static_cast<Eigen::Index>(a)) * n, n)});
    }
    return L2Function(window, cuts, values, points);
  };

  const Matrix& target_matrix = target == Target::block_rhs ? bs.B() : bs.B_m();
  const Matrix K = nullspace(target_matrix.adjoint(), bs.tolerances().rank);
  Matrix moments(bs.B().rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Vector e = Vector::Zero(m);
    e(i) = 1.0;
    const auto mv = bs.moments(build(e));
    moments.col(i) = target == Target::block_rhs ? mv.rhs : mv.F;
  }
  const Matrix free = nullspace(K.adjoint() * moments, 1e-12);
  return build(free * random_vector(rng, free.cols()));
}

}  // namespace measys::fuzz
