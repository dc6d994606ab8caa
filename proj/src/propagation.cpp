#include "measys/propagation.hpp"

#include <algorithm>

#include "measys/linalg.hpp"

namespace measys {

namespace {

Matrix invert_j(const Matrix& J) {
  Eigen::FullPivLU<Matrix> lu(J);
  if (!lu.isInvertible()) throw Error(ErrorKind::singular_j, "J is not invertible");
  return lu.inverse();
}

std::vector<double> structure_positions(const MeasureMatrix& m) {
  std::vector<double> out(m.breakpoints().begin(), m.breakpoints().end());
  for (const auto& a : m.atoms()) out.push_back(a.x);
  return out;
}

}  // namespace

Matrix segment_exponential(const Matrix& J, const Matrix& q0, double dx) {
  return expm(-dx * (invert_j(J) * q0));
}

double atom_regularity(const Matrix& J, const Matrix& dq) {
  const auto sv = singular_values(b_plus(J, dq));
  return sv(sv.size() - 1) / std::max(1.0, sv(0));
}

Matrix atom_transfer(const Matrix& J, const Matrix& dq, double tol) {
  if (atom_regularity(J, dq) <= tol) {
    throw Error(ErrorKind::singular_atom, "atom transfer: B_+ is singular");
  }
  return b_plus(J, dq).fullPivLu().solve(b_minus(J, dq));
}

FundamentalMatrix::FundamentalMatrix(const Problem& problem, Window sub, double tol_sing)
    : J_(problem.J), interval_(sub) {
  if (!(sub.lo < sub.hi)) throw Error(ErrorKind::empty_window, "fundamental matrix: empty subinterval");
  const auto& full = problem.interval();
  if (sub.lo < full.lo || sub.hi > full.hi) {
    throw Error(ErrorKind::out_of_interval, "fundamental matrix: subinterval leaves (a,b)");
  }
  auto positions = structure_positions(problem.q);
  auto wpos = structure_positions(problem.w);
  positions.insert(positions.end(), wpos.begin(), wpos.end());
  knots_ = merge_knots(sub, std::move(positions));

  const Matrix J_inv = invert_j(J_);
  const auto n = dim();
  const std::size_t pieces = knots_.size() - 1;
  generators_.reserve(pieces);
  right_.reserve(pieces);
  left_.reserve(pieces);
  right_.push_back(Matrix::Identity(n, n));
  for (std::size_t k = 0; k < pieces; ++k) {
    const double s = knots_[k];
    const double e = knots_[k + 1];
    generators_.push_back(-J_inv * problem.q.density_at(0.5 * (s + e)));
    left_.push_back(expm(generators_.back() * (e - s)) * right_.back());
    if (k + 1 == pieces) break;
    const Matrix dq = problem.q.jump(e);
    if (dq.isZero(0.0)) {
      right_.push_back(left_.back());
      continue;
    }
    Matrix T;
    try {
      T = atom_transfer(J_, dq, tol_sing);
    } catch (const Error&) {
      throw Error(ErrorKind::singular_atom, "fundamental matrix: singular atom inside a subinterval", e);
    }
    right_.push_back(T * left_.back());
    transfers_.push_back({e, std::move(T)});
  }
}

std::size_t FundamentalMatrix::piece_of(double x) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  auto k = static_cast<std::ptrdiff_t>(it - knots_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(generators_.size()) - 1));
}

Matrix FundamentalMatrix::evaluate(double x, Side side) const {
  if (!interval_.contains_closed(x)) {
    throw Error(ErrorKind::out_of_interval, "fundamental matrix: evaluation outside the subinterval", x);
  }
  if (x == interval_.lo) return right_.front();
  if (x == interval_.hi) return end_value();
  const auto k = piece_of(x);
  if (x == knots_[k]) {
    switch (side) {
      case Side::left: return left_[k - 1];
      case Side::right: return right_[k];
      case Side::balanced: return 0.5 * (left_[k - 1] + right_[k]);
    }
  }
  return expm(generators_[k] * (x - knots_[k])) * right_[k];
}

const Matrix& FundamentalMatrix::generator(double s, double e) const { return generators_[piece_of(0.5 * (s + e))]; }

Vector inhomogeneous_integral(const FundamentalMatrix& U, const MeasureMatrix& w, const L2Function& f,
                              double upto) {
  const auto& sub = U.interval();
  if (!sub.contains_closed(upto)) {
    throw Error(ErrorKind::out_of_interval, "inhomogeneous integral: upper limit outside the subinterval", upto);
  }
  Vector acc = Vector::Zero(U.dim());
  if (upto == sub.lo) return acc;
  if (f.dim() != U.dim() || f.window().lo > sub.lo || f.window().hi < upto) {
    throw Error(ErrorKind::not_representable, "inhomogeneous integral: f does not cover the range");
  }
  const Window range{sub.lo, upto};
  auto positions = U.knots();
  auto fk = f.knots();
  positions.insert(positions.end(), fk.begin(), fk.end());
  const auto cuts = merge_knots(range, std::move(positions));

  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double s = cuts[k];
    const double e = cuts[k + 1];
    const double mid = 0.5 * (s + e);
    const Matrix& w0 = w.density_at(mid);
    if (w0.isZero(0.0)) continue;
    const Vector wf = w0 * f.value(mid, Side::right);
    if (wf.isZero(0.0)) continue;
    // U(s + t) = exp(M t) U^+(s), so the piece integrates to U^+(s)^* Phi(e - s)^* w0 f0.
    const Matrix phi = integrated_expm(U.generator(s, e), e - s);
    acc += U.evaluate(s, Side::right).adjoint() * (phi.adjoint() * wf);
  }
  for (const auto& atom : w.atoms()) {
    if (!range.contains_open(atom.x)) continue;
    acc += U.evaluate(atom.x, Side::balanced).adjoint() * (atom.mass * f.value(atom.x, Side::balanced));
  }
  return acc;
}

PiecewiseSolution::PiecewiseSolution(std::shared_ptr<const Problem> problem, std::vector<double> points,
                                     std::vector<std::shared_ptr<const FundamentalMatrix>> fundamentals,
                                     std::vector<Vector> coefficients, std::optional<L2Function> rhs)
    : problem_(std::move(problem)),
      points_(std::move(points)),
      fundamentals_(std::move(fundamentals)),
      coefficients_(std::move(coefficients)),
      rhs_(std::move(rhs)) {
  if (points_.size() < 2 || fundamentals_.size() + 1 != points_.size() ||
      coefficients_.size() != fundamentals_.size()) {
    throw Error(ErrorKind::dimension_mismatch, "piecewise solution: inconsistent partition data");
  }
  const auto n = problem_->dim();
  for (const auto& c : coefficients_) {
    if (c.size() != n) throw Error(ErrorKind::dimension_mismatch, "piecewise solution: coefficient size");
  }
  if (rhs_) {
    if (rhs_->dim() != n) throw Error(ErrorKind::dimension_mismatch, "piecewise solution: rhs dimension");
    const Window w = window();
    if (rhs_->window().lo > w.lo || rhs_->window().hi < w.hi) {
      throw Error(ErrorKind::window_mismatch, "piecewise solution: rhs does not cover the window");
    }
  }
  J_inv_ = invert_j(problem_->J);
  integrals_.reserve(fundamentals_.size());
  for (std::size_t j = 0; j < fundamentals_.size(); ++j) {
    if (rhs_) {
      integrals_.push_back(inhomogeneous_integral(*fundamentals_[j], problem_->w, *rhs_, points_[j + 1]));
    } else {
      integrals_.push_back(Vector::Zero(n));
    }
  }
}

std::size_t PiecewiseSolution::subinterval_of(double x) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), x);
  auto j = static_cast<std::ptrdiff_t>(it - points_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(fundamentals_.size()) - 1));
}

Vector PiecewiseSolution::homogeneous_shift(std::size_t j, double x, bool include_atom) const {
  Vector shift = coefficients_[j];
  if (!rhs_) return shift;
  const auto& U = *fundamentals_[j];
  Vector integral = inhomogeneous_integral(U, problem_->w, *rhs_, x);
  if (include_atom) {
    const auto& atoms = problem_->w.atoms();
    auto it = std::lower_bound(atoms.begin(), atoms.end(), x, [](const Atom& a, double v) { return a.x < v; });
    if (it != atoms.end() && it->x == x) {
      integral += U.evaluate(x, Side::balanced).adjoint() * (it->mass * rhs_->value(x, Side::balanced));
    }
  }
  return shift + J_inv_ * integral;
}

Vector PiecewiseSolution::value(double x, Side side) const {
  const Window w = window();
  if (!w.contains_closed(x)) {
    throw Error(ErrorKind::out_of_interval, "piecewise solution: evaluation outside the window", x);
  }
  const auto last = fundamentals_.size() - 1;
  auto end_limit = [&](std::size_t j) -> Vector {
    return fundamentals_[j]->end_value() * (coefficients_[j] + J_inv_ * integrals_[j]);
  };
  if (x == w.lo) return coefficients_.front();
  if (x == w.hi) return end_limit(last);

  const auto j = subinterval_of(x);
  if (x == points_[j]) {
    // Interior partition point: the left limit comes from the previous subinterval.
    switch (side) {
      case Side::left: return end_limit(j - 1);
      case Side::right: return coefficients_[j];
      case Side::balanced: return 0.5 * (end_limit(j - 1) + coefficients_[j]);
    }
  }
  const auto& U = *fundamentals_[j];
  auto left = [&] { return Vector(U.evaluate(x, Side::left) * homogeneous_shift(j, x, false)); };
  auto right = [&] { return Vector(U.evaluate(x, Side::right) * homogeneous_shift(j, x, true)); };
  switch (side) {
    case Side::left: return left();
    case Side::right: return right();
    case Side::balanced: break;
  }
  return 0.5 * (left() + right());
}

LocalForm PiecewiseSolution::local_form(double s, double e) const {
  const auto n = dim();
  const double mid = 0.5 * (s + e);
  const auto j = subinterval_of(mid);
  LocalForm form;
  form.generator = Matrix::Zero(2 * n, 2 * n);
  form.generator.topLeftCorner(n, n) = fundamentals_[j]->generator(s, e);
  form.generator.topRightCorner(n, n) = Matrix::Identity(n, n);
  form.state = Vector::Zero(2 * n);
  form.state.head(n) = value(s, Side::right);
  if (rhs_) {
    // u' = M u + J^{-1} w0 f0 on the segment.
    form.state.tail(n) = J_inv_ * (problem_->w.density_at(mid) * rhs_->value(mid, Side::right));
  }
  return form;
}

std::vector<double> PiecewiseSolution::knots() const {
  std::vector<double> out(points_.begin(), points_.end());
  for (const auto& U : fundamentals_) out.insert(out.end(), U->knots().begin(), U->knots().end());
  if (rhs_) {
    auto fk = rhs_->knots();
    out.insert(out.end(), fk.begin(), fk.end());
  }
  return out;
}

std::vector<Vector> PiecewiseSolution::interior_values() const {
  std::vector<Vector> out;
  for (std::size_t j = 1; j + 1 < points_.size(); ++j) out.push_back(value(points_[j], Side::balanced));
  return out;
}

PiecewiseSolution solve_ivp_regular(const Problem& problem, Window sub, double x0, const Vector& u0,
                                    const std::optional<L2Function>& f, double tol_sing) {
  if (!sub.contains_closed(x0)) {
    throw Error(ErrorKind::out_of_interval, "initial point outside the subinterval", x0);
  }
  if (u0.size() != problem.dim()) throw Error(ErrorKind::dimension_mismatch, "initial value size");
  auto shared = std::make_shared<const Problem>(problem);
  auto U = std::make_shared<const FundamentalMatrix>(problem, sub, tol_sing);
  const auto n = problem.dim();
  const std::vector<double> points{sub.lo, sub.hi};
  const PiecewiseSolution particular(shared, points, {U}, {Vector::Zero(n)}, f);
  const Vector offset = particular.value(x0, Side::balanced);
  const Vector c = U->evaluate(x0, Side::balanced).fullPivLu().solve(u0 - offset);
  return PiecewiseSolution(shared, points, {U}, {c}, f);
}

}  // namespace measys
