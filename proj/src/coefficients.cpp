#include "measys/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "measys/linalg.hpp"

namespace measys {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::out_of_interval: return "OutOfInterval";
    case ErrorKind::singular_j: return "SingularJ";
    case ErrorKind::singular_atom: return "SingularAtom";
    case ErrorKind::not_representable: return "NotRepresentable";
    case ErrorKind::empty_window: return "EmptyWindow";
    case ErrorKind::not_in_kernel: return "NotInKernel";
    case ErrorKind::inconsistent_lift: return "InconsistentLift";
    case ErrorKind::lift_endpoint_nonzero: return "LiftEndpointNonzero";
    case ErrorKind::window_mismatch: return "WindowMismatch";
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::missing_rhs: return "MissingRHS";
  }
  return "Unknown";
}

namespace {

void require_square(const Matrix& m, Eigen::Index dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim) {
    throw Error(ErrorKind::dimension_mismatch,
                std::string(what) + ": expected " + std::to_string(dim) + "x" + std::to_string(dim) +
                    ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

MeasureMatrix::MeasureMatrix(Eigen::Index dim, Window interval, std::vector<double> breakpoints,
                             std::vector<Matrix> density_values, std::vector<Atom> atoms)
    : dim_(dim),
      interval_(interval),
      breakpoints_(std::move(breakpoints)),
      density_(std::move(density_values)),
      atoms_(std::move(atoms)) {
  if (breakpoints_.size() < 2 || density_.size() + 1 != breakpoints_.size()) {
    throw Error(ErrorKind::dimension_mismatch, "measure: need M+1 breakpoints for M density values");
  }
  for (const auto& d : density_) require_square(d, dim_, "measure density");
  for (const auto& a : atoms_) require_square(a.mass, dim_, "measure atom");
}

MeasureMatrix MeasureMatrix::zero(Eigen::Index dim, Window interval) {
  return MeasureMatrix(dim, interval, {interval.lo, interval.hi}, {Matrix::Zero(dim, dim)}, {});
}

MeasureMatrix MeasureMatrix::uniform(Window interval, const Matrix& value, std::vector<Atom> atoms) {
  return MeasureMatrix(value.rows(), interval, {interval.lo, interval.hi}, {value}, std::move(atoms));
}

Matrix MeasureMatrix::jump(double x) const {
  if (!interval_.contains_open(x)) {
    throw Error(ErrorKind::out_of_interval, "jump: position outside the open interval", x);
  }
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, double v) { return a.x < v; });
  if (it != atoms_.end() && it->x == x) return it->mass;
  return Matrix::Zero(dim_, dim_);
}

const Matrix& MeasureMatrix::density_at(double x) const {
  // upper_bound picks the piece to the right of a breakpoint.
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  auto piece = static_cast<std::ptrdiff_t>(it - breakpoints_.begin()) - 1;
  piece = std::clamp<std::ptrdiff_t>(piece, 0, static_cast<std::ptrdiff_t>(density_.size()) - 1);
  return density_[static_cast<std::size_t>(piece)];
}

Matrix MeasureMatrix::antiderivative(double x, Side side) const {
  if (!interval_.contains_closed(x)) {
    throw Error(ErrorKind::out_of_interval, "antiderivative: position outside [a,b]", x);
  }
  Matrix acc = Matrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    const double lo = breakpoints_[i];
    const double hi = std::min(breakpoints_[i + 1], x);
    if (hi > lo) acc += (hi - lo) * density_[i];
  }
  for (const auto& a : atoms_) {
    if (a.x < x) {
      acc += a.mass;
    } else if (a.x == x) {
      if (side == Side::right) acc += a.mass;
      if (side == Side::balanced) acc += 0.5 * a.mass;
    }
  }
  return acc;
}

Matrix MeasureMatrix::total() const {
  Matrix acc = antiderivative(interval_.hi, Side::left);
  return acc;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double hermitian_defect(const Matrix& m) { return (m - m.adjoint()).norm(); }

double skew_hermitian_defect(const Matrix& m) { return (m + m.adjoint()).norm(); }

double min_hermitian_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

double structure_defect(const MeasureMatrix& m) {
  double worst = 0.0;
  const auto& bp = m.breakpoints();
  if (bp.front() != m.interval().lo || bp.back() != m.interval().hi) worst = 1.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    if (!(bp[i] < bp[i + 1])) worst = std::max(worst, bp[i] - bp[i + 1] + 1.0);
  }
  return worst;
}

double atom_order_defect(const MeasureMatrix& m) {
  double worst = 0.0;
  const auto& atoms = m.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!m.interval().contains_open(atoms[i].x)) worst = std::max(worst, 1.0);
    if (i > 0 && !(atoms[i - 1].x < atoms[i].x)) worst = std::max(worst, 1.0);
  }
  return worst;
}

}  // namespace

ValidationReport validate(const Problem& problem, double tol) {
  const auto n = problem.J.rows();
  require_square(problem.J, n, "J");
  if (problem.q.dim() != n || problem.w.dim() != n) {
    throw Error(ErrorKind::dimension_mismatch, "q and w must have the dimension of J");
  }
  ValidationReport report;

  const double smin = singular_values(problem.J).minCoeff();
  report.checks.push_back({"J invertible", smin, tol, smin > tol});
  const double skew = skew_hermitian_defect(problem.J);
  report.checks.push_back({"J skew-Hermitian", skew, tol, skew <= tol});

  double herm = 0.0;
  for (const auto& d : problem.q.density_values()) herm = std::max(herm, hermitian_defect(d));
  for (const auto& a : problem.q.atoms()) herm = std::max(herm, hermitian_defect(a.mass));
  report.checks.push_back({"q Hermitian", herm, tol, herm <= tol});

  // PSD defect: the Hermitian defect or the most negative eigenvalue, whichever is worse.
  double psd = 0.0;
  auto account = [&](const Matrix& m) {
    psd = std::max(psd, hermitian_defect(m));
    psd = std::max(psd, -min_hermitian_eigenvalue(m));
  };
  for (const auto& d : problem.w.density_values()) account(d);
  for (const auto& a : problem.w.atoms()) account(a.mass);
  report.checks.push_back({"w PSD", psd, tol, psd <= tol});

  double bp = std::max(structure_defect(problem.q), structure_defect(problem.w));
  if (!(problem.q.interval() == problem.w.interval())) bp = std::max(bp, 1.0);
  if (!(problem.q.interval().lo < problem.q.interval().hi)) bp = std::max(bp, 1.0);
  report.checks.push_back({"breakpoints sorted", bp, 0.0, bp == 0.0});

  const double at = std::max(atom_order_defect(problem.q), atom_order_defect(problem.w));
  report.checks.push_back({"atoms interior", at, 0.0, at == 0.0});
  return report;
}

Matrix b_plus(const Problem& problem, double x) { return b_plus(problem.J, problem.q.jump(x)); }

Matrix b_minus(const Problem& problem, double x) { return b_minus(problem.J, problem.q.jump(x)); }

}  // namespace measys
