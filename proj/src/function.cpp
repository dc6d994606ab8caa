#include "measys/function.hpp"

#include <algorithm>

namespace measys {

L2Function::L2Function(Window window, std::vector<double> breakpoints, std::vector<Vector> values,
                       std::vector<PointValue> point_values)
    : window_(window),
      breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      point_values_(std::move(point_values)) {
  if (!(window_.lo < window_.hi)) {
    throw Error(ErrorKind::not_representable, "function: empty window");
  }
  if (values_.empty() || breakpoints_.size() != values_.size() + 1) {
    throw Error(ErrorKind::not_representable, "function: need K+1 breakpoints for K pieces");
  }
  if (breakpoints_.front() != window_.lo || breakpoints_.back() != window_.hi) {
    throw Error(ErrorKind::not_representable, "function: pieces must span the window exactly");
  }
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end(), std::less_equal<>())) {
    throw Error(ErrorKind::not_representable, "function: breakpoints must increase strictly");
  }
  dim_ = values_.front().size();
  for (const auto& v : values_) {
    if (v.size() != dim_) throw Error(ErrorKind::not_representable, "function: inconsistent piece dimension");
  }
  std::sort(point_values_.begin(), point_values_.end(),
            [](const PointValue& a, const PointValue& b) { return a.x < b.x; });
  for (std::size_t i = 0; i < point_values_.size(); ++i) {
    const auto& p = point_values_[i];
    if (p.value.size() != dim_) {
      throw Error(ErrorKind::not_representable, "function: inconsistent point value dimension");
    }
    if (!window_.contains_closed(p.x)) {
      throw Error(ErrorKind::not_representable, "function: point value outside the window", p.x);
    }
    if (i > 0 && point_values_[i - 1].x == p.x) {
      throw Error(ErrorKind::not_representable, "function: duplicate point value", p.x);
    }
  }
}

L2Function L2Function::constant(Window window, const Vector& value) {
  return L2Function(window, {window.lo, window.hi}, {value});
}

L2Function L2Function::zero(Eigen::Index dim, Window window) {
  return constant(window, Vector::Zero(dim));
}

Vector L2Function::value(double x, Side side) const {
  if (!window_.contains_closed(x)) {
    throw Error(ErrorKind::out_of_interval, "function: evaluation outside the window", x);
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto last = static_cast<std::ptrdiff_t>(values_.size()) - 1;
  auto right = std::min<std::ptrdiff_t>(it - breakpoints_.begin() - 1, last);
  auto left = right;
  // At a breakpoint the left limit comes from the previous piece.
  if (right > 0 && breakpoints_[static_cast<std::size_t>(right)] == x) left = right - 1;
  if (x == window_.hi) left = right = last;
  const auto& lv = values_[static_cast<std::size_t>(left)];
  const auto& rv = values_[static_cast<std::size_t>(right)];
  switch (side) {
    case Side::left: return lv;
    case Side::right: return rv;
    case Side::balanced: break;
  }
  auto p = std::lower_bound(point_values_.begin(), point_values_.end(), x,
                            [](const PointValue& a, double v) { return a.x < v; });
  if (p != point_values_.end() && p->x == x) return p->value;
  return 0.5 * (lv + rv);
}

LocalForm L2Function::local_form(double s, double e) const {
  const double mid = 0.5 * (s + e);
  LocalForm form;
  form.generator = Matrix::Zero(2 * dim_, 2 * dim_);
  form.state = Vector::Zero(2 * dim_);
  form.state.head(dim_) = value(mid, Side::right);
  return form;
}

std::vector<double> L2Function::knots() const {
  std::vector<double> out(breakpoints_.begin(), breakpoints_.end());
  for (const auto& p : point_values_) out.push_back(p.x);
  return out;
}

bool L2Function::is_zero() const {
  for (const auto& v : values_) {
    if (!v.isZero(0.0)) return false;
  }
  for (const auto& p : point_values_) {
    if (!p.value.isZero(0.0)) return false;
  }
  return true;
}

L2Function L2Function::restrict(Window sub) const {
  if (!(sub.lo < sub.hi) || sub.lo < window_.lo || sub.hi > window_.hi) {
    throw Error(ErrorKind::not_representable, "function: restriction window not inside the domain");
  }
  std::vector<double> cuts = merge_knots(sub, breakpoints_);
  std::vector<Vector> values;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) values.push_back(value(0.5 * (cuts[k] + cuts[k + 1]), Side::right));
  std::vector<PointValue> points;
  for (const auto& p : point_values_) {
    if (sub.contains_closed(p.x)) points.push_back(p);
  }
  return L2Function(sub, std::move(cuts), std::move(values), std::move(points));
}

std::vector<double> merge_knots(Window window, std::vector<double> positions) {
  std::erase_if(positions, [&](double x) { return !window.contains_open(x); });
  positions.push_back(window.lo);
  positions.push_back(window.hi);
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  return positions;
}

}  // namespace measys
