#pragma once

#include <concepts>
#include <vector>

#include "measys/types.hpp"

namespace measys {

/// Closed-form description of a function on a smooth segment (s, e):
/// value(s + t) is the top block of exp(generator * t) * state.
struct LocalForm {
  Matrix generator;
  Vector state;
};

/// Anything that can be integrated against w on a window: L2Function and
/// PiecewiseSolution.
template <class F>
concept WindowFunction = requires(const F& f, double x, double y, Side side) {
  { f.window() } -> std::convertible_to<Window>;
  { f.dim() } -> std::convertible_to<Eigen::Index>;
  { f.value(x, side) } -> std::convertible_to<Vector>;
  { f.local_form(x, y) } -> std::convertible_to<LocalForm>;
  { f.knots() } -> std::convertible_to<std::vector<double>>;
};

struct PointValue {
  double x = 0.0;
  Vector value;
};

/// Piecewise-constant vector function on a closed window with optional explicit
/// values at isolated points (the representative used at atoms of w).
class L2Function {
 public:
  L2Function() = default;

  /// Throws not_representable unless the breakpoints are sorted and span the
  /// window with one value of the common dimension per piece.
  L2Function(Window window, std::vector<double> breakpoints, std::vector<Vector> values,
             std::vector<PointValue> point_values = {});

  static L2Function constant(Window window, const Vector& value);
  static L2Function zero(Eigen::Index dim, Window window);

  Window window() const { return window_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Vector>& values() const { return values_; }
  const std::vector<PointValue>& point_values() const { return point_values_; }

  /// One-sided limits come from the adjacent pieces. The balanced value is the
  /// explicit point value when one is stored at x, otherwise the average of
  /// the one-sided limits.
  Vector value(double x, Side side) const;
  LocalForm local_form(double s, double e) const;
  std::vector<double> knots() const;

  bool is_zero() const;

  /// Same function on a sub-window. Throws not_representable if `sub` is not
  /// inside the current window.
  L2Function restrict(Window sub) const;

 private:
  Window window_;
  Eigen::Index dim_ = 0;
  std::vector<double> breakpoints_;
  std::vector<Vector> values_;
  std::vector<PointValue> point_values_;
};

/// Sorted, deduplicated union of positions strictly inside (lo, hi), with lo and
/// hi prepended and appended.
std::vector<double> merge_knots(Window window, std::vector<double> positions);

}  // namespace measys
