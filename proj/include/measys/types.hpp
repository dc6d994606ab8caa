#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace measys {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Which value of a function of bounded variation is requested at a point.
enum class Side { left, right, balanced };

enum class ErrorKind {
  dimension_mismatch,
  out_of_interval,
  singular_j,
  singular_atom,
  not_representable,
  empty_window,
  not_in_kernel,
  inconsistent_lift,
  lift_endpoint_nonzero,
  window_mismatch,
  parse_error,
  missing_rhs,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<double> position = std::nullopt)
      : std::runtime_error(what), kind_(kind), position_(position) {}

  ErrorKind kind() const { return kind_; }
  /// Offending position on the real line, when the error is tied to one (singular atoms).
  std::optional<double> position() const { return position_; }

 private:
  ErrorKind kind_;
  std::optional<double> position_;
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains_open(double x) const { return lo < x && x < hi; }
  bool contains_closed(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Window&) const = default;
};

/// Default numerical thresholds; every entry point accepts overrides.
struct Tolerances {
  double structure = 1e-10;  ///< Hermitian / PSD / skew defects
  double sing = 1e-9;        ///< relative sigma_min threshold for singular atoms
  double rank = 1e-10;       ///< relative singular value cut for null spaces
  double solve = 1e-9;       ///< relative residual for consistency decisions
};

}  // namespace measys
