#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "measys/coefficients.hpp"
#include "measys/function.hpp"

namespace measys::io {

using Json = nlohmann::json;

/// Parsed problem document. Keys: n, J, interval, q, w, and optionally f,
/// tolerances, window, forced_partition_points. Complex numbers are [re, im].
struct ProblemFile {
  Problem problem;
  std::optional<L2Function> f;
  Tolerances tol;
  Window window;  ///< defaults to the whole interval
  std::vector<double> forced;
};

/// Throws Error(parse_error) naming the offending key path.
ProblemFile parse_problem(const Json& doc);
ProblemFile parse_problem_text(const std::string& text);

Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const Vector& v);

}  // namespace measys::io
