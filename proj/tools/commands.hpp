#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "measys/problem_io.hpp"

namespace measys::cli {

using io::Json;

inline constexpr int exit_pass = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_input_error = 2;

struct Options {
  std::string input;
  std::uint64_t seed = 0;
  int samples = 101;
  std::optional<double> tol_sing;
  std::optional<double> tol_rank;
  std::vector<std::string> checks;  ///< verify suites; empty selects all
  int random = 0;                   ///< extra fuzz instances for verify
};

struct Outcome {
  Json report;
  int exit_code = exit_pass;
};

/// Names accepted by --checks.
const std::vector<std::string>& verify_suites();

/// Runs one mode (validate, analyze, solve, kernel, compact, verify) on the
/// problem file named in `opts`. Never throws for bad input: parse and usage
/// errors become a report with exit code 2.
Outcome run(const std::string& mode, const Options& opts);

}  // namespace measys::cli
