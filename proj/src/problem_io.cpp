#include "measys/problem_io.hpp"

#include <algorithm>
#include <set>

namespace measys::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::parse_error, path + ": " + msg);
}

void allow_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(path, "unknown key '" + key + "'");
  }
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path, std::string("missing key '") + key + "'");
  return obj.at(key);
}

double real_of(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Complex complex_of(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected a complex number as [re, im]");
  return {real_of(j[0], path + "[0]"), real_of(j[1], path + "[1]")};
}

Vector vector_of(const Json& j, const std::string& path, Eigen::Index n) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " complex entries");
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_of(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_of(const Json& j, const std::string& path, Eigen::Index n) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto rp = path + "[" + std::to_string(r) + "]";
    m.row(r) = vector_of(j[static_cast<std::size_t>(r)], rp, n).transpose();
  }
  return m;
}

Window window_of(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
  Window w{real_of(j[0], path + "[0]"), real_of(j[1], path + "[1]")};
  if (!(w.lo < w.hi)) fail(path, "expected lo < hi");
  return w;
}

// Pieces [{from, to, <value_key>}] tiling `span` without gaps or overlaps.
template <class Value>
std::pair<std::vector<double>, std::vector<Value>> pieces_of(const Json& arr, const std::string& path,
                                                             const char* value_key, Window span, Value fallback,
                                                             auto&& parse_value) {
  if (!arr.is_array()) fail(path, "expected an array of pieces");
  if (arr.empty()) return {{span.lo, span.hi}, {fallback}};
  struct Piece {
    double from, to;
    Value value;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto ip = path + "[" + std::to_string(i) + "]";
    allow_keys(arr[i], ip, {"from", "to", value_key});
    pieces.push_back({real_of(require(arr[i], ip, "from"), ip + ".from"), real_of(require(arr[i], ip, "to"), ip + ".to"),
                      parse_value(require(arr[i], ip, value_key), ip + "." + value_key)});
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.from < b.from; });
  std::vector<double> bp{pieces.front().from};
  std::vector<Value> values;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].from < pieces[i].to)) fail(path, "piece with from >= to");
    if (i > 0 && pieces[i].from != pieces[i - 1].to) fail(path, "pieces must tile without gaps or overlaps");
    bp.push_back(pieces[i].to);
    values.push_back(pieces[i].value);
  }
  if (bp.front() != span.lo || bp.back() != span.hi) fail(path, "pieces must cover the interval exactly");
  return {std::move(bp), std::move(values)};
}

MeasureMatrix measure_of(const Json& j, const std::string& path, Eigen::Index n, Window interval) {
  allow_keys(j, path, {"density", "atoms"});
  auto parse_matrix = [n](const Json& v, const std::string& p) { return matrix_of(v, p, n); };
  auto [bp, values] = j.contains("density")
                          ? pieces_of<Matrix>(j.at("density"), path + ".density", "matrix", interval,
                                              Matrix::Zero(n, n), parse_matrix)
                          : std::pair<std::vector<double>, std::vector<Matrix>>{{interval.lo, interval.hi},
                                                                                {Matrix::Zero(n, n)}};
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const auto& arr = j.at("atoms");
    if (!arr.is_array()) fail(path + ".atoms", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto ip = path + ".atoms[" + std::to_string(i) + "]";
      allow_keys(arr[i], ip, {"x", "matrix"});
      atoms.push_back({real_of(require(arr[i], ip, "x"), ip + ".x"), matrix_of(require(arr[i], ip, "matrix"), ip + ".matrix", n)});
    }
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    for (std::size_t i = 1; i < atoms.size(); ++i) {
      if (atoms[i].x == atoms[i - 1].x) fail(path + ".atoms", "duplicate atom position " + std::to_string(atoms[i].x));
    }
  }
  return MeasureMatrix(n, interval, std::move(bp), std::move(values), std::move(atoms));
}

L2Function function_of(const Json& j, const std::string& path, Eigen::Index n, Window interval) {
  allow_keys(j, path, {"pieces", "atom_values"});
  auto parse_vector = [n](const Json& v, const std::string& p) { return vector_of(v, p, n); };
  auto [bp, values] = pieces_of<Vector>(require(j, path, "pieces"), path + ".pieces", "vector", interval,
                                        Vector::Zero(n), parse_vector);
  std::vector<PointValue> points;
  if (j.contains("atom_values")) {
    const auto& arr = j.at("atom_values");
    if (!arr.is_array()) fail(path + ".atom_values", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto ip = path + ".atom_values[" + std::to_string(i) + "]";
      allow_keys(arr[i], ip, {"x", "vector"});
      points.push_back({real_of(require(arr[i], ip, "x"), ip + ".x"), vector_of(require(arr[i], ip, "vector"), ip + ".vector", n)});
    }
  }
  try {
    return L2Function(interval, std::move(bp), std::move(values), std::move(points));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

}  // namespace

ProblemFile parse_problem(const Json& doc) {
  allow_keys(doc, "$", {"n", "J", "interval", "q", "w", "f", "tolerances", "window", "forced_partition_points"});
  const auto& nj = require(doc, "$", "n");
  if (!nj.is_number_integer() || nj.get<long long>() < 1) fail("$.n", "expected a positive integer");
  const Eigen::Index n = nj.get<long long>();

  ProblemFile out;
  const Window interval = window_of(require(doc, "$", "interval"), "$.interval");
  out.problem.J = matrix_of(require(doc, "$", "J"), "$.J", n);
  out.problem.q = measure_of(require(doc, "$", "q"), "$.q", n, interval);
  out.problem.w = measure_of(require(doc, "$", "w"), "$.w", n, interval);
  if (doc.contains("f")) out.f = function_of(doc.at("f"), "$.f", n, interval);

  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    allow_keys(t, "$.tolerances", {"tol_sing", "tol_rank", "tol_solve", "tol_structure"});
    if (t.contains("tol_sing")) out.tol.sing = real_of(t.at("tol_sing"), "$.tolerances.tol_sing");
    if (t.contains("tol_rank")) out.tol.rank = real_of(t.at("tol_rank"), "$.tolerances.tol_rank");
    if (t.contains("tol_solve")) out.tol.solve = real_of(t.at("tol_solve"), "$.tolerances.tol_solve");
    if (t.contains("tol_structure")) out.tol.structure = real_of(t.at("tol_structure"), "$.tolerances.tol_structure");
  }
  out.window = interval;
  if (doc.contains("window")) {
    out.window = window_of(doc.at("window"), "$.window");
    if (out.window.lo < interval.lo || out.window.hi > interval.hi) fail("$.window", "window must lie inside the interval");
  }
  if (doc.contains("forced_partition_points")) {
    const auto& arr = doc.at("forced_partition_points");
    if (!arr.is_array()) fail("$.forced_partition_points", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.forced.push_back(real_of(arr[i], "$.forced_partition_points[" + std::to_string(i) + "]"));
    }
  }
  return out;
}

ProblemFile parse_problem_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::parse_error, std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
  return out;
}

}  // namespace measys::io
