#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "measys/blocksystem.hpp"
#include "measys/fuzz.hpp"
#include "measys/inner_product.hpp"
#include "measys/linalg.hpp"
#include "measys/relations.hpp"
#include "measys/solutions.hpp"

namespace measys::cli {

namespace {

using io::to_json;

constexpr double kWronskianTol = 1e-10;
constexpr double kBlockTol = 1e-10;
constexpr double kLiftTol = 1e-9;
constexpr double kFunctionalTol = 1e-9;
constexpr double kLagrangeTol = 1e-8;
constexpr double kEndpointTol = 1e-9;
constexpr double kOrthogonalityTol = 1e-8;
constexpr double kCertificateThreshold = 1e-6;
constexpr double kJumpTol = 1e-10;
constexpr int kWronskianSamples = 64;
// Regular atoms whose B_+ is this close to singular are flagged in analyze.
constexpr double kConditionWarning = 1e6;

// One row of the check table.
struct Row {
  std::string name;
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;
};

Row make_row(std::string name, double defect, double tolerance) {
  return {std::move(name), defect, tolerance, std::isfinite(defect) && defect <= tolerance, {}};
}

Json row_json(const Row& r) {
  Json j{{"name", r.name}, {"defect", r.defect}, {"tolerance", r.tolerance}, {"pass", r.pass}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

class CheckTable {
 public:
  void add(Row r) { rows_.push_back(std::move(r)); }
  void add(const Check& c) { rows_.push_back({c.name, c.defect, c.tolerance, c.pass, {}}); }
  bool passed() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const Row& r) { return r.pass; });
  }
  Json json() const {
    Json arr = Json::array();
    for (const auto& r : rows_) arr.push_back(row_json(r));
    return arr;
  }

 private:
  std::vector<Row> rows_;
};

double sup_norm(const L2Function& f) {
  double top = 0.0;
  for (const auto& v : f.values()) top = std::max(top, v.norm());
  for (const auto& p : f.point_values()) top = std::max(top, p.value.norm());
  return top;
}

std::vector<double> sample_grid(Window window, int samples) {
  std::vector<double> grid;
  if (samples == 1) return {0.5 * (window.lo + window.hi)};
  for (int i = 0; i < samples; ++i) grid.push_back(window.lo + window.length() * i / (samples - 1));
  grid.back() = window.hi;
  return grid;
}

Json sampled(const PiecewiseSolution& u, const std::vector<double>& grid) {
  Json values = Json::array();
  for (double x : grid) values.push_back(to_json(u.value(x, Side::balanced)));
  return values;
}

Json window_json(Window w) { return Json::array({w.lo, w.hi}); }

Json tolerances_json(const Tolerances& tol) {
  return {{"tol_sing", tol.sing}, {"tol_rank", tol.rank}, {"tol_solve", tol.solve}, {"tol_structure", tol.structure}};
}

Json partition_json(const Partition& p) {
  Json kinds = Json::array();
  for (auto k : p.kinds) kinds.push_back(to_string(k));
  return {{"points", p.points}, {"kinds", kinds}, {"N", p.interior_count()}};
}

// Largest defect of B_+ u^+ - B_- u^- over the q- and w-atoms inside the window
// (homogeneous solutions only).
double jump_defect(const Problem& problem, const PiecewiseSolution& u) {
  double worst = 0.0;
  const Window window = u.window();
  std::vector<double> positions;
  for (const auto& a : problem.q.atoms()) positions.push_back(a.x);
  for (const auto& a : problem.w.atoms()) positions.push_back(a.x);
  for (double x : positions) {
    if (!window.contains_open(x)) continue;
    const Vector d = b_plus(problem, x) * u.value(x, Side::right) - b_minus(problem, x) * u.value(x, Side::left);
    worst = std::max(worst, d.norm() / (1.0 + u.value(x, Side::balanced).norm()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// verify suites

struct VerifyInstance {
  std::string label;
  Problem problem;
  Window window;
  std::vector<double> forced;
  Tolerances tol;
  std::optional<L2Function> f;
};

using Suite = std::function<void(const VerifyInstance&, const BlockSystem&, fuzz::Rng&, CheckTable&)>;

Vector random_kernel_vector(fuzz::Rng& rng, const Matrix& K) { return K * fuzz::random_vector(rng, K.cols()); }

void suite_cbbc(const VerifyInstance& inst, const BlockSystem& bs, fuzz::Rng&, CheckTable& table) {
  const auto n = bs.dim();
  const auto cols = bs.B().cols();
  Matrix target = Matrix::Zero(cols, cols);
  target.topLeftCorner(n, n) = -bs.problem().J;
  target.bottomRightCorner(n, n) = bs.problem().J;
  const Matrix full = bs.C().adjoint() * bs.B() - bs.B().adjoint() * bs.C() - target;
  const Matrix reduced = bs.C_m().adjoint() * bs.B() - bs.B_m().adjoint() * bs.C();
  table.add(make_row("cbbc/" + inst.label, full.norm(), kBlockTol));
  table.add(make_row("cbbc_m/" + inst.label, reduced.norm(), kBlockTol));
}

void suite_wronskian(const VerifyInstance& inst, const BlockSystem& bs, fuzz::Rng&, CheckTable& table) {
  const Matrix& J = bs.problem().J;
  double flow = 0.0;
  double transfer = 0.0;
  for (const auto& U : bs.fundamentals()) {
    const Window iv = U->interval();
    for (int k = 0; k < kWronskianSamples; ++k) {
      const double x = iv.lo + (k + 0.5) / kWronskianSamples * iv.length();
      const Matrix Ux = U->evaluate(x, Side::left);
      flow = std::max(flow, (Ux.adjoint() * J * Ux - J).norm());
    }
    flow = std::max(flow, (U->end_value().adjoint() * J * U->end_value() - J).norm());
    for (const auto& t : U->transfers()) transfer = std::max(transfer, (t.matrix.adjoint() * J * t.matrix - J).norm());
  }
  table.add(make_row("wronskian/" + inst.label, flow, kWronskianTol));
  table.add(make_row("transfer/" + inst.label, transfer, kWronskianTol));
}

void suite_lift(const VerifyInstance& inst, const BlockSystem& bs, fuzz::Rng& rng, CheckTable& table) {
  const Matrix K = nullspace(bs.B_m().adjoint(), bs.tolerances().rank);
  double defect = 0.0;
  if (K.cols() > 0) {
    const Vector u_hat = random_kernel_vector(rng, K);
    const Vector lifted = lift_kernel_vector(bs, u_hat);
    defect = ((bs.B() * lifted).norm() + (bs.C() * lifted - u_hat).norm()) / (1.0 + lifted.norm());
  }
  table.add(make_row("lift/" + inst.label, defect, kLiftTol));
}

void suite_functional(const VerifyInstance& inst, const BlockSystem& bs, fuzz::Rng& rng, CheckTable& table) {
  const Matrix K = nullspace(bs.B_m().adjoint(), bs.tolerances().rank);
  const L2Function f = inst.f ? *inst.f : fuzz::random_function(rng, inst.problem, inst.window);
  double defect = 0.0;
  if (K.cols() > 0) {
    const Vector u_hat = random_kernel_vector(rng, K);
    const auto id = functional_identity(bs, bs.moments(f), u_hat);
    defect = id.defect / ((1.0 + sup_norm(f)) * (1.0 + u_hat.norm()));
  }
  table.add(make_row("functional/" + inst.label, defect, kFunctionalTol));
}

void suite_lagrange(const VerifyInstance& inst, const BlockSystem& bs, fuzz::Rng& rng, CheckTable& table) {
  const auto f = fuzz::constrained_function(rng, bs, fuzz::Target::block_rhs);
  const auto g = fuzz::constrained_function(rng, bs, fuzz::Target::block_rhs);
  const auto sf = solve_system(bs, bs.moments(f));
  const auto sg = solve_system(bs, bs.moments(g));
  if (!sf.consistent || !sg.consistent) {
    Row r = make_row("lagrange/" + inst.label, std::numeric_limits<double>::infinity(), kLagrangeTol);
    r.error = "constrained right-hand side was not solvable";
    table.add(r);
    return;
  }
  table.add(make_row("lagrange/" + inst.label,
                     lagrange_check(inst.problem, *sf.particular, f, *sg.particular, g).defect, kLagrangeTol));

  double compact = 0.0;
  const L2Function zero = L2Function::zero(bs.dim(), inst.window);
  for (const auto& c : compact_support_solutions(bs)) {
    compact = std::max(compact, std::abs(lagrange_check(inst.problem, c.solution, zero, *sg.particular, g).lhs));
  }
  table.add(make_row("lagrange_compact/" + inst.label, compact, kLagrangeTol));
}

void suite_t0(const VerifyInstance& inst, const BlockSystem& bs, fuzz::Rng& rng, CheckTable& table) {
  const auto& w = inst.problem.w;
  const auto f = fuzz::constrained_function(rng, bs, fuzz::Target::endpoint_free);
  const auto result = t0_solve(bs, f);
  if (!result.solved()) {
    Row r = make_row("t0_endpoints/" + inst.label, std::numeric_limits<double>::infinity(), kEndpointTol);
    r.error = "orthogonal right-hand side was refused";
    table.add(r);
  } else {
    const auto& u = result.solution();
    table.add(make_row("t0_endpoints/" + inst.label,
                       u.value(inst.window.lo, Side::right).norm() + u.value(inst.window.hi, Side::left).norm(),
                       kEndpointTol));
    double orth = 0.0;
    const double fnorm = std::sqrt(norm_squared(w, f));
    for (const auto& r : solve_homogeneous(bs).kernel_basis) {
      const double rnorm = std::sqrt(norm_squared(w, r));
      orth = std::max(orth, std::abs(inner_product(w, f, r)) / (1.0 + fnorm * rnorm));
    }
    table.add(make_row("t0_orthogonality/" + inst.label, orth, kOrthogonalityTol));
  }

  // Converse: a generic f with a visible kernel component must be refused with a witness.
  const auto g = fuzz::random_function(rng, inst.problem, inst.window);
  const auto refused = t0_solve(bs, g);
  double miss = 0.0;
  if (refused.projection_norm > kCertificateThreshold) {
    miss = (!refused.solved() && std::abs(refused.certificate().pairing) > 0.0) ? 0.0 : 1.0;
  }
  table.add(make_row("t0_certificate/" + inst.label, miss, 0.0));
}

const std::map<std::string, Suite>& suite_table() {
  static const std::map<std::string, Suite> suites{
      {"cbbc", suite_cbbc},         {"wronskian", suite_wronskian}, {"lift", suite_lift},
      {"functional", suite_functional}, {"lagrange", suite_lagrange}, {"t0", suite_t0},
  };
  return suites;
}

// ---------------------------------------------------------------------------
// commands

struct Loaded {
  Json doc;
  io::ProblemFile file;
};

Loaded load(const Options& opts) {
  std::ifstream in(opts.input);
  if (!in) throw Error(ErrorKind::parse_error, "cannot open input file '" + opts.input + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::parse_error, std::string("invalid JSON: ") + e.what());
  }
  io::ProblemFile file = io::parse_problem(doc);
  if (opts.tol_sing) file.tol.sing = *opts.tol_sing;
  if (opts.tol_rank) file.tol.rank = *opts.tol_rank;
  return {std::move(doc), std::move(file)};
}

Json cmd_analyze(const io::ProblemFile& pf) {
  const auto& problem = pf.problem;
  Json atoms = Json::array();
  Json warnings = Json::array();
  for (const auto& atom : problem.q.atoms()) {
    const Eigen::VectorXd sv = singular_values(b_plus(problem.J, atom.mass));
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double regularity = atom_regularity(problem.J, atom.mass);
    const bool singular = regularity <= pf.tol.sing;
    const bool in_window = pf.window.contains_open(atom.x);
    Json a{{"x", atom.x},         {"sigma_min", smin},   {"sigma_max", smax},
           {"regularity", regularity}, {"singular", singular}, {"in_window", in_window}};
    if (smin > 0.0) a["condition"] = smax / smin;
    atoms.push_back(a);
    if (in_window && !singular && smax > kConditionWarning * smin) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "ill-conditioned atom at x = " << atom.x << ": sigma_max/sigma_min = " << smax / smin;
      warnings.push_back(msg.str());
    }
  }
  const auto singular = find_singular_points(problem, pf.window, pf.tol.sing);
  const auto bs = build_block_system(problem, pf.window, pf.tol, pf.forced);
  const auto kerB = nullspace(bs.B(), pf.tol.rank).cols();
  const auto kerBs = nullspace(bs.B().adjoint(), pf.tol.rank).cols();
  return {{"q_atoms", atoms},
          {"singular_points", singular},
          {"singular_count", singular.size()},
          {"partition", partition_json(bs.partition())},
          {"dim_ker_B", kerB},
          {"dim_ker_B_adjoint", kerBs},
          {"warnings", warnings}};
}

Json cmd_solve(const io::ProblemFile& pf, const Options& opts, CheckTable& table) {
  if (!pf.f) throw Error(ErrorKind::missing_rhs, "solve needs a right-hand side: add key 'f' to the problem file");
  const auto bs = build_block_system(pf.problem, pf.window, pf.tol, pf.forced);
  const auto mv = bs.moments(*pf.f);
  const auto set = solve_system(bs, mv);
  const auto grid = sample_grid(pf.window, opts.samples);
  table.add(make_row("consistent", set.residual, pf.tol.solve * (1.0 + mv.rhs.norm())));

  Json kernel = Json::array();
  for (Eigen::Index k = 0; k < set.kernel.cols(); ++k) {
    kernel.push_back({{"coefficients", to_json(Vector(set.kernel.col(k)))},
                      {"values", sampled(set.kernel_basis[static_cast<std::size_t>(k)], grid)}});
  }
  Json out{{"consistent", set.consistent},
           {"residual", set.residual},
           {"partition", partition_json(bs.partition())},
           {"grid", grid},
           {"kernel_dimension", set.kernel.cols()},
           {"kernel_basis", kernel}};
  if (set.particular) {
    out["particular"] = {{"coefficients", to_json(set.coefficients)}, {"values", sampled(*set.particular, grid)}};
  } else {
    out["particular"] = nullptr;
  }
  return out;
}

Json cmd_kernel(const io::ProblemFile& pf, const Options& opts, CheckTable& table) {
  const auto bs = build_block_system(pf.problem, pf.window, pf.tol, pf.forced);
  const auto set = solve_homogeneous(bs);
  const auto n = bs.dim();
  const auto kerB = set.kernel.cols();
  const auto kerBs = nullspace(bs.B().adjoint(), pf.tol.rank).cols();
  table.add(make_row("dim ker B >= n", static_cast<double>(std::max<Eigen::Index>(0, n - kerB)), 0.0));
  table.add(make_row("dim ker B = n + dim ker B*", static_cast<double>(std::abs(kerB - n - kerBs)), 0.0));

  const auto grid = sample_grid(pf.window, opts.samples);
  Json basis = Json::array();
  for (Eigen::Index k = 0; k < kerB; ++k) {
    const auto& u = set.kernel_basis[static_cast<std::size_t>(k)];
    const double nsq = norm_squared(pf.problem.w, u);
    table.add(make_row("jump condition [" + std::to_string(k) + "]", jump_defect(pf.problem, u), kJumpTol));
    basis.push_back({{"coefficients", to_json(Vector(set.kernel.col(k)))},
                     {"norm_squared", nsq},
                     {"degenerate", nsq <= pf.tol.structure},
                     {"values", sampled(u, grid)}});
  }
  return {{"partition", partition_json(bs.partition())},
          {"dim_ker_B", kerB},
          {"dim_ker_B_adjoint", kerBs},
          {"grid", grid},
          {"basis", basis}};
}

Json cmd_compact(const io::ProblemFile& pf, const Options& opts, CheckTable& table) {
  const auto bs = build_block_system(pf.problem, pf.window, pf.tol, pf.forced);
  const auto compact = compact_support_solutions(bs);
  const auto& pts = bs.partition().points;
  const auto grid = sample_grid(pf.window, opts.samples);
  Json list = Json::array();
  for (std::size_t k = 0; k < compact.size(); ++k) {
    const auto& c = compact[k];
    const std::string tag = "[" + std::to_string(k) + "]";
    table.add(make_row("endpoint vanishing " + tag, c.endpoint_defect, kEndpointTol));
    table.add(make_row("jump condition " + tag, jump_defect(pf.problem, c.solution), kJumpTol));
    list.push_back({{"u_hat", to_json(c.u_hat)},
                    {"coefficients", to_json(c.coefficients)},
                    {"endpoint_defect", c.endpoint_defect},
                    {"support", Json::array({pts[1], pts[pts.size() - 2]})},
                    {"values", sampled(c.solution, grid)}});
  }
  return {{"partition", partition_json(bs.partition())},
          {"dim_ker_B_adjoint", nullspace(bs.B().adjoint(), pf.tol.rank).cols()},
          {"grid", grid},
          {"solutions", list}};
}

Json cmd_verify(const io::ProblemFile& pf, const Options& opts, CheckTable& table) {
  std::vector<std::string> names = opts.checks.empty() ? verify_suites() : opts.checks;

  std::vector<VerifyInstance> instances;
  instances.push_back({"file", pf.problem, pf.window, pf.forced, pf.tol, pf.f});
  fuzz::Rng generator(opts.seed);
  for (int i = 0; i < opts.random; ++i) {
    auto inst = fuzz::random_instance(generator);
    instances.push_back({"random " + std::to_string(i), std::move(inst.problem), inst.window, std::move(inst.forced),
                         pf.tol, std::nullopt});
  }

  Json summary = Json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    // Each instance draws from its own stream so suite selection does not shift later instances.
    std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(i)};
    fuzz::Rng rng(seq);
    Json entry{{"label", inst.label}, {"n", inst.problem.dim()}, {"window", window_json(inst.window)}};
    try {
      const auto bs = build_block_system(inst.problem, inst.window, inst.tol, inst.forced);
      entry["N"] = bs.interior_count();
      entry["singular_points"] = find_singular_points(inst.problem, inst.window, inst.tol.sing);
      for (const auto& name : names) {
        try {
          suite_table().at(name)(inst, bs, rng, table);
        } catch (const Error& e) {
          Row r = make_row(name + "/" + inst.label, std::numeric_limits<double>::infinity(), 0.0);
          r.error = std::string(to_string(e.kind())) + ": " + e.what();
          table.add(r);
        }
      }
    } catch (const Error& e) {
      Row r = make_row("assemble/" + inst.label, std::numeric_limits<double>::infinity(), 0.0);
      r.error = std::string(to_string(e.kind())) + ": " + e.what();
      table.add(r);
    }
    summary.push_back(entry);
  }
  return {{"suites", names}, {"instances", summary}};
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse_error:
    case ErrorKind::missing_rhs:
    case ErrorKind::out_of_interval:
    case ErrorKind::empty_window:
    case ErrorKind::dimension_mismatch:
    case ErrorKind::not_representable:
      return true;
    default:
      return false;
  }
}

Json inputs_json(const std::string& mode, const Options& opts) {
  Json checks = Json::array();
  for (const auto& c : opts.checks) checks.push_back(c);
  Json j{{"mode", mode}, {"input", opts.input}, {"seed", opts.seed}, {"samples", opts.samples},
         {"random", opts.random}, {"checks", checks}};
  j["tol_sing"] = opts.tol_sing ? Json(*opts.tol_sing) : Json(nullptr);
  j["tol_rank"] = opts.tol_rank ? Json(*opts.tol_rank) : Json(nullptr);
  return j;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"cbbc", "wronskian", "lift", "functional", "lagrange", "t0"};
  return names;
}

Outcome run(const std::string& mode, const Options& opts) {
  Outcome out;
  out.report = {{"command", mode}, {"inputs", inputs_json(mode, opts)}};
  auto fail_input = [&](const std::string& kind, const std::string& message) {
    out.report["error"] = {{"kind", kind}, {"message", message}};
    out.report["status"] = "input_error";
    out.exit_code = exit_input_error;
    return out;
  };

  static const std::vector<std::string> modes{"validate", "analyze", "solve", "kernel", "compact", "verify"};
  if (std::find(modes.begin(), modes.end(), mode) == modes.end()) return fail_input("usage", "unknown mode '" + mode + "'");
  if (opts.samples < 1) return fail_input("usage", "--samples must be at least 1");
  if (opts.random < 0) return fail_input("usage", "--random must be non-negative");
  for (const auto& c : opts.checks) {
    if (!suite_table().count(c)) return fail_input("usage", "unknown check '" + c + "'");
  }

  CheckTable table;
  try {
    const Loaded loaded = load(opts);
    const auto& pf = loaded.file;
    out.report["inputs"]["problem"] = loaded.doc;
    out.report["inputs"]["tolerances"] = tolerances_json(pf.tol);
    out.report["inputs"]["window"] = window_json(pf.window);

    const auto validation = validate(pf.problem, pf.tol.structure);
    for (const auto& c : validation.checks) table.add(c);

    if (mode == "validate" || !validation.passed()) {
      out.report["results"] = {{"n", pf.problem.dim()}, {"valid", validation.passed()}};
    } else if (mode == "analyze") {
      out.report["results"] = cmd_analyze(pf);
    } else if (mode == "solve") {
      out.report["results"] = cmd_solve(pf, opts, table);
    } else if (mode == "kernel") {
      out.report["results"] = cmd_kernel(pf, opts, table);
    } else if (mode == "compact") {
      out.report["results"] = cmd_compact(pf, opts, table);
    } else {
      out.report["results"] = cmd_verify(pf, opts, table);
    }
  } catch (const Error& e) {
    if (is_input_error(e.kind())) return fail_input(to_string(e.kind()), e.what());
    Row r = make_row("run", std::numeric_limits<double>::infinity(), 0.0);
    r.error = std::string(to_string(e.kind())) + ": " + e.what();
    table.add(r);
  }

  out.report["checks"] = table.json();
  const bool ok = table.passed();
  out.report["status"] = ok ? "pass" : "fail";
  out.exit_code = ok ? exit_pass : exit_check_failed;
  return out;
}

}  // namespace measys::cli
