// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "fuzz_support.hpp"
#include "measys/relations.hpp"
#include "support.hpp"

using namespace measys;
using namespace measys::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
  std::printf("%s  %2d  %-44s %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str());
  if (!v.pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

struct FuzzCase {
  fuzz::Instance inst;
  BlockSystem bs;
};

std::vector<FuzzCase> fuzz_set(std::uint64_t seed, int count) {
  fuzz::Rng rng(seed);
  std::vector<FuzzCase> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto inst = fuzz::random_instance(rng);
    auto bs = build_block_system(inst.problem, inst.window, {}, inst.forced);
    out.push_back({std::move(inst), std::move(bs)});
  }
  return out;
}

Matrix cbbc_target(const BlockSystem& bs) {
  const auto n = bs.dim();
  const auto cols = bs.B().cols();
  Matrix target = Matrix::Zero(cols, cols);
  target.topLeftCorner(n, n) = -bs.problem().J;
  target.bottomRightCorner(n, n) = bs.problem().J;
  return target;
}

// 1
Verdict block_identities(int count) {
  const auto start = std::chrono::steady_clock::now();
  const auto set = fuzz_set(2024, count);
  double full = 0.0;
  double reduced = 0.0;
  int with_singular = 0;
  for (const auto& c : set) {
    const auto& bs = c.bs;
    full = std::max(full, (bs.C().adjoint() * bs.B() - bs.B().adjoint() * bs.C() - cbbc_target(bs)).norm());
    reduced = std::max(reduced, (bs.C_m().adjoint() * bs.B() - bs.B_m().adjoint() * bs.C()).norm());
    with_singular += c.inst.singular.empty() ? 0 : 1;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool mixed = with_singular > 0 && with_singular < count;
  return {full <= 1e-10 && reduced <= 1e-10 && seconds < 10.0 && mixed,
          fmt("instances=%d singular=%d max|CB-BC-D|=%.2e max|CmB-BmC|=%.2e time=%.2fs", count, with_singular,
              full, reduced, seconds)};
}

// 2
Verdict kernel_bookkeeping(int count) {
  const auto set = fuzz_set(2024, count);
  int bad = 0;
  for (const auto& c : set) {
    const auto& B = c.bs.B();
    const auto ker = nullspace(B, 1e-10).cols();
    const auto coker = nullspace(B.adjoint(), 1e-10).cols();
    const auto oracle = B.cols() - oracle_rank(B, 1e-10);
    if (ker < c.bs.dim() || ker != c.bs.dim() + coker || ker != oracle) ++bad;
  }
  return {bad == 0, fmt("instances=%d violations=%d", count, bad)};
}

// 3
Verdict wronskian(int count) {
  const auto set = fuzz_set(2024, count);
  double flow = 0.0;
  double transfer = 0.0;
  int transfers = 0;
  for (const auto& c : set) {
    const Matrix& J = c.inst.problem.J;
    for (const auto& U : c.bs.fundamentals()) {
      const Window iv = U->interval();
      for (int k = 0; k < 64; ++k) {
        const double x = iv.lo + (k + 0.5) / 64.0 * iv.length();
        const Matrix Ux = U->evaluate(x, Side::left);
        flow = std::max(flow, (Ux.adjoint() * J * Ux - J).norm());
      }
      for (const auto& t : U->transfers()) {
        transfer = std::max(transfer, (t.matrix.adjoint() * J * t.matrix - J).norm());
        ++transfers;
      }
    }
  }
  return {flow <= 1e-10 && transfer <= 1e-10,
          fmt("max|U*JU-J|=%.2e max|T*JT-J|=%.2e transfers=%d", flow, transfer, transfers)};
}

// 4
Verdict delta_prime_oracle() {
  double worst = 0.0;
  for (double beta : {-2.0, -0.5, 0.5, 3.0}) {
    const Matrix T = atom_transfer(symplectic_j(), mat2(0.0, 0.0, 0.0, -beta));
    worst = std::max(worst, (T - mat2(1.0, beta, 0.0, 1.0)).norm());
  }
  return {worst <= 1e-12, fmt("max|T-[[1,b],[0,1]]|=%.2e", worst)};
}

// 5
Verdict instance_a_end_to_end() {
  const Window iv{-1.0, 1.0};
  const auto problem = instance_a();
  const auto singular = find_singular_points(problem, iv);
  const auto bs = build_block_system(problem, iv);
  const auto ker = nullspace(bs.B(), 1e-10).cols();
  const auto coker = nullspace(bs.B().adjoint(), 1e-10).cols();
  const auto compact = compact_support_solutions(bs);
  bool ok = singular == std::vector<double>{-0.5, 0.5} && ker == 3 && coker == 1 && compact.size() == 1;
  double value_err = 0.0;
  double jump = 0.0;
  if (compact.size() == 1) {
    const auto& u = compact.front().solution;
    for (double x : {-0.49, -0.2, 0.0, 0.25, 0.49}) value_err = std::max(value_err, (u.value(x, Side::balanced) - vec2(0.0, 2.0)).norm());
    for (double x : {-0.99, -0.7, -0.51, 0.51, 0.8, 0.99}) value_err = std::max(value_err, u.value(x, Side::balanced).norm());
    for (double x : {-0.5, 0.5}) {
      value_err = std::max(value_err, (u.value(x, Side::balanced) - vec2(0.0, 1.0)).norm());
      jump = std::max(jump, (b_plus(problem, x) * u.value(x, Side::right) -
                             b_minus(problem, x) * u.value(x, Side::left)).norm());
    }
  }
  ok = ok && value_err <= 1e-12 && jump <= 1e-10;
  return {ok, fmt("singular=%zu kerB=%ld kerB*=%ld compact=%zu value_err=%.2e jump=%.2e", singular.size(),
                  static_cast<long>(ker), static_cast<long>(coker), compact.size(), value_err, jump)};
}

// 6
Verdict instance_b_end_to_end() {
  const auto bs = build_block_system(instance_b(), {-1.0, 1.0});
  const auto ker = nullspace(bs.B(), 1e-10).cols();
  const auto compact = compact_support_solutions(bs);
  return {ker == 2 && compact.empty(), fmt("kerB=%ld compact=%zu", static_cast<long>(ker), compact.size())};
}

// 7
Verdict functional_identity_suite(int count) {
  fuzz::Rng rng(7007);
  int used = 0;
  double worst = 0.0;
  while (used < count) {
    const auto inst = fuzz::random_instance(rng);
    const auto bs = build_block_system(inst.problem, inst.window, {}, inst.forced);
    const Matrix K = nullspace(bs.B_m().adjoint(), 1e-10);
    if (K.cols() == 0) continue;
    const auto f = fuzz::random_function(rng, inst.problem, inst.window);
    // A random vector projected onto ker B_m^*.
    const Vector raw = fuzz::random_vector(rng, bs.B_m().rows());
    const Vector u_hat = K * (K.adjoint() * raw);
    const auto id = functional_identity(bs, bs.moments(f), u_hat);
    worst = std::max(worst, id.defect / ((1.0 + sup_norm(f)) * (1.0 + u_hat.norm())));
    ++used;
  }
  return {worst <= 1e-9, fmt("instances=%d max normalized defect=%.2e", used, worst)};
}

// 8
Verdict t0_suite(int count) {
  fuzz::Rng rng(8008);
  double endpoint = 0.0;
  double orth = 0.0;
  int refused = 0;
  int missing = 0;
  int solved = 0;
  for (int i = 0; i < count; ++i) {
    const auto inst = fuzz::random_instance(rng);
    const auto bs = build_block_system(inst.problem, inst.window, {}, inst.forced);
    const auto& w = inst.problem.w;

    const auto f = constrained_function(rng, bs, Target::endpoint_free);
    const auto ok = t0_solve(bs, f);
    if (!ok.solved()) {
      ++missing;
    } else {
      ++solved;
      const auto& u = ok.solution();
      endpoint = std::max(endpoint, u.value(inst.window.lo, Side::right).norm() + u.value(inst.window.hi, Side::left).norm());
      const double fnorm = std::sqrt(norm_squared(w, f));
      for (const auto& r : kernel_K0(inst.problem, inst.window, {}, inst.forced)) {
        orth = std::max(orth, std::abs(inner_product(w, f, r.solution)) / (1.0 + fnorm * std::sqrt(r.norm_squared)));
      }
    }

    const auto g = fuzz::random_function(rng, inst.problem, inst.window);
    const auto result = t0_solve(bs, g);
    if (result.projection_norm > 1e-6) {
      if (!result.solved() && std::abs(result.certificate().pairing) > 0.0) {
        ++refused;
      } else {
        ++missing;
      }
    }
  }
  return {missing == 0 && endpoint <= 1e-9 && orth <= 1e-8 && solved >= 100 && refused >= 100,
          fmt("solved=%d certificates=%d misses=%d max endpoint=%.2e max |<f,r>|=%.2e", solved, refused, missing,
              endpoint, orth)};
}

// 9
Verdict lagrange_suite(int count) {
  fuzz::Rng rng(9009);
  double worst = 0.0;
  double compact_worst = 0.0;
  int pairs = 0;
  int compact_pairs = 0;
  for (int i = 0; i < count; ++i) {
    const auto inst = fuzz::random_instance(rng);
    const auto bs = build_block_system(inst.problem, inst.window, {}, inst.forced);

    // Pairs from the block system on the whole window.
    const auto f = constrained_function(rng, bs, Target::block_rhs);
    const auto g = constrained_function(rng, bs, Target::block_rhs);
    const auto sf = solve_system(bs, bs.moments(f));
    const auto sg = solve_system(bs, bs.moments(g));
    if (!sf.consistent || !sg.consistent) return {false, "constrained right-hand side was not solvable"};
    worst = std::max(worst, lagrange_check(inst.problem, *sf.particular, f, *sg.particular, g).defect);
    ++pairs;

    // Pairs from initial value problems on a subinterval without singular atoms.
    const auto& pts = bs.partition().points;
    const std::size_t j = static_cast<std::size_t>(i) % (pts.size() - 1);
    const Window sub{pts[j], pts[j + 1]};
    const auto fs = fuzz::random_function(rng, inst.problem, sub);
    const auto gs = fuzz::random_function(rng, inst.problem, sub);
    const double x0 = fuzz::uniform(rng, sub.lo, sub.hi);
    const auto u = solve_ivp_regular(inst.problem, sub, x0, fuzz::random_vector(rng, bs.dim()), fs);
    const auto v = solve_ivp_regular(inst.problem, sub, x0, fuzz::random_vector(rng, bs.dim()), gs);
    worst = std::max(worst, lagrange_check(inst.problem, u, fs, v, gs).defect);
    ++pairs;

    const L2Function zero = L2Function::zero(bs.dim(), inst.window);
    for (const auto& c : compact_support_solutions(bs)) {
      const auto rep = lagrange_check(inst.problem, c.solution, zero, *sg.particular, g);
      compact_worst = std::max(compact_worst, std::abs(rep.lhs));
      ++compact_pairs;
    }
  }
  return {worst <= 1e-8 && compact_worst <= 1e-8 && compact_pairs > 0,
          fmt("pairs=%d max defect=%.2e compact pairs=%d max |<v,f>-<g,u>|=%.2e", pairs, worst, compact_pairs,
              compact_worst)};
}

// 10
Verdict numerical_kernels() {
  fuzz::Rng rng(1010);
  double taylor = 0.0;
  double plain = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + i % 3);
    const Matrix J = fuzz::random_skew_hermitian(rng, n);
    const Matrix q0 = fuzz::random_hermitian(rng, n, 2.0);
    const Matrix M = -J.inverse() * q0;
    const double target = fuzz::uniform(rng, 0.01, 5.0);
    const double dx = target / M.norm();
    const Matrix got = segment_exponential(J, q0, dx);
    const Matrix expected = scaled_taylor_exp(M * dx, 30);
    taylor = std::max(taylor, (got - expected).norm() / expected.norm());
    const Matrix unscaled = taylor_exp(M * dx, 30);
    plain = std::max(plain, (got - unscaled).norm() / unscaled.norm());
  }

  double quad = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto n = static_cast<Eigen::Index>(1 + i % 3);
    const Matrix J = fuzz::random_skew_hermitian(rng, n);
    const Matrix M = -J.inverse() * fuzz::random_hermitian(rng, n, 1.0);
    const double t = fuzz::uniform(rng, 0.05, 1.5);
    const Matrix got = integrated_expm(M, t);
    const Matrix expected = adaptive_simpson([&](double s) { return taylor_exp(M * s, 30); }, 0.0, t, 1e-11);
    quad = std::max(quad, (got - expected).norm() / (1.0 + expected.norm()));
  }
  return {taylor <= 1e-12 && quad <= 1e-8,
          fmt("max series rel err=%.2e (|M dx|<=5, unscaled series %.2e) max quadrature err=%.2e (50 segments)",
              taylor, plain, quad)};
}

// 11
int run_cli(const std::string& args, const std::string& out_file) {
  const std::string cmd = std::string(MEASYS_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict cli_contract() {
  const auto dir = std::filesystem::temp_directory_path() / ("measys_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string data = MEASYS_DATA_DIR;
  const std::string a = (dir / "a.json").string();
  const std::string b = (dir / "b.json").string();
  const std::string sink = (dir / "sink.json").string();

  const std::string verify = "verify --input " + data + "/instance_a.json --seed 1234 --random 20";
  const int first = run_cli(verify, a);
  const int second = run_cli(verify, b);
  const bool same = !slurp(a).empty() && slurp(a) == slurp(b);

  const int pass = run_cli("validate --input " + data + "/delta_prime.json", sink);
  const int check_fail = run_cli("validate --input " + data + "/negative_w.json", sink);
  const int parse_fail = run_cli("validate --input " + data + "/bad_j.json", sink);
  std::filesystem::remove_all(dir);

  const bool ok = same && first == 0 && second == 0 && pass == 0 && check_fail == 1 && parse_fail == 2;
  return {ok, fmt("identical=%s verify exit=%d/%d validate exits pass=%d check-fail=%d parse-fail=%d",
                  same ? "yes" : "no", first, second, pass, check_fail, parse_fail)};
}

template <class F>
Verdict guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  report(1, "block identity C*B - B*C", guarded([] { return block_identities(240); }));
  report(2, "kernel dimension bookkeeping", guarded([] { return kernel_bookkeeping(240); }));
  report(3, "Wronskian and transfer invariance", guarded([] { return wronskian(240); }));
  report(4, "delta-prime transfer oracle", guarded(delta_prime_oracle));
  report(5, "Instance A end to end", guarded(instance_a_end_to_end));
  report(6, "Instance B end to end", guarded(instance_b_end_to_end));
  report(7, "moment functional identity", guarded([] { return functional_identity_suite(120); }));
  report(8, "vanishing-endpoint solver and certificates", guarded([] { return t0_suite(150); }));
  report(9, "Lagrange identity", guarded([] { return lagrange_suite(120); }));
  report(10, "matrix exponential kernels", guarded(numerical_kernels));
  report(11, "CLI determinism and exit codes", guarded(cli_contract));
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
