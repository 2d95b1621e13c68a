#include "hodlr/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "hodlr/bench.hpp"
#include "hodlr/errors.hpp"
#include "hodlr/factorization.hpp"
#include "hodlr/io.hpp"
#include "hodlr/verify.hpp"

namespace hodlr::cli {

namespace {

struct BenchArgs {
  BenchConfig cfg;
  std::string csv;
};

struct VerifyArgs {
  VerifyConfig cfg;
  std::string matrix;
};

struct SolveArgs {
  std::string matrix;
  std::string rhs;
  bool adjoint = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  std::ofstream csv(a.csv);
  if (!csv) {
    err << "error: cannot write " << a.csv << '\n';
    return kInputError;
  }
  write_csv_header(csv);
  out << std::setw(6) << "level" << std::setw(10) << "n" << std::setw(14)
      << "setup s/dof" << std::setw(14) << "solve s/dof" << std::setw(14)
      << "residual" << '\n';
  run_bench(a.cfg, [&](const BenchRow& r) {
    write_csv_row(csv, r);
    csv.flush();
    out << std::setw(6) << r.level << std::setw(10) << r.n
        << std::scientific << std::setprecision(3) << std::setw(14)
        << r.setup_seconds_per_dof() << std::setw(14)
        << r.solve_seconds_per_dof() << std::setw(14) << r.residual_inf
        << std::defaultfloat << '\n';
  });
  if (!csv) {
    err << "error: write failed: " << a.csv << '\n';
    return kInputError;
  }
  return kOk;
}

void print_check(std::ostream& out, const CheckResult& c) {
  out << (c.passed ? "PASS " : "FAIL ") << c.name << " cases=" << c.cases
      << " worst=" << std::setprecision(3) << std::scientific << c.worst
      << " tol=" << c.tolerance << std::defaultfloat;
  if (!c.detail.empty()) out << " (" << c.detail << ')';
  out << '\n';
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  if (a.cfg.levels < 0 || a.cfg.seeds < 0) {
    err << "error: levels and seeds must be nonnegative\n";
    return kInputError;
  }
  bool ok = true;
  for (const auto& c : run_verify(a.cfg)) {
    print_check(out, c);
    ok = ok && c.passed;
  }
  if (!a.matrix.empty()) {
    const auto A = load_hmatrix(a.matrix);
    const auto c = verify_matrix(A);
    print_check(out, c);
    ok = ok && c.passed;
  }
  out << (ok ? "all checks passed" : "verification FAILED") << '\n';
  return ok ? kOk : kVerificationFailed;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  auto A = load_hmatrix(a.matrix);
  VectorXd x = load_vector(a.rhs);
  if (x.size() != A.dim()) {
    err << "error: right-hand side has " << x.size()
        << " entries, matrix dimension is " << A.dim() << '\n';
    return kInputError;
  }
  const auto F = setup(std::move(A));
  if (a.adjoint)
    solve_adjoint_in_place(F, x);
  else
    solve_in_place(F, x);
  write_vector(out, x);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Exact direct solver for HODLR hierarchical matrices"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "setup/solve scaling on the tridiagonal model");
  b->add_option("--n0", bench.cfg.n0, "leaf size")->capture_default_str();
  b->add_option("--levels", bench.cfg.max_level, "largest level")
      ->capture_default_str();
  b->add_option("--rank", bench.cfg.rank, "off-diagonal rank")
      ->capture_default_str();
  b->add_option("--seed", bench.cfg.seed, "generator seed")->capture_default_str();
  b->add_option("--repeats", bench.cfg.repeats, "right-hand sides per level")
      ->capture_default_str();
  b->add_option("--csv", bench.csv, "output CSV path")->required();
  b->add_option("--threads", bench.cfg.threads, "parallel setup threads")
      ->capture_default_str();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "run the self-check suites");
  v->add_option("--levels", verify.cfg.levels, "largest level")
      ->capture_default_str();
  v->add_option("--seeds", verify.cfg.seeds, "random instances")
      ->capture_default_str();
  v->add_option("--matrix", verify.matrix,
                "additionally set up and check this serialized matrix");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "solve A x = z for a serialized matrix");
  s->add_option("--matrix", solve.matrix, "matrix file (JSON)")->required();
  s->add_option("--rhs", solve.rhs, "right-hand side, one number per line")
      ->required();
  s->add_flag("--adjoint", solve.adjoint, "solve A^T x = z instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*b) return cmd_bench(bench, out, err);
    if (*v) return cmd_verify(verify, out, err);
    return cmd_solve(solve, out, err);
  } catch (const HierarchicalSingularity& e) {
    err << "error: " << e.what() << '\n';
    return kSingular;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace hodlr::cli
