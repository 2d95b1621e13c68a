#include "hodlr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hodlr/errors.hpp"
#include "hodlr/factorization.hpp"
#include "hodlr/generators.hpp"
#include "hodlr/rng.hpp"

namespace hodlr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

constexpr const char* kHeader =
    "level,n,setup_seconds,setup_seconds_per_dof,solve_seconds,"
    "solve_seconds_per_dof,setup_ops,solve_ops,residual_inf";

}  // namespace

std::vector<BenchRow> run_bench(
    const BenchConfig& cfg,
    const std::function<void(const BenchRow&)>& on_row) {
  if (cfg.max_level < 1 || cfg.min_level < 0 || cfg.min_level > cfg.max_level)
    throw StructuralError("bench needs 0 <= min_level <= max_level, max_level >= 1");
  if (cfg.repeats < 1) throw StructuralError("repeats must be positive");

  std::vector<BenchRow> rows;
  for (int level = cfg.min_level; level <= cfg.max_level; ++level) {
    BenchRow row;
    row.level = level;
    auto A = tridiagonal_model<double>(cfg.n0, level, cfg.seed, cfg.rank);
    row.n = A.dim();

    auto t0 = Clock::now();
    auto F = setup(std::move(A), SetupOptions{cfg.threads});
    row.setup_seconds = seconds_since(t0);
    row.setup_ops = F.setup_ops().total();
    row.solve_ops = solve_ops(F).total();

    Xorshift64Star rng(cfg.seed ^ (0xA5A5A5A5ULL + std::uint64_t(level)));
    std::vector<double> times;
    VectorXd z(row.n);
    VectorXd x(row.n);
    for (int r = 0; r < cfg.repeats; ++r) {
      for (Index i = 0; i < row.n; ++i) z(i) = rng.uniform(-1.0, 1.0);
      x = z;
      t0 = Clock::now();
      solve_in_place(F, x);
      times.push_back(seconds_since(t0));
      const double res = (matvec(F.matrix(), x) - z).lpNorm<Eigen::Infinity>() /
                         z.lpNorm<Eigen::Infinity>();
      row.residual_inf = std::max(row.residual_inf, res);
    }
    row.solve_seconds = median(times);
    rows.push_back(row);
    if (on_row) on_row(row);
  }
  return rows;
}

void write_csv_header(std::ostream& out) { out << kHeader << '\n'; }

void write_csv_row(std::ostream& out, const BenchRow& r) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << r.level << ',' << r.n << ',' << r.setup_seconds << ','
    << r.setup_seconds_per_dof() << ',' << r.solve_seconds << ','
    << r.solve_seconds_per_dof() << ',' << r.setup_ops << ',' << r.solve_ops
    << ',' << r.residual_inf << '\n';
  out << s.str();
}

std::vector<BenchRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw ParseError("line 1", "unexpected CSV header");
  std::vector<BenchRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9)
      throw ParseError("line " + std::to_string(lineno), "expected 9 columns");
    try {
      BenchRow r;
      r.level = std::stoi(cells[0]);
      r.n = std::stoll(cells[1]);
      r.setup_seconds = std::stod(cells[2]);
      r.solve_seconds = std::stod(cells[4]);
      r.setup_ops = std::stoll(cells[6]);
      r.solve_ops = std::stoll(cells[7]);
      r.residual_inf = std::stod(cells[8]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError("line " + std::to_string(lineno), "bad number");
    }
  }
  return rows;
}

}  // namespace hodlr
