#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "hodlr/types.hpp"

namespace hodlr {

struct BenchConfig {
  Index n0 = 2;
  int min_level = 1;
  int max_level = 20;
  Index rank = 1;
  std::uint64_t seed = 1;
  int repeats = 5;
  int threads = 1;
};

/// One line of the setup/solve scaling report for the tridiagonal model.
struct BenchRow {
  int level = 0;
  Index n = 0;
  double setup_seconds = 0;
  /// Median over the repeated right-hand sides.
  double solve_seconds = 0;
  std::int64_t setup_ops = 0;
  std::int64_t solve_ops = 0;
  /// max over repeats of ||A x - z||_inf / ||z||_inf
  double residual_inf = 0;

  double setup_seconds_per_dof() const { return setup_seconds / double(n); }
  double solve_seconds_per_dof() const { return solve_seconds / double(n); }
};

/// Runs levels min_level..max_level. `on_row` is invoked as soon as each
/// level finishes.
std::vector<BenchRow> run_bench(
    const BenchConfig& cfg,
    const std::function<void(const BenchRow&)>& on_row = {});

/// Header: level,n,setup_seconds,setup_seconds_per_dof,solve_seconds,
/// solve_seconds_per_dof,setup_ops,solve_ops,residual_inf
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchRow& row);
std::vector<BenchRow> read_csv(std::istream& in);

}  // namespace hodlr
