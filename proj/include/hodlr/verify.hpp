#pragma once

#include <string>
#include <vector>

#include "hodlr/hmatrix.hpp"

namespace hodlr {

struct CheckResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  /// Worst observed error (or mismatch count for exact checks).
  double worst = 0;
  double tolerance = 0;
  std::string detail;
};

struct VerifyConfig {
  int levels = 8;
  int seeds = 25;
};

/// Self-check suite over seeded instances: dense-oracle agreement, adjoint
/// duality, the Woodbury identity, the storage formula, exact op counts and
/// residuals of the tridiagonal model. Dense comparisons are capped at
/// dimension 1024 by lowering the level.
std::vector<CheckResult> run_verify(const VerifyConfig& cfg);

/// Runs setup and a residual check on a user-supplied matrix. Propagates
/// HierarchicalSingularity.
CheckResult verify_matrix(const HMatrix<double>& A);

}  // namespace hodlr
