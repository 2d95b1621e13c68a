#pragma once

#include <cstdint>

namespace hodlr {

/// Exact scalar operation tallies.
///
/// Counting convention (fixed project-wide):
///   - inner product of length m: m multiplications, m-1 additions (2m-1)
///   - axpy of length m:          m multiplications, m additions   (2m)
///   - the rank-one coefficient gamma * alpha / (1 - delta): 3 operations
/// Comparisons, pivot searches, row swaps and negations are free.
struct OpCounter {
  std::int64_t adds = 0;
  std::int64_t muls = 0;
  std::int64_t divs = 0;
  /// Scalars held by whatever structure the tally describes.
  std::int64_t storage = 0;

  std::int64_t total() const noexcept { return adds + muls + divs; }

  void dot(std::int64_t m) noexcept {
    muls += m;
    adds += m - 1;
  }
  void axpy(std::int64_t m) noexcept {
    muls += m;
    adds += m;
  }

  OpCounter& operator+=(const OpCounter& o) noexcept {
    adds += o.adds;
    muls += o.muls;
    divs += o.divs;
    storage += o.storage;
    return *this;
  }

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

}  // namespace hodlr
