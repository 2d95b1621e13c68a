#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hodlr/op_counter.hpp"
#include "hodlr/types.hpp"

namespace hodlr {

/// Partial-pivoting LU of a small dense block, P A = L U, L unit lower.
///
/// Serves both for leaf blocks and for the k x k Woodbury capacitance
/// matrices (I - Delta). All arithmetic is tallied when a counter is given.
template <typename Scalar>
class PivotedLU {
 public:
  /// Returns nullopt if some pivot p has |p| <= 64 eps * scale. `scale`
  /// defaults to the largest absolute entry of `block`.
  static std::optional<PivotedLU> factor(Matrix<Scalar> block,
                                         OpCounter* ops = nullptr,
                                         std::optional<Scalar> scale = {}) {
    using std::abs;
    const Index n = block.rows();
    const Scalar ref = scale ? *scale : block.cwiseAbs().maxCoeff();
    const Scalar tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * ref;

    PivotedLU f;
    f.perm_.resize(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      Index p;
      block.col(j).tail(n - j).cwiseAbs().maxCoeff(&p);
      p += j;
      f.perm_[static_cast<std::size_t>(j)] = p;
      if (p != j) block.row(j).swap(block.row(p));
      const Scalar pivot = block(j, j);
      if (!(abs(pivot) > tol)) return std::nullopt;
      const Index rest = n - j - 1;
      for (Index i = j + 1; i < n; ++i) {
        block(i, j) /= pivot;
        block.row(i).tail(rest) -= block(i, j) * block.row(j).tail(rest);
      }
      if (ops) {
        ops->divs += rest;
        ops->muls += rest * rest;
        ops->adds += rest * rest;
      }
    }
    f.lu_ = std::move(block);
    if (ops) ops->storage += f.lu_.size();
    return f;
  }

  Index size() const noexcept { return lu_.rows(); }
  const Matrix<Scalar>& packed() const noexcept { return lu_; }
  /// LAPACK-style: row j was swapped with row pivots()[j] at step j.
  const std::vector<Index>& pivots() const noexcept { return perm_; }

  /// Overwrites x with A^{-1} x. Costs 2n^2 - n operations.
  void solve_in_place(Eigen::Ref<Vector<Scalar>> x,
                      OpCounter* ops = nullptr) const {
    const Index n = size();
    for (Index j = 0; j < n; ++j) {
      const Index p = perm_[static_cast<std::size_t>(j)];
      if (p != j) std::swap(x(j), x(p));
    }
    for (Index i = 1; i < n; ++i)
      x(i) -= lu_.row(i).head(i).dot(x.head(i));
    for (Index i = n - 1; i >= 0; --i) {
      const Index rest = n - i - 1;
      if (rest > 0) x(i) -= lu_.row(i).tail(rest).dot(x.tail(rest));
      x(i) /= lu_(i, i);
    }
    if (ops) count_substitution(*ops);
  }

  /// Overwrites x with A^{-T} x via U^T then L^T substitution.
  void solve_adjoint_in_place(Eigen::Ref<Vector<Scalar>> x,
                              OpCounter* ops = nullptr) const {
    const Index n = size();
    for (Index i = 0; i < n; ++i) {
      if (i > 0) x(i) -= lu_.col(i).head(i).dot(x.head(i));
      x(i) /= lu_(i, i);
    }
    for (Index i = n - 2; i >= 0; --i) {
      const Index rest = n - i - 1;
      x(i) -= lu_.col(i).tail(rest).dot(x.tail(rest));
    }
    for (Index j = n - 1; j >= 0; --j) {
      const Index p = perm_[static_cast<std::size_t>(j)];
      if (p != j) std::swap(x(j), x(p));
    }
    if (ops) count_substitution(*ops);
  }

  /// Operation count of one factorization of an n x n block.
  static std::int64_t factor_cost(std::int64_t n) {
    std::int64_t c = 0;
    for (std::int64_t r = n - 1; r > 0; --r) c += r + 2 * r * r;
    return c;
  }
  static std::int64_t substitution_cost(std::int64_t n) { return 2 * n * n - n; }

 private:
  void count_substitution(OpCounter& ops) const {
    // Two triangular sweeps: n(n-1) multiply-adds plus n divisions.
    const std::int64_t n = size();
    const std::int64_t tri = n * (n - 1) / 2;
    ops.muls += 2 * tri;
    ops.adds += 2 * tri;
    ops.divs += n;
  }

  Matrix<Scalar> lu_;
  std::vector<Index> perm_;
};

}  // namespace hodlr
