#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "hodlr/errors.hpp"
#include "hodlr/hmatrix.hpp"
#include "hodlr/rng.hpp"

namespace hodlr {

/// Symmetric tridiagonal matrix with 4 on the diagonal and couplings drawn
/// uniformly from [-1, 1], in its exact hierarchical representation.
///
/// The n - 1 couplings are drawn in order t_0, t_1, ... where t_i sits at
/// (i, i+1) and (i+1, i). A node splitting [s, s + 2m) carries the single
/// crossing coupling t = t_{s+m-1} as a1 = t e_m, b1 = e_1, a2 = e_m,
/// b2 = t e_1. Columns beyond the first (rank > 1) are zero.
template <typename Scalar = double>
HMatrix<Scalar> tridiagonal_model(Index n0, int levels, std::uint64_t seed,
                                  Index rank = 1) {
  if (n0 < 2) throw StructuralError("tridiagonal_model needs n0 >= 2");
  if (levels < 0) throw StructuralError("levels must be nonnegative");
  if (rank < 1) throw StructuralError("rank must be positive");
  const Index n = n0 << levels;
  Xorshift64Star rng(seed);
  std::vector<Scalar> t(static_cast<std::size_t>(n - 1));
  for (auto& v : t) v = static_cast<Scalar>(rng.uniform(-1.0, 1.0));

  auto build = [&](auto&& self, Index offset, int level) -> HMatrix<Scalar> {
    if (level == 0) {
      Matrix<Scalar> block = Matrix<Scalar>::Zero(n0, n0);
      block.diagonal().setConstant(Scalar(4));
      for (Index i = 0; i + 1 < n0; ++i) {
        const Scalar c = t[static_cast<std::size_t>(offset + i)];
        block(i, i + 1) = c;
        block(i + 1, i) = c;
      }
      return HMatrix<Scalar>::leaf(std::move(block));
    }
    const Index m = n0 << (level - 1);
    auto c1 = self(self, offset, level - 1);
    auto c2 = self(self, offset + m, level - 1);
    const Scalar c = t[static_cast<std::size_t>(offset + m - 1)];
    Matrix<Scalar> a1 = Matrix<Scalar>::Zero(m, rank);
    Matrix<Scalar> b1 = Matrix<Scalar>::Zero(m, rank);
    Matrix<Scalar> a2 = Matrix<Scalar>::Zero(m, rank);
    Matrix<Scalar> b2 = Matrix<Scalar>::Zero(m, rank);
    a1(m - 1, 0) = c;
    b1(0, 0) = 1;
    a2(m - 1, 0) = 1;
    b2(0, 0) = c;
    return HMatrix<Scalar>::node(std::move(c1), std::move(c2), std::move(a1),
                                 std::move(b1), std::move(a2), std::move(b2));
  };
  return build(build, 0, levels);
}

namespace detail {

template <typename Scalar>
struct RawTree {
  Matrix<Scalar> block;
  Matrix<Scalar> a1, b1, a2, b2;
  std::unique_ptr<RawTree> child1, child2;
};

template <typename Scalar>
Matrix<Scalar> draw_matrix(Xorshift64Star& rng, Index rows, Index cols,
                           bool row_major) {
  Matrix<Scalar> out(rows, cols);
  const Index outer = row_major ? rows : cols;
  const Index inner = row_major ? cols : rows;
  for (Index o = 0; o < outer; ++o)
    for (Index i = 0; i < inner; ++i)
      (row_major ? out(o, i) : out(i, o)) =
          static_cast<Scalar>(rng.uniform(-1.0, 1.0));
  return out;
}

// Post-order draws: child1, child2, then a1, b1, a2, b2 (column-major);
// leaves row-major.
template <typename Scalar>
std::unique_ptr<RawTree<Scalar>> draw_tree(Xorshift64Star& rng, Index n0,
                                           int level, Index rank) {
  auto r = std::make_unique<RawTree<Scalar>>();
  if (level == 0) {
    r->block = draw_matrix<Scalar>(rng, n0, n0, true);
    return r;
  }
  const Index m = n0 << (level - 1);
  r->child1 = draw_tree<Scalar>(rng, n0, level - 1, rank);
  r->child2 = draw_tree<Scalar>(rng, n0, level - 1, rank);
  r->a1 = draw_matrix<Scalar>(rng, m, rank, false);
  r->b1 = draw_matrix<Scalar>(rng, m, rank, false);
  r->a2 = draw_matrix<Scalar>(rng, m, rank, false);
  r->b2 = draw_matrix<Scalar>(rng, m, rank, false);
  return r;
}

template <typename Scalar>
void off_diagonal_row_sums(const RawTree<Scalar>& r, Index offset,
                           Vector<Scalar>& sums) {
  if (!r.child1) {
    const Index n0 = r.block.rows();
    for (Index i = 0; i < n0; ++i)
      sums(offset + i) += r.block.row(i).cwiseAbs().sum() - std::abs(r.block(i, i));
    return;
  }
  const Index m = r.a1.rows();
  off_diagonal_row_sums(*r.child1, offset, sums);
  off_diagonal_row_sums(*r.child2, offset + m, sums);
  sums.segment(offset, m) +=
      (r.a1 * r.b1.transpose()).cwiseAbs().rowwise().sum();
  sums.segment(offset + m, m) +=
      (r.b2 * r.a2.transpose()).cwiseAbs().rowwise().sum();
}

template <typename Scalar>
HMatrix<Scalar> assemble(RawTree<Scalar>& r, Index offset,
                         const Vector<Scalar>& sums) {
  if (!r.child1) {
    for (Index i = 0; i < r.block.rows(); ++i)
      r.block(i, i) = sums(offset + i) + Scalar(1);
    return HMatrix<Scalar>::leaf(std::move(r.block));
  }
  const Index m = r.a1.rows();
  auto c1 = assemble(*r.child1, offset, sums);
  auto c2 = assemble(*r.child2, offset + m, sums);
  return HMatrix<Scalar>::node(std::move(c1), std::move(c2), std::move(r.a1),
                               std::move(r.b1), std::move(r.a2),
                               std::move(r.b2));
}

}  // namespace detail

/// Random instance with all entries uniform on [-1, 1], except that every
/// diagonal entry is replaced by its row's off-diagonal absolute sum plus 1.
/// The assembled matrix is strictly diagonally dominant, and so is every
/// principal sub-block, hence it is hierarchically regular.
///
/// Row sums are exact, which costs O(n^2 k); intended for test sizes.
template <typename Scalar = double>
HMatrix<Scalar> random_regular(Index n0, int levels, Index rank,
                               std::uint64_t seed) {
  if (n0 < 1) throw StructuralError("n0 must be positive");
  if (levels < 0) throw StructuralError("levels must be nonnegative");
  if (rank < 1) throw StructuralError("rank must be positive");
  Xorshift64Star rng(seed);
  auto raw = detail::draw_tree<Scalar>(rng, n0, levels, rank);
  Vector<Scalar> sums = Vector<Scalar>::Zero(n0 << levels);
  detail::off_diagonal_row_sums(*raw, 0, sums);
  return detail::assemble(*raw, 0, sums);
}

}  // namespace hodlr
