#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>

#include "hodlr/errors.hpp"
#include "hodlr/types.hpp"

namespace hodlr {

/// Hierarchical matrix in the HODLR format
///
///     A = [ A1        a1 * b1^T ]
///         [ b2 * a2^T A2        ]
///
/// with A1, A2 hierarchical matrices of the next lower level and a1, b1, a2,
/// b2 dense n_{l-1} x k factors. Level-0 matrices are dense n0 x n0 blocks.
/// Leaf size n0 and rank k are uniform across the tree; dim = n0 * 2^level.
///
/// Instances are immutable once built, children are shared between copies.
template <typename Scalar>
class HMatrix {
 public:
  using scalar_type = Scalar;

  struct Leaf {
    Matrix<Scalar> block;
  };

  struct Node {
    Matrix<Scalar> a1, b1, a2, b2;
    std::shared_ptr<const HMatrix> child1, child2;
  };

  static HMatrix leaf(Matrix<Scalar> block) {
    if (block.rows() != block.cols() || block.rows() == 0)
      throw StructuralError("leaf block must be square and non-empty, got " +
                            std::to_string(block.rows()) + "x" +
                            std::to_string(block.cols()));
    HMatrix m;
    m.level_ = 0;
    m.leaf_size_ = block.rows();
    m.rank_ = 0;
    m.content_ = Leaf{std::move(block)};
    return m;
  }

  static HMatrix node(HMatrix child1, HMatrix child2, Matrix<Scalar> a1,
                      Matrix<Scalar> b1, Matrix<Scalar> a2,
                      Matrix<Scalar> b2) {
    if (child1.level() != child2.level())
      throw StructuralError("child levels differ: " +
                            std::to_string(child1.level()) + " vs " +
                            std::to_string(child2.level()));
    if (child1.leaf_size() != child2.leaf_size())
      throw StructuralError("child leaf sizes differ");
    const Index half = child1.dim();
    const Index k = a1.cols();
    if (k < 1) throw StructuralError("factor rank must be positive");
    auto check = [&](const Matrix<Scalar>& f, const char* name) {
      if (f.rows() != half || f.cols() != k)
        throw StructuralError(std::string("factor ") + name + " is " +
                              std::to_string(f.rows()) + "x" +
                              std::to_string(f.cols()) + ", expected " +
                              std::to_string(half) + "x" + std::to_string(k));
    };
    check(a1, "a1");
    check(b1, "b1");
    check(a2, "a2");
    check(b2, "b2");
    for (const HMatrix* c : {&child1, &child2})
      if (c->rank() != 0 && c->rank() != k)
        throw StructuralError("child rank " + std::to_string(c->rank()) +
                              " differs from node rank " + std::to_string(k));

    HMatrix m;
    m.level_ = child1.level() + 1;
    m.leaf_size_ = child1.leaf_size();
    m.rank_ = k;
    m.content_ = Node{std::move(a1), std::move(b1), std::move(a2),
                      std::move(b2),
                      std::make_shared<const HMatrix>(std::move(child1)),
                      std::make_shared<const HMatrix>(std::move(child2))};
    return m;
  }

  int level() const noexcept { return level_; }
  Index leaf_size() const noexcept { return leaf_size_; }
  /// Off-diagonal rank k; 0 for a bare leaf, which has no off-diagonal blocks.
  Index rank() const noexcept { return rank_; }
  Index dim() const noexcept { return leaf_size_ << level_; }

  bool is_leaf() const noexcept { return std::holds_alternative<Leaf>(content_); }
  const Leaf& as_leaf() const { return std::get<Leaf>(content_); }
  const Node& as_node() const { return std::get<Node>(content_); }

 private:
  HMatrix() = default;

  std::variant<Leaf, Node> content_;
  int level_ = 0;
  Index leaf_size_ = 0;
  Index rank_ = 0;
};

template <typename Derived>
HMatrix<typename Derived::Scalar> make_leaf(
    const Eigen::MatrixBase<Derived>& block) {
  return HMatrix<typename Derived::Scalar>::leaf(block);
}

template <typename Scalar>
HMatrix<Scalar> make_node(HMatrix<Scalar> child1, HMatrix<Scalar> child2,
                          Matrix<std::type_identity_t<Scalar>> a1,
                          Matrix<std::type_identity_t<Scalar>> b1,
                          Matrix<std::type_identity_t<Scalar>> a2,
                          Matrix<std::type_identity_t<Scalar>> b2) {
  return HMatrix<Scalar>::node(std::move(child1), std::move(child2),
                               std::move(a1), std::move(b1), std::move(a2),
                               std::move(b2));
}

/// Scalars held by the representation: (2 k l + n0) * n_l.
template <typename Scalar>
std::int64_t storage(const HMatrix<Scalar>& A) {
  if (A.is_leaf()) return A.as_leaf().block.size();
  const auto& n = A.as_node();
  return storage(*n.child1) + storage(*n.child2) + n.a1.size() + n.b1.size() +
         n.a2.size() + n.b2.size();
}

namespace detail {

template <typename Scalar>
void matvec_acc(const HMatrix<Scalar>& A,
                ConstVectorRef<Scalar> x,
                VectorRef<Scalar> y, bool transpose) {
  if (A.is_leaf()) {
    const auto& B = A.as_leaf().block;
    if (transpose)
      y.noalias() += B.transpose() * x;
    else
      y.noalias() += B * x;
    return;
  }
  const auto& n = A.as_node();
  const Index m = n.child1->dim();
  auto x1 = x.head(m);
  auto x2 = x.tail(m);
  // Transposition swaps the roles of (a1, b1) with (b2, a2) and
  // exchanges which half each off-diagonal contribution lands in.
  if (transpose) {
    matvec_acc(*n.child1, x1, y.head(m), true);
    matvec_acc(*n.child2, x2, y.tail(m), true);
    y.head(m).noalias() += n.a2 * (n.b2.transpose() * x2);
    y.tail(m).noalias() += n.b1 * (n.a1.transpose() * x1);
  } else {
    matvec_acc(*n.child1, x1, y.head(m), false);
    matvec_acc(*n.child2, x2, y.tail(m), false);
    y.head(m).noalias() += n.a1 * (n.b1.transpose() * x2);
    y.tail(m).noalias() += n.b2 * (n.a2.transpose() * x1);
  }
}

template <typename Scalar>
void check_length(const HMatrix<Scalar>& A, Index len) {
  if (len != A.dim())
    throw StructuralError("vector length " + std::to_string(len) +
                          " does not match matrix dimension " +
                          std::to_string(A.dim()));
}

template <typename Scalar>
void fill_dense(const HMatrix<Scalar>& A, DenseMatrix<Scalar>& out, Index off) {
  if (A.is_leaf()) {
    const auto& B = A.as_leaf().block;
    out.block(off, off, B.rows(), B.cols()) = B;
    return;
  }
  const auto& n = A.as_node();
  const Index m = n.child1->dim();
  fill_dense(*n.child1, out, off);
  fill_dense(*n.child2, out, off + m);
  out.block(off, off + m, m, m).noalias() = n.a1 * n.b1.transpose();
  out.block(off + m, off, m, m).noalias() = n.b2 * n.a2.transpose();
}

}  // namespace detail

/// y = A x
template <typename Scalar>
Vector<Scalar> matvec(const HMatrix<Scalar>& A,
                      ConstVectorRef<Scalar> x) {
  detail::check_length(A, x.size());
  Vector<Scalar> y = Vector<Scalar>::Zero(A.dim());
  detail::matvec_acc(A, x, y, false);
  return y;
}

/// y = A^T x
template <typename Scalar>
Vector<Scalar> matvec_adjoint(const HMatrix<Scalar>& A,
                              ConstVectorRef<Scalar> x) {
  detail::check_length(A, x.size());
  Vector<Scalar> y = Vector<Scalar>::Zero(A.dim());
  detail::matvec_acc(A, x, y, true);
  return y;
}

inline constexpr Index kDefaultDenseCap = 4096;

/// Expands the block formula recursively. Throws DenseCapExceeded when
/// dim(A) > cap.
template <typename Scalar>
DenseMatrix<Scalar> to_dense(const HMatrix<Scalar>& A,
                             Index cap = kDefaultDenseCap) {
  if (A.dim() > cap)
    throw DenseCapExceeded("refusing to materialize dimension " +
                           std::to_string(A.dim()) + " (cap " +
                           std::to_string(cap) + ")");
  DenseMatrix<Scalar> out(A.dim(), A.dim());
  detail::fill_dense(A, out, 0);
  return out;
}

}  // namespace hodlr
