#pragma once

// Brute-force dense reference solver. Shares no code with the hierarchical
// factorization so agreement between the two is evidence, not tautology.

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hodlr/errors.hpp"
#include "hodlr/types.hpp"

namespace hodlr::oracle {

/// P A = L U. `perm[i]` is the original row that ended up in row i.
template <typename Scalar>
struct DenseLU {
  std::vector<Index> perm;
  DenseMatrix<Scalar> lu;  // strict lower part = L (unit diagonal), upper = U

  Index size() const noexcept { return lu.rows(); }

  DenseMatrix<Scalar> lower() const {
    DenseMatrix<Scalar> L = DenseMatrix<Scalar>::Identity(size(), size());
    for (Index i = 0; i < size(); ++i)
      for (Index j = 0; j < i; ++j) L(i, j) = lu(i, j);
    return L;
  }
  DenseMatrix<Scalar> upper() const {
    DenseMatrix<Scalar> U = DenseMatrix<Scalar>::Zero(size(), size());
    for (Index i = 0; i < size(); ++i)
      for (Index j = i; j < size(); ++j) U(i, j) = lu(i, j);
    return U;
  }
};

template <typename Scalar>
DenseLU<Scalar> dense_lu(DenseMatrix<Scalar> a) {
  using std::abs;
  if (a.rows() != a.cols())
    throw StructuralError("dense_lu expects a square matrix");
  const Index n = a.rows();
  Scalar amax = 0;
  for (Index i = 0; i < a.size(); ++i) amax = std::max(amax, abs(a.data()[i]));
  const Scalar tol = Scalar(n) * std::numeric_limits<Scalar>::epsilon() * amax;

  DenseLU<Scalar> out;
  out.perm.resize(static_cast<std::size_t>(n));
  std::iota(out.perm.begin(), out.perm.end(), Index{0});
  Scalar* d = a.data();
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i)
      if (abs(d[i * n + k]) > abs(d[piv * n + k])) piv = i;
    if (!(abs(d[piv * n + k]) > tol))
      throw OracleSingularity("dense oracle: pivot " + std::to_string(k) +
                              " below tolerance");
    if (piv != k) {
      for (Index j = 0; j < n; ++j) std::swap(d[k * n + j], d[piv * n + j]);
      std::swap(out.perm[static_cast<std::size_t>(k)],
                out.perm[static_cast<std::size_t>(piv)]);
    }
    const Scalar* rowk = d + k * n;
    for (Index i = k + 1; i < n; ++i) {
      Scalar* rowi = d + i * n;
      const Scalar l = rowi[k] / rowk[k];
      rowi[k] = l;
      for (Index j = k + 1; j < n; ++j) rowi[j] -= l * rowk[j];
    }
  }
  out.lu = std::move(a);
  return out;
}

/// Solves A x = z.
template <typename Scalar>
Vector<Scalar> dense_solve(const DenseLU<Scalar>& f, const Vector<Scalar>& z) {
  const Index n = f.size();
  if (z.size() != n) throw StructuralError("dense_solve: length mismatch");
  const Scalar* d = f.lu.data();
  Vector<Scalar> y(n);
  for (Index i = 0; i < n; ++i) {
    Scalar s = z(f.perm[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < i; ++j) s -= d[i * n + j] * y(j);
    y(i) = s;
  }
  for (Index i = n - 1; i >= 0; --i) {
    Scalar s = y(i);
    for (Index j = i + 1; j < n; ++j) s -= d[i * n + j] * y(j);
    y(i) = s / d[i * n + i];
  }
  return y;
}

/// Solves A^T x = z: U^T w = z, L^T v = w, x = P^T v.
template <typename Scalar>
Vector<Scalar> dense_solve_adjoint(const DenseLU<Scalar>& f,
                                   const Vector<Scalar>& z) {
  const Index n = f.size();
  if (z.size() != n)
    throw StructuralError("dense_solve_adjoint: length mismatch");
  const Scalar* d = f.lu.data();
  Vector<Scalar> w = z;
  // Column-oriented sweeps keep the row-major inner loops contiguous.
  for (Index j = 0; j < n; ++j) {
    w(j) /= d[j * n + j];
    for (Index i = j + 1; i < n; ++i) w(i) -= d[j * n + i] * w(j);
  }
  for (Index j = n - 1; j >= 0; --j)
    for (Index i = 0; i < j; ++i) w(i) -= d[j * n + i] * w(j);
  Vector<Scalar> x(n);
  for (Index i = 0; i < n; ++i) x(f.perm[static_cast<std::size_t>(i)]) = w(i);
  return x;
}

/// Plain triple-loop product, row-major.
template <typename Scalar>
Vector<Scalar> dense_matvec(const DenseMatrix<Scalar>& a,
                            const Vector<Scalar>& x) {
  Vector<Scalar> y(a.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    Scalar s = 0;
    for (Index j = 0; j < a.cols(); ++j) s += a(i, j) * x(j);
    y(i) = s;
  }
  return y;
}

template <typename Scalar>
Vector<Scalar> dense_matvec_transposed(const DenseMatrix<Scalar>& a,
                                       const Vector<Scalar>& x) {
  Vector<Scalar> y = Vector<Scalar>::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) y(j) += a(i, j) * x(i);
  return y;
}

}  // namespace hodlr::oracle
