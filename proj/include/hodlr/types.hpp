#pragma once

#include <type_traits>

#include <Eigen/Core>

namespace hodlr {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Flat row-major dense matrix. Used for leaf input and by the dense oracle.
template <typename Scalar>
using DenseMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Vector views in non-deduced position, so that plain vectors bind to
/// functions templated on the HMatrix scalar.
template <typename Scalar>
using VectorRef = Eigen::Ref<Vector<std::type_identity_t<Scalar>>>;

template <typename Scalar>
using ConstVectorRef = const Eigen::Ref<const Vector<std::type_identity_t<Scalar>>>&;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using DenseMatrixXd = DenseMatrix<double>;

}  // namespace hodlr
