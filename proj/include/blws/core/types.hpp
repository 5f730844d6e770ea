#ifndef BLWS_CORE_TYPES_HPP
#define BLWS_CORE_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace blws {

using Index = Eigen::Index;

/// Column-major dense matrix of dynamic size.
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Compressed column sparse matrix; assemble from triplets via Eigen::Triplet.
template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

template <typename Scalar>
using Triplet = Eigen::Triplet<Scalar>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

template <typename Scalar>
bool all_finite(const SparseMatrix<Scalar>& m) {
    for (Index k = 0; k < m.outerSize(); ++k)
        for (typename SparseMatrix<Scalar>::InnerIterator it(m, k); it; ++it)
            if (!std::isfinite(it.value())) return false;
    return true;
}

}  // namespace blws

#endif
