#ifndef BLWS_CORE_SMALL_DENSE_HPP
#define BLWS_CORE_SMALL_DENSE_HPP

#include <Eigen/Dense>
#include <stdexcept>

#include "blws/core/types.hpp"

namespace blws {

/// Largest dimension routed to the dense EVD/SVD kernels. The reduced
/// matrices produced by the Krylov paths are far smaller than this.
inline constexpr Index kSmallDenseLimit = 4096;

template <typename Scalar>
struct SymEvd {
    DenseMatrix<Scalar> vectors;  ///< d x d, orthogonal, column j pairs with values[j]
    DenseVector<Scalar> values;   ///< descending
};

/// Dense symmetric EVD with eigenvalues sorted descending.
/// The input is symmetrized internally; asymmetry beyond roundoff is the
/// caller's bug, not silently absorbed.
template <typename Derived>
SymEvd<typename Derived::Scalar> sym_evd_small(const Eigen::MatrixBase<Derived>& t_in) {
    using Scalar = typename Derived::Scalar;
    DenseMatrix<Scalar> t = t_in;
    if (t.rows() != t.cols()) throw std::invalid_argument("sym_evd_small: not square");
    if (t.rows() > kSmallDenseLimit) throw std::invalid_argument("sym_evd_small: too large");
    if (!all_finite(t)) throw std::invalid_argument("sym_evd_small: non-finite entries");
    const Scalar nrm = t.norm();
    if ((t - t.transpose()).norm() > Scalar(1e-10) * nrm && nrm > Scalar(0))
        throw std::invalid_argument("sym_evd_small: input is not symmetric");
    t = Scalar(0.5) * (t + t.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(t);
    if (es.info() != Eigen::Success) throw std::runtime_error("sym_evd_small: failed to converge");

    SymEvd<Scalar> out;
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    return out;
}

/// EVD of a symmetric tridiagonal matrix given its diagonal and subdiagonal.
template <typename Scalar>
SymEvd<Scalar> sym_evd_tridiagonal(const DenseVector<Scalar>& diag,
                                   const DenseVector<Scalar>& subdiag) {
    if (diag.size() == 0) throw std::invalid_argument("sym_evd_tridiagonal: empty");
    if (subdiag.size() != diag.size() - 1)
        throw std::invalid_argument("sym_evd_tridiagonal: size mismatch");
    if (diag.size() > kSmallDenseLimit)
        throw std::invalid_argument("sym_evd_tridiagonal: too large");
    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es;
    es.computeFromTridiagonal(diag, subdiag);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("sym_evd_tridiagonal: failed to converge");
    SymEvd<Scalar> out;
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    return out;
}

template <typename Scalar>
struct FullSvd {
    DenseMatrix<Scalar> u;       ///< m x p, orthonormal columns
    DenseVector<Scalar> sigma;   ///< p values, nonnegative, descending
    DenseMatrix<Scalar> v;       ///< n x p, orthonormal columns
};

/// Dense thin SVD, p = min(m, n).
template <typename Derived>
FullSvd<typename Derived::Scalar> full_svd_small(const Eigen::MatrixBase<Derived>& m_in) {
    using Scalar = typename Derived::Scalar;
    DenseMatrix<Scalar> m = m_in;
    if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("full_svd_small: empty");
    if (std::min(m.rows(), m.cols()) > kSmallDenseLimit)
        throw std::invalid_argument("full_svd_small: too large");
    if (!all_finite(m)) throw std::invalid_argument("full_svd_small: non-finite entries");

    Eigen::BDCSVD<DenseMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    FullSvd<Scalar> out;
    out.u = svd.matrixU();
    out.sigma = svd.singularValues();
    out.v = svd.matrixV();
    return out;
}

}  // namespace blws

#endif
