#ifndef BLWS_CORE_QR_HPP
#define BLWS_CORE_QR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "blws/core/types.hpp"

namespace blws {

template <typename Scalar>
struct ThinQr {
    DenseMatrix<Scalar> q;  ///< m x b, orthonormal columns
    DenseMatrix<Scalar> r;  ///< b x b, upper triangular, nonnegative diagonal
    Index rank = 0;         ///< diagonal entries above 1e-12 * ||input||_F
};

/// Householder thin QR of a tall matrix (m >= b >= 1).
///
/// Column signs are normalized so that diag(R) >= 0, and `rank` counts the
/// diagonal entries above tau = 1e-12 * ||M||_F, which doubles as the
/// breakdown signal in the block Lanczos recurrence.
template <typename Derived>
ThinQr<typename Derived::Scalar> thin_qr(const Eigen::MatrixBase<Derived>& m_in) {
    using Scalar = typename Derived::Scalar;
    DenseMatrix<Scalar> m = m_in;
    const Index rows = m.rows(), cols = m.cols();
    if (rows == 0 || cols == 0) throw std::invalid_argument("thin_qr: empty matrix");
    if (rows < cols) throw std::invalid_argument("thin_qr: requires rows >= cols");
    if (!all_finite(m)) throw std::invalid_argument("thin_qr: non-finite entries");

    const Scalar tau = Scalar(1e-12) * m.norm();

    Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(m);
    ThinQr<Scalar> out;
    out.q = qr.householderQ() * DenseMatrix<Scalar>::Identity(rows, cols);
    out.r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
    for (Index j = 0; j < cols; ++j) {
        if (out.r(j, j) < Scalar(0)) {
            out.r.row(j) = -out.r.row(j);
            out.q.col(j) = -out.q.col(j);
        }
        if (out.r(j, j) > tau) ++out.rank;
    }
    return out;
}

}  // namespace blws

#endif
