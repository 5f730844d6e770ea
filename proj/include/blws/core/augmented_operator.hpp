#ifndef BLWS_CORE_AUGMENTED_OPERATOR_HPP
#define BLWS_CORE_AUGMENTED_OPERATOR_HPP

#include "blws/core/linear_operator.hpp"

namespace blws {

/// Symmetric (m+n) x (m+n) view [[0, W], [W^T, 0]] of an m x n operator W.
///
/// The zero blocks are never materialized: one application maps (x; y) to
/// (W y; W^T x) through a single paired application of W, so W's counter
/// advances by exactly one per augmented apply. The eigenpairs of this view
/// encode the singular triplets of W: eigenvalues come in +/- sigma pairs
/// and an eigenvector for +sigma is (u; v)/sqrt(2).
///
/// Non-owning: the inner operator must outlive the view.
template <typename Scalar>
class AugmentedOperator final : public LinearOperator<Scalar> {
public:
    using Vector = DenseVector<Scalar>;
    using Matrix = DenseMatrix<Scalar>;

    explicit AugmentedOperator(const LinearOperator<Scalar>& inner) : inner_(inner) {}

    Index rows() const override { return inner_.rows() + inner_.cols(); }
    Index cols() const override { return rows(); }
    const LinearOperator<Scalar>& inner() const { return inner_; }

    Matrix dense() const override {
        const Index m = inner_.rows(), n = inner_.cols();
        Matrix w = inner_.dense();
        Matrix out = Matrix::Zero(m + n, m + n);
        out.topRightCorner(m, n) = w;
        out.bottomLeftCorner(n, m) = w.transpose();
        return out;
    }

protected:
    Vector apply_impl(const Vector& x) const override {
        const Index m = inner_.rows(), n = inner_.cols();
        auto [top, bottom] = inner_.apply_pair(x.head(m), x.tail(n));
        Vector out(m + n);
        out.head(m) = top;
        out.tail(n) = bottom;
        return out;
    }

    Vector apply_adjoint_impl(const Vector& x) const override { return apply_impl(x); }

    Matrix apply_block_impl(const Matrix& x) const override {
        const Index m = inner_.rows(), n = inner_.cols();
        auto [top, bottom] = inner_.apply_pair_block(x.topRows(m), x.bottomRows(n));
        Matrix out(m + n, x.cols());
        out.topRows(m) = top;
        out.bottomRows(n) = bottom;
        return out;
    }

    Matrix apply_adjoint_block_impl(const Matrix& x) const override { return apply_block_impl(x); }

private:
    const LinearOperator<Scalar>& inner_;
};

template <typename Scalar>
AugmentedOperator<Scalar> augment(const LinearOperator<Scalar>& w) {
    return AugmentedOperator<Scalar>(w);
}

}  // namespace blws

#endif
