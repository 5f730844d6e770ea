#ifndef BLWS_CORE_LINEAR_OPERATOR_HPP
#define BLWS_CORE_LINEAR_OPERATOR_HPP

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "blws/core/types.hpp"

namespace blws {

/// Abstract matrix-free operator with an application counter.
///
/// The counter tallies single-vector applications: a block application of
/// width b counts b. A paired application (forward on one vector, adjoint on
/// another, as one structured product) counts once; this is what lets an
/// operator built on top of W skip W's zero sub-blocks without distorting
/// the cost accounting.
template <typename Scalar>
class LinearOperator {
public:
    using Vector = DenseVector<Scalar>;
    using Matrix = DenseMatrix<Scalar>;

    virtual ~LinearOperator() = default;

    virtual Index rows() const = 0;
    virtual Index cols() const = 0;

    Vector apply(const Vector& x) const {
        bump(1);
        return apply_impl(x);
    }

    Vector apply_adjoint(const Vector& y) const {
        bump(1);
        return apply_adjoint_impl(y);
    }

    Matrix apply_block(const Matrix& x) const {
        bump(x.cols());
        return apply_block_impl(x);
    }

    Matrix apply_adjoint_block(const Matrix& y) const {
        bump(y.cols());
        return apply_adjoint_block_impl(y);
    }

    /// Computes (A*right, A^T*left) in one application; counts once.
    std::pair<Vector, Vector> apply_pair(const Vector& left, const Vector& right) const {
        bump(1);
        return {apply_impl(right), apply_adjoint_impl(left)};
    }

    /// Block version of apply_pair; counts the block width once.
    std::pair<Matrix, Matrix> apply_pair_block(const Matrix& left, const Matrix& right) const {
        bump(right.cols());
        return {apply_block_impl(right), apply_adjoint_block_impl(left)};
    }

    /// Materializes the operator column by column; counts cols() applications.
    /// Storage-backed operators override this with a counter-free copy.
    virtual Matrix dense() const {
        Matrix m(rows(), cols());
        Vector e = Vector::Zero(cols());
        for (Index j = 0; j < cols(); ++j) {
            e[j] = Scalar(1);
            m.col(j) = apply(e);
            e[j] = Scalar(0);
        }
        return m;
    }

    std::int64_t application_count() const { return count_.load(std::memory_order_relaxed); }

protected:
    virtual Vector apply_impl(const Vector& x) const = 0;
    virtual Vector apply_adjoint_impl(const Vector& y) const = 0;

    virtual Matrix apply_block_impl(const Matrix& x) const {
        Matrix y(rows(), x.cols());
        for (Index j = 0; j < x.cols(); ++j) y.col(j) = apply_impl(x.col(j));
        return y;
    }

    virtual Matrix apply_adjoint_block_impl(const Matrix& y) const {
        Matrix x(cols(), y.cols());
        for (Index j = 0; j < y.cols(); ++j) x.col(j) = apply_adjoint_impl(y.col(j));
        return x;
    }

    void bump(Index n) const { count_.fetch_add(n, std::memory_order_relaxed); }

private:
    mutable std::atomic<std::int64_t> count_{0};
};

/// Operator backed by an owned dense matrix. The matrix can be reassigned
/// between solves of a sequence; the counter keeps accumulating.
template <typename Scalar>
class DenseOperator final : public LinearOperator<Scalar> {
public:
    using Vector = DenseVector<Scalar>;
    using Matrix = DenseMatrix<Scalar>;

    DenseOperator() = default;
    explicit DenseOperator(Matrix m) : mat_(std::move(m)) {
        if (!all_finite(mat_)) throw std::invalid_argument("DenseOperator: non-finite entries");
    }

    void assign(Matrix m) {
        if (!all_finite(m)) throw std::invalid_argument("DenseOperator: non-finite entries");
        mat_ = std::move(m);
    }

    Index rows() const override { return mat_.rows(); }
    Index cols() const override { return mat_.cols(); }
    const Matrix& matrix() const { return mat_; }
    Matrix dense() const override { return mat_; }

protected:
    Vector apply_impl(const Vector& x) const override { return mat_ * x; }
    Vector apply_adjoint_impl(const Vector& y) const override { return mat_.transpose() * y; }
    Matrix apply_block_impl(const Matrix& x) const override { return mat_ * x; }
    Matrix apply_adjoint_block_impl(const Matrix& y) const override { return mat_.transpose() * y; }

private:
    Matrix mat_;
};

/// Operator backed by an owned compressed sparse matrix. assign_values()
/// rewrites the stored values in place, keeping the sparsity pattern, which
/// is how an iterate supported on a fixed index set is updated cheaply.
template <typename Scalar>
class SparseOperator final : public LinearOperator<Scalar> {
public:
    using Vector = DenseVector<Scalar>;
    using Matrix = DenseMatrix<Scalar>;

    SparseOperator() = default;
    explicit SparseOperator(SparseMatrix<Scalar> m) : mat_(std::move(m)) {
        mat_.makeCompressed();
        if (!all_finite(mat_)) throw std::invalid_argument("SparseOperator: non-finite entries");
    }

    /// Overwrites stored values (compressed order); the pattern is unchanged.
    void assign_values(const DenseVector<Scalar>& values) {
        if (values.size() != mat_.nonZeros())
            throw std::invalid_argument("SparseOperator: value count does not match pattern");
        for (Index i = 0; i < values.size(); ++i) mat_.valuePtr()[i] = values[i];
    }

    Index rows() const override { return mat_.rows(); }
    Index cols() const override { return mat_.cols(); }
    const SparseMatrix<Scalar>& matrix() const { return mat_; }
    Index nnz() const { return mat_.nonZeros(); }
    Matrix dense() const override { return Matrix(mat_); }

protected:
    Vector apply_impl(const Vector& x) const override { return mat_ * x; }
    Vector apply_adjoint_impl(const Vector& y) const override { return mat_.transpose() * y; }
    Matrix apply_block_impl(const Matrix& x) const override { return mat_ * x; }
    Matrix apply_adjoint_block_impl(const Matrix& y) const override { return mat_.transpose() * y; }

private:
    SparseMatrix<Scalar> mat_;
};

}  // namespace blws

#endif
