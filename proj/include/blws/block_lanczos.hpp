#ifndef BLWS_BLOCK_LANCZOS_HPP
#define BLWS_BLOCK_LANCZOS_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blws/core/augmented_operator.hpp"
#include "blws/core/linear_operator.hpp"
#include "blws/core/qr.hpp"
#include "blws/core/rng.hpp"
#include "blws/core/small_dense.hpp"
#include "blws/core/types.hpp"

namespace blws {

/// Block tridiagonal projection: symmetric diagonal blocks M_l and upper
/// triangular sub-diagonal blocks B_l (the R factors of the recurrence QR).
template <typename Scalar>
struct BlockTridiagonal {
    std::vector<DenseMatrix<Scalar>> m;
    std::vector<DenseMatrix<Scalar>> b;

    Index block_size() const { return m.empty() ? 0 : m.front().rows(); }
    Index dim() const { return static_cast<Index>(m.size()) * block_size(); }

    DenseMatrix<Scalar> embed() const {
        const Index bs = block_size(), d = dim();
        DenseMatrix<Scalar> t = DenseMatrix<Scalar>::Zero(d, d);
        for (std::size_t l = 0; l < m.size(); ++l) {
            const Index off = static_cast<Index>(l) * bs;
            t.block(off, off, bs, bs) = m[l];
            if (l + 1 < m.size()) {
                t.block(off + bs, off, bs, bs) = b[l];
                t.block(off, off + bs, bs, bs) = b[l].transpose();
            }
        }
        return t;
    }
};

/// Principal singular subspaces carried from one solver iteration to the
/// next: U, V orthonormal, sigma nonnegative descending.
template <typename Scalar>
struct WarmStart {
    DenseMatrix<Scalar> u;
    DenseMatrix<Scalar> v;
    DenseVector<Scalar> sigma;

    Index rank() const { return sigma.size(); }
};

template <typename Scalar>
struct BlockLanczosFactorization {
    DenseMatrix<Scalar> q;  ///< m x (built blocks * b), orthonormal columns
    BlockTridiagonal<Scalar> t;
    bool terminated_early = false;
};

/// Residual norm below this fraction of ||W X||_F counts as an invariant
/// subspace: the QR of a pure-roundoff residual would manufacture spurious
/// directions that are not orthogonal to the basis.
inline constexpr double kBlockBreakdownTol = 1e-10;

/// Block Lanczos recurrence (no reorthogonalization across blocks; the one
/// thin QR per step is the only orthogonalization). Terminates early when
/// the residual block is rank deficient or vanishes against the iterate
/// scale, returning the blocks built so far.
template <typename Scalar, typename Derived>
BlockLanczosFactorization<Scalar> block_lanczos_procedure(const LinearOperator<Scalar>& w,
                                                          const Eigen::MatrixBase<Derived>& x1_in,
                                                          Index k) {
    const DenseMatrix<Scalar> x1 = x1_in;
    const Index m = w.rows(), bs = x1.cols();
    if (w.rows() != w.cols())
        throw std::invalid_argument("block_lanczos_procedure: operator not square");
    if (k < 1) throw std::invalid_argument("block_lanczos_procedure: k must be >= 1");
    if (bs < 1 || x1.rows() != m)
        throw std::invalid_argument("block_lanczos_procedure: bad initial block");
    if (k * bs > m) throw std::invalid_argument("block_lanczos_procedure: k*b exceeds dimension");
    if ((x1.transpose() * x1 - DenseMatrix<Scalar>::Identity(bs, bs)).norm() > Scalar(1e-8))
        throw std::invalid_argument("block_lanczos_procedure: X1 not orthonormal");

    BlockLanczosFactorization<Scalar> out;
    out.q.resize(m, k * bs);
    out.q.leftCols(bs) = x1;

    DenseMatrix<Scalar> x_cur = x1;
    DenseMatrix<Scalar> x_prev;
    DenseMatrix<Scalar> z = w.apply_block(x_cur);
    Scalar scale = z.norm();
    {
        DenseMatrix<Scalar> m1 = x_cur.transpose() * z;
        out.t.m.push_back(Scalar(0.5) * (m1 + m1.transpose()));
    }

    Index built = 1;
    for (Index l = 1; l < k; ++l) {
        DenseMatrix<Scalar> r = z - x_cur * out.t.m.back();
        if (l > 1) r.noalias() -= x_prev * out.t.b.back().transpose();

        if (r.norm() <= Scalar(kBlockBreakdownTol) * scale) {
            out.terminated_early = true;
            break;
        }
        auto qr = thin_qr(r);
        if (qr.rank < bs) {
            out.terminated_early = true;
            break;
        }

        x_prev = x_cur;
        x_cur = qr.q;
        out.t.b.push_back(qr.r);
        out.q.middleCols(l * bs, bs) = x_cur;
        ++built;

        z = w.apply_block(x_cur);
        scale = std::max(scale, z.norm());
        DenseMatrix<Scalar> ml = x_cur.transpose() * z;
        out.t.m.push_back(Scalar(0.5) * (ml + ml.transpose()));
    }
    out.q.conservativeResize(Eigen::NoChange, built * bs);
    return out;
}

template <typename Scalar>
struct BlockEvd {
    DenseMatrix<Scalar> u;
    DenseVector<Scalar> values;  ///< descending
    Index available = 0;         ///< returned pair count (== requested unless truncated)
    bool terminated_early = false;
};

/// Rayleigh-Ritz on the block Krylov space: leading r eigenpairs of the
/// projected block tridiagonal matrix, lifted by the basis. With k = 1 this
/// is plain Rayleigh-Ritz on span(X1).
template <typename Scalar, typename Derived>
BlockEvd<Scalar> bl_evd(const LinearOperator<Scalar>& w, const Eigen::MatrixBase<Derived>& x1,
                        Index k, Index r) {
    if (r < 1 || r > k * x1.cols()) throw std::invalid_argument("bl_evd: bad r");
    auto fac = block_lanczos_procedure(w, x1, k);
    auto evd = sym_evd_small(fac.t.embed());
    const Index avail = std::min(r, fac.t.dim());
    BlockEvd<Scalar> out;
    out.values = evd.values.head(avail);
    out.u = fac.q * evd.vectors.leftCols(avail);
    out.available = avail;
    out.terminated_early = fac.terminated_early;
    return out;
}

/// Resizes a warm start to a new subspace dimension: truncates to the
/// leading columns, or appends random directions and re-orthonormalizes.
/// An empty input yields a fresh random orthonormal pair.
template <typename Scalar>
WarmStart<Scalar> adapt_subspace(const std::optional<WarmStart<Scalar>>& warm, Index r_new,
                                 Index m, Index n, Rng& rng) {
    if (r_new < 1 || r_new > std::min(m, n))
        throw std::invalid_argument("adapt_subspace: r_new out of range");

    WarmStart<Scalar> out;
    if (!warm || warm->rank() == 0) {
        out.u = thin_qr(rng.gaussian_matrix<Scalar>(m, r_new)).q;
        out.v = thin_qr(rng.gaussian_matrix<Scalar>(n, r_new)).q;
        out.sigma = DenseVector<Scalar>::Zero(r_new);
        return out;
    }
    const Index r_old = warm->rank();
    if (r_new == r_old) return *warm;
    if (r_new < r_old) {
        out.u = warm->u.leftCols(r_new);
        out.v = warm->v.leftCols(r_new);
        out.sigma = warm->sigma.head(r_new);
        return out;
    }
    const Index add = r_new - r_old;
    DenseMatrix<Scalar> ue(m, r_new), ve(n, r_new);
    ue << warm->u, rng.gaussian_matrix<Scalar>(m, add);
    ve << warm->v, rng.gaussian_matrix<Scalar>(n, add);
    out.u = thin_qr(ue).q;
    out.v = thin_qr(ve).q;
    out.sigma = DenseVector<Scalar>::Zero(r_new);
    out.sigma.head(r_old) = warm->sigma;
    return out;
}

template <typename Scalar>
struct BlwsResult {
    WarmStart<Scalar> warm;       ///< input to the next iteration
    bool padded = false;          ///< fewer than r positive Ritz pairs came back
    bool k_raised = false;        ///< k was lifted so that k*b >= r
    bool terminated_early = false;
};

/// Warm-started block Lanczos partial SVD.
///
/// The previous singular subspaces seed the initial block
/// stack(U, V)/sqrt(2) on the symmetric embedding of W; after k block steps
/// the positive Ritz pairs unpack into refreshed (U, sigma, V). The zero
/// blocks of the embedding are never formed, and one embedded block apply
/// costs one paired application of W.
template <typename Scalar>
BlwsResult<Scalar> blws_svd(const LinearOperator<Scalar>& w, const WarmStart<Scalar>& warm,
                            Index k, Index r, Rng& rng) {
    const Index m = w.rows(), n = w.cols();
    const Index bs = warm.rank();
    if (bs < 1) throw std::invalid_argument("blws_svd: empty warm start (seed via adapt_subspace)");
    if (r < 1 || r > std::min(m, n)) throw std::invalid_argument("blws_svd: bad r");
    if (warm.u.rows() != m || warm.v.rows() != n || warm.u.cols() != bs || warm.v.cols() != bs)
        throw std::invalid_argument("blws_svd: warm start does not match operator");

    BlwsResult<Scalar> out;
    Index k_eff = k;
    if (r > k_eff * bs) {
        k_eff = (r + bs - 1) / bs;
        out.k_raised = true;
    }
    k_eff = std::min(k_eff, (m + n) / bs);
    k_eff = std::max<Index>(k_eff, 1);

    const Scalar inv_root2 = Scalar(1) / std::sqrt(Scalar(2));
    DenseMatrix<Scalar> stacked(m + n, bs);
    stacked.topRows(m) = inv_root2 * warm.u;
    stacked.bottomRows(n) = inv_root2 * warm.v;
    DenseMatrix<Scalar> x1 = thin_qr(stacked).q;

    AugmentedOperator<Scalar> aug(w);
    auto evd = bl_evd(aug, x1, k_eff, k_eff * bs);
    out.terminated_early = evd.terminated_early;

    // Half the embedded spectrum is the -sigma mirror; keep the strictly
    // positive part.
    const Scalar positive_floor =
        evd.values.size() > 0 ? Scalar(1e-12) * std::abs(evd.values[0]) : Scalar(0);
    Index keep = 0;
    while (keep < evd.values.size() && keep < r && evd.values[keep] > positive_floor) ++keep;

    const Scalar root2 = std::sqrt(Scalar(2));
    WarmStart<Scalar> next;
    next.sigma = evd.values.head(keep);
    next.u.resize(m, keep);
    next.v.resize(n, keep);
    for (Index j = 0; j < keep; ++j) {
        next.u.col(j) = root2 * evd.u.col(j).head(m);
        next.v.col(j) = root2 * evd.u.col(j).tail(n);
    }
    if (keep > 0) {
        next.u = thin_qr(next.u).q;
        next.v = thin_qr(next.v).q;
    }
    if (keep < r) {
        std::optional<WarmStart<Scalar>> partial;
        if (keep > 0) partial = next;
        next = adapt_subspace(partial, r, m, n, rng);
        out.padded = true;
    }
    out.warm = std::move(next);
    return out;
}

}  // namespace blws

#endif
