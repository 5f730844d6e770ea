#ifndef BLWS_LANCZOS_HPP
#define BLWS_LANCZOS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blws/core/augmented_operator.hpp"
#include "blws/core/linear_operator.hpp"
#include "blws/core/rng.hpp"
#include "blws/core/small_dense.hpp"
#include "blws/core/types.hpp"

namespace blws {

enum class ReorthPolicy { None, Full };

/// Symmetric tridiagonal projection T_k: diag(alpha), off-diag(beta >= 0).
/// A zero beta marks a deflation point (two decoupled Krylov runs).
template <typename Scalar>
struct TridiagonalMatrix {
    DenseVector<Scalar> alpha;
    DenseVector<Scalar> beta;

    Index dim() const { return alpha.size(); }

    DenseMatrix<Scalar> embed() const {
        DenseMatrix<Scalar> t = DenseMatrix<Scalar>::Zero(dim(), dim());
        for (Index i = 0; i < dim(); ++i) t(i, i) = alpha[i];
        for (Index i = 0; i + 1 < dim(); ++i) {
            t(i, i + 1) = beta[i];
            t(i + 1, i) = beta[i];
        }
        return t;
    }
};

template <typename Scalar>
struct LanczosFactorization {
    DenseMatrix<Scalar> q;       ///< orthonormal Krylov basis, one column per step
    TridiagonalMatrix<Scalar> t;
    Scalar residual_norm = 0;    ///< coupling norm of the step after the last
    bool terminated_early = false;
};

struct LanczosStats {
    Index steps = 0;
    Index restarts = 0;
    Index converged = 0;  ///< leading Ritz pairs meeting the tolerance
    bool all_converged = false;
};

template <typename Scalar>
struct PartialEvd {
    DenseMatrix<Scalar> u;
    DenseVector<Scalar> values;  ///< descending
    LanczosStats stats;
};

template <typename Scalar>
struct PartialSvd {
    DenseMatrix<Scalar> u;
    DenseVector<Scalar> sigma;  ///< descending, positive Ritz values
    DenseMatrix<Scalar> v;
    LanczosStats stats;
};

template <typename Scalar>
struct LanczosOptions {
    Scalar tol = Scalar(1e-8);    ///< Ritz residual tolerance relative to |lambda_1|
    Index max_k = 0;              ///< 0: min(dim, 10 r + 20)
    ReorthPolicy reorth = ReorthPolicy::Full;
    std::uint64_t seed = 0x1a2c705u;
};

namespace detail {

/// Incremental three-term Lanczos recurrence. Columns are appended one at a
/// time so a run can be extended after a convergence checkpoint without
/// recomputation, and a fresh random direction can be merged after an
/// invariant subspace terminates the recurrence (deflation restart).
template <typename Scalar>
class LanczosRun {
public:
    LanczosRun(const LinearOperator<Scalar>& w, const DenseVector<Scalar>& q1,
               ReorthPolicy reorth)
        : w_(w), reorth_(reorth), dim_(w.rows()) {
        if (w.rows() != w.cols()) throw std::invalid_argument("lanczos: operator not square");
        if (q1.size() != dim_) throw std::invalid_argument("lanczos: bad start vector size");
        if (std::abs(q1.norm() - Scalar(1)) > Scalar(1e-12))
            throw std::invalid_argument("lanczos: start vector is not unit");
        q_.resize(dim_, std::min<Index>(dim_, 16));
        next_dir_ = q1;
        next_coupling_ = Scalar(0);
    }

    Index cols() const { return cols_; }
    bool breakdown() const { return breakdown_; }
    Scalar residual_norm() const { return last_beta_; }
    auto basis() const { return q_.leftCols(cols_); }

    TridiagonalMatrix<Scalar> tridiagonal() const {
        TridiagonalMatrix<Scalar> t;
        t.alpha = Eigen::Map<const DenseVector<Scalar>>(alpha_.data(), alpha_.size());
        t.beta = Eigen::Map<const DenseVector<Scalar>>(beta_.data(), beta_.size());
        return t;
    }

    /// Appends one column. Caller must not step past breakdown.
    void step() {
        const Index l = cols_;
        reserve(l + 1);
        q_.col(l) = next_dir_;
        if (l > 0) beta_.push_back(next_coupling_);
        cols_ = l + 1;

        DenseVector<Scalar> r = w_.apply(q_.col(l));
        const Scalar alpha = q_.col(l).dot(r);
        r -= alpha * q_.col(l);
        if (l > 0) r -= beta_.back() * q_.col(l - 1);
        if (reorth_ == ReorthPolicy::Full) {
            r -= basis() * (basis().transpose() * r).eval();
            r -= basis() * (basis().transpose() * r).eval();
        }
        alpha_.push_back(alpha);
        if (alpha_.size() == 1) tau_ = Scalar(1e-12) * std::abs(alpha);

        last_beta_ = r.norm();
        if (last_beta_ <= tau_ || cols_ >= dim_) {
            breakdown_ = true;
        } else {
            breakdown_ = false;
            next_dir_ = r / last_beta_;
            next_coupling_ = last_beta_;
        }
    }

    /// After breakdown, seeds the next column with a random direction from
    /// the orthogonal complement of the current basis; the recorded coupling
    /// is zero, which block-decouples T. Returns false once the complement
    /// is (numerically) empty.
    bool restart(Rng& rng) {
        if (cols_ >= dim_) return false;
        for (int attempt = 0; attempt < 3; ++attempt) {
            DenseVector<Scalar> v = rng.gaussian_vector<Scalar>(dim_);
            v /= v.norm();
            v -= basis() * (basis().transpose() * v).eval();
            v -= basis() * (basis().transpose() * v).eval();
            const Scalar nv = v.norm();
            if (nv > Scalar(1e-8)) {
                next_dir_ = v / nv;
                next_coupling_ = Scalar(0);
                breakdown_ = false;
                return true;
            }
        }
        return false;
    }

private:
    void reserve(Index c) {
        if (q_.cols() >= c) return;
        const Index cap = std::min(dim_, std::max(c, Index(2) * q_.cols()));
        DenseMatrix<Scalar> grown(dim_, cap);
        grown.leftCols(cols_) = q_.leftCols(cols_);
        q_.swap(grown);
    }

    const LinearOperator<Scalar>& w_;
    ReorthPolicy reorth_;
    Index dim_;
    DenseMatrix<Scalar> q_;
    Index cols_ = 0;
    std::vector<Scalar> alpha_;
    std::vector<Scalar> beta_;
    DenseVector<Scalar> next_dir_;
    Scalar next_coupling_ = 0;
    Scalar last_beta_ = 0;
    Scalar tau_ = 0;
    bool breakdown_ = false;
};

template <typename Scalar>
struct RitzCheckpoint {
    SymEvd<Scalar> evd;       ///< EVD of T, descending
    Index converged = 0;      ///< leading pairs with residual <= tol * |lambda_1|
};

template <typename Scalar>
RitzCheckpoint<Scalar> ritz_checkpoint(const LanczosRun<Scalar>& run, Scalar tol) {
    RitzCheckpoint<Scalar> cp;
    const auto t = run.tridiagonal();
    cp.evd = sym_evd_tridiagonal(t.alpha, t.beta);
    const Index k = t.dim();
    const Scalar scale = std::abs(cp.evd.values[0]);
    const Scalar limit = tol * scale;
    for (Index j = 0; j < k; ++j) {
        const Scalar res = run.residual_norm() * std::abs(cp.evd.vectors(k - 1, j));
        if (res <= limit)
            ++cp.converged;
        else
            break;
    }
    return cp;
}

template <typename Scalar>
PartialEvd<Scalar> partial_evd_impl(const LinearOperator<Scalar>& w, Index r,
                                    const LanczosOptions<Scalar>& opts,
                                    const DenseVector<Scalar>& q1) {
    const Index m = w.rows();
    if (r < 1 || r > m) throw std::invalid_argument("lanczos_partial_evd: bad r");
    Index max_k = opts.max_k > 0 ? std::min(opts.max_k, m) : std::min(m, 10 * r + 20);
    max_k = std::max(max_k, std::min(m, r));

    LanczosRun<Scalar> run(w, q1, opts.reorth);
    Rng rng = Rng(opts.seed).split(11);
    LanczosStats stats;
    Index k_target = std::min(max_k, std::max(Index(2) * r, Index(10)));

    while (true) {
        if (!run.breakdown() && run.cols() < k_target) {
            run.step();
            continue;
        }
        auto cp = ritz_checkpoint(run, opts.tol);
        bool done = cp.converged >= r || run.cols() >= max_k;
        if (!done) {
            if (run.breakdown()) {
                if (run.restart(rng))
                    ++stats.restarts;
                else
                    done = true;  // orthogonal complement exhausted
            } else {
                k_target = std::min(max_k, Index(2) * k_target);
            }
        }
        if (done) {
            const Index avail = std::min(r, run.cols());
            PartialEvd<Scalar> out;
            out.values = cp.evd.values.head(avail);
            out.u = run.basis() * cp.evd.vectors.leftCols(avail);
            stats.steps = run.cols();
            stats.converged = std::min(cp.converged, avail);
            stats.all_converged = avail == r && cp.converged >= r;
            out.stats = stats;
            return out;
        }
    }
}

}  // namespace detail

/// Plain Lanczos run: k steps of the three-term recurrence from a unit
/// vector, stopping early when the residual coupling collapses (an invariant
/// subspace was reached).
template <typename Scalar>
LanczosFactorization<Scalar> lanczos_procedure(const LinearOperator<Scalar>& w,
                                               const DenseVector<Scalar>& q1, Index k,
                                               ReorthPolicy reorth = ReorthPolicy::Full) {
    if (k < 1) throw std::invalid_argument("lanczos_procedure: k must be >= 1");
    detail::LanczosRun<Scalar> run(w, q1, reorth);
    while (run.cols() < k && !run.breakdown()) run.step();
    LanczosFactorization<Scalar> out;
    out.q = run.basis();
    out.t = run.tridiagonal();
    out.residual_norm = run.residual_norm();
    out.terminated_early = run.cols() < k;
    return out;
}

/// Leading r eigenpairs of a symmetric operator. The Krylov dimension grows
/// by doubling (restart-free) until the top-r Ritz residuals fall under
/// tol * |lambda_1| or max_k is hit; stats.all_converged reports which.
template <typename Scalar>
PartialEvd<Scalar> lanczos_partial_evd(const LinearOperator<Scalar>& w, Index r,
                                       const LanczosOptions<Scalar>& opts = {}) {
    Rng rng = Rng(opts.seed).split(7);
    DenseVector<Scalar> q1 = rng.unit_vector<Scalar>(w.rows());
    return detail::partial_evd_impl(w, r, opts, q1);
}

/// Leading r singular triplets of a rectangular operator via the symmetric
/// embedding [[0, W], [W^T, 0]], started from (u1; 0). Eigenvectors for the
/// positive Ritz values unpack as u = sqrt(2) * top block, v = sqrt(2) *
/// bottom block.
template <typename Scalar>
PartialSvd<Scalar> lanczos_partial_svd(const LinearOperator<Scalar>& w, Index r,
                                       const LanczosOptions<Scalar>& opts = {},
                                       std::optional<DenseVector<Scalar>> u1 = std::nullopt) {
    const Index m = w.rows(), n = w.cols();
    if (r < 1 || r > std::min(m, n))
        throw std::invalid_argument("lanczos_partial_svd: bad r");

    DenseVector<Scalar> top;
    if (u1) {
        if (u1->size() != m) throw std::invalid_argument("lanczos_partial_svd: bad seed size");
        const Scalar nu = u1->norm();
        if (!(nu > Scalar(0))) throw std::invalid_argument("lanczos_partial_svd: zero seed");
        top = *u1 / nu;
    } else {
        Rng rng = Rng(opts.seed).split(13);
        top = rng.unit_vector<Scalar>(m);
    }
    DenseVector<Scalar> q1 = DenseVector<Scalar>::Zero(m + n);
    q1.head(m) = top;

    AugmentedOperator<Scalar> aug(w);
    PartialEvd<Scalar> evd = detail::partial_evd_impl(aug, r, opts, q1);

    Index keep = 0;
    while (keep < evd.values.size() && evd.values[keep] > Scalar(0)) ++keep;

    PartialSvd<Scalar> out;
    out.sigma = evd.values.head(keep);
    out.u.resize(m, keep);
    out.v.resize(n, keep);
    const Scalar root2 = std::sqrt(Scalar(2));
    for (Index j = 0; j < keep; ++j) {
        out.u.col(j) = root2 * evd.u.col(j).head(m);
        out.v.col(j) = root2 * evd.u.col(j).tail(n);
    }
    out.stats = evd.stats;
    out.stats.converged = std::min(out.stats.converged, keep);
    out.stats.all_converged = evd.stats.all_converged && keep == r;
    return out;
}

/// Largest singular value, for step-size and scaling choices.
template <typename Scalar>
Scalar spectral_norm(const LinearOperator<Scalar>& w, Scalar tol = Scalar(1e-6),
                     std::uint64_t seed = 0xb1f) {
    LanczosOptions<Scalar> opts;
    opts.tol = tol;
    opts.seed = seed;
    auto svd = lanczos_partial_svd(w, 1, opts);
    return svd.sigma.size() > 0 ? svd.sigma[0] : Scalar(0);
}

}  // namespace blws

#endif
