#ifndef BLWS_SVT_HPP
#define BLWS_SVT_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "blws/block_lanczos.hpp"
#include "blws/core/linear_operator.hpp"
#include "blws/core/rng.hpp"
#include "blws/core/small_dense.hpp"
#include "blws/lanczos.hpp"

namespace blws {

/// Soft-thresholding: sgn(x) * max(|x| - eps, 0).
template <typename Scalar>
Scalar shrink(Scalar x, Scalar eps) {
    if (eps < Scalar(0)) throw std::invalid_argument("shrink: negative threshold");
    if (x > eps) return x - eps;
    if (x < -eps) return x + eps;
    return Scalar(0);
}

/// Elementwise soft-thresholding of a dense expression.
template <typename Derived>
typename Derived::PlainObject shrink(const Eigen::MatrixBase<Derived>& m,
                                     typename Derived::Scalar eps) {
    using Scalar = typename Derived::Scalar;
    if (eps < Scalar(0)) throw std::invalid_argument("shrink: negative threshold");
    return m.unaryExpr([eps](Scalar x) { return shrink(x, eps); });
}

/// Singular value thresholding through a full dense SVD; the direct
/// evaluation of the proximal map of eps * nuclear norm.
template <typename Scalar>
DenseMatrix<Scalar> singular_value_threshold(const DenseMatrix<Scalar>& w, Scalar eps) {
    auto svd = full_svd_small(w);
    DenseVector<Scalar> s = shrink(svd.sigma, eps);
    return svd.u * s.asDiagonal() * svd.v.transpose();
}

/// Guess for the number of singular values above the next threshold,
/// learned from what the previous iteration actually kept.
struct RankPredictor {
    Index r = 10;
    Index increment = 5;
    Index max_rank = 1;
    std::vector<Index> history;
};

/// Next prediction: achieved + increment while everything computed was still
/// above the threshold (the frontier has not been seen yet), else
/// achieved + 1. Clamped to [1, max_rank].
inline RankPredictor predict_rank(RankPredictor p, Index achieved_rank,
                                  bool all_above_threshold) {
    Index next = achieved_rank + (all_above_threshold ? p.increment : Index(1));
    p.r = std::clamp<Index>(next, 1, p.max_rank);
    p.history.push_back(p.r);
    return p;
}

template <typename Scalar>
struct SvdTriplets {
    DenseMatrix<Scalar> u;
    DenseVector<Scalar> sigma;  ///< descending, not shrunk
    DenseMatrix<Scalar> v;
    Index converged = 0;   ///< leading triplets trusted by the backend
    bool hit_cap = false;  ///< iterative backend stopped at its step cap
};

/// Partial SVD engine used inside the thresholding operator. The blws
/// variant keeps the singular subspaces of the previous call and seeds the
/// next block Lanczos run with them; the lanczos variant restarts cold every
/// call; exact-full is the dense reference.
///
/// compute() returns at least r triplets when it can; the blws variant
/// answers with its full held width so a caller probing for a threshold
/// crossing can consume the extra values without recomputation.
template <typename Scalar>
class SvdBackend {
public:
    enum class Kind { ExactFull, Lanczos, Blws };

    struct Options {
        Index block_steps = 2;          ///< k of the blws variant
        Scalar ritz_tol = Scalar(1e-8); ///< lanczos convergence tolerance (also blws seeding)
        Index max_k = 0;                ///< lanczos step cap (0: auto)
        Index seed_margin = 5;          ///< extra directions on a blws (re)seed
        std::uint64_t seed = 0xb10c;
    };

    static SvdBackend exact_full() { return SvdBackend(Kind::ExactFull, Options{}); }
    static SvdBackend lanczos(Options o = {}) { return SvdBackend(Kind::Lanczos, o); }
    static SvdBackend blws(Options o = {}) { return SvdBackend(Kind::Blws, o); }

    Kind kind() const { return kind_; }
    const Options& options() const { return opt_; }
    const std::optional<WarmStart<Scalar>>& warm_state() const { return warm_; }

    SvdTriplets<Scalar> compute(const LinearOperator<Scalar>& w, Index r) {
        const Index p = std::min(w.rows(), w.cols());
        if (r < 1 || r > p) throw std::invalid_argument("SvdBackend: bad r");
        switch (kind_) {
            case Kind::ExactFull: {
                auto svd = full_svd_small(w.dense());
                SvdTriplets<Scalar> t;
                t.u = svd.u.leftCols(r);
                t.sigma = svd.sigma.head(r);
                t.v = svd.v.leftCols(r);
                t.converged = r;
                return t;
            }
            case Kind::Lanczos: {
                LanczosOptions<Scalar> lo;
                lo.tol = opt_.ritz_tol;
                lo.max_k = opt_.max_k;
                lo.seed = rng_.next_u64();
                auto svd = lanczos_partial_svd(w, r, lo);
                SvdTriplets<Scalar> t;
                t.u = std::move(svd.u);
                t.sigma = std::move(svd.sigma);
                t.v = std::move(svd.v);
                t.converged = svd.stats.converged;
                t.hit_cap = !svd.stats.all_converged;
                return t;
            }
            case Kind::Blws: {
                // A request inside the held subspace is pure warm-started
                // refinement. A request past it cannot be served from the
                // block Krylov space: once the warm block is (near) invariant,
                // W's action on it produces no new spectral directions, so
                // spectrum extension re-seeds through the cold Lanczos path.
                // Seeding a few directions past the request keeps the usual
                // +1 rank growth inside the held subspace.
                const Index held = warm_ ? warm_->rank() : 0;
                if (held < r) {
                    // consecutive extensions (one threshold-growth loop)
                    // widen the margin exponentially so a long rank climb
                    // costs a handful of seeds, not one per increment
                    const Index margin =
                        opt_.seed_margin * (Index(1) << std::min<Index>(growth_streak_, 5));
                    ++growth_streak_;
                    const Index r_seed = std::min(p, r + margin);
                    LanczosOptions<Scalar> lo;
                    lo.tol = opt_.ritz_tol;
                    lo.max_k = opt_.max_k;
                    lo.seed = rng_.next_u64();
                    auto svd = lanczos_partial_svd(w, r_seed, lo);
                    WarmStart<Scalar> ws;
                    ws.u = std::move(svd.u);
                    ws.sigma = std::move(svd.sigma);
                    ws.v = std::move(svd.v);
                    if (ws.rank() < r_seed) {
                        std::optional<WarmStart<Scalar>> partial;
                        if (ws.rank() > 0) partial = ws;
                        ws = adapt_subspace<Scalar>(partial, r_seed, w.rows(), w.cols(), rng_);
                    }
                    warm_ = std::move(ws);
                    SvdTriplets<Scalar> t;
                    t.u = warm_->u;
                    t.sigma = warm_->sigma;
                    t.v = warm_->v;
                    t.converged = svd.stats.converged;
                    t.hit_cap = !svd.stats.all_converged;
                    return t;
                }
                if (r < held) growth_streak_ = 0;
                if (held > r + 2 * opt_.seed_margin)
                    warm_ = adapt_subspace<Scalar>(warm_, r + opt_.seed_margin, w.rows(),
                                                   w.cols(), rng_);
                auto res = blws_svd(w, *warm_, opt_.block_steps, warm_->rank(), rng_);
                warm_ = res.warm;
                SvdTriplets<Scalar> t;
                t.u = warm_->u;
                t.sigma = warm_->sigma;
                t.v = warm_->v;
                t.converged = res.padded ? std::min(r, res.warm.rank()) : warm_->rank();
                return t;
            }
        }
        throw std::logic_error("SvdBackend: unreachable");
    }

private:
    SvdBackend(Kind k, Options o) : kind_(k), opt_(o), rng_(o.seed) {}

    Kind kind_;
    Options opt_;
    std::optional<WarmStart<Scalar>> warm_;
    Rng rng_;
    Index growth_streak_ = 0;
};

template <typename Scalar>
struct SvtResult {
    DenseMatrix<Scalar> u;
    DenseVector<Scalar> sigma;  ///< shrunk values of the retained triplets, all > 0
    DenseMatrix<Scalar> v;
    Index achieved_rank = 0;
    bool all_above_threshold = false;

    DenseMatrix<Scalar> dense() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Proximal step A = argmin eps*||A||_* + 1/2 ||A - W||_F^2, evaluated as
/// singular value thresholding on the top of the spectrum only.
///
/// Starting from the predictor's guess, the computed rank grows by the
/// predictor's increment until some singular value falls to the threshold
/// (or the full rank is reached), so the retained set is always complete.
/// Values exactly at the threshold are dropped.
template <typename Scalar>
SvtResult<Scalar> svt(const LinearOperator<Scalar>& w, Scalar eps, SvdBackend<Scalar>& backend,
                      RankPredictor& predictor) {
    if (eps < Scalar(0)) throw std::invalid_argument("svt: negative threshold");
    const Index p = std::min(w.rows(), w.cols());
    Index r = std::clamp<Index>(predictor.r, 1, p);

    SvdTriplets<Scalar> t;
    bool all_above = false;
    while (true) {
        t = backend.compute(w, r);
        const Index have = t.sigma.size();
        const bool smallest_above = have > 0 && t.sigma[have - 1] > eps;
        if (!smallest_above || std::max(r, have) >= p) {
            all_above = smallest_above;
            break;
        }
        r = std::min<Index>(std::max(r, have) + predictor.increment, p);
    }

    if (t.hit_cap && t.converged == 0 && t.sigma.size() > 0 && t.sigma[0] > eps) {
        std::ostringstream msg;
        msg << "svt: partial SVD backend hit its step cap with no converged triplet"
            << " (requested " << r << " of " << p << ")";
        throw std::runtime_error(msg.str());
    }

    Index achieved = 0;
    while (achieved < t.sigma.size() && t.sigma[achieved] > eps) ++achieved;

    SvtResult<Scalar> out;
    out.u = t.u.leftCols(achieved);
    out.v = t.v.leftCols(achieved);
    out.sigma = t.sigma.head(achieved).array() - eps;
    out.achieved_rank = achieved;
    out.all_above_threshold = all_above;
    predictor = predict_rank(predictor, achieved, all_above);
    return out;
}

/// Convenience overload for a plain dense matrix.
template <typename Scalar>
SvtResult<Scalar> svt(const DenseMatrix<Scalar>& w, Scalar eps, SvdBackend<Scalar>& backend,
                      RankPredictor& predictor) {
    DenseOperator<Scalar> op(w);
    return svt(op, eps, backend, predictor);
}

}  // namespace blws

#endif
