#ifndef BLWS_SOLVERS_HPP
#define BLWS_SOLVERS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "blws/core/linear_operator.hpp"
#include "blws/core/types.hpp"
#include "blws/lanczos.hpp"
#include "blws/svt.hpp"

namespace blws {

template <typename Scalar>
struct RpcaProblem {
    DenseMatrix<Scalar> d;  ///< square observation, low rank + sparse
    Scalar lambda = 0;      ///< sparsity weight; <= 0 selects 1/sqrt(m)

    Scalar effective_lambda() const {
        return lambda > Scalar(0) ? lambda
                                  : Scalar(1) / std::sqrt(static_cast<Scalar>(d.rows()));
    }
};

template <typename Scalar>
struct McProblem {
    SparseMatrix<Scalar> observed;  ///< observed entries of A on the support
    Scalar tau = 0;                 ///< threshold; <= 0 selects 5 m
    Scalar delta = 0;               ///< step size; <= 0 selects 1.2 m^2 / s
};

struct SolverStats {
    Index iterations = 0;
    double wall_time_s = 0;
    std::int64_t matvec_count = 0;       ///< operator counter delta over the solve
    std::int64_t matvec_init = 0;        ///< counter spent before the first iteration
    double rel_err = -1;                 ///< vs ground truth when provided, else -1
    Index rank_hat = 0;
    std::int64_t e_l0 = -1;              ///< sparse support size (RPCA only)
    bool converged = false;
    std::vector<Index> predicted_ranks;  ///< predictor history, one per iteration
    std::vector<std::int64_t> matvec_history;  ///< counter delta per iteration
    std::vector<double> residual_history;
};

template <typename Scalar>
struct RpcaSolution {
    DenseMatrix<Scalar> a;
    SparseMatrix<Scalar> e;
    SolverStats stats;
};

template <typename Scalar>
struct RpcaOptions {
    Scalar tol_outer = Scalar(1e-7);  ///< on ||D - A - E||_F / ||D||_F
    Index max_iter = 1000;
    Scalar rho = Scalar(1.5);         ///< multiplier growth per iteration
    Scalar mu_max_factor = Scalar(1e7);
    Index initial_rank = 10;
    Index rank_increment = 5;
    const DenseMatrix<Scalar>* truth = nullptr;  ///< ground-truth A for rel_err
};

/// Robust PCA, min ||A||_* + lambda ||E||_1 s.t. D = A + E, by alternating
/// proximal steps on A (singular value thresholding at 1/mu) and E
/// (elementwise shrinkage at lambda/mu) with a multiplier update and
/// geometrically increasing mu. Which SVD engine evaluates the A-step is
/// entirely the backend's business.
template <typename Scalar>
RpcaSolution<Scalar> rpca_adm(const RpcaProblem<Scalar>& problem, SvdBackend<Scalar>& backend,
                              const RpcaOptions<Scalar>& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const DenseMatrix<Scalar>& d = problem.d;
    const Index m = d.rows();
    if (d.rows() != d.cols()) throw std::invalid_argument("rpca_adm: D must be square");
    if (!all_finite(d)) throw std::invalid_argument("rpca_adm: D has non-finite entries");
    const Scalar lambda = problem.effective_lambda();
    const Scalar norm_d_fro = d.norm();

    RpcaSolution<Scalar> sol;
    if (norm_d_fro == Scalar(0)) {
        sol.a = DenseMatrix<Scalar>::Zero(m, m);
        sol.e.resize(m, m);
        sol.stats.converged = true;
        sol.stats.e_l0 = 0;
        return sol;
    }

    DenseOperator<Scalar> op(d);
    const Scalar norm2_d = spectral_norm(op);
    Scalar mu = Scalar(1.25) / norm2_d;
    const Scalar mu_max = mu * opts.mu_max_factor;
    const Scalar dual_scale = std::max(norm2_d, d.cwiseAbs().maxCoeff() / lambda);

    DenseMatrix<Scalar> y = d / dual_scale;
    DenseMatrix<Scalar> e = DenseMatrix<Scalar>::Zero(m, m);
    DenseMatrix<Scalar> a = DenseMatrix<Scalar>::Zero(m, m);

    RankPredictor predictor;
    predictor.r = opts.initial_rank;
    predictor.increment = opts.rank_increment;
    predictor.max_rank = m;

    SolverStats& stats = sol.stats;
    stats.matvec_init = op.application_count();
    std::int64_t counter_mark = stats.matvec_init;
    Index last_rank = 0;
    for (Index it = 1; it <= opts.max_iter; ++it) {
        op.assign(d - e + y / mu);
        auto prox = svt(op, Scalar(1) / mu, backend, predictor);
        a = prox.dense();
        last_rank = prox.achieved_rank;

        e = shrink(d - a + y / mu, lambda / mu);
        DenseMatrix<Scalar> resid = d - a - e;
        y += mu * resid;
        mu = std::min(opts.rho * mu, mu_max);

        stats.matvec_history.push_back(op.application_count() - counter_mark);
        counter_mark = op.application_count();
        const double feas = static_cast<double>(resid.norm() / norm_d_fro);
        stats.residual_history.push_back(feas);
        stats.iterations = it;
        if (feas <= static_cast<double>(opts.tol_outer)) {
            stats.converged = true;
            break;
        }
    }

    sol.a = a;
    std::vector<Triplet<Scalar>> trips;
    const Scalar e_tol = Scalar(1e-8) * d.cwiseAbs().maxCoeff();
    std::int64_t e_l0 = 0;
    for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < m; ++i) {
            const Scalar v = e(i, j);
            if (v != Scalar(0)) trips.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
            if (std::abs(v) > e_tol) ++e_l0;
        }
    }
    sol.e.resize(m, m);
    sol.e.setFromTriplets(trips.begin(), trips.end());
    sol.e.makeCompressed();

    stats.rank_hat = last_rank;
    stats.e_l0 = e_l0;
    stats.matvec_count = op.application_count();
    stats.predicted_ranks = predictor.history;
    if (opts.truth)
        stats.rel_err = static_cast<double>((a - *opts.truth).norm() / opts.truth->norm());
    stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

template <typename Scalar>
struct McSolution {
    DenseMatrix<Scalar> u;  ///< recovered factors, A = u * diag(sigma) * v^T
    DenseVector<Scalar> sigma;
    DenseMatrix<Scalar> v;
    SolverStats stats;
};

template <typename Scalar>
struct McOptions {
    Scalar tol_outer = Scalar(1e-4);  ///< on ||pi_Omega(A - D)||_F / ||pi_Omega(D)||_F
    Index max_iter = 500;
    Index initial_rank = 10;
    Index rank_increment = 5;
    const DenseMatrix<Scalar>* truth_ml = nullptr;  ///< ground-truth factors for rel_err
    const DenseMatrix<Scalar>* truth_mr = nullptr;
};

namespace solver_detail {

/// Values of u * diag(s) * v^T on the sparsity pattern of `pattern`, in
/// compressed storage order.
template <typename Scalar>
DenseVector<Scalar> project_low_rank(const SparseMatrix<Scalar>& pattern,
                                     const DenseMatrix<Scalar>& u, const DenseVector<Scalar>& s,
                                     const DenseMatrix<Scalar>& v) {
    DenseVector<Scalar> out(pattern.nonZeros());
    if (u.cols() == 0) {
        out.setZero();
        return out;
    }
    DenseMatrix<Scalar> us = u * s.asDiagonal();
    Index idx = 0;
    for (Index k = 0; k < pattern.outerSize(); ++k)
        for (typename SparseMatrix<Scalar>::InnerIterator it(pattern, k); it; ++it)
            out[idx++] = us.row(it.row()).dot(v.row(it.col()));
    return out;
}

}  // namespace solver_detail

/// Matrix completion by singular value thresholding on the sparse dual
/// iterate Y, which stays supported exactly on the observed index set.
template <typename Scalar>
McSolution<Scalar> mc_svt(const McProblem<Scalar>& problem, SvdBackend<Scalar>& backend,
                          const McOptions<Scalar>& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    SparseMatrix<Scalar> pd = problem.observed;
    pd.makeCompressed();
    const Index m = pd.rows(), n = pd.cols();
    const std::int64_t s = pd.nonZeros();
    if (s == 0) throw std::invalid_argument("mc_svt: empty observation set");
    if (!all_finite(pd)) throw std::invalid_argument("mc_svt: non-finite observations");

    const Scalar tau =
        problem.tau > Scalar(0) ? problem.tau : Scalar(5) * static_cast<Scalar>(m);
    const Scalar delta = problem.delta > Scalar(0)
                             ? problem.delta
                             : Scalar(1.2) * static_cast<Scalar>(m) * static_cast<Scalar>(n) /
                                   static_cast<Scalar>(s);

    SparseOperator<Scalar> op(pd);
    const Scalar norm2_pd = spectral_norm<Scalar>(op);
    const Scalar k0 = std::ceil(tau / (delta * norm2_pd));

    DenseVector<Scalar> obs_vals =
        Eigen::Map<const DenseVector<Scalar>>(pd.valuePtr(), pd.nonZeros());
    const Scalar obs_norm = obs_vals.norm();
    DenseVector<Scalar> y_vals = (k0 * delta) * obs_vals;

    RankPredictor predictor;
    predictor.r = opts.initial_rank;
    predictor.increment = opts.rank_increment;
    predictor.max_rank = std::min(m, n);

    McSolution<Scalar> sol;
    SolverStats& stats = sol.stats;
    stats.matvec_init = op.application_count();
    std::int64_t counter_mark = stats.matvec_init;
    for (Index it = 1; it <= opts.max_iter; ++it) {
        op.assign_values(y_vals);
        auto prox = svt(op, tau, backend, predictor);
        sol.u = std::move(prox.u);
        sol.sigma = std::move(prox.sigma);
        sol.v = std::move(prox.v);
        stats.rank_hat = prox.achieved_rank;

        DenseVector<Scalar> a_vals = solver_detail::project_low_rank(pd, sol.u, sol.sigma, sol.v);
        DenseVector<Scalar> resid_vals = obs_vals - a_vals;
        stats.matvec_history.push_back(op.application_count() - counter_mark);
        counter_mark = op.application_count();
        const double rel = static_cast<double>(resid_vals.norm() / obs_norm);
        stats.residual_history.push_back(rel);
        stats.iterations = it;
        if (rel <= static_cast<double>(opts.tol_outer)) {
            stats.converged = true;
            break;
        }
        y_vals += delta * resid_vals;
    }

    stats.matvec_count = op.application_count();
    stats.predicted_ranks = predictor.history;
    if (opts.truth_ml && opts.truth_mr) {
        DenseMatrix<Scalar> a_true = *opts.truth_ml * opts.truth_mr->transpose();
        DenseMatrix<Scalar> a_hat = sol.u * sol.sigma.asDiagonal() * sol.v.transpose();
        stats.rel_err = static_cast<double>((a_hat - a_true).norm() / a_true.norm());
    }
    stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

}  // namespace blws

#endif
