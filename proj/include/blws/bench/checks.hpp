#ifndef BLWS_BENCH_CHECKS_HPP
#define BLWS_BENCH_CHECKS_HPP

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "blws/core/augmented_operator.hpp"
#include "blws/core/linear_operator.hpp"
#include "blws/core/rng.hpp"
#include "blws/core/small_dense.hpp"
#include "blws/lanczos.hpp"
#include "blws/solvers.hpp"
#include "blws/svt.hpp"

namespace blws::bench {

struct CheckReport {
    int total = 0;
    int failed = 0;
    std::vector<std::string> failures;

    bool ok() const { return failed == 0; }
    void record(bool pass, const std::string& what) {
        ++total;
        if (!pass) {
            ++failed;
            failures.push_back(what);
        }
    }
};

/// Spectrum identity of the symmetric embedding: for random rectangular W,
/// the eigenvalues of [[0, W], [W^T, 0]] are {+sigma_i} u {-sigma_i} u {0}
/// (dense EVD of the explicitly formed matrix as the oracle), and the
/// triplets unpacked from its Ritz vectors have orthonormal U and V.
inline CheckReport theorem1_suite(int trials, std::uint64_t seed) {
    CheckReport rep;
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const Index m = 2 + static_cast<Index>(rng.uniform_index(39));
        const Index n = 2 + static_cast<Index>(rng.uniform_index(39));
        DenseMatrix<double> w = rng.gaussian_matrix<double>(m, n);

        auto svd = full_svd_small(w);
        DenseVector<double> expected(m + n);
        expected.setZero();
        const Index p = std::min(m, n);
        for (Index i = 0; i < p; ++i) {
            expected[i] = svd.sigma[i];
            expected[m + n - 1 - i] = -svd.sigma[i];
        }
        std::sort(expected.data(), expected.data() + expected.size(),
                  std::greater<double>());

        DenseMatrix<double> explicit_aug = DenseMatrix<double>::Zero(m + n, m + n);
        explicit_aug.topRightCorner(m, n) = w;
        explicit_aug.bottomLeftCorner(n, m) = w.transpose();
        auto evd = sym_evd_small(explicit_aug);

        const double scale = std::max(svd.sigma[0], 1.0);
        const double spectrum_err = (evd.values - expected).cwiseAbs().maxCoeff();
        std::ostringstream what;
        what << "theorem1 trial " << t << " (" << m << "x" << n << ")";
        rep.record(spectrum_err <= 1e-10 * scale, what.str() + ": spectrum");

        DenseOperator<double> op(w);
        const double op_err = (augment(op).dense() - explicit_aug).norm();
        rep.record(op_err == 0.0, what.str() + ": operator action");

        const Index r = std::min<Index>(3, p);
        LanczosOptions<double> lo;
        lo.tol = 1e-9;
        lo.seed = rng.next_u64();
        auto partial = lanczos_partial_svd(op, r, lo);
        const Index got = partial.sigma.size();
        const double u_orth =
            (partial.u.transpose() * partial.u - DenseMatrix<double>::Identity(got, got)).norm();
        const double v_orth =
            (partial.v.transpose() * partial.v - DenseMatrix<double>::Identity(got, got)).norm();
        rep.record(got >= 1 && u_orth <= 1e-8 && v_orth <= 1e-8,
                   what.str() + ": unpacked orthonormality");
    }
    return rep;
}

/// Thresholding agreement across backends on a slowly drifting sequence:
/// after warm-up iterations, the blws and lanczos evaluations of the prox
/// match the exact-full evaluation to 1e-5 relative Frobenius norm.
inline CheckReport prox_agreement_suite(int trials, std::uint64_t seed) {
    CheckReport rep;
    Rng rng(seed);
    const Index m = 200;
    const Index true_rank = 30;
    const int warm_steps = 5;

    for (int t = 0; t < trials; ++t) {
        DenseMatrix<double> base = rng.gaussian_matrix<double>(m, true_rank) *
                                   rng.gaussian_matrix<double>(m, true_rank).transpose();
        DenseMatrix<double> drift = rng.gaussian_matrix<double>(m, m);
        drift *= 1e-3 * base.norm() / drift.norm();

        // Threshold that keeps about 10 singular values of the final iterate.
        DenseMatrix<double> final_w = base + double(warm_steps) * drift;
        auto svd = full_svd_small(final_w);
        const double eps = 0.5 * (svd.sigma[9] + svd.sigma[10]);

        DenseMatrix<double> a_exact = singular_value_threshold(final_w, eps);

        SvdBackend<double>::Options bo;
        bo.block_steps = 2;
        bo.seed = rng.next_u64();
        auto blws_backend = SvdBackend<double>::blws(bo);
        RankPredictor blws_pred{10, 5, m, {}};
        DenseOperator<double> op(base);
        SvtResult<double> blws_res;
        for (int i = 0; i <= warm_steps; ++i) {
            op.assign(base + double(i) * drift);
            blws_res = svt(op, eps, blws_backend, blws_pred);
        }
        const double blws_err = (blws_res.dense() - a_exact).norm() / a_exact.norm();

        SvdBackend<double>::Options lo;
        lo.ritz_tol = 1e-9;
        lo.seed = rng.next_u64();
        auto lanczos_backend = SvdBackend<double>::lanczos(lo);
        RankPredictor lan_pred{10, 5, m, {}};
        op.assign(final_w);
        auto lan_res = svt(op, eps, lanczos_backend, lan_pred);
        const double lan_err = (lan_res.dense() - a_exact).norm() / a_exact.norm();

        std::ostringstream what;
        what << "prox agreement trial " << t << " blws=" << blws_err << " lanczos=" << lan_err;
        rep.record(blws_err <= 1e-5, what.str() + ": blws");
        rep.record(lan_err <= 1e-5, what.str() + ": lanczos");
    }
    return rep;
}

}  // namespace blws::bench

#endif
