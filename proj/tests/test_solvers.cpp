#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "blws/solvers.hpp"
#include "blws/synth.hpp"
#include "oracles.hpp"

using namespace blws;

TEST_CASE("rpca_adm recovers a clean rank-1 matrix with an empty sparse part") {
    Rng rng(3);
    DenseVector<double> a = rng.gaussian_vector<double>(40);
    DenseVector<double> b = rng.gaussian_vector<double>(40);
    RpcaProblem<double> prob{DenseMatrix<double>(a * b.transpose()), 0};
    auto backend = SvdBackend<double>::exact_full();
    auto sol = rpca_adm(prob, backend);
    CHECK(sol.stats.converged);
    CHECK(sol.stats.rank_hat == 1);
    CHECK(sol.stats.e_l0 == 0);
    CHECK((sol.a - prob.d).norm() <= 1e-6 * prob.d.norm());
}

TEST_CASE("rpca_adm desk-size recovery across backends") {
    auto inst = gen_rpca<double>(80, 0.1, 0.1, 21);
    RpcaProblem<double> prob{inst.d, 0};
    RpcaOptions<double> opts;
    opts.truth = &inst.a_true;

    auto exact = SvdBackend<double>::exact_full();
    auto sol_exact = rpca_adm(prob, exact, opts);
    CHECK(sol_exact.stats.converged);
    CHECK(sol_exact.stats.rank_hat == 8);
    CHECK(sol_exact.stats.rel_err <= 1e-5);
    CHECK(std::abs(double(sol_exact.stats.e_l0) - 640.0) <= 10.0);

    SvdBackend<double>::Options lo;
    lo.seed = 5;
    auto lanczos = SvdBackend<double>::lanczos(lo);
    auto sol_lanczos = rpca_adm(prob, lanczos, opts);
    CHECK(sol_lanczos.stats.converged);
    CHECK(sol_lanczos.stats.rank_hat == 8);
    CHECK(sol_lanczos.stats.rel_err <= 1e-5);

    SvdBackend<double>::Options bo;
    bo.seed = 6;
    auto blws = SvdBackend<double>::blws(bo);
    auto sol_blws = rpca_adm(prob, blws, opts);
    CHECK(sol_blws.stats.converged);
    CHECK(sol_blws.stats.rank_hat == 8);
    CHECK(sol_blws.stats.rel_err <= 1e-5);

    CHECK(std::abs(sol_blws.stats.iterations - sol_exact.stats.iterations) <= 3);
    CHECK(std::abs(sol_lanczos.stats.iterations - sol_exact.stats.iterations) <= 3);

    // the sparse component reproduces the planted support size
    CHECK(sol_exact.e.nonZeros() >= 640 - 10);

    // bookkeeping: per-iteration counter deltas add up to the total
    const auto& st = sol_lanczos.stats;
    const std::int64_t summed =
        st.matvec_init + std::accumulate(st.matvec_history.begin(), st.matvec_history.end(),
                                         std::int64_t(0));
    CHECK(summed == st.matvec_count);
    CHECK(st.matvec_history.size() == static_cast<std::size_t>(st.iterations));
}

TEST_CASE("rpca_adm feasibility residual decreases near convergence") {
    auto inst = gen_rpca<double>(60, 0.1, 0.1, 33);
    RpcaProblem<double> prob{inst.d, 0};
    auto backend = SvdBackend<double>::exact_full();
    auto sol = rpca_adm(prob, backend);
    const auto& hist = sol.stats.residual_history;
    REQUIRE(hist.size() >= 10);
    int violations = 0;
    for (std::size_t i = hist.size() - 10; i + 1 < hist.size(); ++i)
        if (hist[i + 1] > hist[i]) ++violations;
    CHECK(violations <= 2);
}

TEST_CASE("rpca_adm returns best effort when capped") {
    auto inst = gen_rpca<double>(50, 0.1, 0.1, 9);
    RpcaProblem<double> prob{inst.d, 0};
    RpcaOptions<double> opts;
    opts.max_iter = 2;
    auto backend = SvdBackend<double>::exact_full();
    auto sol = rpca_adm(prob, backend, opts);
    CHECK_FALSE(sol.stats.converged);
    CHECK(sol.stats.iterations == 2);
}

TEST_CASE("mc_svt completes a fully observed matrix quickly") {
    Rng rng(5);
    DenseMatrix<double> a =
        rng.gaussian_matrix<double>(30, 4) * rng.gaussian_matrix<double>(30, 4).transpose();
    SparseMatrix<double> full = a.sparseView(0.0, -1.0);  // keep every entry
    full.makeCompressed();
    REQUIRE(full.nonZeros() == 900);
    McProblem<double> prob{full, 5.0, 0};
    auto backend = SvdBackend<double>::exact_full();
    McOptions<double> opts;
    auto sol = mc_svt(prob, backend, opts);
    CHECK(sol.stats.converged);
    CHECK(sol.stats.iterations <= 50);
    DenseMatrix<double> a_hat = sol.u * sol.sigma.asDiagonal() * sol.v.transpose();
    CHECK((a_hat - a).norm() / a.norm() <= 2e-4);
}

TEST_CASE("mc_svt desk-size run matches across backends") {
    auto inst = gen_mc<double>(200, 5, 6.0, 13);
    McProblem<double> prob{inst.observed, 0, 0};
    McOptions<double> opts;
    opts.truth_ml = &inst.ml;
    opts.truth_mr = &inst.mr;

    auto exact = SvdBackend<double>::exact_full();
    auto sol_exact = mc_svt(prob, exact, opts);
    CHECK(sol_exact.stats.converged);
    CHECK(sol_exact.stats.rel_err <= 2e-4);

    SvdBackend<double>::Options bo;
    bo.seed = 8;
    auto blws = SvdBackend<double>::blws(bo);
    auto sol_blws = mc_svt(prob, blws, opts);
    CHECK(sol_blws.stats.converged);
    CHECK(sol_blws.stats.rel_err <= 2e-4);
    CHECK(std::abs(sol_blws.stats.iterations - sol_exact.stats.iterations) <= 2);

    SvdBackend<double>::Options lo;
    lo.seed = 9;
    auto lanczos = SvdBackend<double>::lanczos(lo);
    auto sol_lanczos = mc_svt(prob, lanczos, opts);
    CHECK(sol_lanczos.stats.converged);
    CHECK(sol_lanczos.stats.rel_err <= 2e-4);
    CHECK(std::abs(sol_lanczos.stats.iterations - sol_exact.stats.iterations) <= 2);
}

TEST_CASE("mc_svt validates the problem") {
    SparseMatrix<double> empty(10, 10);
    McProblem<double> prob{empty, 0, 0};
    auto backend = SvdBackend<double>::exact_full();
    CHECK_THROWS_AS(mc_svt(prob, backend), std::invalid_argument);
}
