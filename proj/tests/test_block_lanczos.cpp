#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blws/block_lanczos.hpp"
#include "blws/core/small_dense.hpp"
#include "oracles.hpp"

using namespace blws;

namespace {

DenseMatrix<double> coordinate_block(Index n, std::initializer_list<Index> cols) {
    DenseMatrix<double> x = DenseMatrix<double>::Zero(n, static_cast<Index>(cols.size()));
    Index j = 0;
    for (Index c : cols) x(c, j++) = 1.0;
    return x;
}

WarmStart<double> exact_warm(const DenseMatrix<double>& w, Index r) {
    auto svd = full_svd_small(w);
    WarmStart<double> warm;
    warm.u = svd.u.leftCols(r);
    warm.v = svd.v.leftCols(r);
    warm.sigma = svd.sigma.head(r);
    return warm;
}

}  // namespace

TEST_CASE("invariant initial subspace terminates immediately") {
    Rng rng(3);
    DenseVector<double> lambda{{9.0, 7.0, 3.0, 1.0, 0.5, 0.2}};
    DenseMatrix<double> basis;
    DenseMatrix<double> w = oracles::with_spectrum(lambda, rng, &basis);
    DenseOperator<double> op(w);
    DenseMatrix<double> x1 = basis.leftCols(2);

    auto fac = block_lanczos_procedure(op, x1, 3);
    CHECK(fac.terminated_early);
    CHECK(fac.t.m.size() == 1);
    auto evd = sym_evd_small(fac.t.m[0]);
    CHECK(evd.values[0] == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(evd.values[1] == doctest::Approx(7.0).epsilon(1e-10));
}

TEST_CASE("coordinate invariant subspace of a diagonal matrix") {
    DenseOperator<double> w(
        DenseMatrix<double>(DenseVector<double>{{4.0, 3.0, 2.0, 1.0}}.asDiagonal()));
    auto fac = block_lanczos_procedure(w, coordinate_block(4, {0, 1}), 2);
    CHECK(fac.terminated_early);
    CHECK(fac.t.m.size() == 1);
    CHECK(fac.t.m[0](0, 0) == doctest::Approx(4.0));
    CHECK(fac.t.m[0](1, 1) == doctest::Approx(3.0));
    CHECK(fac.t.m[0](0, 1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("block recurrence identity on a random matrix") {
    Rng rng(7);
    DenseMatrix<double> w = oracles::random_symmetric(40, rng);
    DenseOperator<double> op(w);
    DenseMatrix<double> x1 = thin_qr(rng.gaussian_matrix<double>(40, 3)).q;
    auto fac = block_lanczos_procedure(op, x1, 3);
    CHECK_FALSE(fac.terminated_early);
    CHECK(fac.q.cols() == 9);

    // W Q - Q T has only the trailing block (the unreturned residual R_k)
    DenseMatrix<double> lhs = w * fac.q - fac.q * fac.t.embed();
    CHECK(lhs.leftCols(6).norm() <= 1e-9 * w.norm());
    // each B is upper triangular with nonnegative diagonal
    for (const auto& b : fac.t.b) {
        for (Index i = 0; i < b.rows(); ++i) {
            CHECK(b(i, i) >= 0.0);
            for (Index j = 0; j < i; ++j) CHECK(b(i, j) == 0.0);
        }
    }
}

TEST_CASE("procedure validates input") {
    Rng rng(9);
    DenseOperator<double> w(oracles::random_symmetric(10, rng));
    DenseMatrix<double> x1 = thin_qr(rng.gaussian_matrix<double>(10, 2)).q;
    CHECK_THROWS_AS(block_lanczos_procedure(w, x1, 0), std::invalid_argument);
    CHECK_THROWS_AS(block_lanczos_procedure(w, x1, 6), std::invalid_argument);  // k*b > m
    DenseMatrix<double> skew = 2.0 * x1;
    CHECK_THROWS_AS(block_lanczos_procedure(w, skew, 2), std::invalid_argument);
}

TEST_CASE("k = 1 is Rayleigh-Ritz on the initial subspace") {
    DenseOperator<double> w(
        DenseMatrix<double>(DenseVector<double>{{5.0, 1.0, 1.0, 1.0}}.asDiagonal()));
    auto res = bl_evd(w, coordinate_block(4, {0, 1}), 1, 1);
    REQUIRE(res.available == 1);
    CHECK(res.values[0] == doctest::Approx(5.0));
    CHECK(std::abs(res.u(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));

    // general case: exactly the lifted eigenpairs of X1^T W X1
    Rng rng(11);
    DenseMatrix<double> wr = oracles::random_symmetric(20, rng);
    DenseOperator<double> opr(wr);
    DenseMatrix<double> x1 = thin_qr(rng.gaussian_matrix<double>(20, 4)).q;
    auto rr = bl_evd(opr, x1, 1, 4);
    auto small = sym_evd_small(DenseMatrix<double>(x1.transpose() * wr * x1));
    CHECK((rr.values - small.values).cwiseAbs().maxCoeff() <= 1e-12 * wr.norm());
    CHECK((rr.u - x1 * small.vectors).norm() <= 1e-10);
}

TEST_CASE("bl_evd with an exact invariant start returns exact eigenvalues") {
    Rng rng(13);
    DenseVector<double> lambda{{12.0, 10.0, 4.0, 2.0, 1.0, 0.5, 0.1, 0.05}};
    DenseMatrix<double> basis;
    DenseMatrix<double> w = oracles::with_spectrum(lambda, rng, &basis);
    DenseOperator<double> op(w);
    for (Index k : {1, 2, 3}) {
        auto res = bl_evd(op, basis.leftCols(2), k, 2);
        CHECK(res.values[0] == doctest::Approx(12.0).epsilon(1e-10));
        CHECK(res.values[1] == doctest::Approx(10.0).epsilon(1e-10));
    }
}

TEST_CASE("bl_evd matches the dense oracle on a spiked random matrix") {
    // leading spectrum well separated from the bulk, as solver iterates are
    Rng rng(17);
    DenseVector<double> lambda(60);
    lambda << 100, 90, 80, 70, 60, DenseVector<double>::Zero(55);
    for (Index i = 5; i < 60; ++i) lambda[i] = rng.uniform(0.0, 1.0);
    std::sort(lambda.data(), lambda.data() + 60, std::greater<double>());
    DenseMatrix<double> w = oracles::with_spectrum(lambda, rng);
    DenseOperator<double> op(w);
    DenseMatrix<double> x1 = thin_qr(rng.gaussian_matrix<double>(60, 5)).q;
    auto res = bl_evd(op, x1, 4, 5);
    auto exact = oracles::jacobi_evd(w);
    for (Index j = 0; j < 5; ++j)
        CHECK(res.values[j] == doctest::Approx(exact.values[j]).epsilon(1e-6));
    CHECK((res.u.transpose() * res.u - DenseMatrix<double>::Identity(5, 5)).norm() <= 1e-6);
}

TEST_CASE("largest Ritz value is monotone in the number of block steps") {
    Rng rng(19);
    DenseMatrix<double> w = oracles::random_symmetric(36, rng);
    DenseOperator<double> op(w);
    DenseMatrix<double> x1 = thin_qr(rng.gaussian_matrix<double>(36, 4)).q;
    double prev = -1e300;
    for (Index k : {1, 2, 3}) {
        auto res = bl_evd(op, x1, k, 1);
        CHECK(res.values[0] >= prev - 1e-9 * w.norm());
        prev = res.values[0];
    }
}

TEST_CASE("bl_evd truncates when the subspace terminates early") {
    DenseOperator<double> w(
        DenseMatrix<double>(DenseVector<double>{{4.0, 3.0, 2.0, 1.0, 0.5, 0.25}}.asDiagonal()));
    auto res = bl_evd(w, coordinate_block(6, {0, 1}), 2, 3);
    CHECK(res.terminated_early);
    CHECK(res.available == 2);
    CHECK(res.values.size() == 2);
}

TEST_CASE("adapt_subspace identity, truncation, extension, seeding") {
    Rng rng(23);
    DenseMatrix<double> w = rng.gaussian_matrix<double>(50, 50);
    WarmStart<double> warm = exact_warm(w, 5);

    auto same = adapt_subspace<double>(warm, 5, 50, 50, rng);
    CHECK((same.u - warm.u).norm() == 0.0);
    CHECK((same.sigma - warm.sigma).norm() == 0.0);

    auto cut = adapt_subspace<double>(warm, 3, 50, 50, rng);
    CHECK(cut.rank() == 3);
    CHECK((cut.u - warm.u.leftCols(3)).norm() == 0.0);

    WarmStart<double> small = exact_warm(w, 3);
    auto grown = adapt_subspace<double>(small, 6, 50, 50, rng);
    CHECK(grown.rank() == 6);
    CHECK((grown.u.transpose() * grown.u - DenseMatrix<double>::Identity(6, 6)).norm() <= 1e-10);
    CHECK((grown.v.transpose() * grown.v - DenseMatrix<double>::Identity(6, 6)).norm() <= 1e-10);
    CHECK(oracles::max_principal_angle(grown.u.leftCols(3), small.u) <= 1e-10);
    CHECK(grown.sigma.head(3) == small.sigma);
    CHECK(grown.sigma.tail(3).cwiseAbs().maxCoeff() == 0.0);

    auto fresh = adapt_subspace<double>(std::nullopt, 4, 30, 20, rng);
    CHECK(fresh.rank() == 4);
    CHECK((fresh.u.transpose() * fresh.u - DenseMatrix<double>::Identity(4, 4)).norm() <= 1e-10);
    CHECK(fresh.sigma.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(adapt_subspace<double>(warm, 0, 50, 50, rng), std::invalid_argument);
    CHECK_THROWS_AS(adapt_subspace<double>(warm, 51, 50, 50, rng), std::invalid_argument);
}

TEST_CASE("blws_svd fixed point on exact singular subspaces") {
    Rng rng(29);
    DenseMatrix<double> w = rng.gaussian_matrix<double>(30, 20);
    auto exact = full_svd_small(w);
    WarmStart<double> warm = exact_warm(w, 4);
    DenseOperator<double> op(w);

    auto res = blws_svd(op, warm, 2, 4, rng);
    REQUIRE(res.warm.rank() == 4);
    CHECK_FALSE(res.padded);
    for (Index j = 0; j < 4; ++j)
        CHECK(std::abs(res.warm.sigma[j] - exact.sigma[j]) <= 1e-9 * exact.sigma[0]);
    CHECK(oracles::max_principal_angle(res.warm.u, exact.u.leftCols(4)) <= 1e-8);
    CHECK(oracles::max_principal_angle(res.warm.v, exact.v.leftCols(4)) <= 1e-8);
}

TEST_CASE("blws_svd on diag(9,4,1) with the exact warm start") {
    DenseMatrix<double> w = DenseVector<double>{{9.0, 4.0, 1.0}}.asDiagonal();
    WarmStart<double> warm = exact_warm(w, 2);
    DenseOperator<double> op(w);
    Rng rng(31);
    auto res = blws_svd(op, warm, 2, 2, rng);
    CHECK(res.warm.sigma[0] == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(res.warm.sigma[1] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("blws_svd tracks a slowly drifting sequence against the dense oracle") {
    Rng rng(37);
    const Index m = 200, r = 10;
    // strong leading spectrum, clear gap after r
    DenseMatrix<double> u0 = thin_qr(rng.gaussian_matrix<double>(m, 15)).q;
    DenseMatrix<double> v0 = thin_qr(rng.gaussian_matrix<double>(m, 15)).q;
    DenseVector<double> s0(15);
    for (Index i = 0; i < 15; ++i) s0[i] = 100.0 * std::pow(0.7, double(i));
    DenseMatrix<double> w0 = u0 * s0.asDiagonal() * v0.transpose();
    DenseMatrix<double> delta = rng.gaussian_matrix<double>(m, m);
    delta *= 0.01 * w0.norm() / delta.norm();

    WarmStart<double> warm = exact_warm(w0, r);
    DenseOperator<double> op(w0);
    double last_err = 1.0;
    for (int i = 1; i <= 10; ++i) {
        DenseMatrix<double> wi = w0 + double(i) * 0.01 * delta;
        op.assign(wi);
        auto res = blws_svd(op, warm, 2, r, rng);
        warm = res.warm;
        auto exact = full_svd_small(wi);
        last_err = (warm.sigma - exact.sigma.head(r)).cwiseAbs().maxCoeff() / exact.sigma[0];
        CHECK(last_err <= 1e-4);
    }
    CHECK(last_err <= 1e-6);
}

TEST_CASE("blws_svd application count stays within the block budget") {
    Rng rng(41);
    DenseMatrix<double> w = rng.gaussian_matrix<double>(50, 30);
    DenseOperator<double> op(w);
    WarmStart<double> warm = adapt_subspace<double>(std::nullopt, 5, 50, 30, rng);
    const Index k = 3, b = 5;
    const auto before = op.application_count();
    blws_svd(op, warm, k, 5, rng);
    const auto delta = op.application_count() - before;
    CHECK(delta <= k * 2 * b + 2 * b);
}

TEST_CASE("blws_svd basis orthogonality at k = 2 from a near-invariant start") {
    Rng rng(43);
    const Index m = 100, n = 80, r = 6;
    DenseMatrix<double> w = rng.gaussian_matrix<double>(m, n);
    WarmStart<double> warm = exact_warm(w, r);
    // perturb the subspaces, then check the block basis the procedure builds
    DenseMatrix<double> pu = warm.u + 1e-3 * rng.gaussian_matrix<double>(m, r);
    DenseMatrix<double> pv = warm.v + 1e-3 * rng.gaussian_matrix<double>(n, r);
    DenseMatrix<double> stacked(m + n, r);
    stacked.topRows(m) = pu / std::sqrt(2.0);
    stacked.bottomRows(n) = pv / std::sqrt(2.0);
    DenseMatrix<double> x1 = thin_qr(stacked).q;

    DenseOperator<double> op(w);
    AugmentedOperator<double> aug(op);
    auto fac = block_lanczos_procedure<double>(aug, x1, 2);
    const Index cols = fac.q.cols();
    CHECK((fac.q.transpose() * fac.q - DenseMatrix<double>::Identity(cols, cols)).norm() <= 1e-6);
}

TEST_CASE("blws_svd raises k when the warm block is too narrow") {
    Rng rng(47);
    DenseMatrix<double> w = rng.gaussian_matrix<double>(40, 40);
    WarmStart<double> warm = exact_warm(w, 2);
    DenseOperator<double> op(w);
    auto res = blws_svd(op, warm, 2, 6, rng);
    CHECK(res.k_raised);
    CHECK(res.warm.rank() == 6);
    auto exact = full_svd_small(w);
    // the top singular values should still be well captured
    CHECK(std::abs(res.warm.sigma[0] - exact.sigma[0]) <= 1e-6 * exact.sigma[0]);
}

TEST_CASE("blws_svd pads with random directions when the spectrum runs out") {
    Rng rng(53);
    DenseMatrix<double> w = DenseMatrix<double>::Zero(8, 8);
    WarmStart<double> warm = adapt_subspace<double>(std::nullopt, 3, 8, 8, rng);
    DenseOperator<double> op(w);
    auto res = blws_svd(op, warm, 2, 3, rng);
    CHECK(res.padded);
    CHECK(res.warm.rank() == 3);
    CHECK((res.warm.u.transpose() * res.warm.u - DenseMatrix<double>::Identity(3, 3)).norm() <=
          1e-10);
    CHECK(res.warm.sigma.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("blws_svd rejects an empty warm start") {
    Rng rng(59);
    DenseMatrix<double> w = rng.gaussian_matrix<double>(10, 10);
    DenseOperator<double> op(w);
    WarmStart<double> empty;
    empty.u.resize(10, 0);
    empty.v.resize(10, 0);
    empty.sigma.resize(0);
    CHECK_THROWS_AS(blws_svd(op, empty, 2, 2, rng), std::invalid_argument);
}
