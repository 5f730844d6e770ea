#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "blws/core/matrix_market.hpp"
#include "blws/core/rng.hpp"

using namespace blws;

TEST_CASE("dense array format round-trips bit-exactly") {
    Rng rng(5);
    DenseMatrix<double> m = rng.gaussian_matrix<double>(7, 3);
    std::stringstream ss;
    write_matrix_market(ss, m);
    DenseMatrix<double> back = read_matrix_market_dense<double>(ss);
    CHECK(back.rows() == 7);
    CHECK(back.cols() == 3);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sparse coordinate format round-trips bit-exactly") {
    Rng rng(6);
    SparseMatrix<double> m(8, 5);
    std::vector<Triplet<double>> trips{{0, 0, 1.25}, {3, 2, -7.5}, {7, 4, rng.normal()}};
    m.setFromTriplets(trips.begin(), trips.end());
    std::stringstream ss;
    write_matrix_market(ss, m);
    SparseMatrix<double> back = read_matrix_market_sparse<double>(ss);
    CHECK(back.nonZeros() == 3);
    CHECK((DenseMatrix<double>(back) - DenseMatrix<double>(m)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reader skips comments and validates") {
    std::stringstream ok("%%MatrixMarket matrix array real general\n% a comment\n2 1\n1.5\n2.5\n");
    DenseMatrix<double> m = read_matrix_market_dense<double>(ok);
    CHECK(m(1, 0) == 2.5);

    std::stringstream dup(
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n");
    CHECK_THROWS_AS(read_matrix_market_sparse<double>(dup), std::runtime_error);

    std::stringstream range(
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market_sparse<double>(range), std::runtime_error);

    std::stringstream banner("%%NotMatrixMarket matrix array real general\n1 1\n0\n");
    CHECK_THROWS_AS(read_matrix_market_dense<double>(banner), std::runtime_error);

    std::stringstream complex_field(
        "%%MatrixMarket matrix array complex general\n1 1\n0 0\n");
    CHECK_THROWS_AS(read_matrix_market_dense<double>(complex_field), std::runtime_error);

    std::stringstream wrong_format("%%MatrixMarket matrix array real general\n2 2 1\n1 1 1.0\n");
    CHECK_THROWS_AS(read_matrix_market_sparse<double>(wrong_format), std::runtime_error);
}
