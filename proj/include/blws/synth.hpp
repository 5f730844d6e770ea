#ifndef BLWS_SYNTH_HPP
#define BLWS_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "blws/core/matrix_market.hpp"
#include "blws/core/qr.hpp"
#include "blws/core/rng.hpp"
#include "blws/core/types.hpp"

namespace blws {

namespace synth_detail {

/// Uniform random s-subset of [0, n) (Floyd's algorithm), returned sorted
/// so downstream value draws are order-independent.
inline std::vector<std::int64_t> sample_distinct(std::int64_t n, std::int64_t s, Rng& rng) {
    std::unordered_set<std::int64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(s));
    for (std::int64_t j = n - s; j < n; ++j) {
        std::int64_t t = static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(j + 1)));
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::int64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace synth_detail

template <typename Scalar>
struct RpcaInstance {
    DenseMatrix<Scalar> d;       ///< observation, a_true + e_true exactly
    DenseMatrix<Scalar> a_true;
    SparseMatrix<Scalar> e_true;
    std::uint64_t seed = 0;
    Index m = 0;
    Index rank = 0;
    Index corruption_count = 0;
};

/// Square low-rank-plus-sparse observation: A from the random orthogonal
/// model (orthonormalized Gaussian factors, singular values |N(0,1)|*m/sqrt(r)),
/// E with round(corrupt_frac*m^2) entries at distinct uniform positions and
/// values uniform on [-500, 500]. Bit-reproducible from the seed.
template <typename Scalar>
RpcaInstance<Scalar> gen_rpca(Index m, double rank_frac, double corrupt_frac,
                              std::uint64_t seed) {
    if (!(rank_frac > 0.0 && rank_frac < 1.0))
        throw std::invalid_argument("gen_rpca: rank_frac outside (0, 1)");
    if (!(corrupt_frac >= 0.0 && corrupt_frac < 1.0))
        throw std::invalid_argument("gen_rpca: corrupt_frac outside [0, 1)");
    const Index r = static_cast<Index>(std::llround(rank_frac * static_cast<double>(m)));
    if (r < 1 || r >= m) throw std::invalid_argument("gen_rpca: rank out of range");

    Rng base(seed);
    Rng rng_u = base.split(1), rng_v = base.split(2), rng_s = base.split(3);
    Rng rng_pos = base.split(4), rng_val = base.split(5);

    RpcaInstance<Scalar> inst;
    inst.seed = seed;
    inst.m = m;
    inst.rank = r;

    DenseMatrix<Scalar> u = thin_qr(rng_u.gaussian_matrix<Scalar>(m, r)).q;
    DenseMatrix<Scalar> v = thin_qr(rng_v.gaussian_matrix<Scalar>(m, r)).q;
    const Scalar scale = static_cast<Scalar>(static_cast<double>(m) / std::sqrt(double(r)));
    DenseVector<Scalar> sigma(r);
    for (Index i = 0; i < r; ++i) sigma[i] = scale * static_cast<Scalar>(std::abs(rng_s.normal()));
    inst.a_true = u * sigma.asDiagonal() * v.transpose();

    const std::int64_t total = static_cast<std::int64_t>(m) * m;
    const std::int64_t nnz =
        std::llround(corrupt_frac * static_cast<double>(total));
    inst.corruption_count = static_cast<Index>(nnz);
    auto positions = synth_detail::sample_distinct(total, nnz, rng_pos);
    std::vector<Triplet<Scalar>> trips;
    trips.reserve(positions.size());
    for (std::int64_t pos : positions) {
        const auto i = static_cast<int>(pos % m);
        const auto j = static_cast<int>(pos / m);
        trips.emplace_back(i, j, static_cast<Scalar>(rng_val.uniform(-500.0, 500.0)));
    }
    inst.e_true.resize(m, m);
    inst.e_true.setFromTriplets(trips.begin(), trips.end());
    inst.e_true.makeCompressed();

    inst.d = inst.a_true + DenseMatrix<Scalar>(inst.e_true);
    return inst;
}

/// Number of observed entries for an (m, r, s/d_r) matrix completion grid
/// point, d_r = r(2m - r).
inline std::int64_t mc_sample_count(Index m, Index r, double ratio_s_dr) {
    const double dr = static_cast<double>(r) * (2.0 * static_cast<double>(m) - static_cast<double>(r));
    return std::llround(ratio_s_dr * dr);
}

template <typename Scalar>
struct McInstance {
    DenseMatrix<Scalar> ml;            ///< m x r Gaussian factor
    DenseMatrix<Scalar> mr;            ///< m x r Gaussian factor, A = ml * mr^T
    SparseMatrix<Scalar> observed;     ///< values of A on the sampled support
    std::uint64_t seed = 0;
    Index m = 0;
    Index r = 0;
    std::int64_t sample_count = 0;

    DenseMatrix<Scalar> a_true_dense() const { return ml * mr.transpose(); }
};

/// Rank-r Gaussian product with s = round(ratio * r(2m - r)) entries observed
/// at distinct uniform positions. Bit-reproducible from the seed.
template <typename Scalar>
McInstance<Scalar> gen_mc(Index m, Index r, double ratio_s_dr, std::uint64_t seed) {
    if (r < 1 || r > m) throw std::invalid_argument("gen_mc: bad rank");
    const std::int64_t total = static_cast<std::int64_t>(m) * m;
    const std::int64_t s = mc_sample_count(m, r, ratio_s_dr);
    if (s < 1 || s > total) throw std::invalid_argument("gen_mc: sample count out of range");

    Rng base(seed);
    Rng rng_l = base.split(1), rng_r = base.split(2), rng_pos = base.split(3);

    McInstance<Scalar> inst;
    inst.seed = seed;
    inst.m = m;
    inst.r = r;
    inst.sample_count = s;
    inst.ml = rng_l.gaussian_matrix<Scalar>(m, r);
    inst.mr = rng_r.gaussian_matrix<Scalar>(m, r);

    auto positions = synth_detail::sample_distinct(total, s, rng_pos);
    std::vector<Triplet<Scalar>> trips;
    trips.reserve(positions.size());
    for (std::int64_t pos : positions) {
        const auto i = static_cast<int>(pos % m);
        const auto j = static_cast<int>(pos / m);
        trips.emplace_back(i, j, inst.ml.row(i).dot(inst.mr.row(j)));
    }
    inst.observed.resize(m, m);
    inst.observed.setFromTriplets(trips.begin(), trips.end());
    inst.observed.makeCompressed();
    return inst;
}

template <typename Scalar>
void export_instance(const RpcaInstance<Scalar>& inst, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_matrix_market((fs::path(dir) / "d.mtx").string(), inst.d);
    save_matrix_market((fs::path(dir) / "a_true.mtx").string(), inst.a_true);
    save_matrix_market((fs::path(dir) / "e_true.mtx").string(), inst.e_true);
}

template <typename Scalar>
void export_instance(const McInstance<Scalar>& inst, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_matrix_market((fs::path(dir) / "observed.mtx").string(), inst.observed);
    save_matrix_market((fs::path(dir) / "ml.mtx").string(), inst.ml);
    save_matrix_market((fs::path(dir) / "mr.mtx").string(), inst.mr);
}

}  // namespace blws

#endif
