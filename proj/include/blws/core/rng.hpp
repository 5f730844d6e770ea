#ifndef BLWS_CORE_RNG_HPP
#define BLWS_CORE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "blws/core/types.hpp"

namespace blws {

/// Seedable random generator with portable output.
///
/// std::mt19937_64 produces an identical bit stream on every conforming
/// implementation, but the standard distributions do not, so the uniform and
/// normal draws are implemented here directly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Derives an independent stream; distinct tags give distinct streams.
    Rng split(std::uint64_t tag) const {
        return Rng(seed_ ^ (0x9e3779b97f4a7c15ull * (tag + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n), n >= 1, by rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    template <typename Scalar>
    DenseMatrix<Scalar> gaussian_matrix(Index rows, Index cols) {
        DenseMatrix<Scalar> m(rows, cols);
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<Scalar>(normal());
        return m;
    }

    template <typename Scalar>
    DenseVector<Scalar> gaussian_vector(Index n) {
        DenseVector<Scalar> v(n);
        for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(normal());
        return v;
    }

    /// Unit-norm Gaussian direction.
    template <typename Scalar>
    DenseVector<Scalar> unit_vector(Index n) {
        DenseVector<Scalar> v = gaussian_vector<Scalar>(n);
        v /= v.norm();
        return v;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace blws

#endif
