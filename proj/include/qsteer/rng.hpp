#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace qsteer {

// Deterministic counter-based generator (splitmix64). Used for every random
// quantity in the project so that a (seed, draw order) pair reproduces the
// same stream on any platform. Constants are the standard splitmix64 ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Standard normal via Box-Muller (fixed algorithm, unlike
    // std::normal_distribution which is implementation-defined).
    double gaussian() {
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    std::complex<double> complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    // Haar-uniform point on the unit sphere of C^dim.
    Eigen::VectorXcd unit_vector(int dim) {
        Eigen::VectorXcd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = complex_gaussian();
        while (v.norm() == 0.0) {
            for (int i = 0; i < dim; ++i) v(i) = complex_gaussian();
        }
        return v / v.norm();
    }

    // Random traceless skew-Hermitian matrix with Gaussian entries.
    Eigen::MatrixXcd skew_hermitian(int n) {
        Eigen::MatrixXcd x(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) x(i, j) = complex_gaussian();
        Eigen::MatrixXcd m = 0.5 * (x - x.adjoint());
        const std::complex<double> tr = m.trace() / static_cast<double>(n);
        for (int i = 0; i < n; ++i) m(i, i) -= tr;
        return m;
    }

private:
    std::uint64_t state_;
};

}  // namespace qsteer
