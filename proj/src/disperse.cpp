#include "qsteer/disperse.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qsteer::disperse {

namespace {

using Complex = std::complex<double>;

// Spectral factors of B^(n): B = V (i d) V^H with d real (eigenvalues of the
// Hermitian iB), so e^{KB} = V e^{-iKd} V^H.
struct BFactor {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd d;
};

BFactor factor_b(const ModelSpec& spec, int n) {
    const auto pair = model::galerkin(spec, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        (Complex{0.0, 1.0} * pair.b_mat).eval());
    if (es.info() != Eigen::Success)
        throw std::runtime_error("disperse: eigendecomposition failed");
    return {es.eigenvectors(), es.eigenvalues()};
}

Eigen::VectorXcd apply(const BFactor& f, double K, const Eigen::VectorXcd& v) {
    const Eigen::VectorXcd phases =
        (Complex{0.0, -K} * f.d).array().exp();
    return f.vectors * (phases.asDiagonal() * (f.vectors.adjoint() * v));
}

}  // namespace

int suggested_truncation(const QuantumState& psi, double K) {
    return psi.top_level() + static_cast<int>(std::ceil(std::abs(K))) + 32;
}

QuantumState apply_expKB(const ModelSpec& spec, const QuantumState& psi,
                         double K, int trunc) {
    if (trunc < psi.top_level())
        throw std::domain_error("apply_expKB: truncation below support");
    trunc = std::min(trunc, spec.max_level());
    const int big = std::min(2 * trunc, spec.max_level());

    const BFactor f1 = factor_b(spec, trunc);
    const Eigen::VectorXcd r1 = apply(f1, K, psi.embedded(trunc));

    if (big > trunc) {
        const BFactor f2 = factor_b(spec, big);
        Eigen::VectorXcd r2 = apply(f2, K, psi.embedded(big));
        r2.head(trunc) -= r1;
        const double gap = r2.norm();
        if (gap >= 1e-8)
            throw TruncationInsufficient(
                "apply_expKB: doubling the truncation moves the result by " +
                    std::to_string(gap),
                gap);
    }
    return QuantumState::from_embedded(r1);
}

DispersalResult find_dispersal(const ModelSpec& spec, const QuantumState& psi,
                               int n0, double eps, double K_max, int grid) {
    if (!psi.is_unit())
        throw std::invalid_argument("find_dispersal: state must be unit norm");
    if (!(eps > 0.0)) throw std::domain_error("find_dispersal: eps must be > 0");
    if (!(K_max >= 0.0) || grid < 1)
        throw std::domain_error("find_dispersal: bad scan parameters");

    DispersalResult res;
    res.scan_truncation =
        std::min(suggested_truncation(psi, K_max), spec.max_level());
    const BFactor f = factor_b(spec, res.scan_truncation);
    const Eigen::VectorXcd base = f.vectors.adjoint() * psi.embedded(res.scan_truncation);
    const Eigen::MatrixXcd head = f.vectors.topRows(std::max(n0, 0));

    res.best_low_mass = std::numeric_limits<double>::infinity();
    double found_K = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double K = K_max * static_cast<double>(i) / grid;
        const Eigen::VectorXcd phased =
            (Complex{0.0, -K} * f.d).array().exp().matrix().asDiagonal() * base;
        const double low = n0 > 0 ? (head * phased).norm() : 0.0;
        if (low < res.best_low_mass) {
            res.best_low_mass = low;
            res.best_K = K;
        }
        if (!res.found && low < eps) {
            res.found = true;
            found_K = K;
            res.low_mass = low;
        }
    }
    if (!res.found) {
        res.K = res.best_K;
        res.low_mass = res.best_low_mass;
        return res;
    }
    res.K = found_K;

    // Tail cut and the dispersed state at the found K, margin-checked.
    const QuantumState moved =
        apply_expKB(spec, psi, res.K, res.scan_truncation);
    const Eigen::VectorXcd v = moved.embedded(res.scan_truncation);
    double tail2 = 0.0;
    int p = res.scan_truncation;
    std::vector<double> suffix(static_cast<std::size_t>(res.scan_truncation) + 1,
                               0.0);
    for (int m = res.scan_truncation; m >= 1; --m) {
        tail2 += std::norm(v(m - 1));
        suffix[static_cast<std::size_t>(m) - 1] = std::sqrt(tail2);
    }
    for (p = std::max(n0, 1); p <= res.scan_truncation; ++p)
        if (suffix[static_cast<std::size_t>(p)] < eps) break;
    res.tail_cut = std::min(p, res.scan_truncation);
    res.tail_mass = suffix[static_cast<std::size_t>(res.tail_cut)];
    res.dispersed = model::project(moved, res.tail_cut);
    return res;
}

ControlSchedule impulsive_schedule(double K, double eta) {
    if (!(eta > 0.0))
        throw std::domain_error("impulsive_schedule: eta must be > 0");
    return ControlSchedule::single(K / eta, eta, "impulsive kick");
}

std::vector<LowMassCurvePoint> low_mass_curve(const ModelSpec& spec,
                                              const QuantumState& psi, int n0,
                                              double K_max, int grid) {
    const int trunc =
        std::min(suggested_truncation(psi, K_max), spec.max_level());
    const BFactor f = factor_b(spec, trunc);
    const Eigen::VectorXcd base = f.vectors.adjoint() * psi.embedded(trunc);
    const Eigen::MatrixXcd head = f.vectors.topRows(std::max(n0, 0));
    std::vector<LowMassCurvePoint> curve;
    curve.reserve(static_cast<std::size_t>(grid) + 1);
    for (int i = 0; i <= grid; ++i) {
        const double K = K_max * static_cast<double>(i) / grid;
        const Eigen::VectorXcd phased =
            (Complex{0.0, -K} * f.d).array().exp().matrix().asDiagonal() * base;
        curve.push_back({K, n0 > 0 ? (head * phased).norm() : 0.0});
    }
    return curve;
}

}  // namespace qsteer::disperse
