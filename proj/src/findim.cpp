#include "qsteer/findim.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qsteer::findim {

namespace {

Eigen::VectorXd vectorize(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXd v(2 * n * n);
    int idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            v(idx++) = m(i, j).real();
            v(idx++) = m(i, j).imag();
        }
    return v;
}

void check_skew(const Eigen::MatrixXcd& m, const char* who) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(who) + ": matrix not square");
    if ((m + m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument(std::string(who) + ": not skew-Hermitian");
}

}  // namespace

MatrixPair::MatrixPair(Eigen::MatrixXcd a, Eigen::MatrixXcd b)
    : n(static_cast<int>(a.rows())), A(std::move(a)), B(std::move(b)) {
    validate();
}

void MatrixPair::validate() const {
    check_skew(A, "MatrixPair A");
    check_skew(B, "MatrixPair B");
    if (B.rows() != n)
        throw std::invalid_argument("MatrixPair: size mismatch");
}

Eigen::MatrixXcd normalize_traceless(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("normalize_traceless: matrix not square");
    Eigen::MatrixXcd out = m;
    const Complex shift = m.trace() / static_cast<double>(m.rows());
    for (int i = 0; i < m.rows(); ++i) out(i, i) -= shift;
    return out;
}

int lie_rank(const MatrixPair& pair, double tol) {
    pair.validate();

    // Orthonormal real basis of the generated algebra, grown by bracket
    // closure. Matrices are kept alongside their vectorized representatives.
    std::vector<Eigen::MatrixXcd> basis;
    std::vector<Eigen::VectorXd> ortho;

    auto try_add = [&](const Eigen::MatrixXcd& cand) -> bool {
        const double scale = cand.norm();
        if (scale < 1e-300) return false;
        Eigen::MatrixXcd m = cand / scale;
        Eigen::VectorXd v = vectorize(m);
        for (const auto& o : ortho) v -= o.dot(v) * o;
        // Second orthogonalization pass for numerical safety.
        for (const auto& o : ortho) v -= o.dot(v) * o;
        if (v.norm() <= tol) return false;
        v.normalize();
        ortho.push_back(v);
        basis.push_back(std::move(m));
        return true;
    };

    try_add(normalize_traceless(pair.A));
    try_add(normalize_traceless(pair.B));

    const int full = pair.n * pair.n - 1;
    std::size_t frontier_start = 0;
    while (static_cast<int>(basis.size()) < full) {
        const std::size_t old_size = basis.size();
        bool grew = false;
        for (std::size_t i = 0; i < old_size; ++i) {
            // New brackets only need one factor from the latest frontier.
            const std::size_t j0 = std::max(frontier_start, i + 1);
            for (std::size_t j = j0; j < old_size; ++j) {
                const Eigen::MatrixXcd bracket =
                    basis[i] * basis[j] - basis[j] * basis[i];
                if (try_add(bracket)) grew = true;
                if (static_cast<int>(basis.size()) >= full) return full;
            }
        }
        if (!grew) break;
        frontier_start = old_size;
    }
    return static_cast<int>(basis.size());
}

LieRankReport lie_rank_report(const MatrixPair& pair, double tol) {
    LieRankReport rep;
    rep.rank = lie_rank(pair, tol);
    rep.full = pair.n * pair.n - 1;
    rep.controllable_lift = rep.rank == rep.full;
    return rep;
}

double killing_norm(const Eigen::MatrixXcd& m, double scale) {
    if (!(scale > 0.0))
        throw std::domain_error("killing_norm: scale must be > 0");
    const double radicand = -scale * (m * m).trace().real();
    if (radicand < -1e-9)
        throw std::invalid_argument("killing_norm: input is not skew-Hermitian");
    return std::sqrt(std::max(0.0, radicand));
}

double killing_norm_default_scale(const Eigen::MatrixXcd& m) {
    return killing_norm(m, 2.0 * static_cast<double>(m.rows()));
}

double torus_orbit_distance(const Eigen::MatrixXcd& B,
                            const Eigen::VectorXcd& psi0,
                            const Eigen::VectorXcd& psi1, double K_max,
                            int grid) {
    check_skew(B, "torus_orbit_distance");
    if (grid < 1 || !(K_max > 0.0))
        throw std::domain_error("torus_orbit_distance: bad scan parameters");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        (Complex{0.0, 1.0} * B).eval());
    const Eigen::VectorXcd c0 = es.eigenvectors().adjoint() * psi0;
    const Eigen::VectorXcd c1 = es.eigenvectors().adjoint() * psi1;
    const Eigen::VectorXd d = es.eigenvalues();

    // ||e^{KB} psi0 - e^{K'B} psi1||^2 = ||psi0||^2 + ||psi1||^2
    //   - 2 Re sum_k conj(c1_k) c0_k e^{-i (K - K') d_k}; scan delta = K - K'.
    const double constant = psi0.squaredNorm() + psi1.squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 2 * grid; ++i) {
        const double delta = -K_max + K_max * static_cast<double>(i) / grid;
        Complex overlap{0.0, 0.0};
        for (int k = 0; k < d.size(); ++k)
            overlap += std::conj(c1(k)) * c0(k) *
                       std::polar(1.0, -delta * d(k));
        best = std::min(best, constant - 2.0 * overlap.real());
    }
    return std::sqrt(std::max(0.0, best));
}

RhoBound rho_lower_bound(const MatrixPair& pair, const Eigen::VectorXcd& psi0,
                         const Eigen::VectorXcd& psi1, double K_max,
                         int grid) {
    RhoBound out;
    out.a_norm = pair.A.operatorNorm();
    if (out.a_norm == 0.0)
        throw std::domain_error("rho_lower_bound: A has zero norm");
    out.orbit_distance = torus_orbit_distance(pair.B, psi0, psi1, K_max, grid);
    out.value = out.orbit_distance / out.a_norm;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        (Complex{0.0, 1.0} * pair.B).eval());
    for (int k = 0; k < pair.n; ++k) {
        const Eigen::VectorXcd v = es.eigenvectors().col(k);
        const double denom = (pair.A * v).norm();
        if (denom == 0.0) continue;
        const double num =
            std::abs(std::abs(v.dot(psi0)) - std::abs(v.dot(psi1)));
        out.eigenvector_value = std::max(out.eigenvector_value, num / denom);
    }
    return out;
}

double rho_lower_bound_eigenvector(const MatrixPair& pair,
                                   const Eigen::VectorXcd& v,
                                   const Eigen::VectorXcd& psi0,
                                   const Eigen::VectorXcd& psi1) {
    const double denom = (pair.A * v).norm();
    if (denom == 0.0)
        throw std::domain_error("rho_lower_bound_eigenvector: ||A v|| = 0");
    return std::abs(std::abs(v.dot(psi0)) - std::abs(v.dot(psi1))) / denom;
}

}  // namespace qsteer::findim
