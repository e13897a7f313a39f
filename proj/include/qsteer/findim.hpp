#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qsteer::findim {

using Complex = std::complex<double>;

/// Pair of n x n skew-Hermitian matrices, the finite-dimensional lift data.
struct MatrixPair {
    int n = 0;
    Eigen::MatrixXcd A;
    Eigen::MatrixXcd B;

    MatrixPair(Eigen::MatrixXcd a, Eigen::MatrixXcd b);

    /// Throws std::invalid_argument unless both are square, equal-sized and
    /// skew-Hermitian to 1e-12.
    void validate() const;
};

/// M - (tr M / n) I; the trace of the result vanishes to 1e-13.
Eigen::MatrixXcd normalize_traceless(const Eigen::MatrixXcd& m);

/// Dimension of the real Lie algebra generated by {A, B} under commutators,
/// via iterated bracket closure with numerical rank detection (tolerance on
/// the orthogonalized residual, default 1e-9). Caps at n^2 - 1 for traceless
/// skew-Hermitian generators.
int lie_rank(const MatrixPair& pair, double tol = 1e-9);

struct LieRankReport {
    int rank = 0;
    int full = 0;            // n^2 - 1
    bool controllable_lift;  // rank == n^2 - 1
};

LieRankReport lie_rank_report(const MatrixPair& pair, double tol = 1e-9);

/// sqrt(-c Re tr(M^2)) for skew-Hermitian traceless M; scale c defaults to
/// 2n, the standard su(n) constant. Throws on a radicand below -1e-9
/// (non-skew input).
double killing_norm(const Eigen::MatrixXcd& m, double scale);
double killing_norm_default_scale(const Eigen::MatrixXcd& m);

/// Upper estimate of the distance between the orbits {e^{KB} psi0} and
/// {e^{KB} psi1}: a grid minimum of ||e^{KB} psi0 - e^{K'B} psi1||. Since the
/// overlap depends only on K - K', B is diagonalized once and a single phase
/// parameter is scanned over [-K_max, K_max].
double torus_orbit_distance(const Eigen::MatrixXcd& B,
                            const Eigen::VectorXcd& psi0,
                            const Eigen::VectorXcd& psi1, double K_max,
                            int grid);

struct RhoBound {
    double orbit_distance = 0.0;  // upper estimate of delta
    double a_norm = 0.0;
    double value = 0.0;           // orbit_distance / ||A||
    // Eigenvector variant: max over eigenvectors v of B of
    // | |<v,psi0>| - |<v,psi1>| | / ||A v||.
    double eigenvector_value = 0.0;
};

/// delta / ||A|| with delta the orbit-distance estimate above. Since delta is
/// an upper estimate, the returned value is an upper estimate of the true
/// lower bound. Degenerate error when ||A|| = 0.
RhoBound rho_lower_bound(const MatrixPair& pair, const Eigen::VectorXcd& psi0,
                         const Eigen::VectorXcd& psi1, double K_max = 32.0,
                         int grid = 4096);

/// Single-eigenvector variant with an explicit v.
double rho_lower_bound_eigenvector(const MatrixPair& pair,
                                   const Eigen::VectorXcd& v,
                                   const Eigen::VectorXcd& psi0,
                                   const Eigen::VectorXcd& psi1);

}  // namespace qsteer::findim
