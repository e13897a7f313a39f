#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qsteer::model {

using Complex = std::complex<double>;

/// Unit-norm bookkeeping tolerance used across the project.
inline constexpr double kNormTol = 1e-10;

// ---------------------------------------------------------------------------
// Spectral data of the control pair (A, B).
//
// Basis indices start at k = 1 (phi_k = sin(k theta)/sqrt(pi); there is no
// constant mode in the odd subspace). In toy-torus mode the drift eigenvalues
// follow lambda_k = k^(2 alpha) and the coupling is tridiagonal with
// <phi_j, B phi_{j+1}> = -i/2. Explicit-table mode carries user-supplied
// spectra and coupling entries of B.
// ---------------------------------------------------------------------------
struct ModelSpec {
    enum class Mode { ToyTorus, ExplicitTable };

    Mode mode = Mode::ToyTorus;
    double alpha = 3.0;

    // Explicit-table data; ignored in toy-torus mode.
    std::vector<double> lambda;                  // real eigenvalues of -iA
    std::vector<std::vector<Complex>> coupling;  // entries <phi_j, B phi_k>

    static ModelSpec toy(double alpha);
    static ModelSpec table(std::vector<double> lambda,
                           std::vector<std::vector<Complex>> coupling);

    /// lambda_k for this model (k >= 1).
    double eigenvalue(int k) const;
    /// <phi_j, B phi_k> for this model (j, k >= 1).
    Complex coupling_at(int j, int k) const;

    /// Largest basis index the model can describe (INT_MAX for toy mode).
    int max_level() const;

    /// Throws std::invalid_argument if the table violates skew-adjointness
    /// b_jk = -conj(b_kj) or the sizes are inconsistent.
    void validate() const;
};

/// k^(2 alpha); domain error for k < 1.
double eigenvalue(int k, double alpha);

/// Toy-torus coupling: -i/2 when |j-k| = 1, else 0.
Complex coupling(int j, int k);

// ---------------------------------------------------------------------------
// Finite complex coefficient vector over a contiguous index window.
// coeffs[i] multiplies phi_{offset+i}; everything outside is exactly zero.
// ---------------------------------------------------------------------------
struct QuantumState {
    int offset = 1;
    Eigen::VectorXcd coeffs;

    QuantumState() = default;
    QuantumState(int offset, Eigen::VectorXcd c);

    /// phi_k as a state.
    static QuantumState basis(int k);
    /// Zero state (empty support).
    static QuantumState zero();

    int size() const { return static_cast<int>(coeffs.size()); }
    bool empty() const { return coeffs.size() == 0; }
    /// Largest occupied basis index, 0 for the zero state.
    int top_level() const { return empty() ? 0 : offset + size() - 1; }

    double norm() const { return coeffs.norm(); }
    bool is_unit(double tol = kNormTol) const;

    /// Coefficient of phi_k (0 outside the window).
    Complex coeff(int k) const;

    /// <this, other> with the physics convention (conjugate-linear in this).
    Complex inner(const QuantumState& other) const;

    /// Dense length-n vector with position k-1 holding the phi_k coefficient.
    /// Throws if the support does not fit below truncation n.
    Eigen::VectorXcd embedded(int n) const;

    static QuantumState from_embedded(const Eigen::VectorXcd& v, double trim_tol = 0.0);

    QuantumState conjugated() const;

    /// Explicitly requested renormalization; operations never renormalize
    /// silently. Throws on the zero state.
    QuantumState renormalized() const;
};

// ---------------------------------------------------------------------------
// Galerkin compression of order n: A^(n) = i diag(a_diag), B^(n) = b_mat.
// i A^(n) and i B^(n) are Hermitian to machine precision.
// ---------------------------------------------------------------------------
struct GalerkinPair {
    int n = 0;
    Eigen::VectorXd a_diag;   // lambda_1 .. lambda_n
    Eigen::MatrixXcd b_mat;   // entries <phi_j, B phi_k>, skew-Hermitian

    /// Operator norm of b_mat (largest |eigenvalue| of the Hermitian i b_mat).
    double b_norm() const;
};

/// Compression of order n (n >= 2). Toy mode: a_diag = (1^2a .. n^2a),
/// tridiagonal b_mat; explicit mode: table passthrough (n <= table size).
GalerkinPair galerkin(const ModelSpec& spec, int n);

/// sqrt(sum_k |lambda_k|^(2s) |<phi_k, psi>|^2); the |A|^s-weighted norm.
double weighted_norm(const QuantumState& psi, const ModelSpec& spec, double s);

/// Zeroes all coefficients with index > n. Idempotent, non-expansive.
QuantumState project(const QuantumState& psi, int n);

// Truncated operator norms ||B^(N)|| for N = 2..n_max, plus the discrepancy
// check against the sqrt(2)/2 reference value (measured norms exceed it and
// approach 1; surfaced in reports, not hidden).
struct BNormReport {
    std::vector<double> values;        // index i holds ||B^(i+2)||
    double reference = 0.0;            // sqrt(2)/2
    bool discrepancy_flagged = false;  // true when measured norms exceed it
    std::string note;
};

BNormReport b_norm_report(const ModelSpec& spec, int n_max);

}  // namespace qsteer::model
