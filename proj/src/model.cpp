#include "qsteer/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qsteer::model {

namespace {
constexpr Complex kMinusHalfI{0.0, -0.5};
}

ModelSpec ModelSpec::toy(double alpha) {
    ModelSpec s;
    s.mode = Mode::ToyTorus;
    s.alpha = alpha;
    return s;
}

ModelSpec ModelSpec::table(std::vector<double> lambda,
                           std::vector<std::vector<Complex>> coupling) {
    ModelSpec s;
    s.mode = Mode::ExplicitTable;
    s.lambda = std::move(lambda);
    s.coupling = std::move(coupling);
    s.validate();
    return s;
}

void ModelSpec::validate() const {
    if (mode == Mode::ToyTorus) return;
    const std::size_t n = lambda.size();
    if (n < 2) throw std::invalid_argument("ModelSpec: table needs >= 2 levels");
    if (coupling.size() != n)
        throw std::invalid_argument("ModelSpec: coupling rows != lambda size");
    for (const auto& row : coupling)
        if (row.size() != n)
            throw std::invalid_argument("ModelSpec: coupling table not square");
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex want = -std::conj(coupling[k][j]);
            if (std::abs(coupling[j][k] - want) > 1e-12)
                throw std::invalid_argument(
                    "ModelSpec: coupling violates b_jk = -conj(b_kj)");
        }
}

double ModelSpec::eigenvalue(int k) const {
    if (mode == Mode::ToyTorus) return qsteer::model::eigenvalue(k, alpha);
    if (k < 1 || static_cast<std::size_t>(k) > lambda.size())
        throw std::domain_error("ModelSpec::eigenvalue: index outside table");
    return lambda[static_cast<std::size_t>(k) - 1];
}

Complex ModelSpec::coupling_at(int j, int k) const {
    if (j < 1 || k < 1)
        throw std::domain_error("ModelSpec::coupling_at: indices start at 1");
    if (mode == Mode::ToyTorus) return qsteer::model::coupling(j, k);
    if (static_cast<std::size_t>(j) > lambda.size() ||
        static_cast<std::size_t>(k) > lambda.size())
        throw std::domain_error("ModelSpec::coupling_at: index outside table");
    return coupling[static_cast<std::size_t>(j) - 1]
                   [static_cast<std::size_t>(k) - 1];
}

int ModelSpec::max_level() const {
    return mode == Mode::ToyTorus ? std::numeric_limits<int>::max()
                                  : static_cast<int>(lambda.size());
}

double eigenvalue(int k, double alpha) {
    if (k < 1) throw std::domain_error("eigenvalue: k must be >= 1");
    return std::pow(static_cast<double>(k), 2.0 * alpha);
}

Complex coupling(int j, int k) {
    if (j < 1 || k < 1) throw std::domain_error("coupling: indices start at 1");
    return std::abs(j - k) == 1 ? kMinusHalfI : Complex{0.0, 0.0};
}

QuantumState::QuantumState(int offset_, Eigen::VectorXcd c)
    : offset(offset_), coeffs(std::move(c)) {
    if (offset < 1)
        throw std::invalid_argument("QuantumState: offset must be >= 1");
}

QuantumState QuantumState::basis(int k) {
    if (k < 1) throw std::domain_error("QuantumState::basis: k >= 1");
    Eigen::VectorXcd c(1);
    c(0) = 1.0;
    return QuantumState(k, std::move(c));
}

QuantumState QuantumState::zero() { return QuantumState(); }

bool QuantumState::is_unit(double tol) const {
    return std::abs(norm() - 1.0) <= tol;
}

Complex QuantumState::coeff(int k) const {
    const int i = k - offset;
    if (i < 0 || i >= size()) return {0.0, 0.0};
    return coeffs(i);
}

Complex QuantumState::inner(const QuantumState& other) const {
    Complex acc{0.0, 0.0};
    const int lo = std::max(offset, other.offset);
    const int hi = std::min(top_level(), other.top_level());
    for (int k = lo; k <= hi; ++k)
        acc += std::conj(coeff(k)) * other.coeff(k);
    return acc;
}

Eigen::VectorXcd QuantumState::embedded(int n) const {
    if (top_level() > n)
        throw std::domain_error("QuantumState::embedded: support above truncation");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < size(); ++i) v(offset + i - 1) = coeffs(i);
    return v;
}

QuantumState QuantumState::from_embedded(const Eigen::VectorXcd& v, double trim_tol) {
    int lo = 0;
    int hi = static_cast<int>(v.size()) - 1;
    while (lo <= hi && std::abs(v(lo)) <= trim_tol) ++lo;
    while (hi >= lo && std::abs(v(hi)) <= trim_tol) --hi;
    if (lo > hi) return zero();
    return QuantumState(lo + 1, v.segment(lo, hi - lo + 1));
}

QuantumState QuantumState::conjugated() const {
    return QuantumState(offset, coeffs.conjugate());
}

QuantumState QuantumState::renormalized() const {
    const double n = norm();
    if (n == 0.0)
        throw std::domain_error("QuantumState::renormalized: zero state");
    return QuantumState(offset, coeffs / n);
}

double GalerkinPair::b_norm() const {
    if (n == 0) return 0.0;
    const Eigen::MatrixXcd herm = Complex{0.0, 1.0} * b_mat;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm,
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

GalerkinPair galerkin(const ModelSpec& spec, int n) {
    if (n < 2) throw std::domain_error("galerkin: truncation must be >= 2");
    if (n > spec.max_level())
        throw std::domain_error("galerkin: truncation exceeds table size");
    GalerkinPair pair;
    pair.n = n;
    pair.a_diag.resize(n);
    for (int k = 1; k <= n; ++k) pair.a_diag(k - 1) = spec.eigenvalue(k);
    pair.b_mat = Eigen::MatrixXcd::Zero(n, n);
    if (spec.mode == ModelSpec::Mode::ToyTorus) {
        for (int j = 1; j < n; ++j) {
            pair.b_mat(j - 1, j) = kMinusHalfI;
            pair.b_mat(j, j - 1) = kMinusHalfI;
        }
    } else {
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                pair.b_mat(j - 1, k - 1) = spec.coupling_at(j, k);
    }
    return pair;
}

double weighted_norm(const QuantumState& psi, const ModelSpec& spec, double s) {
    if (s < 0.0) throw std::domain_error("weighted_norm: s must be >= 0");
    if (s == 0.0) return psi.norm();
    double acc = 0.0;
    for (int i = 0; i < psi.size(); ++i) {
        const double mag = std::abs(psi.coeffs(i));
        if (mag == 0.0) continue;
        const double lam = std::abs(spec.eigenvalue(psi.offset + i));
        acc += std::pow(lam, 2.0 * s) * mag * mag;
    }
    return std::sqrt(acc);
}

QuantumState project(const QuantumState& psi, int n) {
    if (psi.empty() || psi.offset > n) return QuantumState::zero();
    const int keep = std::min(psi.size(), n - psi.offset + 1);
    return QuantumState(psi.offset, psi.coeffs.head(keep));
}

BNormReport b_norm_report(const ModelSpec& spec, int n_max) {
    BNormReport rep;
    rep.reference = std::numbers::sqrt2 / 2.0;
    for (int n = 2; n <= n_max; ++n)
        rep.values.push_back(galerkin(spec, n).b_norm());
    for (double v : rep.values)
        if (v > rep.reference + 1e-12) rep.discrepancy_flagged = true;
    if (rep.discrepancy_flagged)
        rep.note =
            "discrepancy: measured truncated norms exceed the sqrt(2)/2 "
            "reference value and approach 1; bound computations use the "
            "measured values";
    return rep;
}

}  // namespace qsteer::model
