#include "qsteer/engine.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qsteer::engine {

namespace {

using Complex = std::complex<double>;

bool finite(double x) { return std::isfinite(x); }

// Hermitian generator H(u) = -i (A + uB) = diag(lambda) + u (-i b_mat);
// the propagator over time t is e^{i t H}.
Eigen::MatrixXcd hamiltonian(const GalerkinPair& pair, double u) {
    Eigen::MatrixXcd h = (Complex{0.0, -1.0} * u) * pair.b_mat;
    for (int k = 0; k < pair.n; ++k) h(k, k) += pair.a_diag(k);
    return h;
}

struct Decomposition {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd values;
};

class DecompositionCache {
public:
    explicit DecompositionCache(const GalerkinPair& pair) : pair_(pair) {}

    const Decomposition& get(double u) {
        auto it = cache_.find(u);
        if (it != cache_.end()) return it->second;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(pair_, u));
        if (es.info() != Eigen::Success)
            throw std::runtime_error("propagate: eigendecomposition failed");
        Decomposition d{es.eigenvectors(), es.eigenvalues()};
        return cache_.emplace(u, std::move(d)).first->second;
    }

private:
    const GalerkinPair& pair_;
    std::map<double, Decomposition> cache_;
};

Eigen::MatrixXcd segment_matrix(const Decomposition& d, double t) {
    const Eigen::VectorXcd phases =
        (Complex{0.0, 1.0} * t * d.values).array().exp();
    return d.vectors * phases.asDiagonal() * d.vectors.adjoint();
}

Eigen::VectorXcd apply_segment(const Decomposition& d, double t,
                               const Eigen::VectorXcd& v) {
    const Eigen::VectorXcd phases =
        (Complex{0.0, 1.0} * t * d.values).array().exp();
    return d.vectors * (phases.asDiagonal() * (d.vectors.adjoint() * v));
}

Eigen::MatrixXcd matrix_power(Eigen::MatrixXcd base, std::uint64_t e) {
    Eigen::MatrixXcd acc =
        Eigen::MatrixXcd::Identity(base.rows(), base.cols());
    while (e > 0) {
        if (e & 1ull) acc = base * acc;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return acc;
}

void check_segment(double u, double dt) {
    if (!finite(u) || !finite(dt))
        throw std::domain_error("schedule segment must be finite");
    if (dt < 0.0)
        throw std::domain_error("schedule segment duration must be >= 0");
}

}  // namespace

ControlSchedule ControlSchedule::empty(std::string label) {
    ControlSchedule s;
    s.label = std::move(label);
    return s;
}

ControlSchedule ControlSchedule::single(double u, double dt, std::string label) {
    ControlSchedule s;
    s.label = std::move(label);
    s.append_segment(u, dt);
    return s;
}

ControlSchedule ControlSchedule::from_segments(std::vector<Segment> segs,
                                               std::string label) {
    ControlSchedule s;
    s.label = std::move(label);
    if (!segs.empty()) s.append_block(std::move(segs), 1);
    return s;
}

void ControlSchedule::append_segment(double u, double dt) {
    check_segment(u, dt);
    blocks.push_back(Block{{Segment{u, dt}}, 1});
}

void ControlSchedule::append_block(std::vector<Segment> pattern,
                                   std::uint64_t repeat) {
    if (pattern.empty() || repeat == 0) return;
    for (const auto& s : pattern) check_segment(s.u, s.dt);
    blocks.push_back(Block{std::move(pattern), repeat});
}

void ControlSchedule::append(const ControlSchedule& other) {
    blocks.insert(blocks.end(), other.blocks.begin(), other.blocks.end());
}

std::uint64_t ControlSchedule::segment_count() const {
    std::uint64_t n = 0;
    for (const auto& b : blocks) n += b.repeat * b.pattern.size();
    return n;
}

double ControlSchedule::total_duration() const {
    double t = 0.0;
    for (const auto& b : blocks) {
        double pat = 0.0;
        for (const auto& s : b.pattern) pat += s.dt;
        t += static_cast<double>(b.repeat) * pat;
    }
    return t;
}

double ControlSchedule::l1_norm() const {
    double acc = 0.0;
    for (const auto& b : blocks) {
        double pat = 0.0;
        for (const auto& s : b.pattern) pat += std::abs(s.u) * s.dt;
        acc += static_cast<double>(b.repeat) * pat;
    }
    return acc;
}

ControlSchedule ControlSchedule::reversed() const {
    ControlSchedule r;
    r.label = label.empty() ? std::string{} : label + " (reversed)";
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        Block b = *it;
        std::reverse(b.pattern.begin(), b.pattern.end());
        r.blocks.push_back(std::move(b));
    }
    return r;
}

void ControlSchedule::for_each_segment(
    const std::function<void(const Segment&)>& f) const {
    for (const auto& b : blocks)
        for (std::uint64_t r = 0; r < b.repeat; ++r)
            for (const auto& s : b.pattern) f(s);
}

std::vector<Segment> ControlSchedule::flatten(std::uint64_t cap) const {
    if (segment_count() > cap)
        throw std::length_error("ControlSchedule::flatten: schedule too large");
    std::vector<Segment> out;
    out.reserve(segment_count());
    for_each_segment([&](const Segment& s) { out.push_back(s); });
    return out;
}

QuantumState step(const GalerkinPair& pair, double u, double t,
                  const QuantumState& psi) {
    if (!finite(u) || !finite(t)) throw std::domain_error("step: non-finite input");
    if (t < 0.0) throw std::domain_error("step: negative duration");
    Eigen::VectorXcd v = psi.embedded(pair.n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(pair, u));
    const Decomposition d{es.eigenvectors(), es.eigenvalues()};
    return QuantumState::from_embedded(apply_segment(d, t, v));
}

PropagationResult propagate(const GalerkinPair& pair,
                            const ControlSchedule& sched,
                            const QuantumState& psi0) {
    DecompositionCache cache(pair);
    Eigen::VectorXcd v = psi0.embedded(pair.n);
    const double norm0 = v.norm();
    std::uint64_t steps = 0;

    for (const auto& b : sched.blocks) {
        // Fold repeated patterns through a matrix power when the matrix route
        // is cheaper than repeat*|pattern| matrix-vector products.
        const std::uint64_t len = b.pattern.size();
        std::uint64_t log2r = 0;
        while ((1ull << log2r) < b.repeat) ++log2r;
        const bool matrix_route =
            b.repeat > 1 &&
            b.repeat * len >
                static_cast<std::uint64_t>(pair.n) * (len + log2r + 1);
        if (matrix_route) {
            Eigen::MatrixXcd block =
                Eigen::MatrixXcd::Identity(pair.n, pair.n);
            for (const auto& s : b.pattern)
                block = segment_matrix(cache.get(s.u), s.dt) * block;
            v = matrix_power(std::move(block), b.repeat) * v;
        } else {
            for (std::uint64_t r = 0; r < b.repeat; ++r)
                for (const auto& s : b.pattern)
                    v = apply_segment(cache.get(s.u), s.dt, v);
        }
        steps += b.repeat * len;
    }

    PropagationResult res;
    res.final_state = QuantumState::from_embedded(v);
    res.truncation = pair.n;
    res.unitarity_defect = std::abs(v.norm() - norm0);
    res.step_count = steps;
    return res;
}

Eigen::MatrixXcd propagator_matrix(const GalerkinPair& pair,
                                   const ControlSchedule& sched) {
    DecompositionCache cache(pair);
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Identity(pair.n, pair.n);
    for (const auto& b : sched.blocks) {
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Identity(pair.n, pair.n);
        for (const auto& s : b.pattern)
            block = segment_matrix(cache.get(s.u), s.dt) * block;
        x = matrix_power(std::move(block), b.repeat) * x;
    }
    return x;
}

ControlSchedule sample_cosine(double amplitude, double frequency, double phase,
                              double n, double duration, int steps_per_period) {
    if (!(frequency > 0.0) || !finite(frequency))
        throw std::domain_error("sample_cosine: frequency must be > 0");
    if (n < 1.0) throw std::domain_error("sample_cosine: divisor must be >= 1");
    if (steps_per_period < 4)
        throw std::domain_error("sample_cosine: steps_per_period must be >= 4");
    if (duration < 0.0 || !finite(duration))
        throw std::domain_error("sample_cosine: bad duration");

    ControlSchedule sched;
    sched.label = "cosine pulse";
    if (duration == 0.0) return sched;

    const double period = 2.0 * std::numbers::pi / frequency;
    const double h = period / steps_per_period;
    const auto full = static_cast<std::uint64_t>(duration / h);
    const double tail = duration - static_cast<double>(full) * h;
    const double scale = amplitude / n;

    // One period's midpoint values; repeated bitwise so that folding and
    // periodicity are exact regardless of how many periods the pulse spans.
    std::vector<Segment> pattern(static_cast<std::size_t>(steps_per_period));
    for (int i = 0; i < steps_per_period; ++i) {
        const double arg =
            2.0 * std::numbers::pi * (i + 0.5) / steps_per_period + phase;
        pattern[static_cast<std::size_t>(i)] = {scale * std::cos(arg), h};
    }

    const std::uint64_t periods = full / steps_per_period;
    const std::uint64_t rem = full % steps_per_period;
    if (periods > 0) sched.append_block(pattern, periods);
    if (rem > 0)
        sched.append_block(
            {pattern.begin(), pattern.begin() + static_cast<std::ptrdiff_t>(rem)},
            1);
    if (tail > 1e-15 * duration) {
        // Midpoint of the final partial sub-interval, with the cosine argument
        // reduced modulo one period so huge segment counts lose no precision.
        const double frac = tail / h;
        const double arg = 2.0 * std::numbers::pi *
                               (static_cast<double>(rem) + 0.5 * frac) /
                               steps_per_period +
                           phase;
        sched.append_segment(scale * std::cos(arg), tail);
    }
    return sched;
}

TruncationSelection select_truncation(const ModelSpec& spec,
                                      const std::vector<QuantumState>& psis,
                                      double K, double eps, int cap) {
    if (!(eps > 0.0)) throw std::domain_error("select_truncation: eps must be > 0");
    if (K < 0.0) throw std::domain_error("select_truncation: K must be >= 0");
    if (psis.empty())
        throw std::invalid_argument("select_truncation: no states given");

    int support = 2;
    for (const auto& p : psis) support = std::max(support, p.top_level());

    ControlSchedule stress;
    if (K > 0.0) {
        const double h = 1e-3;
        stress = ControlSchedule::single(K / h, h, "truncation stress kick");
    }

    TruncationSelection sel;
    for (int n = support; n <= cap; n = 2 * n) {
        if (n >= spec.max_level()) {
            // Explicit table exhausted: the full-size compression is the model.
            sel.truncation = spec.max_level();
            sel.converged = true;
            return sel;
        }
        const int n2 = std::min(2 * n, spec.max_level());
        const GalerkinPair small = galerkin(spec, n);
        const GalerkinPair big = galerkin(spec, n2);
        double gap = 0.0;
        double gap_s1 = 0.0;
        for (const auto& p : psis) {
            const QuantumState a =
                propagate(small, stress, project(p, n)).final_state;
            const QuantumState b = propagate(big, stress, p).final_state;
            Eigen::VectorXcd diff = b.embedded(n2) - a.embedded(n2);
            gap = std::max(gap, diff.norm());
            gap_s1 = std::max(
                gap_s1, model::weighted_norm(
                            QuantumState::from_embedded(diff), spec, 0.5));
        }
        sel.last_gap = gap;
        sel.last_gap_s1 = gap_s1;
        if (gap < eps / 2.0) {
            sel.truncation = n;
            sel.converged = true;
            return sel;
        }
    }
    sel.truncation = cap;
    sel.converged = false;
    return sel;
}

NormGrowthReport norm_growth_check(const ModelSpec& spec,
                                   const ControlSchedule& sched,
                                   const QuantumState& psi0, double k,
                                   double c) {
    NormGrowthReport rep;
    rep.l1 = sched.l1_norm();
    const double w0 = model::weighted_norm(psi0, spec, k / 2.0);
    if (w0 == 0.0) throw std::domain_error("norm_growth_check: zero state");

    const auto sel = select_truncation(spec, {psi0}, rep.l1, 1e-6);
    rep.truncation = sel.truncation;
    const GalerkinPair pair = galerkin(spec, rep.truncation);
    const QuantumState psi_t = propagate(pair, sched, psi0).final_state;
    rep.ratio = model::weighted_norm(psi_t, spec, k / 2.0) / w0;
    rep.bound = std::exp(c * rep.l1);
    rep.violated = rep.ratio > rep.bound * (1.0 + 1e-9);
    return rep;
}

double coupling_constant_estimate(const ModelSpec& spec, double k, int n_max) {
    if (k <= 0.0) throw std::domain_error("coupling_constant_estimate: k > 0");
    const int top = std::min(n_max, spec.max_level());
    // Max coupling degree d: number of partners any level talks to.
    int degree = 0;
    for (int j = 1; j <= top; ++j) {
        int dj = 0;
        for (int l = 1; l <= top; ++l)
            if (l != j && std::abs(spec.coupling_at(j, l)) > 0.0) ++dj;
        degree = std::max(degree, dj);
    }
    double best = 0.0;
    for (int j = 1; j <= top; ++j)
        for (int l = j + 1; l <= top; ++l) {
            const double b = std::abs(spec.coupling_at(j, l));
            if (b == 0.0) continue;
            const double lj = std::pow(std::abs(spec.eigenvalue(j)), k);
            const double ll = std::pow(std::abs(spec.eigenvalue(l)), k);
            if (lj <= 0.0 || ll <= 0.0) continue;
            best = std::max(best, 0.5 * degree * std::abs(lj - ll) * b /
                                      std::sqrt(lj * ll));
        }
    return best;
}

}  // namespace qsteer::engine
