#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qsteer/model.hpp"

namespace qsteer::engine {

using model::GalerkinPair;
using model::ModelSpec;
using model::QuantumState;

struct Segment {
    double u = 0.0;   // control amplitude
    double dt = 0.0;  // duration, >= 0
};

// ---------------------------------------------------------------------------
// Piecewise-constant control, the sole admissible control representation.
//
// Stored as blocks (segment pattern + repeat count) because synthesized
// pulses repeat one sampled period up to ~1e7 times; the flat segment list
// is the concatenation of each pattern `repeat` times, in order.
// ---------------------------------------------------------------------------
struct ControlSchedule {
    struct Block {
        std::vector<Segment> pattern;
        std::uint64_t repeat = 1;
    };

    std::vector<Block> blocks;
    std::string label;

    static ControlSchedule empty(std::string label = {});
    static ControlSchedule single(double u, double dt, std::string label = {});
    static ControlSchedule from_segments(std::vector<Segment> segs,
                                         std::string label = {});

    void append_segment(double u, double dt);
    void append_block(std::vector<Segment> pattern, std::uint64_t repeat);
    void append(const ControlSchedule& other);

    std::uint64_t segment_count() const;
    double total_duration() const;
    /// L1 norm sum |u| dt, exact from the fields.
    double l1_norm() const;

    /// Segments in reversed order, amplitudes unchanged.
    ControlSchedule reversed() const;

    /// Visit every segment in order (expands repeats).
    void for_each_segment(const std::function<void(const Segment&)>& f) const;

    /// Flat segment list; throws when the expansion exceeds `cap`.
    std::vector<Segment> flatten(std::uint64_t cap = 10'000'000) const;
};

struct PropagationResult {
    QuantumState final_state;
    int truncation = 0;
    double unitarity_defect = 0.0;  // | ||psi_T|| - ||psi_0|| |
    std::uint64_t step_count = 0;
};

/// e^{t(A^(N) + u B^(N))} psi via spectral decomposition of the Hermitian
/// matrix -i(A + uB). Norm preserved to 1e-12. Domain error on non-finite
/// u or t, negative t, or support above the truncation.
QuantumState step(const GalerkinPair& pair, double u, double t,
                  const QuantumState& psi);

/// Composition of step over the segments in order. Decompositions are cached
/// per control value and whole blocks are folded through matrix powers.
PropagationResult propagate(const GalerkinPair& pair,
                            const ControlSchedule& sched,
                            const QuantumState& psi0);

/// Full propagator matrix of the schedule at the pair's truncation.
Eigen::MatrixXcd propagator_matrix(const GalerkinPair& pair,
                                   const ControlSchedule& sched);

/// Midpoint sampling of t -> (amplitude/n) cos(frequency t + phase) on
/// uniform sub-intervals of length (2pi/frequency)/steps_per_period, total
/// length `duration` (last sub-interval truncated). The sampled values reuse
/// one period's pattern bitwise, so the schedule is exactly periodic.
ControlSchedule sample_cosine(double amplitude, double frequency, double phase,
                              double n, double duration, int steps_per_period);

inline constexpr int kDefaultStepsPerPeriod = 64;

struct TruncationSelection {
    int truncation = 0;
    bool converged = false;
    double last_gap = 0.0;      // sup over states of the N vs 2N L2 gap
    double last_gap_s1 = 0.0;   // same gap in the |A|^(1/2)-weighted norm
};

/// Smallest N from the doubling ladder (N, 2N, 4N, ...) such that propagating
/// a stress schedule of L1 norm K at orders N and 2N moves every given state
/// by less than eps/2. The stress schedule is a single impulsive kick
/// (K/h, h) with h = 1e-3, the harshest admissible control at that budget.
/// Empirical surrogate for the Galerkin-convergence existence statement.
TruncationSelection select_truncation(const ModelSpec& spec,
                                      const std::vector<QuantumState>& psis,
                                      double K, double eps, int cap = 4096);

struct NormGrowthReport {
    double ratio = 0.0;        // weighted_norm(psi_T) / weighted_norm(psi_0)
    double bound = 0.0;        // e^{c K}
    double l1 = 0.0;           // K of the schedule
    bool violated = false;     // ratio > bound (c too small or truncation too small)
    int truncation = 0;
};

/// Checks weighted_norm(psi_T, k/2) <= e^{cK} weighted_norm(psi_0, k/2).
NormGrowthReport norm_growth_check(const ModelSpec& spec,
                                   const ControlSchedule& sched,
                                   const QuantumState& psi0, double k,
                                   double c);

/// Estimate of the weak-coupling constant c for the |A|^k form:
/// max over coupled pairs of (d/2) |lambda_j^k - lambda_l^k| |b_jl| /
/// sqrt(lambda_j^k lambda_l^k), d the max coupling degree. Scanned over
/// levels up to n_max (the toy-model maximum sits at j = 1).
double coupling_constant_estimate(const ModelSpec& spec, double k, int n_max);

}  // namespace qsteer::engine
