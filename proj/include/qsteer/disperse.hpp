#pragma once

#include <stdexcept>

#include "qsteer/engine.hpp"
#include "qsteer/model.hpp"

namespace qsteer::disperse {

using engine::ControlSchedule;
using model::ModelSpec;
using model::QuantumState;

struct TruncationInsufficient : std::runtime_error {
    double gap;
    TruncationInsufficient(const std::string& what, double g)
        : std::runtime_error(what), gap(g) {}
};

/// e^{K B^(trunc)} psi through the exponential of the skew-Hermitian
/// compression (multiplication by e^{-iK cos theta} on the odd subspace).
/// The result is cross-checked against truncation 2*trunc; a gap >= 1e-8
/// raises TruncationInsufficient with the measured value.
QuantumState apply_expKB(const ModelSpec& spec, const QuantumState& psi,
                         double K, int trunc);

/// Margin heuristic for apply_expKB: the kick spreads mass roughly |K|
/// levels beyond the support.
int suggested_truncation(const QuantumState& psi, double K);

struct DispersalResult {
    bool found = false;
    double K = 0.0;          // smallest grid K with low mass below eps
    double low_mass = 0.0;   // ||pi_N0 e^{KB} psi|| at K
    double best_K = 0.0;     // grid argmin of the low mass
    double best_low_mass = 0.0;
    int tail_cut = 0;        // smallest P with ||(1 - pi_P) e^{KB} psi|| < eps
    double tail_mass = 0.0;  // at tail_cut
    QuantumState dispersed;  // e^{KB} psi truncated to tail_cut
    int scan_truncation = 0;
};

/// Scan K over the uniform grid on [0, K_max] for the smallest K with
/// ||pi_N0 e^{KB} psi|| < eps. Dispersal for some K is only guaranteed
/// asymptotically, so exhausting K_max is a legitimate not-found outcome
/// (best grid point reported). n0 = 0 is the trivial projection (always 0).
DispersalResult find_dispersal(const ModelSpec& spec, const QuantumState& psi,
                               int n0, double eps, double K_max, int grid);

/// One segment (K/eta, eta); as eta -> 0 the propagated state converges to
/// e^{KB} psi. L1 norm is |K| exactly.
ControlSchedule impulsive_schedule(double K, double eta);

struct LowMassCurvePoint {
    double K;
    double low_mass;
};

/// (K, ||pi_N0 e^{KB} psi||) samples over the grid, for CSV plotting.
std::vector<LowMassCurvePoint> low_mass_curve(const ModelSpec& spec,
                                              const QuantumState& psi, int n0,
                                              double K_max, int grid);

}  // namespace qsteer::disperse
