#pragma once

#include <complex>
#include <limits>
#include <stdexcept>

#include "qsteer/engine.hpp"
#include "qsteer/model.hpp"

namespace qsteer::pulse {

using model::Complex;
using model::GalerkinPair;
using model::ModelSpec;

// ---------------------------------------------------------------------------
// Solved 2x2 rotation target: parameters (theta, K, phi) such that e^{K M}
// annihilates the first coordinate of the given unit pair, for the canonical
// block M = (pi/8) [[0, e^{i phi}], [-e^{-i phi}, 0]] (coupling magnitude 1/2,
// coupling phase 0). Couplings with a different phase gamma shift the pulse
// phase by -gamma; synthesize_transition applies that shift.
// ---------------------------------------------------------------------------
struct RotationTarget {
    double theta = 0.0;   // arccos|a|, in [0, pi/2]
    double alpha1 = 0.0;  // arg a
    double beta1 = 0.0;   // arg b
    double phi = 0.0;     // alpha1 - beta1 - pi, reduced to (-pi, pi]
    double K = 0.0;       // 4 (pi - 2 theta) / pi, in [0, 4]
};

/// Solve for the rotation sending (a, b) to (0, e^{i beta1}) under e^{K M}.
/// Pre: |a|^2 + |b|^2 = 1 within 1e-10. Domain error on the zero vector.
RotationTarget rotation_parameters(Complex a, Complex b);

/// e^{K M} in closed form, where M has zero diagonal, upper entry
/// pi b12 e^{i phi} / 4 and lower entry minus its conjugate. With
/// r = pi |b12| / 4 the matrix is [[cos(rK), e^{i arg} sin(rK)],
/// [-e^{-i arg} sin(rK), cos(rK)]], arg = arg(b12) + phi.
Eigen::Matrix2cd effective_rotation(double K, double phi, Complex b12);

/// Resonance-leakage constant of transition (j, k) at the given truncation:
/// the sup over coupled pairs (l, m) sharing an index with {j, k}, with
/// |lambda_l - lambda_m| not an integer multiple of the transition gap, of
///   | integral_0^T u*(t) e^{i (lambda_l - lambda_m) t} dt |
///   / |sin(pi |lambda_l - lambda_m| / gap)|
/// evaluated in closed form and maximized over the pulse phase, so the value
/// certifies any later phase choice. Throws TransitionDegenerate when a
/// coupled neighbour sits at an integer multiple of the gap.
double compute_C(const ModelSpec& spec, int n_trunc, int j, int k);

struct TransitionDegenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DurationExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// One synthesized level-transition pulse with its certificate.
// The schedule realizes u(t) = (|gap|/n) cos(|gap| t + phase) sampled
// midpoint-piecewise-constant; its averaged effect on levels (j, k) is the
// rotation e^{K M} with error at most `bound` in operator norm.
// ---------------------------------------------------------------------------
struct TransitionPulse {
    int j = 0;
    int k = 0;
    double phase = 0.0;           // physical cosine phase (positive frequency)
    double phase_oriented = 0.0;  // phase in the (j,k) block convention
    double divisor = 1.0;         // amplitude divisor n, real >= 1
    double amplitude = 0.0;   // |lambda_k - lambda_j|
    double tau = 0.0;         // duration pi K n / (2 |gap|)
    double K = 0.0;           // realized L1 norm over [0, tau] (closed form)
    double K_planned = 0.0;   // rotation L1 target 4(pi - 2 theta)/pi
    double C = 0.0;           // resonance-leakage constant
    double b_norm = 0.0;      // ||B^(n_trunc)|| used in the certificate
    double bound = 0.0;       // I (C+1) ||B|| (1 + 2 K ||B||) / n, I = 4
    double eta = 0.0;         // requested error budget
    RotationTarget target;
    engine::ControlSchedule schedule;
};

/// Pulse of transition (j, k) with an explicit divisor n: the averaging
/// certificate holds for whatever n is given. state2 is the (j, k)
/// coefficient pair to rotate; its first coordinate is annihilated.
TransitionPulse synthesize_with_divisor(const ModelSpec& spec, int n_trunc,
                                        int j, int k, Complex aj, Complex bk,
                                        double n,
                                        int steps_per_period =
                                            engine::kDefaultStepsPerPeriod);

/// Pulse of transition (j, k) meeting the error budget eta: the divisor is
/// n = 4 (1 + 2K||B||)(C+1)||B|| / eta (clamped to >= 1), the duration
/// tau = pi K n / (2 |gap|). Throws TransitionDegenerate on degeneracy and
/// std::runtime_error when tau would exceed max_tau (reported, not clamped).
TransitionPulse synthesize_transition(const ModelSpec& spec, int n_trunc,
                                      int j, int k, Complex aj, Complex bk,
                                      double eta,
                                      double max_tau =
                                          std::numeric_limits<double>::infinity(),
                                      int steps_per_period =
                                          engine::kDefaultStepsPerPeriod);

/// Target unitary of the certificate: e^{tau A^(N)} e^{K M} at the pulse's
/// truncation, with the M block on levels (j, k).
Eigen::MatrixXcd certified_target(const GalerkinPair& pair,
                                  const TransitionPulse& p);

/// Realized L1 norm (1/n) integral_0^tau |amp cos(amp t + phase)| dt in
/// closed form.
double cosine_l1(double amplitude, double phase, double n, double tau);

}  // namespace qsteer::pulse
