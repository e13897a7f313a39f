#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsteer/engine.hpp"
#include "qsteer/model.hpp"
#include "qsteer/pulse.hpp"

namespace qsteer::ladder {

using engine::ControlSchedule;
using model::ModelSpec;
using model::QuantumState;

/// Steering-time upper bound
///   604 / (alpha^2 eps (2 alpha - 5)) * (N0 - 1)^(4 - 2 alpha)
///   + 2 pi / N0^(2 alpha).
/// Domain error for alpha <= 5/2 (the exponent 2 alpha - 5 is <= 0 and the
/// bound diverges), eps <= 0, or N0 < 2.
double time_bound(double alpha, double eps, int N0);

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-rung record of the descent plan; level N hosts the (N, N+1) pulse.
struct PulsePlanRow {
    int level = 0;
    double theta = 0.0;
    double phi = 0.0;        // physical cosine phase
    double K = 0.0;          // planned L1 norm 4 (pi - 2 theta) / pi
    double C = 0.0;
    double eta = 0.0;        // N0 eps / (4 N^2)
    double n = 1.0;
    double tau = 0.0;
    double out_mass = 0.0;   // measured mass outside [N0, N] after the pulse
    bool skipped = false;    // no mass to move
};

struct ConcentrateResult {
    ControlSchedule schedule;
    double theta0 = 0.0;         // final phase of the phi_N0 coefficient
    std::vector<PulsePlanRow> plan;
    double final_mass = 0.0;     // |<phi_N0, psi_end>|^2
    double residual = 0.0;       // ||psi_end - e^{i theta0} phi_N0||
    double eta_sum = 0.0;
    bool budget_ok = false;      // final mass >= 1 - eps/2
    int truncation = 0;          // working truncation N1
    QuantumState end_state;
};

/// Drive a state supported on [N0, P] (window read from the state's index
/// window) onto level N0 by emptying level N+1 into level N for
/// N = P-1 .. N0, one resonant pulse per rung, phases re-read from the
/// simulated state at each rung. Throws BudgetExceeded when the accumulated
/// pulse time passes max_total_time.
ConcentrateResult concentrate(
    const ModelSpec& spec, const QuantumState& psi0, double eps,
    double max_total_time = std::numeric_limits<double>::infinity());

/// Zero-amplitude segment of duration ((theta1 - theta0) mod 2pi) / lambda_N0;
/// free drift advances the phi_N0 phase from theta0 to theta1 exactly.
ControlSchedule phase_align(double theta0, double theta1, double lambda_N0);

/// Segments in reversed order, amplitudes unchanged. In the sine basis the
/// Hamiltonian matrices are real symmetric, so if `sched` steers chi to eta
/// then the reverse steers conj(eta) to conj(chi).
ControlSchedule reverse_schedule(const ControlSchedule& sched);

struct StageEntry {
    std::string name;
    double duration = 0.0;
    double K = 0.0;
    double eta = 0.0;
    double measured_error = 0.0;
};

struct SteeringReport {
    double fidelity = 0.0;       // |<psi_target, psi_final>|
    double distance = 0.0;       // ||psi_final - psi_target||
    double total_time = 0.0;
    double bound_time = 0.0;     // time_bound at (alpha, eps, N0); inf if n/a
    std::vector<StageEntry> stages;
    std::vector<PulsePlanRow> plan;  // both concentrate stages, in order
    int truncation = 0;              // synthesis truncation
    int verification_truncation = 0;
    int window_lo = 0;
    int window_hi = 0;
    bool budget_ok = false;
};

struct SteerResult {
    ControlSchedule schedule;
    SteeringReport report;
};

/// concentrate(psi0) -> phase drift -> reverse of concentrate(conj(psi1)).
/// Both states are padded to the common window before synthesis.
SteerResult steer_in_window(
    const ModelSpec& spec, const QuantumState& psi0, const QuantumState& psi1,
    double eps,
    double max_window_time = std::numeric_limits<double>::infinity());

}  // namespace qsteer::ladder
