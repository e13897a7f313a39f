#include "qsteer/ladder.hpp"

#include <cmath>
#include <numbers>

namespace qsteer::ladder {

namespace {

constexpr double kPi = std::numbers::pi;

double mod_2pi(double x) {
    x = std::fmod(x, 2.0 * kPi);
    if (x < 0.0) x += 2.0 * kPi;
    return x;
}

void check_window_state(const ModelSpec& spec, const QuantumState& psi,
                        const char* who) {
    if (psi.empty() || !psi.is_unit())
        throw std::invalid_argument(std::string(who) + ": state must be unit norm");
    if (spec.mode == ModelSpec::Mode::ToyTorus && !(spec.alpha > 2.5))
        throw std::domain_error(std::string(who) + ": requires alpha > 5/2");
}

QuantumState pad_to_window(const QuantumState& psi, int lo, int hi) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(hi - lo + 1);
    for (int k = std::max(lo, psi.offset); k <= std::min(hi, psi.top_level()); ++k)
        c(k - lo) = psi.coeff(k);
    return QuantumState(lo, std::move(c));
}

}  // namespace

double time_bound(double alpha, double eps, int N0) {
    if (!(alpha > 2.5))
        throw std::domain_error("time_bound: requires alpha > 5/2");
    if (!(eps > 0.0)) throw std::domain_error("time_bound: eps must be > 0");
    if (N0 < 2) throw std::domain_error("time_bound: N0 must be >= 2");
    const double head = 604.0 / (alpha * alpha * eps * (2.0 * alpha - 5.0)) *
                        std::pow(static_cast<double>(N0 - 1), 4.0 - 2.0 * alpha);
    const double drift = 2.0 * kPi *
                         std::pow(static_cast<double>(N0), -2.0 * alpha);
    return head + drift;
}

ConcentrateResult concentrate(const ModelSpec& spec, const QuantumState& psi0,
                              double eps, double max_total_time) {
    check_window_state(spec, psi0, "concentrate");
    if (!(eps > 0.0)) throw std::domain_error("concentrate: eps must be > 0");

    const int n0 = psi0.offset;
    const int p = psi0.top_level();

    ConcentrateResult res;
    res.schedule = ControlSchedule::empty("concentrate [" + std::to_string(n0) +
                                          "," + std::to_string(p) + "]");
    if (p == n0) {
        res.theta0 = std::arg(psi0.coeffs(0));
        res.final_mass = std::norm(psi0.coeffs(0));
        res.residual = 0.0;
        res.budget_ok = true;
        res.truncation = std::min(n0 + 2, spec.max_level());
        res.end_state = psi0;
        return res;
    }

    // Working truncation: margin above the window, then cross-checked by the
    // doubling self-consistency test at the ladder's worst-case L1 budget.
    int n1 = p + (p + 1) / 2 + 2;
    const double k_budget = 4.0 * static_cast<double>(p - n0);
    const auto sel = engine::select_truncation(spec, {psi0}, k_budget, eps / 4.0);
    n1 = std::min(std::max(n1, sel.truncation), spec.max_level());
    res.truncation = n1;

    const model::GalerkinPair pair = model::galerkin(spec, n1);
    QuantumState psi = psi0;
    double elapsed = 0.0;

    for (int level = p - 1; level >= n0; --level) {
        PulsePlanRow row;
        row.level = level;
        row.eta = n0 * eps / (4.0 * level * level);
        res.eta_sum += row.eta;

        const model::Complex hi = psi.coeff(level + 1);
        const model::Complex lo = psi.coeff(level);
        const double h = std::sqrt(std::norm(hi) + std::norm(lo));
        if (std::abs(hi) <= 1e-13 || h <= 1e-13) {
            row.skipped = true;
            row.theta = kPi / 2.0;
            res.plan.push_back(row);
            continue;
        }

        pulse::TransitionPulse p2;
        try {
            p2 = pulse::synthesize_transition(spec, n1, level + 1, level,
                                              hi / h, lo / h, row.eta,
                                              max_total_time - elapsed);
        } catch (const pulse::DurationExceeded& e) {
            throw BudgetExceeded(e.what());
        }
        row.theta = p2.target.theta;
        row.phi = p2.phase;
        row.K = p2.K_planned;
        row.C = p2.C;
        row.n = p2.divisor;
        row.tau = p2.tau;
        elapsed += p2.tau;
        if (elapsed > max_total_time)
            throw BudgetExceeded("concentrate: accumulated pulse time " +
                                 std::to_string(elapsed) + " exceeds budget");

        psi = engine::propagate(pair, p2.schedule, psi).final_state;
        res.schedule.append(p2.schedule);

        double in_window = 0.0;
        for (int m = n0; m <= level; ++m) in_window += std::norm(psi.coeff(m));
        row.out_mass =
            std::sqrt(std::max(0.0, psi.norm() * psi.norm() - in_window));
        res.plan.push_back(row);
    }

    const model::Complex c0 = psi.coeff(n0);
    res.theta0 = std::arg(c0);
    res.final_mass = std::norm(c0);
    Eigen::VectorXcd diff = psi.embedded(n1);
    diff(n0 - 1) -= std::polar(1.0, res.theta0);
    res.residual = diff.norm();
    res.budget_ok = res.final_mass >= 1.0 - eps / 2.0;
    res.end_state = psi;
    return res;
}

ControlSchedule phase_align(double theta0, double theta1, double lambda_N0) {
    if (!(lambda_N0 > 0.0))
        throw std::domain_error("phase_align: lambda_N0 must be > 0");
    const double duration = mod_2pi(theta1 - theta0) / lambda_N0;
    return ControlSchedule::single(0.0, duration, "phase alignment drift");
}

ControlSchedule reverse_schedule(const ControlSchedule& sched) {
    return sched.reversed();
}

SteerResult steer_in_window(const ModelSpec& spec, const QuantumState& psi0,
                            const QuantumState& psi1, double eps,
                            double max_window_time) {
    check_window_state(spec, psi0, "steer_in_window");
    check_window_state(spec, psi1, "steer_in_window");

    const int lo = std::min(psi0.offset, psi1.offset);
    const int hi = std::max(psi0.top_level(), psi1.top_level());
    const QuantumState a = pad_to_window(psi0, lo, hi);
    const QuantumState b = pad_to_window(psi1, lo, hi);

    SteerResult out;
    auto& rep = out.report;
    rep.window_lo = lo;
    rep.window_hi = hi;

    ConcentrateResult c0 = concentrate(spec, a, eps, max_window_time);
    ConcentrateResult c1 =
        concentrate(spec, b.conjugated(), eps,
                    max_window_time - c0.schedule.total_duration());

    // The reversed stage-2 schedule steers conj of its end state back to
    // conj(conj(psi1)) = psi1; it therefore wants e^{-i theta0(c1)} phi_N0,
    // which the drift dials in from the stage-1 phase.
    const double theta1 = -c1.theta0;
    const ControlSchedule drift =
        phase_align(c0.theta0, theta1, std::abs(spec.eigenvalue(lo)));

    out.schedule = ControlSchedule::empty("window steering");
    out.schedule.append(c0.schedule);
    out.schedule.append(drift);
    out.schedule.append(reverse_schedule(c1.schedule));

    rep.total_time = out.schedule.total_duration();
    rep.truncation = std::max(c0.truncation, c1.truncation);
    rep.budget_ok = c0.budget_ok && c1.budget_ok;
    rep.plan = c0.plan;
    rep.plan.insert(rep.plan.end(), c1.plan.begin(), c1.plan.end());

    rep.stages.push_back({"concentrate source",
                          c0.schedule.total_duration(), 0.0, c0.eta_sum,
                          c0.residual});
    rep.stages.push_back(
        {"phase alignment", drift.total_duration(), 0.0, 0.0, 0.0});
    rep.stages.push_back({"reversed concentrate target",
                          c1.schedule.total_duration(), 0.0, c1.eta_sum,
                          c1.residual});

    rep.bound_time = std::numeric_limits<double>::infinity();
    if (lo >= 2 && spec.mode == ModelSpec::Mode::ToyTorus)
        rep.bound_time = time_bound(spec.alpha, eps, lo);

    rep.verification_truncation =
        std::min(rep.truncation + (rep.truncation + 1) / 2, spec.max_level());
    const model::GalerkinPair vpair =
        model::galerkin(spec, rep.verification_truncation);
    const QuantumState psi_f =
        engine::propagate(vpair, out.schedule, a).final_state;
    rep.fidelity = std::abs(b.inner(psi_f));
    Eigen::VectorXcd diff = psi_f.embedded(rep.verification_truncation) -
                            b.embedded(rep.verification_truncation);
    rep.distance = diff.norm();
    return out;
}

}  // namespace qsteer::ladder
