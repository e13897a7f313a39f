#include "qsteer/pipeline.hpp"

#include <cmath>

namespace qsteer::pipeline {

namespace {

QuantumState window_part(const QuantumState& chi, int lo, int hi,
                         double* window_norm) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(hi - lo + 1);
    for (int k = lo; k <= hi; ++k) c(k - lo) = chi.coeff(k);
    const double nrm = c.norm();
    if (window_norm) *window_norm = nrm;
    if (nrm == 0.0)
        throw std::runtime_error("pipeline: dispersed state misses the window");
    return QuantumState(lo, c / nrm);
}

// Impulsive realization of e^{KB}: halve eta until the propagated kick lands
// within tol of the exact map, floor 1e-8 time units.
ImpulseStage tune_impulse(const ModelSpec& spec, const QuantumState& psi,
                          const QuantumState& exact, double K, double tol,
                          const PlanOptions& opts) {
    ImpulseStage st;
    st.K = K;
    if (K == 0.0) return st;  // stage skipped entirely

    st.truncation =
        std::min(disperse::suggested_truncation(psi, K), spec.max_level());
    const auto pair = model::galerkin(spec, st.truncation);
    const Eigen::VectorXcd target = exact.embedded(st.truncation);
    double eta = opts.eta_imp_start;
    while (true) {
        const auto run =
            engine::propagate(pair, disperse::impulsive_schedule(K, eta), psi);
        st.gap = (run.final_state.embedded(st.truncation) - target).norm();
        st.eta = eta;
        if (st.gap < tol || eta * 0.5 < opts.eta_imp_floor) break;
        eta *= 0.5;
    }
    return st;
}

}  // namespace

SmallTimePlan plan_small_time(const ModelSpec& spec, const QuantumState& psi0,
                              const QuantumState& psi1, double eps, double T,
                              const PlanOptions& opts) {
    if (spec.mode != ModelSpec::Mode::ToyTorus)
        throw std::invalid_argument("plan_small_time: toy-torus model required");
    if (!(spec.alpha > 2.5))
        throw std::domain_error(
            "plan_small_time: alpha <= 5/2, small-time construction unavailable");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("plan_small_time: eps must be in (0,1)");
    if (!(T > 0.0)) throw std::domain_error("plan_small_time: T must be > 0");
    if (!psi0.is_unit() || !psi1.is_unit())
        throw std::invalid_argument("plan_small_time: states must be unit norm");

    SmallTimePlan plan;
    plan.eps = eps;
    plan.T = T;
    plan.notes.push_back(
        "tolerance split four ways (dispersal in/out, ladder, verification "
        "slack); window steering allowance T/2, impulses T/4, slack T/4 -- "
        "implementation choices");

    const double eps_part = eps / 4.0;
    const double window_allowance = T / 2.0;
    const double impulse_allowance = T / 4.0;

    // Bound-prescribed window bottom, reported alongside the desk search.
    for (int n0 = 2; n0 <= opts.paper_n0_cap; ++n0) {
        const double bound = ladder::time_bound(spec.alpha, eps_part, n0);
        if (bound < window_allowance) {
            plan.paper_n0 = n0;
            plan.paper_bound = bound;
            break;
        }
    }

    std::string last_reason = "no window bottom attempted";
    for (int n0 = 1; n0 <= opts.n0_cap; ++n0) {
        SmallTimePlan cand = plan;
        cand.n0 = n0;

        cand.dispersal0 = disperse::find_dispersal(spec, psi0, n0 - 1, eps_part,
                                                   opts.k_max, opts.grid);
        cand.dispersal1 = disperse::find_dispersal(spec, psi1, n0 - 1, eps_part,
                                                   opts.k_max, opts.grid);
        if (!cand.dispersal0.found || !cand.dispersal1.found) {
            last_reason =
                "dispersal stage: no K below K_max reaches the low-mass "
                "tolerance at window bottom " + std::to_string(n0);
            continue;
        }

        // K = 0 dispersals need no tail data beyond the state itself.
        cand.p = std::max({cand.dispersal0.tail_cut, cand.dispersal1.tail_cut,
                           n0});
        if (cand.p > opts.p_cap) {
            last_reason = "window top " + std::to_string(cand.p) +
                          " exceeds the truncation cap at window bottom " +
                          std::to_string(n0);
            continue;
        }

        const QuantumState chi0 = cand.dispersal0.K == 0.0
                                      ? psi0
                                      : cand.dispersal0.dispersed;
        const QuantumState chi1 = cand.dispersal1.K == 0.0
                                      ? psi1
                                      : cand.dispersal1.dispersed;
        QuantumState w0, w1;
        try {
            w0 = window_part(chi0, n0, cand.p, &cand.window_norm0);
            w1 = window_part(chi1, n0, cand.p, &cand.window_norm1);
        } catch (const std::runtime_error& e) {
            last_reason = e.what();
            continue;
        }

        ladder::SteerResult steer;
        try {
            steer = ladder::steer_in_window(spec, w0, w1, eps_part,
                                            window_allowance);
        } catch (const ladder::BudgetExceeded&) {
            last_reason = "window steering exceeds the T/2 allowance at "
                          "window bottom " + std::to_string(n0);
            continue;
        } catch (const pulse::TransitionDegenerate& e) {
            last_reason = std::string("ladder degeneracy: ") + e.what();
            continue;
        }
        if (steer.report.total_time > window_allowance) {
            last_reason = "window steering exceeds the T/2 allowance at "
                          "window bottom " + std::to_string(n0);
            continue;
        }

        // Impulsive stages within the impulse allowance, each accurate to eps/8.
        try {
            const QuantumState exact0 =
                cand.dispersal0.K == 0.0
                    ? psi0
                    : disperse::apply_expKB(
                          spec, psi0, cand.dispersal0.K,
                          disperse::suggested_truncation(psi0,
                                                         cand.dispersal0.K));
            cand.imp_in = tune_impulse(spec, psi0, exact0, cand.dispersal0.K,
                                       eps / 8.0, opts);

            const QuantumState exact1 =
                cand.dispersal1.K == 0.0
                    ? psi1
                    : disperse::apply_expKB(
                          spec, psi1, cand.dispersal1.K,
                          disperse::suggested_truncation(psi1,
                                                         cand.dispersal1.K));
            // The out-stage applies e^{-K1 B}; its accuracy is measured on
            // the exact pair (chi1 -> psi1) it must invert.
            cand.imp_out = tune_impulse(spec, exact1, psi1, -cand.dispersal1.K,
                                        eps / 8.0, opts);
        } catch (const std::runtime_error& e) {
            last_reason = std::string("impulsive stage: ") + e.what();
            continue;
        }
        if (cand.imp_in.eta + cand.imp_out.eta > impulse_allowance) {
            last_reason = "impulsive stages exceed the T/4 allowance";
            continue;
        }

        cand.window_report = steer.report;
        cand.schedule = ControlSchedule::empty("small-time plan");
        if (cand.imp_in.K != 0.0)
            cand.schedule.append(
                disperse::impulsive_schedule(cand.imp_in.K, cand.imp_in.eta));
        cand.schedule.append(steer.schedule);
        if (cand.imp_out.K != 0.0)
            cand.schedule.append(
                disperse::impulsive_schedule(cand.imp_out.K, cand.imp_out.eta));
        cand.total_time = cand.schedule.total_duration();
        cand.synthesis_truncation =
            std::max({steer.report.truncation, cand.imp_in.truncation,
                      cand.imp_out.truncation});
        if (cand.total_time >= T) {
            last_reason = "assembled schedule does not fit the total budget";
            continue;
        }
        cand.feasible = true;
        return cand;
    }

    plan.feasible = false;
    plan.infeasible_reason = last_reason;
    return plan;
}

VerifiedRun execute_and_verify(const ModelSpec& spec, const SmallTimePlan& plan,
                               const QuantumState& psi0,
                               const QuantumState& psi1) {
    if (!plan.feasible)
        throw std::invalid_argument("execute_and_verify: plan is infeasible");

    VerifiedRun run;
    run.total_time = plan.schedule.total_duration();

    const int synth = std::max(plan.synthesis_truncation, 2);
    run.verification_truncation =
        std::min(synth + (synth + 1) / 2, spec.max_level());
    run.cross_check_truncation = std::min(
        run.verification_truncation + std::max(8, run.verification_truncation / 4),
        spec.max_level());

    const auto v1 = model::galerkin(spec, run.verification_truncation);
    const auto r1 = engine::propagate(v1, plan.schedule, psi0);
    run.unitarity_defect = r1.unitarity_defect;

    const auto v2 = model::galerkin(spec, run.cross_check_truncation);
    const auto r2 = engine::propagate(v2, plan.schedule, psi0);

    const Eigen::VectorXcd f1 =
        r1.final_state.embedded(run.cross_check_truncation);
    const Eigen::VectorXcd f2 =
        r2.final_state.embedded(run.cross_check_truncation);
    run.truncation_disagreement = (f1 - f2).norm();

    const Eigen::VectorXcd target = psi1.embedded(run.cross_check_truncation);
    run.distance = (f1 - target).norm();
    run.fidelity = std::abs(psi1.inner(r1.final_state));

    run.certificate_sum =
        plan.imp_in.gap + plan.imp_out.gap + plan.dispersal0.low_mass +
        plan.dispersal0.tail_mass + plan.dispersal1.low_mass +
        plan.dispersal1.tail_mass + plan.window_report.distance +
        std::abs(1.0 - plan.window_norm0) + std::abs(1.0 - plan.window_norm1);
    run.within_certificates =
        run.distance <= run.certificate_sum + plan.eps / 10.0;

    const bool inconclusive = run.truncation_disagreement > plan.eps / 10.0;
    if (inconclusive)
        run.verdict = "inconclusive";
    else
        run.verdict = run.distance < plan.eps ? "verified" : "failed";
    return run;
}

DiameterSweepResult diameter_sweep(const ModelSpec& spec,
                                   const QuantumState& psi0,
                                   const QuantumState& psi1, double eps,
                                   const std::vector<double>& T_list,
                                   const PlanOptions& opts) {
    DiameterSweepResult out;
    out.smallest_verified_time = std::numeric_limits<double>::infinity();
    for (const double T : T_list) {
        SweepRow row;
        row.T = T;
        try {
            const SmallTimePlan plan =
                plan_small_time(spec, psi0, psi1, eps, T, opts);
            row.feasible = plan.feasible;
            if (!plan.feasible) {
                row.reason = plan.infeasible_reason;
            } else {
                row.n0 = plan.n0;
                row.p = plan.p;
                row.K0 = plan.imp_in.K;
                row.K1 = plan.imp_out.K;
                row.total_time = plan.total_time;
                const VerifiedRun run =
                    execute_and_verify(spec, plan, psi0, psi1);
                row.verdict = run.verdict;
                row.distance = run.distance;
                if (run.verdict == "verified") {
                    out.any_verified = true;
                    out.smallest_verified_time =
                        std::min(out.smallest_verified_time, run.total_time);
                }
            }
        } catch (const std::exception& e) {
            row.feasible = false;
            row.reason = e.what();
        }
        out.rows.push_back(std::move(row));
    }
    if (!out.any_verified) out.smallest_verified_time = 0.0;
    return out;
}

}  // namespace qsteer::pipeline
