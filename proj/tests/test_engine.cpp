#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qsteer/engine.hpp"
#include "qsteer/rng.hpp"

using namespace qsteer;
using engine::ControlSchedule;
using model::ModelSpec;
using model::QuantumState;

namespace {
const ModelSpec kToy3 = ModelSpec::toy(3.0);
}

TEST_CASE("schedule bookkeeping is exact") {
    ControlSchedule s;
    s.append_segment(2.0, 0.5);
    s.append_block({{-1.0, 0.25}, {3.0, 0.125}}, 4);
    CHECK(s.segment_count() == 9);
    CHECK(s.total_duration() == doctest::Approx(0.5 + 4 * 0.375));
    CHECK(s.l1_norm() == doctest::Approx(1.0 + 4 * (0.25 + 0.375)));

    const auto r = s.reversed();
    CHECK(r.segment_count() == 9);
    const auto rr = r.reversed();
    const auto flat = s.flatten();
    const auto flat_rr = rr.flatten();
    REQUIRE(flat.size() == flat_rr.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        CHECK(flat[i].u == flat_rr[i].u);
        CHECK(flat[i].dt == flat_rr[i].dt);
    }
    CHECK_THROWS_AS(s.append_segment(1.0, -0.1), std::domain_error);
}

TEST_CASE("free evolution rotates eigenvectors by e^{i lambda t}") {
    const auto pair = model::galerkin(kToy3, 5);
    for (int k = 1; k <= 5; ++k) {
        const auto out = engine::step(pair, 0.0, 0.37, QuantumState::basis(k));
        const auto expected = std::polar(1.0, model::eigenvalue(k, 3.0) * 0.37);
        CHECK(std::abs(out.coeff(k) - expected) < 1e-12);
    }
}

TEST_CASE("zero-duration step is the identity") {
    const auto pair = model::galerkin(kToy3, 4);
    Rng rng(3);
    const QuantumState psi(1, rng.unit_vector(4));
    const auto out = engine::step(pair, 1.7, 0.0, psi);
    CHECK((out.embedded(4) - psi.embedded(4)).norm() < 1e-15);
    CHECK_THROWS_AS(
        engine::step(pair, std::nan(""), 1.0, psi), std::domain_error);
    CHECK_THROWS_AS(engine::step(pair, 1.0, -1.0, psi), std::domain_error);
}

TEST_CASE("2x2 step matches the closed-form Pauli exponential") {
    // toy alpha=1, n=2, u=3, t=1 on phi_1.
    const auto pair = model::galerkin(ModelSpec::toy(1.0), 2);
    const auto out = engine::step(pair, 3.0, 1.0, QuantumState::basis(1));

    Eigen::Matrix2cd h;
    h << 1.0, -1.5, -1.5, 4.0;  // diag(lambda) + u * (-i b_mat)
    const Eigen::Matrix2cd u = oracles::exp_i_t_hermitian_2x2(h, 1.0);
    CHECK(std::abs(out.coeff(1) - u(0, 0)) < 1e-12);
    CHECK(std::abs(out.coeff(2) - u(1, 0)) < 1e-12);
}

TEST_CASE("propagate: empty schedule, semigroup, unitarity") {
    const auto pair = model::galerkin(kToy3, 6);
    Rng rng(7);
    const QuantumState psi(1, rng.unit_vector(6));

    const auto id = engine::propagate(pair, ControlSchedule::empty(), psi);
    CHECK(id.unitarity_defect == 0.0);
    CHECK((id.final_state.embedded(6) - psi.embedded(6)).norm() == 0.0);

    ControlSchedule joined = ControlSchedule::single(0.8, 0.3);
    ControlSchedule split;
    split.append_segment(0.8, 0.125);
    split.append_segment(0.8, 0.175);
    const auto a = engine::propagate(pair, joined, psi).final_state;
    const auto b = engine::propagate(pair, split, psi).final_state;
    CHECK((a.embedded(6) - b.embedded(6)).norm() < 1e-12);
}

TEST_CASE("propagate composition across schedules") {
    const auto pair = model::galerkin(kToy3, 8);
    Rng rng(13);
    const QuantumState psi(1, rng.unit_vector(8));
    ControlSchedule s1, s2;
    for (int i = 0; i < 5; ++i) s1.append_segment(rng.uniform(-2, 2), rng.uniform(0, 0.2));
    for (int i = 0; i < 7; ++i) s2.append_segment(rng.uniform(-2, 2), rng.uniform(0, 0.2));

    ControlSchedule both = s1;
    both.append(s2);
    const auto direct = engine::propagate(pair, both, psi).final_state;
    const auto mid = engine::propagate(pair, s1, psi).final_state;
    const auto composed = engine::propagate(pair, s2, mid).final_state;
    CHECK((direct.embedded(8) - composed.embedded(8)).norm() < 1e-11);
}

TEST_CASE("block folding equals segment-by-segment application") {
    const auto pair = model::galerkin(kToy3, 7);
    Rng rng(17);
    const QuantumState psi(2, rng.unit_vector(4));

    std::vector<engine::Segment> pattern;
    for (int i = 0; i < 6; ++i)
        pattern.push_back({rng.uniform(-1.5, 1.5), rng.uniform(0.01, 0.05)});

    ControlSchedule folded;
    folded.append_block(pattern, 400);  // above the matrix-power threshold
    ControlSchedule flat;
    for (int r = 0; r < 400; ++r)
        for (const auto& seg : pattern) flat.append_segment(seg.u, seg.dt);

    const auto a = engine::propagate(pair, folded, psi);
    const auto b = engine::propagate(pair, flat, psi);
    CHECK(a.step_count == b.step_count);
    CHECK((a.final_state.embedded(7) - b.final_state.embedded(7)).norm() < 1e-11);
    CHECK(a.unitarity_defect < 1e-12 * static_cast<double>(a.step_count));
}

TEST_CASE("invariance of the span under u = 0") {
    const auto pair = model::galerkin(kToy3, 10);
    Rng rng(23);
    const QuantumState psi(1, rng.unit_vector(10));
    const auto sched = ControlSchedule::single(0.0, 0.9);
    const int n = 4;
    const auto left = model::project(
        engine::propagate(pair, sched, psi).final_state, n);
    const auto right =
        engine::propagate(pair, sched, model::project(psi, n)).final_state;
    CHECK((left.embedded(10) - right.embedded(10)).norm() < 1e-12);
}

TEST_CASE("gauge: removing the trace changes the state by a global phase") {
    const auto spec = kToy3;
    const auto pair = model::galerkin(spec, 5);
    model::GalerkinPair gauged = pair;
    const double mean = pair.a_diag.mean();
    gauged.a_diag.array() -= mean;

    Rng rng(29);
    const QuantumState psi(1, rng.unit_vector(5));
    ControlSchedule sched;
    for (int i = 0; i < 6; ++i)
        sched.append_segment(rng.uniform(-2, 2), rng.uniform(0, 0.3));
    const auto a = engine::propagate(pair, sched, psi).final_state;
    const auto b = engine::propagate(gauged, sched, psi).final_state;
    CHECK(std::abs(std::abs(a.inner(b)) - 1.0) < 1e-10);
}

TEST_CASE("sample_cosine: L1 of a full period approaches 4 (amp = freq)") {
    const double w = 63.0;
    double prev_err = 1.0;
    for (int steps : {16, 64, 256}) {
        const auto sched =
            engine::sample_cosine(w, w, 0.3, 1.0, 2.0 * std::numbers::pi / w, steps);
        const double err = std::abs(sched.l1_norm() - 4.0);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-4);

    CHECK(engine::sample_cosine(1.0, 1.0, 0.0, 1.0, 0.0, 64).segment_count() == 0);
    CHECK_THROWS_AS(engine::sample_cosine(1.0, 0.0, 0.0, 1.0, 1.0, 64),
                    std::domain_error);
    CHECK_THROWS_AS(engine::sample_cosine(1.0, 1.0, 0.0, 0.5, 1.0, 64),
                    std::domain_error);
}

TEST_CASE("sample_cosine: pattern repeats bitwise across periods") {
    const auto sched = engine::sample_cosine(63.0, 63.0, 1.1, 2.0,
                                             10.5 * 2.0 * std::numbers::pi / 63.0, 32);
    const auto flat = sched.flatten();
    REQUIRE(flat.size() >= 10 * 32);
    for (std::size_t i = 32; i < 10 * 32; ++i) {
        CHECK(flat[i].u == flat[i - 32].u);
        CHECK(flat[i].dt == flat[i - 32].dt);
    }
    // Total duration is exact.
    CHECK(sched.total_duration() ==
          doctest::Approx(10.5 * 2.0 * std::numbers::pi / 63.0).epsilon(1e-14));
}

TEST_CASE("sample_cosine Richardson: midpoint error falls like steps^-2") {
    const auto spec = ModelSpec::toy(1.0);
    const auto pair = model::galerkin(spec, 6);
    const QuantumState psi = QuantumState::basis(1);
    const double w = 3.0;
    const double dur = 3.5 * 2.0 * std::numbers::pi / w;

    auto run = [&](int steps) {
        return engine::propagate(
                   pair, engine::sample_cosine(w, w, 0.2, 1.0, dur, steps), psi)
            .final_state.embedded(6);
    };
    const double d32_64 = (run(32) - run(64)).norm();
    const double d64_128 = (run(64) - run(128)).norm();
    CHECK(d64_128 < 0.35 * d32_64 + 1e-12);
}

TEST_CASE("select_truncation") {
    Rng rng(31);
    const QuantumState psi(1, rng.unit_vector(5));

    // K = 0: free evolution is exactly block-diagonal, support suffices.
    const auto free_sel = engine::select_truncation(kToy3, {psi}, 0.0, 1e-6);
    CHECK(free_sel.converged);
    CHECK(free_sel.truncation == 5);

    // Budgeted kick: converged and reproducible.
    const auto sel = engine::select_truncation(kToy3, {QuantumState::basis(2)},
                                               8.0, 1e-3);
    CHECK(sel.converged);
    const auto sel2 = engine::select_truncation(kToy3, {QuantumState::basis(2)},
                                                8.0, 1e-3);
    CHECK(sel.truncation == sel2.truncation);
    CHECK(sel.last_gap < 5e-4);

    // A tolerance above the unit-sphere diameter accepts the support bound.
    const auto loose = engine::select_truncation(kToy3, {psi}, 8.0, 2.5);
    CHECK(loose.truncation == 5);
}

TEST_CASE("norm growth under the L1 budget") {
    // Free evolution preserves every weighted norm.
    Rng rng(37);
    const QuantumState psi(1, rng.unit_vector(4));
    const auto free_rep = engine::norm_growth_check(
        kToy3, ControlSchedule::single(0.0, 2.0), psi, 1.0, 1.0);
    CHECK(free_rep.ratio == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(!free_rep.violated);

    // A genuine pulse stays below e^{cK} with the estimated constant.
    const double c = engine::coupling_constant_estimate(kToy3, 1.0, 40);
    CHECK(c == doctest::Approx((64.0 - 1.0) / (2.0 * 8.0)));  // j = 1 extreme
    const auto sched = engine::sample_cosine(63.0, 63.0, 0.0, 16.0,
                                             4.0 * 2.0 * std::numbers::pi / 63.0, 32);
    const auto rep = engine::norm_growth_check(kToy3, sched, psi, 1.0, c);
    CHECK(!rep.violated);
    CHECK(rep.ratio <= rep.bound);
}

TEST_CASE("unitarity over many random segments") {
    Rng rng(41);
    const auto pair = model::galerkin(kToy3, 16);
    const QuantumState psi(1, rng.unit_vector(16));
    ControlSchedule sched;
    for (int i = 0; i < 200; ++i)
        sched.append_segment(rng.uniform(-3, 3), rng.uniform(0, 0.1));
    const auto res = engine::propagate(pair, sched, psi);
    CHECK(res.unitarity_defect <= 1e-12 * 200);
}
