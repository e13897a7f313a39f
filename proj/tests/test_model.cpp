#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qsteer/model.hpp"
#include "qsteer/rng.hpp"

using namespace qsteer;
using model::ModelSpec;
using model::QuantumState;

TEST_CASE("eigenvalue law k^(2 alpha)") {
    CHECK(model::eigenvalue(1, 3.0) == doctest::Approx(1.0));
    CHECK(model::eigenvalue(2, 3.0) == doctest::Approx(64.0));
    CHECK(model::eigenvalue(3, 1.0) == doctest::Approx(9.0));
    CHECK_THROWS_AS(model::eigenvalue(0, 3.0), std::domain_error);
    CHECK_THROWS_AS(model::eigenvalue(-2, 1.0), std::domain_error);
}

TEST_CASE("toy coupling is -i/2 on neighbours only") {
    CHECK(model::coupling(1, 2) == model::Complex{0.0, -0.5});
    CHECK(model::coupling(3, 3) == model::Complex{0.0, 0.0});
    CHECK(model::coupling(1, 4) == model::Complex{0.0, 0.0});
    // Skew-adjointness b_jk = -conj(b_kj) over a band of indices.
    for (int j = 1; j <= 12; ++j)
        for (int k = 1; k <= 12; ++k)
            CHECK(model::coupling(j, k) ==
                  -std::conj(model::coupling(k, j)));
}

TEST_CASE("galerkin compression, toy alpha=3 order 2") {
    const auto pair = model::galerkin(ModelSpec::toy(3.0), 2);
    CHECK(pair.a_diag(0) == doctest::Approx(1.0));
    CHECK(pair.a_diag(1) == doctest::Approx(64.0));
    CHECK(pair.b_mat(0, 1) == model::Complex{0.0, -0.5});
    CHECK(pair.b_mat(1, 0) == model::Complex{0.0, -0.5});
    CHECK(pair.b_mat(0, 0) == model::Complex{0.0, 0.0});

    const auto three = model::galerkin(ModelSpec::toy(1.0), 3);
    CHECK(three.a_diag(0) == doctest::Approx(1.0));
    CHECK(three.a_diag(1) == doctest::Approx(4.0));
    CHECK(three.a_diag(2) == doctest::Approx(9.0));

    CHECK_THROWS_AS(model::galerkin(ModelSpec::toy(3.0), 1), std::domain_error);
}

TEST_CASE("galerkin invariants: iA and iB Hermitian, tridiagonal zero diag") {
    const auto pair = model::galerkin(ModelSpec::toy(2.7), 9);
    const Eigen::MatrixXcd ib = model::Complex{0.0, 1.0} * pair.b_mat;
    CHECK((ib - ib.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    for (int i = 0; i < 9; ++i) CHECK(std::abs(pair.b_mat(i, i)) == 0.0);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            if (std::abs(i - j) > 1) CHECK(std::abs(pair.b_mat(i, j)) == 0.0);
}

TEST_CASE("explicit table passthrough and validation") {
    const model::Complex mi{0.0, -0.5};
    auto spec = ModelSpec::table({1.0, 64.0}, {{{0.0, 0.0}, mi}, {mi, {0.0, 0.0}}});
    const auto pair = model::galerkin(spec, 2);
    CHECK(pair.a_diag(1) == doctest::Approx(64.0));
    CHECK(pair.b_mat(0, 1) == mi);
    CHECK_THROWS_AS(model::galerkin(spec, 3), std::domain_error);

    // Violated skew-adjointness is rejected.
    CHECK_THROWS_AS(
        ModelSpec::table({1.0, 2.0},
                         {{{0.0, 0.0}, {0.5, 0.0}}, {{0.5, 0.0}, {0.0, 0.0}}}),
        std::invalid_argument);
}

TEST_CASE("weighted norm") {
    const auto spec = ModelSpec::toy(3.0);
    // phi_2 at s = 1/2: lambda_2 = 64, sqrt(64) = 8 by hand.
    CHECK(model::weighted_norm(QuantumState::basis(2), spec, 0.5) ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK(model::weighted_norm(QuantumState::basis(1), spec, 7.3) ==
          doctest::Approx(1.0));

    Rng rng(11);
    const QuantumState psi(1, rng.unit_vector(6));
    CHECK(model::weighted_norm(psi, spec, 0.0) == doctest::Approx(1.0));

    // Monotone nondecreasing in s for unit states (lambda_k >= 1).
    double prev = 0.0;
    for (double s : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        const double w = model::weighted_norm(psi, spec, s);
        CHECK(w >= prev - 1e-12);
        prev = w;
    }
}

TEST_CASE("projection") {
    const auto phi3 = QuantumState::basis(3);
    CHECK(model::project(phi3, 2).empty());
    CHECK(model::project(QuantumState::basis(1), 5).coeff(1) ==
          model::Complex{1.0, 0.0});

    Eigen::VectorXcd c(3);
    c << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    const QuantumState psi(1, c);  // (phi_1 + phi_3)/sqrt(2)
    const auto cut = model::project(psi, 2);
    CHECK(std::abs(cut.coeff(1)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(cut.norm() == doctest::Approx(1.0 / std::sqrt(2.0)));

    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const QuantumState p(1 + static_cast<int>(rng.uniform_int(0, 3)),
                             rng.unit_vector(8));
        const int n = static_cast<int>(rng.uniform_int(1, 12));
        const auto once = model::project(p, n);
        const auto twice = model::project(once, n);
        CHECK(once.norm() <= p.norm() + 1e-14);
        // Idempotence, exact.
        REQUIRE(twice.size() == once.size());
        for (int i = 0; i < once.size(); ++i)
            CHECK(twice.coeffs(i) == once.coeffs(i));
    }
}

TEST_CASE("quantum state bookkeeping") {
    auto psi = QuantumState::basis(4);
    CHECK(psi.is_unit());
    CHECK(psi.top_level() == 4);
    CHECK(psi.coeff(3) == model::Complex{0.0, 0.0});
    CHECK_THROWS_AS(psi.embedded(3), std::domain_error);
    CHECK(psi.embedded(6).size() == 6);

    Eigen::VectorXcd c(2);
    c << model::Complex{0.3, 0.1}, model::Complex{-0.2, 0.4};
    QuantumState raw(2, c);
    CHECK(!raw.is_unit());
    CHECK(raw.renormalized().is_unit());
    CHECK(raw.conjugated().coeff(2) == std::conj(raw.coeff(2)));

    CHECK_THROWS_AS(QuantumState::zero().renormalized(), std::domain_error);
}

TEST_CASE("B^(N) operator norms: monotone, below 1, match cos(pi/(N+1))") {
    const auto spec = ModelSpec::toy(3.0);
    double prev = 0.0;
    for (int n = 2; n <= 50; ++n) {
        const double bn = model::galerkin(spec, n).b_norm();
        CHECK(bn >= prev - 1e-12);
        CHECK(bn <= 1.0 + 1e-12);
        // Analytic spectrum of the 0/1-half tridiagonal matrix.
        CHECK(bn == doctest::Approx(std::cos(std::numbers::pi / (n + 1)))
                        .epsilon(1e-10));
        prev = bn;
    }
}

TEST_CASE("b-norm report flags the sqrt(2)/2 reference discrepancy") {
    const auto rep = model::b_norm_report(ModelSpec::toy(3.0), 50);
    REQUIRE(rep.values.size() == 49);
    CHECK(rep.discrepancy_flagged);
    CHECK(rep.reference == doctest::Approx(std::numbers::sqrt2 / 2.0));
    CHECK(!rep.note.empty());
    // N = 3 reproduces the reference value exactly; larger N exceed it.
    CHECK(rep.values[1] == doctest::Approx(std::numbers::sqrt2 / 2.0));
    CHECK(rep.values.back() > rep.reference);
}
