// Test-only oracles, independent of the library's computation paths.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qsteer/model.hpp"

namespace oracles {

using Complex = std::complex<double>;

// Closed-form 2x2 exponential e^{i t H} via the Pauli decomposition
// H = c0 I + cx sx + cy sy + cz sz.
inline Eigen::Matrix2cd exp_i_t_hermitian_2x2(const Eigen::Matrix2cd& h,
                                              double t) {
    const Complex I{0.0, 1.0};
    const double c0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double cz = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double cx = h(0, 1).real();
    const double cy = -h(0, 1).imag();
    const double r = std::sqrt(cx * cx + cy * cy + cz * cz);
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    if (r > 0.0) {
        const double c = std::cos(r * t);
        const double s = std::sin(r * t);
        Eigen::Matrix2cd n;
        n << cz / r, (cx - I * cy) / r, (cx + I * cy) / r, -cz / r;
        u = c * Eigen::Matrix2cd::Identity() + I * s * n;
    }
    return std::exp(I * c0 * t) * u;
}

// Adaptive Simpson quadrature for complex integrands.
inline Complex simpson(const std::function<Complex(double)>& f, double a,
                       double b, double tol, int depth = 24) {
    const auto rule = [&](double lo, double hi) {
        return (hi - lo) / 6.0 *
               (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
    };
    std::function<Complex(double, double, Complex, int)> rec =
        [&](double lo, double hi, Complex whole, int d) -> Complex {
        const double mid = 0.5 * (lo + hi);
        const Complex left = rule(lo, mid);
        const Complex right = rule(mid, hi);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
    };
    return rec(a, b, rule(a, b), depth);
}

// Pointwise-multiplication route for e^{KB} on the odd subspace: sample
// psi(theta) = sum x_k sin(k theta)/sqrt(pi) on a uniform grid, multiply by
// e^{-iK cos theta}, and project back onto the sine modes by the (spectrally
// accurate) trapezoid rule on the periodic grid.
inline qsteer::model::QuantumState grid_expKB(
    const qsteer::model::QuantumState& psi, double K, int out_modes,
    int grid_points = 4096) {
    const double pi = std::numbers::pi;
    const int m = grid_points;
    std::vector<Complex> values(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double theta = 2.0 * pi * i / m;
        Complex v{0.0, 0.0};
        for (int idx = 0; idx < psi.size(); ++idx)
            v += psi.coeffs(idx) *
                 std::sin((psi.offset + idx) * theta) / std::sqrt(pi);
        const Complex phase{std::cos(-K * std::cos(theta)),
                            std::sin(-K * std::cos(theta))};
        values[static_cast<std::size_t>(i)] = v * phase;
    }
    Eigen::VectorXcd out(out_modes);
    for (int k = 1; k <= out_modes; ++k) {
        Complex acc{0.0, 0.0};
        for (int i = 0; i < m; ++i) {
            const double theta = 2.0 * pi * i / m;
            acc += values[static_cast<std::size_t>(i)] * std::sin(k * theta);
        }
        out(k - 1) = acc * (2.0 * pi / m) / std::sqrt(pi);
    }
    return qsteer::model::QuantumState(1, out);
}

}  // namespace oracles
