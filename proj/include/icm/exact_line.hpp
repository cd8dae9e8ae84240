#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "icm/analytic.hpp"
#include "icm/errors.hpp"
#include "icm/params.hpp"
#include "icm/units.hpp"

// Exact s-domain transfer of the distributed rc line with Thevenin source and
// resistive load:
//
//   H(s) = 1 / [ (a/u + b*u) sinh(u) + c cosh(u) ],   u = sqrt(s * R1 * C1).
//
// The expression is even in u, so the principal square root introduces no
// branch discontinuity. This is the validation target for the series and
// dominant-pole approximations; the line here is rc only (inductance enters
// the closed form solely through the resistance substitution, and true L
// dynamics live in the ladder simulator).

namespace icm {

namespace detail {

/// sinh(u)/u, stable for small |u|.
inline std::complex<double> sinh_over_u(std::complex<double> u) {
    const double mag = std::abs(u);
    if (mag < 0.05) {
        const std::complex<double> u2 = u * u;
        return 1.0 + u2 / 6.0 * (1.0 + u2 / 20.0 * (1.0 + u2 / 42.0));
    }
    return std::sinh(u) / u;
}

} // namespace detail

/// Transfer denominator (a/u + b*u) sinh(u) + c cosh(u), evaluated via
/// complex sinh/cosh directly (no exponentials, safe for |u| up to ~700).
inline std::complex<double> transfer_denominator(const AbcCoefficients& abc,
                                                 std::complex<double> u) {
    const std::complex<double> term_a = abc.a * detail::sinh_over_u(u);
    const std::complex<double> term_b = abc.b * u * std::sinh(u);
    const std::complex<double> term_c = abc.c * std::cosh(u);
    return term_a + term_b + term_c;
}

struct TransferSample {
    std::complex<double> s;  // complex frequency (1/s)
    std::complex<double> h;  // dimensionless gain

    [[nodiscard]] double magnitude() const { return std::abs(h); }
    [[nodiscard]] double phase() const { return std::arg(h); }
};

/// Evaluate H(s) exactly. Resistive and open terminations only; the short
/// limit has identically zero voltage transfer and R||C is out of the
/// derivation's scope.
inline std::complex<double> exact_transfer(double r1, double c1, const Termination& term,
                                           std::complex<double> s) {
    const AbcCoefficients abc = abc_coefficients(r1, c1, term);
    if (abc.mode == SignalingMode::current_mode_limit)
        throw ValidationError("exact_transfer: short load has zero voltage transfer");

    const std::complex<double> u = std::sqrt(s * (r1 * c1));
    if (u == std::complex<double>(0.0, 0.0))
        return std::complex<double>(1.0 / (abc.a + abc.c), 0.0);

    const std::complex<double> den = transfer_denominator(abc, u);
    const double den_mag = std::abs(den);

    // Envelope of the constituent terms: |den| far below it means the point
    // sits on (or numerically at) a pole of H.
    const double mag_u = std::abs(u);
    const double envelope =
        (abc.a / std::max(mag_u, 1.0) + abc.b * mag_u + abc.c) *
        std::max({std::abs(std::sinh(u)), std::abs(std::cosh(u)), 1.0});
    if (std::isinf(envelope)) return {0.0, 0.0};  // line fully attenuates; H -> 0
    if (!std::isfinite(den_mag) || den_mag < 1e-13 * envelope)
        throw NumericalError("exact_transfer: evaluation at/near a pole, |denominator| = " +
                             units::format_double(den_mag));
    return 1.0 / den;
}

/// Sample H(j*omega) over an ascending positive grid.
inline std::vector<TransferSample> frequency_response(double r1, double c1,
                                                      const Termination& term,
                                                      std::span<const double> omega_grid) {
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] > 0.0))
            throw ValidationError("frequency grid must be positive");
        if (i > 0 && !(omega_grid[i] > omega_grid[i - 1]))
            throw ValidationError("frequency grid must be strictly ascending");
    }
    std::vector<TransferSample> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid) {
        const std::complex<double> s(0.0, w);
        out.push_back(TransferSample{s, exact_transfer(r1, c1, term, s)});
    }
    return out;
}

} // namespace icm
