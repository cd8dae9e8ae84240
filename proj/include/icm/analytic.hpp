#pragma once

#include <cmath>
#include <complex>
#include <string_view>
#include <vector>

#include "icm/errors.hpp"
#include "icm/params.hpp"

// Closed-form delay pipeline for a distributed rc line between a Thevenin
// source and a resistive termination:
//
//   circuit constants a, b, c  ->  even power series f(u) = sum k_m u^(2m)
//   with u^2 = s*R1*C1         ->  first-order (dominant pole) reduction
//   ->  step response and delay metrics.
//
// The dominant-pole time constant is
//   tau_d = (b + c/2 + a/6) / (a + c) * R1*C1
// with a = R1/R_L, b = R_S/R1, c = 1 + R_S/R_L. Open and short loads are
// algebraic limits of that expression, never literal divisions by 0 or inf:
//   open  (R_L -> inf): tau_d = (b + 1/2) * R1*C1
//   short (R_L -> 0)  : tau_d = (b/2 + 1/6) / (1 + b) * R1*C1
// For R_S = 0 these collapse to the classic R1C1/2 and R1C1/6.

namespace icm {

enum class SignalingMode { general, voltage_mode_limit, current_mode_limit };

inline std::string_view mode_name(SignalingMode m) {
    switch (m) {
        case SignalingMode::general: return "general";
        case SignalingMode::voltage_mode_limit: return "voltage-mode-limit";
        case SignalingMode::current_mode_limit: return "current-mode-limit";
    }
    return "?";
}

/// Z0 = sqrt(L_T/C_T); zero for an inductance-free line.
inline double characteristic_impedance(const LineTotals& totals) {
    if (!(totals.c_total > 0.0))
        throw ValidationError("characteristic impedance requires C_T > 0");
    if (totals.l_total == 0.0) return 0.0;
    return std::sqrt(totals.l_total / totals.c_total);
}

/// Inductance folded into resistance: 0.65*R_S + 0.36*Z0 + R_T. The 0.65 and
/// 0.36 factors model the shielding effect of the line inductance.
inline double equivalent_resistance(double r_source, double z0, double r_total) {
    if (r_source < 0.0 || z0 < 0.0 || r_total < 0.0)
        throw ValidationError("equivalent_resistance arguments must be >= 0");
    return 0.65 * r_source + 0.36 * z0 + r_total;
}

/// The a, b, c circuit constants together with the R1, C1 they came from.
/// For the short-load limit a and c have no finite value; `mode` records the
/// limit and downstream users switch to the limit algebra (b stays exact).
struct AbcCoefficients {
    double a = 0.0;  // R1 / R_L
    double b = 0.0;  // R_S / R1
    double c = 1.0;  // 1 + R_S / R_L
    double r1 = 0.0; // total effective line resistance (ohm)
    double c1 = 0.0; // total line capacitance (F)
    SignalingMode mode = SignalingMode::general;
};

inline AbcCoefficients abc_coefficients(double r1, double c1, const Termination& term) {
    if (!(r1 > 0.0) || !std::isfinite(r1))
        throw ValidationError("abc_coefficients requires R1 > 0");
    if (!(c1 > 0.0) || !std::isfinite(c1))
        throw ValidationError("abc_coefficients requires C1 > 0");
    term.validate();

    AbcCoefficients abc;
    abc.r1 = r1;
    abc.c1 = c1;
    abc.b = term.r_source / r1;

    if (const auto* res = std::get_if<ResistiveLoad>(&term.load)) {
        abc.a = r1 / res->r_load;
        abc.c = 1.0 + term.r_source / res->r_load;
        abc.mode = SignalingMode::general;
    } else if (std::holds_alternative<OpenLoad>(term.load)) {
        abc.a = 0.0;
        abc.c = 1.0;
        abc.mode = SignalingMode::voltage_mode_limit;
    } else if (std::holds_alternative<ShortLoad>(term.load)) {
        // a, c diverge in this limit; keep placeholders and flag the mode.
        abc.a = 0.0;
        abc.c = 1.0;
        abc.mode = SignalingMode::current_mode_limit;
    } else {
        throw ValidationError(
            "closed-form model covers resistive/open/short terminations; "
            "use the ladder simulator for R||C loads");
    }
    return abc;
}

// ---------------------------------------------------------------------------
// Series expansion
// ---------------------------------------------------------------------------

inline constexpr int max_series_order = 20;

/// Truncated even expansion f(u) ~= sum_{m=0..M} k_m u^(2m) of the transfer
/// denominator, k_0 = a + c and k_m = b/(2m-1)! + c/(2m)! + a/(2m+1)!.
struct SeriesExpansion {
    std::vector<double> coefficients;  // k_0 .. k_M

    [[nodiscard]] int order() const { return static_cast<int>(coefficients.size()) - 1; }

    [[nodiscard]] double evaluate(double u) const {
        const double u2 = u * u;
        double acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
            acc = acc * u2 + *it;
        return acc;
    }

    [[nodiscard]] std::complex<double> evaluate(std::complex<double> u) const {
        const std::complex<double> u2 = u * u;
        std::complex<double> acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
            acc = acc * u2 + *it;
        return acc;
    }
};

inline SeriesExpansion series_coefficients(const AbcCoefficients& abc, int order) {
    if (abc.mode == SignalingMode::current_mode_limit)
        throw ValidationError("series expansion is undefined in the short-load limit");
    if (order < 1) throw ValidationError("series order must be >= 1");
    if (order > max_series_order)
        throw ValidationError("series order capped at 20; factorial terms beyond that "
                              "underflow double precision");

    SeriesExpansion s;
    s.coefficients.reserve(static_cast<std::size_t>(order) + 1);
    s.coefficients.push_back(abc.a + abc.c);
    double fact = 1.0;  // (2m-1)! running value
    for (int m = 1; m <= order; ++m) {
        // advance to (2m-1)!
        fact *= (2.0 * m - 2.0 > 0.0) ? (2.0 * m - 2.0) * (2.0 * m - 1.0) : 1.0;
        const double f_odd = fact;                           // (2m-1)!
        const double f_even = f_odd * (2.0 * m);             // (2m)!
        const double f_next = f_even * (2.0 * m + 1.0);      // (2m+1)!
        s.coefficients.push_back(abc.b / f_odd + abc.c / f_even + abc.a / f_next);
    }
    return s;
}

// ---------------------------------------------------------------------------
// First-order reduction and delay
// ---------------------------------------------------------------------------

/// Dominant-pole model V_load(s)/V_in(s) ~= K1/(s + a1), K1 = a1 * dc_gain.
struct FirstOrderModel {
    double dc_gain = 0.0;  // 1/(a+c); zero in the short-load limit
    double a1 = 0.0;       // dominant pole (1/s)
    double tau_d = 0.0;    // 1/a1
};

inline FirstOrderModel first_order_model(const AbcCoefficients& abc) {
    FirstOrderModel m;
    const double r1c1 = abc.r1 * abc.c1;
    if (abc.mode == SignalingMode::current_mode_limit) {
        m.dc_gain = 0.0;
        m.tau_d = (abc.b / 2.0 + 1.0 / 6.0) / (1.0 + abc.b) * r1c1;
    } else {
        m.dc_gain = 1.0 / (abc.a + abc.c);
        m.tau_d = (abc.b + abc.c / 2.0 + abc.a / 6.0) / (abc.a + abc.c) * r1c1;
    }
    m.a1 = 1.0 / m.tau_d;
    return m;
}

/// First-order step response: Vdd * dc_gain * (1 - exp(-a1 t)) for t >= 0.
inline double step_response(const FirstOrderModel& model, double vdd, double t) {
    if (t < 0.0) return 0.0;  // unit-step convention
    return vdd * model.dc_gain * (1.0 - std::exp(-model.a1 * t));
}

struct DelayEstimate {
    double tau_d = 0.0;  // 63.2% time constant, 1/a1
    double t50 = 0.0;    // ln 2 * tau_d
    double t63 = 0.0;    // == tau_d
    SignalingMode mode = SignalingMode::general;
    bool inductance_aware = false;
};

/// Full closed-form pipeline from line totals and termination to a delay
/// estimate. With `inductance_aware` set, the shielding substitution
/// R_S -> 0.65*R_S and R1 -> R_T + 0.36*Z0 is applied before the formula;
/// naive mode uses R_S and R_T unmodified. Both are exposed so the
/// comparison itself is testable.
inline DelayEstimate closed_form_delay(double r_total, double c_total,
                                       const Termination& term,
                                       bool inductance_aware = false, double z0 = 0.0) {
    if (!(r_total > 0.0) || !(c_total > 0.0))
        throw ValidationError("closed_form_delay requires R1 > 0 and C1 > 0");
    Termination effective = term;
    double r1 = r_total;
    if (inductance_aware) {
        if (z0 < 0.0) throw ValidationError("characteristic impedance must be >= 0");
        effective.r_source = 0.65 * term.r_source;
        r1 = r_total + 0.36 * z0;
    }
    const AbcCoefficients abc = abc_coefficients(r1, c_total, effective);
    const FirstOrderModel model = first_order_model(abc);

    DelayEstimate est;
    est.tau_d = model.tau_d;
    est.t50 = M_LN2 * model.tau_d;
    est.t63 = model.tau_d;
    est.mode = abc.mode;
    est.inductance_aware = inductance_aware;
    return est;
}

} // namespace icm
