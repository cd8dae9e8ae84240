#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string_view>

#include "icm/analytic.hpp"
#include "icm/errors.hpp"
#include "icm/params.hpp"

// Figures of merit for a line treated as a single lumped RLC section:
// damping factor xi = (R_T/2) sqrt(C_T/L_T), natural frequency
// omega0 = 1/sqrt(L_T C_T), poles p = omega0 (-xi +- sqrt(xi^2 - 1)); plus the
// per-bit energy model E = 1/2 C (swing*Vdd)^2 and throughput-energy product.

namespace icm {

enum class DampingRegime { overdamped, critical, underdamped };

inline std::string_view regime_name(DampingRegime r) {
    switch (r) {
        case DampingRegime::overdamped: return "overdamped";
        case DampingRegime::critical: return "critical";
        case DampingRegime::underdamped: return "underdamped";
    }
    return "?";
}

struct DampingReport {
    double xi = 0.0;      // +inf marks the pure-rc (L_T = 0) regime
    double omega0 = 0.0;  // rad/s
    std::complex<double> pole1;  // 1/s
    std::complex<double> pole2;
    DampingRegime regime = DampingRegime::overdamped;
};

inline constexpr double critical_damping_tol = 1e-9;

/// xi > 1: both poles real, inductance negligible, rc model accurate.
/// xi < 1: complex poles, ringing, inductance matters.
inline DampingReport damping_factor(const LineTotals& totals) {
    if (!(totals.c_total > 0.0))
        throw ValidationError("damping_factor requires C_T > 0");
    if (totals.r_total < 0.0 || totals.l_total < 0.0)
        throw ValidationError("damping_factor requires R_T, L_T >= 0");

    DampingReport rep;
    if (totals.l_total == 0.0) {
        // Pure rc: the "second pole" has fled to -inf and xi with it.
        rep.xi = std::numeric_limits<double>::infinity();
        rep.omega0 = std::numeric_limits<double>::infinity();
        rep.pole1 = {-1.0 / (totals.r_total * totals.c_total), 0.0};
        rep.pole2 = {-std::numeric_limits<double>::infinity(), 0.0};
        rep.regime = DampingRegime::overdamped;
        return rep;
    }

    rep.xi = 0.5 * totals.r_total * std::sqrt(totals.c_total / totals.l_total);
    rep.omega0 = 1.0 / std::sqrt(totals.l_total * totals.c_total);
    if (std::abs(rep.xi - 1.0) < critical_damping_tol) {
        rep.regime = DampingRegime::critical;
        rep.pole1 = rep.pole2 = {-rep.omega0, 0.0};
    } else if (rep.xi > 1.0) {
        rep.regime = DampingRegime::overdamped;
        const double root = std::sqrt(rep.xi * rep.xi - 1.0);
        rep.pole1 = {rep.omega0 * (-rep.xi + root), 0.0};
        rep.pole2 = {rep.omega0 * (-rep.xi - root), 0.0};
    } else {
        rep.regime = DampingRegime::underdamped;
        const double root = std::sqrt(1.0 - rep.xi * rep.xi);
        rep.pole1 = {-rep.omega0 * rep.xi, rep.omega0 * root};
        rep.pole2 = {-rep.omega0 * rep.xi, -rep.omega0 * root};
    }
    return rep;
}

/// L/R time constant of the source loop, L_T/(R_S + R_T).
inline double inductive_time_constant(double l_total, double r_source, double r_total) {
    if (l_total < 0.0 || r_source < 0.0 || r_total < 0.0)
        throw ValidationError("inductive_time_constant arguments must be >= 0");
    const double r = r_source + r_total;
    if (!(r > 0.0))
        throw ValidationError("inductive_time_constant requires R_S + R_T > 0");
    return l_total / r;
}

/// E_bit = 1/2 C_int (swing_ratio * Vdd)^2. swing_ratio = 1 is the full-swing
/// (voltage-mode) case; current-mode signaling is modeled as a reduced
/// effective swing, default 1/sqrt(3) per the energy calibration documented
/// in the README.
inline double energy_per_bit(double c_int, double vdd, double swing_ratio = 1.0) {
    if (c_int < 0.0 || vdd < 0.0)
        throw ValidationError("energy_per_bit requires C_int >= 0 and Vdd >= 0");
    if (!(swing_ratio > 0.0) || swing_ratio > 1.0)
        throw ValidationError("swing_ratio must lie in (0, 1]");
    const double swing = swing_ratio * vdd;
    return 0.5 * c_int * swing * swing;
}

inline constexpr double cm_swing_ratio = 0.5773502691896258;  // 1/sqrt(3)

struct EnergyReport {
    double e_bit = 0.0;       // J
    double throughput = 0.0;  // bit/s
    double tep = 0.0;         // throughput-energy product (J*bit/s, i.e. W)
    double swing_ratio = 1.0;
};

/// Throughput is bits_per_tau / tau_d (one bit per line time constant by
/// default); tep = throughput * e_bit, the worst-case per-line power of a
/// periodic pulse train.
inline EnergyReport throughput_energy(const DelayEstimate& delay, double e_bit,
                                      double bits_per_tau = 1.0,
                                      double swing_ratio = 1.0) {
    if (!(delay.tau_d > 0.0))
        throw ValidationError("throughput_energy requires tau_d > 0");
    if (e_bit < 0.0) throw ValidationError("energy per bit must be >= 0");
    if (!(bits_per_tau > 0.0)) throw ValidationError("bits_per_tau must be > 0");
    EnergyReport rep;
    rep.e_bit = e_bit;
    rep.throughput = bits_per_tau / delay.tau_d;
    rep.tep = rep.throughput * e_bit;
    rep.swing_ratio = swing_ratio;
    return rep;
}

} // namespace icm
