#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "icm/analytic.hpp"
#include "icm/errors.hpp"
#include "icm/params.hpp"
#include "icm/units.hpp"

// Time-domain oracle: the line as an N-segment gamma-type ladder
//
//   step*Vdd --R_S--[R,L]--(v1: C)--[R,L]--(v2: C)-- ... --(vN: C + load)
//
// with per-segment R = R_T/N, L = L_T/N, C = C_T/N (series element first,
// shunt second). States are the capacitor voltages and, when l > 0, the
// inductor currents; with the interleaved ordering i1,v1,i2,v2,... the system
// matrix is tridiagonal, so one LU factorization plus an O(n) solve per step
// carries the whole transient. Integration is trapezoidal (A-stable, keeps
// passive LC energy bounded) with a fixed step.
//
// Load handling at node N:
//   Open      - no load branch
//   Resistive - conductance 1/R_L to ground
//   Short     - node N grounded; its voltage leaves the state vector
//   ResCap    - R_L || C_L; C_L shares node N and merges into its capacitance
//               (a parallel capacitor is not an independent state); R_L = 0
//               degenerates to Short
//
// A line with r = 0 and l = 0 has no internal structure: every node is the
// same node, and the ladder collapses to a single capacitor C_T behind R_S.

namespace icm {

struct LadderConfig {
    LinePerUnit line;
    double length = 0.0;     // m
    int n_segments = 200;
    Termination term;
    double vdd = 1.0;        // V
    double t_end = 0.0;      // s, required > 0
    double dt = 0.0;         // s; 0 selects t_end/1e4

    void validate() const {
        line.validate();
        term.validate();
        if (!(length > 0.0)) throw ValidationError("ladder length must be > 0");
        if (n_segments < 1) throw ValidationError("n_segments must be >= 1");
        if (!(vdd > 0.0)) throw ValidationError("vdd must be > 0");
        if (!(t_end > 0.0)) throw ValidationError("t_end must be > 0");
        if (dt != 0.0) {
            if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
            if (dt > t_end / 100.0)
                throw ValidationError("fixed dt must satisfy dt <= t_end/100");
        }
    }

    [[nodiscard]] LineTotals totals() const { return totals_from_per_unit(line, length); }
};

// ---------------------------------------------------------------------------
// Tridiagonal LU with partial pivoting (LAPACK gttrf/gtts2 scheme)
// ---------------------------------------------------------------------------

class TridiagonalSolver {
public:
    /// Factor the matrix with sub/main/super diagonals (sizes n-1, n, n-1).
    void factor(std::vector<double> lower, std::vector<double> diag,
                std::vector<double> upper) {
        n_ = static_cast<int>(diag.size());
        dl_ = std::move(lower);
        d_ = std::move(diag);
        du_ = std::move(upper);
        du2_.assign(n_ > 2 ? n_ - 2 : 0, 0.0);
        swap_.assign(n_ > 1 ? n_ - 1 : 0, 0);

        for (int i = 0; i + 1 < n_; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] != 0.0) {
                    const double fact = dl_[i] / d_[i];
                    dl_[i] = fact;
                    d_[i + 1] -= fact * du_[i];
                } else if (dl_[i] == 0.0) {
                    throw NumericalError("singular ladder system matrix");
                }
            } else {
                const double fact = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = fact;
                const double tmp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = tmp - fact * d_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -fact * du_[i + 1];
                }
                swap_[i] = 1;
            }
        }
        if (n_ > 0 && d_[n_ - 1] == 0.0)
            throw NumericalError("singular ladder system matrix");
    }

    /// Solve in place.
    void solve(std::vector<double>& b) const {
        for (int i = 0; i + 1 < n_; ++i) {
            if (!swap_[i]) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const double tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl_[i] * b[i];
            }
        }
        if (n_ == 0) return;
        b[n_ - 1] /= d_[n_ - 1];
        if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
        for (int i = n_ - 3; i >= 0; --i)
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    }

private:
    int n_ = 0;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<char> swap_;
};

// ---------------------------------------------------------------------------
// State-space construction
// ---------------------------------------------------------------------------

/// Linear observable y = sum w_i x_i + feedthrough * u.
struct OutputTap {
    std::vector<std::pair<int, double>> weights;
    double feedthrough = 0.0;

    [[nodiscard]] double apply(const std::vector<double>& x, double u) const {
        double y = feedthrough * u;
        for (const auto& [idx, w] : weights) y += w * x[idx];
        return y;
    }
};

/// x' = A x + b*u with tridiagonal A.
struct LadderSystem {
    std::vector<double> lower, diag, upper;  // A diagonals (n-1, n, n-1)
    std::vector<double> input;               // b
    OutputTap v_load, i_source;
    int n_segments = 0;
    bool has_inductors = false;
    bool collapsed = false;   // r = l = 0 line folded to a single capacitor
    bool short_load = false;

    [[nodiscard]] int n_states() const { return static_cast<int>(diag.size()); }
};

inline LadderSystem build_ladder(const LadderConfig& cfg) {
    cfg.validate();
    const LineTotals tot = cfg.totals();
    const int n = cfg.n_segments;
    const double r_seg = tot.r_total / n;
    const double l_seg = tot.l_total / n;
    const double c_seg = tot.c_total / n;
    const double r_s = cfg.term.r_source;

    bool is_short = std::holds_alternative<ShortLoad>(cfg.term.load);
    double g_load = 0.0;   // load conductance at node N
    double c_load = 0.0;   // extra node-N capacitance
    if (const auto* res = std::get_if<ResistiveLoad>(&cfg.term.load)) {
        g_load = 1.0 / res->r_load;
    } else if (const auto* rc = std::get_if<ResCapLoad>(&cfg.term.load)) {
        if (rc->r_load == 0.0) {
            is_short = true;  // shorted R||C is just a short
        } else {
            g_load = 1.0 / rc->r_load;
            c_load = rc->c_load;
        }
    }

    LadderSystem sys;
    sys.n_segments = n;
    sys.has_inductors = l_seg > 0.0;
    sys.short_load = is_short;

    if (r_seg == 0.0 && l_seg == 0.0) {
        // Single supernode with the whole C_T (plus C_L).
        sys.collapsed = true;
        if (!(r_s > 0.0))
            throw ValidationError(
                "a line with zero series impedance needs a nonzero source resistance");
        if (is_short) {
            // Everything is shorted; purely algebraic outputs.
            sys.i_source.feedthrough = 1.0 / r_s;
            return sys;
        }
        const double c_node = tot.c_total + c_load;
        sys.diag = {-(1.0 / r_s + g_load) / c_node};
        sys.input = {1.0 / (r_s * c_node)};
        sys.v_load.weights = {{0, 1.0}};
        sys.i_source.weights = {{0, -1.0 / r_s}};
        sys.i_source.feedthrough = 1.0 / r_s;
        return sys;
    }

    if (!sys.has_inductors) {
        // RC ladder: states v_1..v_N (v_N dropped for a short).
        const int n_states = is_short ? n - 1 : n;
        sys.lower.assign(std::max(0, n_states - 1), 0.0);
        sys.diag.assign(n_states, 0.0);
        sys.upper.assign(std::max(0, n_states - 1), 0.0);
        sys.input.assign(n_states, 0.0);

        const double r_in = r_s + r_seg;  // source to node 1
        for (int k = 0; k < n_states; ++k) {
            double c_node = c_seg;
            if (!is_short && k == n - 1) c_node += c_load;
            const double g_prev = (k == 0) ? 1.0 / r_in : 1.0 / r_seg;
            // outflow toward node k+2 (the grounded node N counts, for a short)
            const double g_next = (k < n - 1) ? 1.0 / r_seg : 0.0;
            sys.diag[k] = -(g_prev + g_next + ((k == n - 1) ? g_load : 0.0)) / c_node;
            if (k > 0) sys.lower[k - 1] = g_prev / c_node;
            if (k < n_states - 1) sys.upper[k] = (1.0 / r_seg) / c_node;
            if (k == 0) sys.input[0] = 1.0 / (r_in * c_node);
        }
        if (n_states > 0) {
            if (!is_short) sys.v_load.weights = {{n_states - 1, 1.0}};
            sys.i_source.weights = {{0, -1.0 / r_in}};
        }
        sys.i_source.feedthrough = 1.0 / r_in;
        return sys;
    }

    // RLC ladder, interleaved i1,v1,i2,v2,...; short drops the final v_N.
    const int n_states = is_short ? 2 * n - 1 : 2 * n;
    sys.lower.assign(n_states - 1, 0.0);
    sys.diag.assign(n_states, 0.0);
    sys.upper.assign(n_states - 1, 0.0);
    sys.input.assign(n_states, 0.0);

    for (int k = 1; k <= n; ++k) {
        const int ii = 2 * (k - 1);  // inductor current of segment k
        const double r_ser = r_seg + (k == 1 ? r_s : 0.0);
        sys.diag[ii] = -r_ser / l_seg;
        if (k == 1) {
            sys.input[ii] = 1.0 / l_seg;
        } else {
            sys.lower[ii - 1] = 1.0 / l_seg;  // + v_{k-1}
        }
        const bool v_exists = !(is_short && k == n);
        if (v_exists) {
            sys.upper[ii] = -1.0 / l_seg;  // - v_k
            const int iv = ii + 1;
            double c_node = c_seg;
            if (k == n) c_node += c_load;
            sys.lower[iv - 1] = 1.0 / c_node;          // + i_k
            if (k < n) sys.upper[iv] = -1.0 / c_node;  // - i_{k+1}
            if (k == n) sys.diag[iv] = -g_load / c_node;
        }
    }
    if (!is_short) sys.v_load.weights = {{n_states - 1, 1.0}};
    sys.i_source.weights = {{0, 1.0}};
    return sys;
}

// ---------------------------------------------------------------------------
// Transient simulation
// ---------------------------------------------------------------------------

struct SimTrace {
    std::vector<double> times;     // s, strictly increasing
    std::vector<double> v_load;    // V
    std::vector<double> i_source;  // A
    LadderConfig meta;
    bool settled = false;
    double v_final_expected = 0.0;
};

namespace detail {
inline std::atomic<std::uint64_t>& sim_counter() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}
} // namespace detail

/// Number of simulate() calls since process start (or the last reset).
/// Instrumentation for analysis-gating tests.
inline std::uint64_t simulation_run_count() { return detail::sim_counter().load(); }
inline void reset_simulation_run_count() { detail::sim_counter().store(0); }

/// Expected DC value of the load-end voltage.
inline double dc_load_voltage(const LadderConfig& cfg) {
    const LineTotals tot = cfg.totals();
    const double r_path = cfg.term.r_source + tot.r_total;
    if (std::holds_alternative<OpenLoad>(cfg.term.load)) return cfg.vdd;
    if (std::holds_alternative<ShortLoad>(cfg.term.load)) return 0.0;
    double r_load = 0.0;
    if (const auto* res = std::get_if<ResistiveLoad>(&cfg.term.load)) r_load = res->r_load;
    if (const auto* rc = std::get_if<ResCapLoad>(&cfg.term.load)) r_load = rc->r_load;
    if (r_load == 0.0) return 0.0;
    return cfg.vdd * r_load / (r_path + r_load);
}

inline SimTrace simulate(const LadderConfig& cfg) {
    cfg.validate();
    detail::sim_counter().fetch_add(1);

    const LadderSystem sys = build_ladder(cfg);
    const double dt = cfg.dt > 0.0 ? cfg.dt : cfg.t_end / 1e4;
    const int n_steps = std::max(100, static_cast<int>(std::ceil(cfg.t_end / dt - 1e-9)));
    const int n = sys.n_states();
    const double u = cfg.vdd;  // step source, already high for t >= 0

    // Trapezoidal: (I - dt/2 A) x_{k+1} = (I + dt/2 A) x_k + dt * b * u
    TridiagonalSolver lu;
    std::vector<double> p_lower(sys.lower), p_diag(sys.diag), p_upper(sys.upper);
    for (auto& v : p_lower) v *= -0.5 * dt;
    for (auto& v : p_upper) v *= -0.5 * dt;
    for (int i = 0; i < n; ++i) p_diag[i] = 1.0 - 0.5 * dt * sys.diag[i];
    lu.factor(std::move(p_lower), std::move(p_diag), std::move(p_upper));

    std::vector<double> x(n, 0.0), rhs(n, 0.0);

    SimTrace trace;
    trace.meta = cfg;
    trace.v_final_expected = dc_load_voltage(cfg);
    trace.times.reserve(n_steps + 1);
    trace.v_load.reserve(n_steps + 1);
    trace.i_source.reserve(n_steps + 1);

    const double v_lo = -0.5 * cfg.vdd;
    const double v_hi = 1.5 * cfg.vdd;
    auto record = [&](double t) {
        const double v = sys.v_load.apply(x, u);
        const double i = sys.i_source.apply(x, u);
        if (!std::isfinite(v) || v < v_lo || v > v_hi)
            throw NumericalError("ladder simulation diverged at t = " +
                                 units::format_double(t) + " s (v_load = " +
                                 units::format_double(v) + " V)");
        trace.times.push_back(t);
        trace.v_load.push_back(v);
        trace.i_source.push_back(i);
    };

    record(0.0);
    for (int k = 1; k <= n_steps; ++k) {
        // rhs = x + dt/2 * (A x) + dt * b * u
        for (int i = 0; i < n; ++i) {
            double ax = sys.diag[i] * x[i];
            if (i > 0) ax += sys.lower[i - 1] * x[i - 1];
            if (i + 1 < n) ax += sys.upper[i] * x[i + 1];
            rhs[i] = x[i] + 0.5 * dt * ax + dt * sys.input[i] * u;
        }
        lu.solve(rhs);
        x.swap(rhs);
        record(k * dt);
    }

    const double v_exp = trace.v_final_expected;
    const double tol = 1e-3 * (v_exp > 0.0 ? v_exp : cfg.vdd);
    trace.settled = std::abs(trace.v_load.back() - v_exp) <= tol;
    return trace;
}

// ---------------------------------------------------------------------------
// Step metrics
// ---------------------------------------------------------------------------

struct StepMetrics {
    double t50 = 0.0;
    double t63 = 0.0;
    double overshoot_pct = 0.0;
    double final_value = 0.0;
    bool settled = false;
};

inline constexpr double t63_fraction = 0.6321205588285577;  // 1 - 1/e

/// Thresholds interpolate linearly between samples; overshoot is relative to
/// the final value.
inline StepMetrics extract_metrics(const SimTrace& trace) {
    if (trace.times.size() < 2)
        throw ValidationError("extract_metrics needs a trace with >= 2 samples");
    const double final_value = trace.v_load.back();
    if (!(final_value > 0.0))
        throw NumericalError("trace did not settle to a positive level; "
                             "no step metrics can be extracted");

    auto first_crossing = [&](double threshold) {
        if (trace.v_load.front() >= threshold) return trace.times.front();
        for (std::size_t i = 1; i < trace.v_load.size(); ++i) {
            if (trace.v_load[i] >= threshold) {
                const double v0 = trace.v_load[i - 1], v1 = trace.v_load[i];
                const double t0 = trace.times[i - 1], t1 = trace.times[i];
                return t0 + (threshold - v0) / (v1 - v0) * (t1 - t0);
            }
        }
        throw NumericalError("trace never crossed " +
                             units::format_double(threshold) + " V; not settled");
    };

    StepMetrics m;
    m.final_value = final_value;
    m.t50 = first_crossing(0.5 * final_value);
    m.t63 = first_crossing(t63_fraction * final_value);
    const double v_max = *std::max_element(trace.v_load.begin(), trace.v_load.end());
    m.overshoot_pct = std::max(0.0, (v_max - final_value) / final_value * 100.0);
    m.settled = trace.settled;
    return m;
}

/// Default transient window: 20x a conservative settling-time estimate
/// (voltage-mode closed form, which upper-bounds the resistive cases, plus
/// the load-capacitor and inductive contributions).
inline double default_time_window(const LinePerUnit& line, double length,
                                  const Termination& term) {
    const LineTotals tot = totals_from_per_unit(line, length);
    double tau = term.r_source * tot.c_total + 0.5 * tot.r_total * tot.c_total;
    if (const auto* rc = std::get_if<ResCapLoad>(&term.load))
        tau += rc->c_load * (term.r_source + tot.r_total + rc->r_load);
    if (tot.l_total > 0.0) {
        const double r_loop = term.r_source + tot.r_total;
        if (r_loop > 0.0)
            tau += 4.0 * tot.l_total / r_loop;
        else
            tau += 100.0 * std::sqrt(tot.l_total * tot.c_total);
    }
    return 20.0 * tau;
}

} // namespace icm
