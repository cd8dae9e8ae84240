#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "icm/analytic.hpp"
#include "icm/errors.hpp"
#include "icm/exact_line.hpp"
#include "icm/ladder.hpp"
#include "icm/merit.hpp"
#include "icm/scenario.hpp"
#include "icm/units.hpp"

// Scenario execution, sweeps with monotonicity enforcement, Table-4 style
// self-consistency reports, and the CSV emitters behind the CLI.

namespace icm {

struct ResultRow {
    std::string scenario;
    std::optional<double> swept_value;
    std::optional<double> tau_d_s;
    std::optional<double> t50_sim_s;
    std::optional<double> t63_sim_s;
    std::optional<double> xi;
    std::optional<double> e_bit_j;
    std::optional<double> throughput_bps;
    std::optional<double> reduction_vs_vm_pct;
};

struct ScenarioResult {
    ResultRow row;
    std::optional<DelayEstimate> delay;
    std::optional<StepMetrics> sim_metrics;
    std::optional<DampingReport> damping;
    std::optional<EnergyReport> energy;
    std::optional<SimTrace> trace;
    std::optional<double> rel_diff_sim_vs_model;  // |t63_sim - tau_d| / tau_d
};

namespace detail {

[[noreturn]] inline void rethrow_with_prefix(const Error& e, const std::string& prefix) {
    const std::string msg = prefix + e.what();
    switch (e.exit_code()) {
        case ExitCode::numerical: throw NumericalError(msg);
        case ExitCode::property: throw PropertyViolation(msg);
        default: throw ValidationError(msg);
    }
}

template <typename Fn>
auto with_scenario_context(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        rethrow_with_prefix(e, "scenario '" + name + "': ");
    }
}

} // namespace detail

/// Pick the swing ratio for the energy model: explicit value, else 1 for
/// voltage-style loads and 1/sqrt(3) for a short (current-mode) load.
inline double effective_swing_ratio(const Scenario& s) {
    if (s.energy.swing_ratio) return *s.energy.swing_ratio;
    return std::holds_alternative<ShortLoad>(s.term.load) ? cm_swing_ratio : 1.0;
}

/// Simulator configuration a scenario implies (defaulted transient window).
inline LadderConfig ladder_config_for(const Scenario& s) {
    LadderConfig cfg;
    cfg.line = s.line;
    cfg.length = s.length;
    cfg.n_segments = s.n_segments;
    cfg.term = s.term;
    cfg.vdd = s.vdd;
    cfg.t_end = s.t_end ? *s.t_end : default_time_window(s.line, s.length, s.term);
    cfg.dt = s.dt.value_or(0.0);
    return cfg;
}

inline ScenarioResult run_scenario(const Scenario& s) {
    return detail::with_scenario_context(s.name, [&]() -> ScenarioResult {
        s.validate();
        const LineTotals totals = s.totals();

        ScenarioResult result;
        result.row.scenario = s.name;

        const bool needs_delay = s.has(Analysis::closed_form) || s.has(Analysis::energy);
        if (needs_delay) {
            const double z0 = characteristic_impedance(totals);
            const DelayEstimate delay = closed_form_delay(totals.r_total, totals.c_total,
                                                          s.term, s.inductance_aware, z0);
            result.delay = delay;
            if (s.has(Analysis::closed_form)) {
                result.row.tau_d_s = delay.tau_d;
                Termination vm_term = s.term;
                vm_term.load = OpenLoad{};
                const DelayEstimate vm = closed_form_delay(totals.r_total, totals.c_total,
                                                           vm_term, s.inductance_aware, z0);
                result.row.reduction_vs_vm_pct = (vm.tau_d - delay.tau_d) / vm.tau_d * 100.0;
            }
        }

        if (s.has(Analysis::simulate)) {
            SimTrace trace = simulate(ladder_config_for(s));
            const StepMetrics metrics = extract_metrics(trace);
            result.sim_metrics = metrics;
            result.trace = std::move(trace);
            result.row.t50_sim_s = metrics.t50;
            result.row.t63_sim_s = metrics.t63;
            if (result.delay)
                result.rel_diff_sim_vs_model =
                    std::abs(metrics.t63 - result.delay->tau_d) / result.delay->tau_d;
        }

        if (s.has(Analysis::merit)) {
            const DampingReport damping = damping_factor(totals);
            result.damping = damping;
            result.row.xi = damping.xi;
        }

        if (s.has(Analysis::energy)) {
            const double c_int = s.energy.c_int.value_or(totals.c_total);
            const double swing = effective_swing_ratio(s);
            const double e_bit = energy_per_bit(c_int, s.vdd, swing);
            result.energy = throughput_energy(*result.delay, e_bit,
                                              s.energy.bits_per_tau, swing);
            result.row.e_bit_j = result.energy->e_bit;
            result.row.throughput_bps = result.energy->throughput;
        }

        return result;
    });
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Enforce the monotonicity claims attached to a swept variable: delay rises
/// with length and with load resistance, throughput falls with length.
/// Throws PropertyViolation naming the first offending row.
inline void check_sweep_monotonicity(std::span<const ResultRow> rows, SweepVariable var) {
    const bool want_delay_up = (var == SweepVariable::length || var == SweepVariable::r_load);
    const bool want_throughput_down = (var == SweepVariable::length);

    auto fail = [&](std::size_t i, const std::string& what) {
        std::ostringstream os;
        os << what << " at sweep row " << i << " (" << sweep_variable_name(var) << " = "
           << units::format_double(rows[i].swept_value.value_or(0.0)) << ")";
        throw PropertyViolation(os.str());
    };

    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (want_delay_up) {
            if (rows[i].tau_d_s && rows[i - 1].tau_d_s &&
                !(*rows[i].tau_d_s > *rows[i - 1].tau_d_s))
                fail(i, "tau_d is not strictly increasing");
            if (rows[i].t50_sim_s && rows[i - 1].t50_sim_s &&
                !(*rows[i].t50_sim_s > *rows[i - 1].t50_sim_s))
                fail(i, "simulated t50 is not strictly increasing");
        }
        if (want_throughput_down) {
            if (rows[i].throughput_bps && rows[i - 1].throughput_bps &&
                !(*rows[i].throughput_bps < *rows[i - 1].throughput_bps))
                fail(i, "throughput is not strictly decreasing");
        }
    }
}

/// One row per swept value, input order preserved; monotonicity claims are
/// verified before returning.
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<ResultRow> rows;
    rows.reserve(spec.values.size());
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        try {
            const Scenario s = with_sweep_value(spec.base, spec.variable, spec.values[i]);
            ScenarioResult r = run_scenario(s);
            r.row.swept_value = spec.values[i];
            rows.push_back(std::move(r.row));
        } catch (const Error& e) {
            detail::rethrow_with_prefix(e, "sweep row " + std::to_string(i) + ": ");
        }
    }
    check_sweep_monotonicity(rows, spec.variable);
    return rows;
}

// ---------------------------------------------------------------------------
// Result CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view result_csv_header =
    "scenario,swept_value,tau_d_s,t50_sim_s,t63_sim_s,xi,e_bit_J,throughput_bps,"
    "reduction_vs_vm_pct";

inline void emit_csv(std::span<const ResultRow> rows, std::ostream& out) {
    out << result_csv_header << '\n';
    auto cell = [](const std::optional<double>& v) {
        return v ? units::format_double(*v) : std::string();
    };
    for (const auto& r : rows) {
        out << r.scenario << ',' << cell(r.swept_value) << ',' << cell(r.tau_d_s) << ','
            << cell(r.t50_sim_s) << ',' << cell(r.t63_sim_s) << ',' << cell(r.xi) << ','
            << cell(r.e_bit_j) << ',' << cell(r.throughput_bps) << ','
            << cell(r.reduction_vs_vm_pct) << '\n';
    }
}

inline void emit_csv(std::span<const ResultRow> rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    emit_csv(rows, out);
}

inline std::vector<ResultRow> load_result_csv(std::istream& in,
                                              const std::string& source = "<stream>") {
    std::vector<ResultRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    auto cell = [](std::string_view text) -> std::optional<double> {
        if (text.empty()) return std::nullopt;
        return units::parse_number(text);
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = units::trim(line);
        if (csv::is_skippable(sv)) continue;
        if (!header_seen) {
            if (sv != result_csv_header)
                throw ParseError(source, line_no, "unexpected result CSV header");
            header_seen = true;
            continue;
        }
        auto fields = csv::split_fields(sv);
        if (fields.size() != 9)
            throw ParseError(source, line_no, "expected 9 fields, got " +
                                              std::to_string(fields.size()));
        ResultRow r;
        r.scenario = std::string(fields[0]);
        try {
            r.swept_value = cell(fields[1]);
            r.tau_d_s = cell(fields[2]);
            r.t50_sim_s = cell(fields[3]);
            r.t63_sim_s = cell(fields[4]);
            r.xi = cell(fields[5]);
            r.e_bit_j = cell(fields[6]);
            r.throughput_bps = cell(fields[7]);
            r.reduction_vs_vm_pct = cell(fields[8]);
        } catch (const ValidationError& e) {
            throw ParseError(source, line_no, e.what());
        }
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw ParseError(source, line_no, "missing header line");
    return rows;
}

// ---------------------------------------------------------------------------
// Trace / frequency-response CSV
// ---------------------------------------------------------------------------

inline void emit_trace_csv(const SimTrace& trace, std::ostream& out) {
    out << "t_s,v_load_V,i_source_A\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        out << units::format_double(trace.times[i]) << ','
            << units::format_double(trace.v_load[i]) << ','
            << units::format_double(trace.i_source[i]) << '\n';
    }
}

inline void emit_frequency_csv(std::span<const TransferSample> samples, std::ostream& out) {
    out << "omega_rad_s,mag,phase_rad\n";
    for (const auto& s : samples) {
        out << units::format_double(s.s.imag()) << ',' << units::format_double(s.magnitude())
            << ',' << units::format_double(s.phase()) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Table-4 style self-consistency report
// ---------------------------------------------------------------------------

/// One published (length, CM delay) pair, with optional printed VM delay and
/// reduction columns to compare against.
struct Table4Row {
    double length_um = 0.0;
    double cm_delay_ps = 0.0;
    std::optional<double> vm_delay_ps;
    std::optional<double> reduction_pct;
};

struct Table4Entry {
    Table4Row input;
    double r1c1_ps = 0.0;          // inferred 6 * CM delay
    double vm_predicted_ps = 0.0;  // 3 * CM delay
    double reduction_predicted_pct = 200.0 / 3.0;
    std::optional<double> vm_delta_pct;      // |pred - printed| / printed * 100
    std::optional<double> reduction_delta_pp;  // |pred - printed|
};

struct Table4Report {
    std::vector<Table4Entry> entries;
    double max_vm_delta_pct = 0.0;
    double max_reduction_delta_pp = 0.0;

    [[nodiscard]] bool within(double vm_tol_pct, double reduction_tol_pp) const {
        return max_vm_delta_pct <= vm_tol_pct && max_reduction_delta_pp <= reduction_tol_pp;
    }
};

/// The first-order model makes VM/CM delay a pure 1:3 ratio; given a CM
/// column this infers R1C1 = 6*CM per row, predicts the VM column and the
/// reduction percentage, and reports deltas against the printed values.
inline Table4Report reproduce_table4(std::span<const Table4Row> rows) {
    Table4Report report;
    report.entries.reserve(rows.size());
    for (const auto& row : rows) {
        if (!(row.cm_delay_ps > 0.0))
            throw ValidationError("table4 rows need positive CM delays");
        Table4Entry e;
        e.input = row;
        e.r1c1_ps = 6.0 * row.cm_delay_ps;
        e.vm_predicted_ps = 3.0 * row.cm_delay_ps;
        if (row.vm_delay_ps) {
            e.vm_delta_pct = std::abs(e.vm_predicted_ps - *row.vm_delay_ps) /
                             *row.vm_delay_ps * 100.0;
            report.max_vm_delta_pct = std::max(report.max_vm_delta_pct, *e.vm_delta_pct);
        }
        if (row.reduction_pct) {
            e.reduction_delta_pp = std::abs(e.reduction_predicted_pct - *row.reduction_pct);
            report.max_reduction_delta_pp =
                std::max(report.max_reduction_delta_pp, *e.reduction_delta_pp);
        }
        report.entries.push_back(e);
    }
    return report;
}

inline constexpr std::string_view table4_csv_header =
    "length_um,cm_delay_ps,vm_delay_ps,reduction_pct";

inline std::vector<Table4Row> load_table4_csv(std::istream& in,
                                              const std::string& source = "<stream>") {
    std::vector<Table4Row> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = units::trim(line);
        if (csv::is_skippable(sv)) continue;
        if (!header_seen) {
            if (sv != table4_csv_header)
                throw ParseError(source, line_no,
                                 "expected header '" + std::string(table4_csv_header) + "'");
            header_seen = true;
            continue;
        }
        auto fields = csv::split_fields(sv);
        if (fields.size() != 4)
            throw ParseError(source, line_no, "expected 4 fields, got " +
                                              std::to_string(fields.size()));
        Table4Row r;
        try {
            r.length_um = units::parse_number(fields[0]);
            r.cm_delay_ps = units::parse_number(fields[1]);
            if (!fields[2].empty()) r.vm_delay_ps = units::parse_number(fields[2]);
            if (!fields[3].empty()) r.reduction_pct = units::parse_number(fields[3]);
        } catch (const ValidationError& e) {
            throw ParseError(source, line_no, e.what());
        }
        rows.push_back(r);
    }
    if (!header_seen) throw ParseError(source, line_no, "missing header line");
    return rows;
}

inline std::vector<Table4Row> load_table4_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open table file '" + path + "'");
    return load_table4_csv(in, path);
}

} // namespace icm
