// icm - closed-form current-mode interconnect delay model, figures of merit,
// and the RLC-ladder transient oracle, on the command line.
//
//   icm delay <scenario>       dominant-pole delay (plus simulation if the
//                              scenario selects it), side by side
//   icm simulate <scenario>    transient run, step metrics, trace CSV via --out
//   icm sweep <sweepfile>      one result row per swept value, monotonicity
//                              checked (violations exit nonzero)
//   icm merit <scenario>       damping factor, poles, regime, L/R constant
//   icm energy <scenario>      energy per bit, throughput, TEP
//   icm table4 <csv>           VM = 3 x CM self-consistency report
//   icm freq <scenario> --wmin --wmax --points    |H(jw)| samples
//
// Exit codes: 0 ok, 1 validation error, 2 numerical error, 3 property
// violation (e.g. a sweep that fails its monotonicity claim).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icm/icm.hpp"

namespace {

/// Engineering notation for human-readable output (CSV output always uses
/// plain shortest-round-trip decimals).
std::string eng(double value, const char* unit) {
    if (value == 0.0) return std::string("0 ") + unit;
    struct Scale { double factor; const char* prefix; };
    static constexpr Scale scales[] = {
        {1e-15, "f"}, {1e-12, "p"}, {1e-9, "n"}, {1e-6, "u"},
        {1e-3, "m"},  {1.0, ""},    {1e3, "k"},  {1e6, "M"}, {1e9, "G"},
    };
    const double mag = std::abs(value);
    const Scale* best = &scales[5];
    for (const auto& s : scales)
        if (mag >= s.factor * 0.9999999) best = &s;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g %s%s", value / best->factor, best->prefix, unit);
    return buf;
}

std::string pct(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g %%", value);
    return buf;
}

void write_or_throw(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw icm::ValidationError("cannot write '" + path + "'");
    out << content;
}

icm::Scenario load_scenario_for(const std::string& path, icm::Analysis forced,
                                std::optional<int> n_segments_override,
                                bool keep_simulate = false) {
    icm::Scenario s = icm::load_scenario(path);
    const bool had_simulate = s.has(icm::Analysis::simulate);
    s.analyses = {forced};
    if (keep_simulate && had_simulate) s.analyses.insert(icm::Analysis::simulate);
    if (n_segments_override) s.n_segments = *n_segments_override;
    return s;
}

int cmd_delay(const std::string& path, std::optional<int> n_segments,
              std::optional<int> order, const std::string& out_path) {
    icm::Scenario s = load_scenario_for(path, icm::Analysis::closed_form, n_segments,
                                        /*keep_simulate=*/true);
    const icm::ScenarioResult res = icm::run_scenario(s);
    const icm::DelayEstimate& d = *res.delay;

    std::cout << "scenario " << s.name << "\n"
              << "  mode              " << icm::mode_name(d.mode) << "\n"
              << "  inductance_aware  " << (d.inductance_aware ? "true" : "false") << "\n"
              << "  tau_d (t63)       " << eng(d.tau_d, "s") << "\n"
              << "  t50               " << eng(d.t50, "s") << "\n";
    if (res.row.reduction_vs_vm_pct)
        std::cout << "  reduction vs VM   " << pct(*res.row.reduction_vs_vm_pct) << "\n";
    if (res.sim_metrics) {
        std::cout << "  t63 (simulated)   " << eng(res.sim_metrics->t63, "s") << "\n"
                  << "  t50 (simulated)   " << eng(res.sim_metrics->t50, "s") << "\n"
                  << "  rel diff          "
                  << pct(*res.rel_diff_sim_vs_model * 100.0) << "\n";
    }

    if (order) {
        const auto totals = s.totals();
        double r1 = totals.r_total;
        icm::Termination term = s.term;
        if (s.inductance_aware) {
            r1 += 0.36 * icm::characteristic_impedance(totals);
            term.r_source *= 0.65;
        }
        const auto abc = icm::abc_coefficients(r1, totals.c_total, term);
        const auto series = icm::series_coefficients(abc, *order);
        std::cout << "  series k_m        ";
        for (double k : series.coefficients) std::cout << icm::units::format_double(k) << ' ';
        std::cout << "\n";
    }

    if (!out_path.empty()) {
        std::vector<icm::ResultRow> rows{res.row};
        icm::emit_csv(rows, out_path);
    }
    return 0;
}

int cmd_simulate(const std::string& path, std::optional<int> n_segments,
                 const std::string& out_path) {
    icm::Scenario s = load_scenario_for(path, icm::Analysis::simulate, n_segments);
    const icm::ScenarioResult res = icm::run_scenario(s);
    const icm::StepMetrics& m = *res.sim_metrics;

    std::cout << "scenario " << s.name << "\n"
              << "  n_segments   " << s.n_segments << "\n"
              << "  states       " << icm::build_ladder(icm::ladder_config_for(s)).n_states()
              << "\n"
              << "  t50          " << eng(m.t50, "s") << "\n"
              << "  t63          " << eng(m.t63, "s") << "\n"
              << "  overshoot    " << pct(m.overshoot_pct) << "\n"
              << "  final value  " << eng(m.final_value, "V") << "\n"
              << "  settled      " << (m.settled ? "yes" : "no") << "\n";

    if (!out_path.empty()) {
        std::ostringstream os;
        icm::emit_trace_csv(*res.trace, os);
        write_or_throw(out_path, os.str());
    }
    return 0;
}

int cmd_sweep(const std::string& path, std::optional<int> n_segments,
              const std::string& out_path) {
    icm::SweepSpec spec = icm::load_sweep(path);
    if (n_segments) spec.base.n_segments = *n_segments;
    const std::vector<icm::ResultRow> rows = icm::run_sweep(spec);
    if (!out_path.empty()) {
        icm::emit_csv(rows, out_path);
        std::cout << rows.size() << " rows -> " << out_path << "\n";
    } else {
        icm::emit_csv(rows, std::cout);
    }
    return 0;
}

int cmd_merit(const std::string& path, const std::string& out_path) {
    icm::Scenario s = load_scenario_for(path, icm::Analysis::merit, std::nullopt);
    const icm::ScenarioResult res = icm::run_scenario(s);
    const icm::DampingReport& rep = *res.damping;
    const auto totals = s.totals();

    std::cout << "scenario " << s.name << "\n"
              << "  xi           " << icm::units::format_double(rep.xi) << "\n"
              << "  regime       " << icm::regime_name(rep.regime) << "\n";
    if (std::isfinite(rep.omega0))
        std::cout << "  omega0       " << eng(rep.omega0, "rad/s") << "\n"
                  << "  pole1        " << icm::units::format_double(rep.pole1.real()) << " + "
                  << icm::units::format_double(rep.pole1.imag()) << "j\n"
                  << "  pole2        " << icm::units::format_double(rep.pole2.real()) << " + "
                  << icm::units::format_double(rep.pole2.imag()) << "j\n";
    if (s.term.r_source + totals.r_total > 0.0)
        std::cout << "  L/R constant " << eng(icm::inductive_time_constant(
                         totals.l_total, s.term.r_source, totals.r_total), "s")
                  << "\n";

    if (!out_path.empty()) {
        std::vector<icm::ResultRow> rows{res.row};
        icm::emit_csv(rows, out_path);
    }
    return 0;
}

int cmd_energy(const std::string& path, const std::string& out_path) {
    icm::Scenario s = load_scenario_for(path, icm::Analysis::energy, std::nullopt);
    const icm::ScenarioResult res = icm::run_scenario(s);
    const icm::EnergyReport& rep = *res.energy;

    std::cout << "scenario " << s.name << "\n"
              << "  swing ratio  " << icm::units::format_double(rep.swing_ratio) << "\n"
              << "  e_bit        " << eng(rep.e_bit, "J") << "\n"
              << "  throughput   " << eng(rep.throughput, "bit/s") << "\n"
              << "  TEP          " << eng(rep.tep, "W") << "\n";

    if (!out_path.empty()) {
        std::vector<icm::ResultRow> rows{res.row};
        icm::emit_csv(rows, out_path);
    }
    return 0;
}

int cmd_table4(const std::string& path, double vm_tol_pct, double reduction_tol_pp,
               const std::string& out_path) {
    const auto rows = icm::load_table4_csv(path);
    const icm::Table4Report report = icm::reproduce_table4(rows);

    std::cout << "length_um  cm_ps      vm_pred_ps  vm_paper_ps  vm_delta_pct  red_delta_pp\n";
    for (const auto& e : report.entries) {
        std::printf("%-10g %-10g %-11g %-12s %-13s %s\n", e.input.length_um,
                    e.input.cm_delay_ps, e.vm_predicted_ps,
                    e.input.vm_delay_ps ? icm::units::format_double(*e.input.vm_delay_ps).c_str()
                                        : "-",
                    e.vm_delta_pct ? icm::units::format_double(*e.vm_delta_pct).c_str() : "-",
                    e.reduction_delta_pp
                        ? icm::units::format_double(*e.reduction_delta_pp).c_str()
                        : "-");
    }
    std::cout << "max VM delta        " << icm::units::format_double(report.max_vm_delta_pct)
              << " % (tolerance " << vm_tol_pct << " %)\n"
              << "max reduction delta "
              << icm::units::format_double(report.max_reduction_delta_pp) << " pp (tolerance "
              << reduction_tol_pp << " pp)\n";

    if (!out_path.empty()) {
        std::ostringstream os;
        os << "length_um,cm_delay_ps,vm_predicted_ps,vm_delay_ps,vm_delta_pct,"
              "reduction_predicted_pct,reduction_pct,reduction_delta_pp\n";
        auto cell = [](const std::optional<double>& v) {
            return v ? icm::units::format_double(*v) : std::string();
        };
        for (const auto& e : report.entries) {
            os << icm::units::format_double(e.input.length_um) << ','
               << icm::units::format_double(e.input.cm_delay_ps) << ','
               << icm::units::format_double(e.vm_predicted_ps) << ','
               << cell(e.input.vm_delay_ps) << ',' << cell(e.vm_delta_pct) << ','
               << icm::units::format_double(e.reduction_predicted_pct) << ','
               << cell(e.input.reduction_pct) << ',' << cell(e.reduction_delta_pp) << '\n';
        }
        write_or_throw(out_path, os.str());
    }

    if (!report.within(vm_tol_pct, reduction_tol_pp))
        throw icm::PropertyViolation("table4 predictions exceed tolerance");
    std::cout << "PASS\n";
    return 0;
}

int cmd_freq(const std::string& path, double wmin, double wmax, int points,
             const std::string& out_path) {
    icm::Scenario s = load_scenario_for(path, icm::Analysis::exact_freq, std::nullopt);
    if (!(wmin > 0.0) || !(wmax > wmin) || points < 2)
        throw icm::ValidationError("freq needs 0 < wmin < wmax and points >= 2");

    std::vector<double> grid(points);
    const double ratio = wmax / wmin;
    for (int i = 0; i < points; ++i)
        grid[i] = wmin * std::pow(ratio, static_cast<double>(i) / (points - 1));
    grid.back() = wmax;

    const auto totals = s.totals();
    const auto samples = icm::frequency_response(totals.r_total, totals.c_total, s.term, grid);

    std::ostringstream os;
    icm::emit_frequency_csv(samples, os);
    if (!out_path.empty()) {
        write_or_throw(out_path, os.str());
        std::cout << samples.size() << " samples -> " << out_path << "\n";
    } else {
        std::cout << os.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"current-mode interconnect delay model and RLC ladder oracle"};
    app.require_subcommand(1);

    std::string scenario_path, out_path;
    std::optional<int> n_segments, order;

    auto* delay = app.add_subcommand("delay", "closed-form dominant-pole delay");
    delay->add_option("scenario", scenario_path)->required();
    delay->add_option("--order", order, "also print the series coefficients k_0..k_M");
    delay->add_option("--n-segments", n_segments);
    delay->add_option("--out", out_path, "write a result CSV row");

    auto* simulate = app.add_subcommand("simulate", "transient ladder simulation");
    simulate->add_option("scenario", scenario_path)->required();
    simulate->add_option("--n-segments", n_segments);
    simulate->add_option("--out", out_path, "write the trace CSV");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("sweepfile", scenario_path)->required();
    sweep->add_option("--n-segments", n_segments);
    sweep->add_option("--out", out_path, "write the result CSV");

    auto* merit = app.add_subcommand("merit", "damping factor and poles");
    merit->add_option("scenario", scenario_path)->required();
    merit->add_option("--out", out_path);

    auto* energy = app.add_subcommand("energy", "energy per bit and throughput");
    energy->add_option("scenario", scenario_path)->required();
    energy->add_option("--out", out_path);

    double vm_tol = 1.0, reduction_tol = 0.3;
    auto* table4 = app.add_subcommand("table4", "VM = 3 x CM self-consistency report");
    table4->add_option("csv", scenario_path)->required();
    table4->add_option("--vm-tol", vm_tol, "VM delta tolerance, percent");
    table4->add_option("--reduction-tol", reduction_tol, "reduction delta tolerance, pp");
    table4->add_option("--out", out_path);

    double wmin = 1e6, wmax = 1e12;
    int points = 200;
    auto* freq = app.add_subcommand("freq", "exact frequency response");
    freq->add_option("scenario", scenario_path)->required();
    freq->add_option("--wmin", wmin, "rad/s")->required();
    freq->add_option("--wmax", wmax, "rad/s")->required();
    freq->add_option("--points", points)->required();
    freq->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (delay->parsed()) return cmd_delay(scenario_path, n_segments, order, out_path);
        if (simulate->parsed()) return cmd_simulate(scenario_path, n_segments, out_path);
        if (sweep->parsed()) return cmd_sweep(scenario_path, n_segments, out_path);
        if (merit->parsed()) return cmd_merit(scenario_path, out_path);
        if (energy->parsed()) return cmd_energy(scenario_path, out_path);
        if (table4->parsed()) return cmd_table4(scenario_path, vm_tol, reduction_tol, out_path);
        if (freq->parsed()) return cmd_freq(scenario_path, wmin, wmax, points, out_path);
    } catch (const icm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
