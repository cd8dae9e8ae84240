#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "icm/analytic.hpp"
#include "icm/ladder.hpp"

using namespace icm;
using Catch::Approx;

namespace {

LinePerUnit line_of(double r, double l, double c) {
    LinePerUnit p;
    p.r_per_m = r;
    p.l_per_m = l;
    p.c_per_m = c;
    return p;
}

Termination resistive(double r_source, double r_load) {
    Termination t;
    t.r_source = r_source;
    t.load = ResistiveLoad{r_load};
    return t;
}

Termination open_term(double r_source = 0.0) {
    Termination t;
    t.r_source = r_source;
    t.load = OpenLoad{};
    return t;
}

Termination short_term(double r_source = 0.0) {
    Termination t;
    t.r_source = r_source;
    t.load = ShortLoad{};
    return t;
}

Termination rescap(double r_source, double r_load, double c_load) {
    Termination t;
    t.r_source = r_source;
    t.load = ResCapLoad{r_load, c_load};
    return t;
}

/// Config over line totals: per-unit values are totals divided by a 1mm span.
LadderConfig config_for(double r_total, double l_total, double c_total, Termination term,
                        int n, double t_end, double dt = 0.0) {
    LadderConfig cfg;
    cfg.length = 1e-3;
    cfg.line = line_of(r_total / cfg.length, l_total / cfg.length, c_total / cfg.length);
    cfg.n_segments = n;
    cfg.term = term;
    cfg.vdd = 1.0;
    cfg.t_end = t_end;
    cfg.dt = dt;
    return cfg;
}

/// Dense Gaussian elimination with partial pivoting; the oracle for the
/// tridiagonal solver.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int k = r + 1; k < n; ++k) acc -= a[r][k] * x[k];
        x[r] = acc / a[r][r];
    }
    return x;
}

} // namespace

TEST_CASE("tridiagonal solver matches dense elimination", "[ladder][solver]") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> size(1, 12);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = size(rng);
        std::vector<double> lower(std::max(0, n - 1)), diag(n), upper(std::max(0, n - 1));
        for (auto& v : lower) v = val(rng);
        for (auto& v : upper) v = val(rng);
        // mix of dominant and weak diagonals so pivoting actually matters
        for (auto& v : diag) v = (trial % 3 == 0) ? 0.01 * val(rng) : 2.0 * val(rng) + 3.0;

        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
            dense[i][i] = diag[i];
            if (i > 0) dense[i][i - 1] = lower[i - 1];
            if (i + 1 < n) dense[i][i + 1] = upper[i];
        }
        std::vector<double> rhs(n);
        for (auto& v : rhs) v = val(rng);

        TridiagonalSolver solver;
        solver.factor(lower, diag, upper);
        std::vector<double> x = rhs;
        solver.solve(x);
        const auto x_ref = dense_solve(dense, rhs);
        for (int i = 0; i < n; ++i) CHECK(x[i] == Approx(x_ref[i]).margin(1e-9));
    }
}

TEST_CASE("ladder construction audit", "[ladder][build]") {
    const double r = 1e3, l = 10e-9, c = 1e-12;

    SECTION("N=1 rc section") {
        const auto sys = build_ladder(config_for(r, 0.0, c, open_term(100.0), 1, 1e-9));
        CHECK(sys.n_states() == 1);
        CHECK_FALSE(sys.has_inductors);
    }

    SECTION("N=1 with inductance is the lumped RLC circuit") {
        const auto sys = build_ladder(config_for(r, l, c, open_term(), 1, 1e-9));
        CHECK(sys.n_states() == 2);
        CHECK(sys.has_inductors);
    }

    SECTION("N=50 rlc ladder state counts") {
        CHECK(build_ladder(config_for(r, l, c, open_term(), 50, 1e-9)).n_states() == 100);
        CHECK(build_ladder(config_for(r, l, c, resistive(0.0, 50.0), 50, 1e-9)).n_states() ==
              100);
        // a parallel load capacitor shares the final node voltage, so it
        // merges into that node instead of adding a state
        CHECK(build_ladder(config_for(r, l, c, rescap(0.0, 30.0, 1e-14), 50, 1e-9))
                  .n_states() == 100);
        CHECK(build_ladder(config_for(r, l, c, short_term(), 50, 1e-9)).n_states() == 99);
        // R||C with zero resistance degenerates to a short
        CHECK(build_ladder(config_for(r, l, c, rescap(0.0, 0.0, 1e-14), 50, 1e-9))
                  .n_states() == 99);
    }

    SECTION("zero series impedance collapses to one capacitor") {
        const auto sys = build_ladder(config_for(0.0, 0.0, c, resistive(100.0, 500.0),
                                                 50, 1e-9));
        CHECK(sys.collapsed);
        CHECK(sys.n_states() == 1);
        CHECK_THROWS_AS(build_ladder(config_for(0.0, 0.0, c, resistive(0.0, 500.0), 50, 1e-9)),
                        ValidationError);
    }

    SECTION("config validation") {
        CHECK_THROWS_AS(build_ladder(config_for(r, 0.0, c, open_term(), 0, 1e-9)),
                        ValidationError);
        CHECK_THROWS_AS(build_ladder(config_for(r, 0.0, c, open_term(), 1, 0.0)),
                        ValidationError);
        // dt too coarse relative to t_end
        CHECK_THROWS_AS(build_ladder(config_for(r, 0.0, c, open_term(), 1, 1e-9, 1e-10)),
                        ValidationError);
    }
}

TEST_CASE("single rc section matches the textbook exponential", "[ladder][sim]") {
    // R_S = R_T = 100 ohm, C_T = 1 pF: tau = 200 ps
    const double tau = 200e-12;
    auto cfg = config_for(100.0, 0.0, 1e-12, open_term(100.0), 1, 10.0 * tau);
    const SimTrace trace = simulate(cfg);
    REQUIRE(trace.times.size() == trace.v_load.size());
    REQUIRE(trace.times.size() == trace.i_source.size());

    for (std::size_t i = 0; i < trace.times.size(); i += 500) {
        const double expected = 1.0 - std::exp(-trace.times[i] / tau);
        CHECK(trace.v_load[i] == Approx(expected).margin(1e-3));
    }
    CHECK(trace.settled);

    // source current starts at Vdd/(R_S+R_T) and decays to zero
    CHECK(trace.i_source.front() == Approx(1.0 / 200.0).epsilon(1e-9));
    CHECK(trace.i_source.back() == Approx(0.0).margin(1e-6));

    const auto metrics = extract_metrics(trace);
    CHECK(metrics.t50 == Approx(std::log(2.0) * tau).epsilon(2e-3));
    CHECK(metrics.t63 == Approx(tau).epsilon(2e-3));
}

TEST_CASE("degenerate line settles to the source/load divider", "[ladder][sim]") {
    // R_T = L_T = 0 with a tiny C_T: v_load -> Vdd * R_L/(R_S + R_L) = 5/6.
    // Node time constant is ~83 fs, so 2.5 ps is deep settling.
    auto cfg = config_for(0.0, 0.0, 1e-15, resistive(100.0, 500.0), 10, 2.5e-12);
    const SimTrace trace = simulate(cfg);
    CHECK(trace.v_load.back() == Approx(5.0 / 6.0).epsilon(1e-9));
    CHECK(trace.settled);
}

TEST_CASE("overdamped distributed line tracks the closed form", "[ladder][sim]") {
    const double r_total = 1e3, c_total = 1e-12;
    const Termination term = resistive(100.0, 1e3);
    const double tau_model = closed_form_delay(r_total, c_total, term).tau_d;

    for (int n : {10, 50, 200}) {
        auto cfg = config_for(r_total, 0.0, c_total, term, n, 12e-9);
        const auto metrics = extract_metrics(simulate(cfg));
        INFO("N = " << n);
        CHECK(metrics.settled);
        CHECK(std::abs(metrics.t63 - tau_model) / tau_model < 0.10);
    }
}

TEST_CASE("lumped damping regimes show the right overshoot", "[ladder][sim][damping]") {
    const double l = 25e-9, c = 1e-12;
    const double w0 = 1.0 / std::sqrt(l * c);

    auto run = [&](double xi, double t_end) {
        const double r = 2.0 * xi * std::sqrt(l / c);
        auto cfg = config_for(r, l, c, open_term(), 1, t_end);
        return extract_metrics(simulate(cfg));
    };

    SECTION("xi = 0.316 rings at about 35%") {
        const auto m = run(0.31623, 6.0 / (0.31623 * w0) * 3.0);
        const double predicted =
            std::exp(-M_PI * 0.31623 / std::sqrt(1.0 - 0.31623 * 0.31623)) * 100.0;
        CHECK(m.overshoot_pct > 5.0);
        CHECK(m.overshoot_pct == Approx(predicted).margin(3.0));
    }

    SECTION("critical damping has no overshoot") {
        const auto m = run(1.0, 3e-9);
        CHECK(m.overshoot_pct < 0.1);
        CHECK(m.settled);
    }

    SECTION("xi = 3 overdamped, monotone") {
        const auto m = run(3.0, 10e-9);
        CHECK(m.overshoot_pct < 0.1);
    }

    SECTION("second-order theory across the underdamped range") {
        for (double xi : {0.3, 0.5, 0.65}) {
            const double t_end = 14.0 / (xi * w0);
            const auto m = run(xi, t_end);
            const double predicted =
                std::exp(-M_PI * xi / std::sqrt(1.0 - xi * xi)) * 100.0;
            INFO("xi = " << xi);
            CHECK(m.overshoot_pct > 5.0);
            CHECK(m.overshoot_pct == Approx(predicted).margin(3.0));
        }
    }
}

TEST_CASE("deeply underdamped traces trip the divergence guard", "[ladder][sim]") {
    // xi = 0.1 overshoots ~73%, beyond the 1.5*Vdd corridor
    const double l = 25e-9, c = 1e-12;
    const double r = 2.0 * 0.1 * std::sqrt(l / c);
    auto cfg = config_for(r, l, c, open_term(), 1, 20e-9);
    CHECK_THROWS_AS(simulate(cfg), NumericalError);
}

TEST_CASE("mesh and step-size convergence", "[ladder][sim][convergence]") {
    const Termination term = resistive(100.0, 1e3);

    SECTION("t63 moves under 1% from N=200 to N=400") {
        auto cfg200 = config_for(1e3, 10e-9, 1e-12, term, 200, 12e-9);
        auto cfg400 = cfg200;
        cfg400.n_segments = 400;
        const double t63_200 = extract_metrics(simulate(cfg200)).t63;
        const double t63_400 = extract_metrics(simulate(cfg400)).t63;
        CHECK(std::abs(t63_200 - t63_400) / t63_400 < 0.01);
    }

    SECTION("halving dt moves t50 under 0.2%") {
        auto cfg = config_for(1e3, 0.0, 1e-12, term, 100, 12e-9, 12e-13);
        auto cfg_half = cfg;
        cfg_half.dt = 6e-13;
        const double t50_a = extract_metrics(simulate(cfg)).t50;
        const double t50_b = extract_metrics(simulate(cfg_half)).t50;
        CHECK(std::abs(t50_a - t50_b) / t50_b < 0.002);
    }
}

TEST_CASE("near-short load is insensitive to small load capacitance", "[ladder][sim][fig10]") {
    // C_T = 2 pF line behind an almost-ideal current-mode termination
    const double r_total = 1e3, c_total = 2e-12, r_sense = 30.0;
    auto t50_for = [&](double c_load) {
        auto cfg = config_for(r_total, 0.0, c_total, rescap(0.0, r_sense, c_load), 200,
                              30e-9);
        return extract_metrics(simulate(cfg)).t50;
    };

    const double base = t50_for(10e-15);
    double lo = base, hi = base;
    for (double cl : {20e-15, 40e-15}) {
        const double t = t50_for(cl);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    CHECK((hi - lo) / lo < 0.02);

    // a load comparable to the line itself (10x C_T) is very visible
    const double heavy = t50_for(10.0 * c_total);
    CHECK(heavy > 1.2 * base);
}

TEST_CASE("delay is monotone in length and load resistance", "[ladder][sim]") {
    SECTION("doubling d increases t50") {
        LadderConfig cfg;
        cfg.line = line_of(1e6, 0.0, 1e-9);
        cfg.term = resistive(100.0, 1e3);
        cfg.n_segments = 100;
        cfg.vdd = 1.0;
        double prev = 0.0;
        for (double d : {0.5e-3, 1e-3, 2e-3, 4e-3}) {
            cfg.length = d;
            cfg.t_end = default_time_window(cfg.line, d, cfg.term);
            const double t50 = extract_metrics(simulate(cfg)).t50;
            CHECK(t50 > prev);
            prev = t50;
        }
    }

    SECTION("t50 strictly increasing over four decades of R_L") {
        double prev = 0.0;
        for (double rl : {10.0, 1e2, 1e3, 1e4}) {
            auto cfg = config_for(1e3, 0.0, 1e-12, resistive(100.0, rl), 100, 25e-9);
            const double t50 = extract_metrics(simulate(cfg)).t50;
            INFO("R_L = " << rl);
            CHECK(t50 > prev);
            prev = t50;
        }
    }
}

TEST_CASE("short load produces a flat zero load voltage", "[ladder][sim]") {
    auto cfg = config_for(1e3, 10e-9, 1e-12, short_term(100.0), 50, 10e-9);
    const SimTrace trace = simulate(cfg);
    for (std::size_t i = 0; i < trace.v_load.size(); i += 100)
        CHECK(trace.v_load[i] == 0.0);
    CHECK(trace.settled);  // settles to the expected 0
    CHECK_THROWS_AS(extract_metrics(trace), NumericalError);

    // the source current still carries the transient
    CHECK(trace.i_source.back() == Approx(1.0 / 1100.0).epsilon(1e-3));
}

TEST_CASE("single rc section into a short has no states at all", "[ladder][sim]") {
    auto cfg = config_for(100.0, 0.0, 1e-12, short_term(100.0), 1, 1e-9);
    CHECK(build_ladder(cfg).n_states() == 0);
    const SimTrace trace = simulate(cfg);
    // purely resistive: v_load pinned at 0, i_source constant at Vdd/(R_S+R_T)
    CHECK(trace.v_load.back() == 0.0);
    CHECK(trace.i_source.front() == Approx(1.0 / 200.0));
    CHECK(trace.i_source.back() == Approx(1.0 / 200.0));
}

TEST_CASE("matched lossless line stays bounded and settles", "[ladder][sim]") {
    const double l_total = 25e-9, c_total = 1e-12;
    const double z0 = std::sqrt(l_total / c_total);
    auto cfg = config_for(0.0, l_total, c_total, open_term(z0), 200, 10e-9);
    const SimTrace trace = simulate(cfg);  // divergence guard must not trip
    CHECK(trace.settled);
    CHECK(trace.v_load.back() == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("unsettled runs are reported", "[ladder][sim]") {
    // t_end of 2 tau leaves ~14% of the swing outstanding
    auto cfg = config_for(100.0, 0.0, 1e-12, open_term(100.0), 1, 2.0 * 200e-12);
    const SimTrace trace = simulate(cfg);
    CHECK_FALSE(trace.settled);
    CHECK_FALSE(extract_metrics(trace).settled);
}

TEST_CASE("trace times are strictly increasing", "[ladder][sim]") {
    auto cfg = config_for(1e3, 0.0, 1e-12, open_term(100.0), 10, 10e-9);
    const SimTrace trace = simulate(cfg);
    for (std::size_t i = 1; i < trace.times.size(); ++i)
        CHECK(trace.times[i] > trace.times[i - 1]);
}

TEST_CASE("synthetic exponential trace metrics", "[ladder][metrics]") {
    const double tau = 1e-9, dt = 1e-12;
    SimTrace trace;
    for (int k = 0; k <= 10000; ++k) {
        const double t = k * dt;
        trace.times.push_back(t);
        trace.v_load.push_back(1.0 - std::exp(-t / tau));
        trace.i_source.push_back(0.0);
    }
    trace.settled = true;

    const auto m = extract_metrics(trace);
    CHECK(m.t50 == Approx(0.6931e-9).epsilon(1e-3));
    CHECK(m.t63 == Approx(1.0e-9).epsilon(1e-3));
    CHECK(m.overshoot_pct == 0.0);
}

TEST_CASE("constant-zero trace cannot be measured", "[ladder][metrics]") {
    SimTrace trace;
    for (int k = 0; k <= 100; ++k) {
        trace.times.push_back(k * 1e-12);
        trace.v_load.push_back(0.0);
        trace.i_source.push_back(0.0);
    }
    CHECK_THROWS_AS(extract_metrics(trace), NumericalError);
}

TEST_CASE("simulation run counter increments", "[ladder]") {
    reset_simulation_run_count();
    CHECK(simulation_run_count() == 0);
    auto cfg = config_for(100.0, 0.0, 1e-12, open_term(100.0), 1, 2e-9);
    (void)simulate(cfg);
    CHECK(simulation_run_count() == 1);
}
