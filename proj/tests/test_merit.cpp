#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "icm/merit.hpp"

using namespace icm;
using Catch::Approx;

TEST_CASE("damping factor and poles", "[merit]") {
    SECTION("critical damping by construction: R = 2 sqrt(L/C)") {
        const auto rep = damping_factor({200.0, 10e-9, 1e-12, 1.0});
        CHECK(rep.xi == Approx(1.0).epsilon(1e-12));
        CHECK(rep.regime == DampingRegime::critical);
        CHECK(rep.pole1.real() == Approx(-rep.omega0));
        CHECK(rep.pole1.imag() == 0.0);
        CHECK(rep.pole1 == rep.pole2);
    }

    SECTION("underdamped hand arithmetic: (100/2) sqrt(1e-12/25e-9)") {
        const auto rep = damping_factor({100.0, 25e-9, 1e-12, 1.0});
        CHECK(rep.xi == Approx(0.31623).epsilon(1e-4));
        CHECK(rep.regime == DampingRegime::underdamped);
        CHECK(rep.pole1.real() < 0.0);
        CHECK(rep.pole1.imag() > 0.0);
        CHECK(rep.pole2 == std::conj(rep.pole1));
    }

    SECTION("overdamped hand arithmetic: (1e4/2) sqrt(1e-12/1e-9)") {
        const auto rep = damping_factor({10e3, 1e-9, 1e-12, 1.0});
        CHECK(rep.xi == Approx(158.1).epsilon(1e-3));
        CHECK(rep.regime == DampingRegime::overdamped);
        CHECK(rep.pole1.imag() == 0.0);
        CHECK(rep.pole1.real() < 0.0);
        CHECK(rep.pole2.real() < rep.pole1.real());
    }

    SECTION("zero inductance reports the infinite-xi sentinel") {
        const auto rep = damping_factor({1000.0, 0.0, 1e-12, 1.0});
        CHECK(std::isinf(rep.xi));
        CHECK(rep.regime == DampingRegime::overdamped);
        CHECK(rep.pole1.real() == Approx(-1.0 / (1000.0 * 1e-12)));
    }

    SECTION("pole product and sum identities across four decades of xi") {
        std::mt19937 rng(29);
        std::uniform_real_distribution<double> logxi(-1.0, 2.0);
        for (int i = 0; i < 500; ++i) {
            const double xi = std::pow(10.0, logxi(rng));
            const double l = 10e-9, c = 1e-12;
            const double r = 2.0 * xi * std::sqrt(l / c);
            const auto rep = damping_factor({r, l, c, 1.0});
            const auto product = rep.pole1 * rep.pole2;
            const auto sum = rep.pole1 + rep.pole2;
            const double w0sq = rep.omega0 * rep.omega0;
            CHECK(std::abs(product.real() - w0sq) / w0sq < 1e-10);
            CHECK(std::abs(product.imag()) / w0sq < 1e-10);
            CHECK(std::abs(sum.real() + 2.0 * rep.xi * rep.omega0) /
                      (2.0 * rep.xi * rep.omega0) <
                  1e-10);
        }
    }
}

TEST_CASE("inductive time constant", "[merit]") {
    // 19.37 nH against 2.5 kohm + 220 ohm: about 7 ps
    CHECK(inductive_time_constant(19.37e-9, 2500.0, 220.0) == Approx(7.12e-12).epsilon(1e-3));
    CHECK(std::abs(inductive_time_constant(19.37e-9, 2500.0, 220.0) - 7e-12) / 7e-12 < 0.05);
    CHECK(inductive_time_constant(0.0, 2500.0, 220.0) == 0.0);
    CHECK(inductive_time_constant(129.129e-9, 2500.0, 220.0) == Approx(47.47e-12).epsilon(1e-3));
    CHECK_THROWS_AS(inductive_time_constant(1e-9, 0.0, 0.0), ValidationError);
}

TEST_CASE("energy per bit", "[merit]") {
    CHECK(energy_per_bit(90e-15, 1.0, 1.0) == Approx(0.045e-12).epsilon(1e-12));
    CHECK(energy_per_bit(90e-15, 1.0, cm_swing_ratio) == Approx(0.015e-12).epsilon(1e-12));
    CHECK(energy_per_bit(0.0, 1.0, 1.0) == 0.0);

    SECTION("quadratic in Vdd") {
        const double e1 = energy_per_bit(90e-15, 1.0, 1.0);
        const double e2 = energy_per_bit(90e-15, 2.0, 1.0);
        CHECK(e2 == Approx(4.0 * e1).epsilon(1e-12));
    }

    SECTION("swing ratio bounds") {
        CHECK_THROWS_AS(energy_per_bit(90e-15, 1.0, 0.0), ValidationError);
        CHECK_THROWS_AS(energy_per_bit(90e-15, 1.0, 1.5), ValidationError);
        CHECK_THROWS_AS(energy_per_bit(-1e-15, 1.0, 1.0), ValidationError);
    }
}

TEST_CASE("throughput-energy product", "[merit]") {
    DelayEstimate delay;
    delay.tau_d = 1e-9;
    delay.t50 = M_LN2 * 1e-9;
    delay.t63 = 1e-9;

    const auto rep = throughput_energy(delay, 0.045e-12);
    CHECK(rep.throughput == Approx(1e9));
    CHECK(rep.tep == Approx(45e-6));  // 45 uW

    SECTION("halving throughput halves tep at fixed e_bit") {
        DelayEstimate slower = delay;
        slower.tau_d = 2e-9;
        const auto rep2 = throughput_energy(slower, 0.045e-12);
        CHECK(rep2.throughput == Approx(0.5e9));
        CHECK(rep2.tep == Approx(rep.tep / 2.0));
    }

    SECTION("bits-per-tau multiplier") {
        const auto rep2 = throughput_energy(delay, 0.045e-12, 2.0);
        CHECK(rep2.throughput == Approx(2e9));
    }

    SECTION("preconditions") {
        DelayEstimate zero;
        CHECK_THROWS_AS(throughput_energy(zero, 1e-12), ValidationError);
        CHECK_THROWS_AS(throughput_energy(delay, -1.0), ValidationError);
    }
}
