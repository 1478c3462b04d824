#include "dimerloops/constants.hpp"
#include "dimerloops/green.hpp"
#include "dimerloops/rng.hpp"
#include "dimerloops/spectral.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace dimerloops;

TEST_CASE("upsilon kernel: pinned values")
{
    REQUIRE(upsilon_fourier(4, 2, 2) == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(upsilon_closed_form(4, 2, 2) == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(upsilon_fourier(4, 2, 0) == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(upsilon_closed_form(4, 2, 0) == Catch::Approx(4.0).margin(1e-12));
    // csc branch: L = 6, x1 = 2 -> -6 cos(pi) csc(pi/6) = 12
    REQUIRE(upsilon_closed_form(6, 2, 2) == Catch::Approx(12.0).margin(1e-12));
    REQUIRE(upsilon_fourier(6, 2, 2) == Catch::Approx(12.0).margin(1e-12));
    // L = 8, d = 3, x1 = 4 -> -64 cot(3 pi / 8)
    double expected = -64.0 / std::tan(3.0 * std::numbers::pi / 8.0);
    REQUIRE(upsilon_fourier(8, 3, 4) == Catch::Approx(expected).margin(1e-9));
    REQUIRE(upsilon_closed_form(8, 3, 4) == Catch::Approx(expected).margin(1e-9));
}

TEST_CASE("upsilon: fourier sum equals the closed form on both branches")
{
    for (int L : {4, 6, 8, 12, 16, 32, 64}) {
        for (int d : {2, 3}) {
            for (int x1 = 0; x1 < L; x1 += 2) {
                double f = upsilon_fourier(L, d, x1);
                double c = upsilon_closed_form(L, d, x1);
                REQUIRE(std::fabs(f - c) <= 1e-9);
            }
        }
    }
}

TEST_CASE("upsilon rejects odd axis points")
{
    REQUIRE_THROWS_AS(upsilon_fourier(8, 2, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(upsilon_closed_form(8, 2, -1), std::invalid_argument);
    REQUIRE_THROWS_AS(upsilon_fourier(5, 2, 2), std::invalid_argument);
}

TEST_CASE("telescoped axis sum equals the direct upsilon-weighted sum")
{
    auto rng = make_engine(2024);
    for (int L : {8, 16, 32}) {
        const int half = L / 2;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> g(half);
            for (int i = 0; i <= half / 2; ++i) {
                double v = 2.0 * uniform01(rng) - 1.0;
                g[i] = v;
                g[(half - i) % half] = v;
            }
            double direct = direct_upsilon_axis_sum(L, g);
            double tele = telescoped_axis_sum(L, g);
            REQUIRE(std::fabs(direct - tele) <= 1e-9);
        }
    }
}

TEST_CASE("telescoped axis sum: pinned cases")
{
    // g == 0 gives 0
    std::vector<double> zero(4, 0.0);
    REQUIRE(telescoped_axis_sum(8, zero) == 0.0);
    // indicator of x1 = 0 at L = 8 isolates the boundary term cot(pi/8)/8
    std::vector<double> ind(4, 0.0);
    ind[0] = 1.0;
    REQUIRE(telescoped_axis_sum(8, ind) ==
            Catch::Approx(1.0 / std::tan(std::numbers::pi / 8.0) / 8.0).margin(1e-12));
    REQUIRE(direct_upsilon_axis_sum(8, ind) == Catch::Approx(telescoped_axis_sum(8, ind)).margin(1e-12));
    // constant g: both routes agree
    std::vector<double> ones(4, 1.0);
    REQUIRE(std::fabs(direct_upsilon_axis_sum(8, ones) - telescoped_axis_sum(8, ones)) <= 1e-12);

    std::vector<double> bad{1.0, 2.0, 0.0, 0.0};
    REQUIRE_THROWS_AS(telescoped_axis_sum(8, bad), std::invalid_argument);
    REQUIRE_THROWS_AS(direct_upsilon_axis_sum(8, bad), std::invalid_argument);
}

TEST_CASE("leibniz tail: positive terms, decreasing error, tight limit")
{
    // cot is decreasing on (0, pi), so every summand of S_m is positive and
    // the limit is the Leibniz tail (4 - pi)/(4 pi) = +0.06831, not its negative
    REQUIRE(kLeibnizTailLimit == Catch::Approx(0.0683098861837907).margin(1e-15));
    auto rep = leibniz_limit_check(2000);
    REQUIRE(rep.errors_decreasing);
    REQUIRE(rep.final_error < 0.01);
    REQUIRE(rep.final_error < 1e-6);
    for (const auto& e : rep.entries) REQUIRE(e.s_m > 0.0);
    double err200 = std::fabs(leibniz_tail_sum(200) - kLeibnizTailLimit);
    double err2000 = std::fabs(leibniz_tail_sum(2000) - kLeibnizTailLimit);
    REQUIRE(err2000 < err200);
}

TEST_CASE("r_d quadrature: Watson bracket and monotonicity")
{
    auto r3 = r_d_quadrature(3);
    REQUIRE(r3.value > 0.51);
    REQUIRE(r3.value < 0.52);
    // Watson's evaluation, as a regression pin
    REQUIRE(r3.value == Catch::Approx(0.5163860591).margin(1e-6));
    REQUIRE(r3.error_bound < 1e-6);

    double prev = r3.value;
    for (int d : {4, 5, 6}) {
        auto rd = r_d_quadrature(d);
        REQUIRE(rd.value < prev);
        REQUIRE(rd.value > 0.0);
        prev = rd.value;
    }
    REQUIRE_THROWS_AS(r_d_quadrature(2), std::invalid_argument);
}

TEST_CASE("r_d random walk agrees with quadrature within combined errors")
{
    auto quad = r_d_quadrature(3);
    auto mc = r_d_random_walk(3, 200000, 40000, 99);
    double combined = 3.0 * mc.std_error + mc.truncation_bias_bound;
    REQUIRE(std::fabs(mc.value - quad.value) <= combined);
    REQUIRE(mc.value > 0.50);
    REQUIRE(mc.value < 0.53);

    auto none = r_d_random_walk(3, 1000, 0, 1);
    REQUIRE(none.value == 0.0);
}

TEST_CASE("bound constants at d=3")
{
    auto rd = r_d_quadrature(3);
    // C > 0 exactly for N in {1..6}, C <= 0 from N = 7 on
    for (int N = 1; N <= 6; ++N) {
        auto b = bound_constants_from_rd(3, N, 0.0, rd);
        REQUIRE(b.C > 0.0);
        REQUIRE(b.in_range);
    }
    for (int N = 7; N <= 10; ++N) {
        auto b = bound_constants_from_rd(3, N, 0.0, rd);
        REQUIRE(b.C <= 0.0);
        REQUIRE_FALSE(b.in_range);
    }

    auto b2 = bound_constants_from_rd(3, 2, 0.0, rd);
    REQUIRE(b2.C == Catch::Approx(0.050432).margin(2e-4));
    REQUIRE(b2.rho_threshold == Catch::Approx(0.70098).margin(2e-3));
    REQUIRE(b2.theorem1_upper == Catch::Approx(11.0 / 36.0).margin(1e-15));
    REQUIRE(b2.theorem1_lower ==
            Catch::Approx(std::pow((1.0 - rd.value / 2.0) / 6.0, 2)).margin(1e-15));
    REQUIRE(b2.i_limit == Catch::Approx(rd.value / 12.0).margin(1e-15));
    REQUIRE(b2.n_range_max == Catch::Approx(6.688).margin(1e-2));

    // C vanishes exactly at the rho threshold
    auto bt = bound_constants_from_rd(3, 2, b2.rho_threshold, rd);
    REQUIRE(std::fabs(bt.C) < 1e-15);
    REQUIRE_FALSE(bt.in_range);

    // out-of-range inputs are reported, not rejected
    auto loose = bound_constants_from_rd(3, 2, 0.9, rd);
    REQUIRE(loose.C < 0.0);
    REQUIRE_FALSE(loose.in_range);

    REQUIRE_THROWS_AS(bound_constants_from_rd(3, 0, 0.0, rd), std::invalid_argument);
    REQUIRE_THROWS_AS(bound_constants_from_rd(3, 2, -0.1, rd), std::invalid_argument);
}

TEST_CASE("infrared right-hand side assembly")
{
    // all-zero table with I = 0
    std::vector<double> zeros(4, 0.0);
    REQUIRE(infrared_rhs(8, 3, 0.0, zeros, 0.0) == 0.0);
    // only G(e1) = g: the axis sum vanishes, leaving g/2
    REQUIRE(infrared_rhs(8, 3, 0.3, zeros, 0.0) == Catch::Approx(0.15).margin(1e-15));
    // I shifts the bracket by -I/2
    REQUIRE(infrared_rhs(8, 3, 0.3, zeros, 0.1) == Catch::Approx(0.10).margin(1e-15));
    std::vector<double> incomplete(3, 0.0);
    REQUIRE_THROWS_AS(infrared_rhs(8, 3, 0.0, incomplete, 0.0), std::invalid_argument);
}
