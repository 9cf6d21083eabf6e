#include <doctest.h>

#include <cmath>

#include "nclab/special.hpp"
#include "oracles.hpp"

namespace sp = nclab::special;

TEST_CASE("erf against series and quadrature oracles") {
    for (double x : {0.0, 0.1, 0.46, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        const double series = oracles::erf_series(x);
        if (x <= 2.0) {
            CHECK(sp::erf(x) == doctest::Approx(series).epsilon(1e-12));
        }
        const double quad = 2.0 / std::sqrt(M_PI) *
                            oracles::adaptive_simpson(
                                [](double t) { return std::exp(-t * t); }, 0.0, x);
        CHECK(sp::erf(x) == doctest::Approx(quad).epsilon(1e-10));
        CHECK(sp::erf(-x) == doctest::Approx(-sp::erf(x)).epsilon(1e-15));
        CHECK(sp::erfc(x) == doctest::Approx(1.0 - sp::erf(x)).epsilon(1e-12));
    }
    CHECK(sp::erf(6.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sp::erfc(6.0) < 1e-15);
    CHECK(sp::erfc(6.0) > 0.0);
}

TEST_CASE("normal cdf landmarks") {
    CHECK(sp::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sp::normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(sp::normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
}

TEST_CASE("lgamma against known values") {
    CHECK(sp::lgamma(1.0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(sp::lgamma(2.0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(sp::lgamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-13));
    CHECK(sp::lgamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-13));
}

TEST_CASE("reg_inc_beta closed forms") {
    // I_x(1, b) = 1 - (1-x)^b; I_x(a, 1) = x^a.
    for (double x : {0.1, 0.35, 0.8}) {
        CHECK(sp::reg_inc_beta(1.0, 2.5, x) ==
              doctest::Approx(1.0 - std::pow(1.0 - x, 2.5)).epsilon(1e-12));
        CHECK(sp::reg_inc_beta(3.0, 1.0, x) ==
              doctest::Approx(std::pow(x, 3.0)).epsilon(1e-12));
    }
    CHECK(sp::reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(sp::reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("t and F p-values match density quadrature on a pinned grid") {
    for (double df : {1.0, 2.0, 5.0, 12.0, 30.0}) {
        for (double t : {0.5, 1.0, 2.0, 4.0984}) {
            const double got = sp::student_t_two_sided_p(t, df);
            const double want = oracles::t_two_sided_p_quadrature(t, df);
            CHECK(std::fabs(got - want) < 1e-8);
        }
    }
    struct FCase {
        double f, d1, d2;
    };
    for (const FCase c : {FCase{1.0, 2.0, 10.0}, FCase{3.5, 3.0, 8.0},
                          FCase{55.88, 3.0, 17.0}, FCase{0.3, 5.0, 5.0}}) {
        const double got = sp::f_survival(c.f, c.d1, c.d2);
        const double want = oracles::f_survival_quadrature(c.f, c.d1, c.d2);
        CHECK(std::fabs(got - want) < 1e-8);
    }
}

TEST_CASE("student t quantile inverts the two-sided p") {
    // Classic table values.
    CHECK(sp::student_t_quantile(0.95, 2.0) == doctest::Approx(4.302653).epsilon(1e-5));
    CHECK(sp::student_t_quantile(0.95, 10.0) == doctest::Approx(2.228139).epsilon(1e-5));
    for (double df : {2.0, 7.0, 29.0}) {
        const double q = sp::student_t_quantile(0.95, df);
        CHECK(sp::student_t_two_sided_p(q, df) == doctest::Approx(0.05).epsilon(1e-9));
    }
}
