#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmtrace/analytic.hpp"
#include "cmtrace/parallel.hpp"

using namespace cmtrace;

namespace {

mp_complex point(double x, double y, int bits)
{
    return mp_complex(mp_real(x, bits), mp_real(y, bits));
}

// plain power series for I_n, 30 terms
double bessel_series_oracle(int n, double x)
{
    double s = 0.0;
    for (int k = 0; k < 30; ++k)
        s += std::pow(x / 2, 2 * k + n) / (std::tgamma(k + 1) * std::tgamma(k + n + 1));
    return s;
}

} // namespace

TEST_CASE("j at the elliptic points")
{
    cm_point rho = make_cm_point({1, 1, 1}, 200);
    complex_hp v = eval_j(rho.value, 200);
    CHECK(abs(v.value).to_double() <= v.error_bound + 1e-40);
    CHECK(v.error_bound < 1e-40);
    complex_hp w = eval_j(point(0, 1, 100), 100);
    CHECK(std::fabs(w.value.re.to_double() - 1728) < 1e-20);
    complex_hp w2 = eval_j(point(0, 1, 300), 300);
    CHECK(std::fabs((w.value.re - w2.value.re).to_double()) <= w.error_bound);
}

TEST_CASE("J high in the cusp is dominated by 1/q")
{
    modular_function J = make_function("J");
    complex_hp v = eval_modular(J, point(0, 10, 200), 200);
    mp_real lead = exp(mp_real::pi(200) * 20L);
    CHECK(std::fabs((v.value.re - lead).to_double()) < 2.0);
    CHECK_THROWS_AS(eval_modular(J, point(0, 0.5, 64), 64), std::invalid_argument);
    CHECK_THROWS_AS(eval_modular(J, point(0, 1, 64), 64, 1e-300), precision_error);
}

TEST_CASE("series evaluation agrees with the j route")
{
    modular_function J = make_function("J");
    modular_function Js = function_from_series("Jser", J_series(300), 1);
    for (double y : {0.9, 1.3, 2.0}) {
        complex_hp a = eval_modular(J, point(0.23, y, 128), 128);
        complex_hp b = eval_modular(Js, point(0.23, y, 128), 128);
        CHECK(std::fabs((a.value.re - b.value.re).to_double()) <= a.error_bound + b.error_bound);
        CHECK(std::fabs((a.value.im - b.value.im).to_double()) <= a.error_bound + b.error_bound);
        series_evaluator ev(J, 0.85);
        auto d = ev({0.23, y});
        CHECK(std::abs(d - a.value.to_complex()) < 1e-9 * std::abs(d));
    }
}

TEST_CASE("traces of J")
{
    modular_function J = make_function("J");
    CHECK(trace(J, 3).rounded == -248);
    CHECK(trace(J, 4).rounded == 492);
    CHECK(trace(J, 7).rounded == -4119);
    CHECK(trace(J, 8).rounded == 7256);
    q_series g = g_series(121);
    for (long D = 3; D <= 120; ++D) {
        if (D % 4 == 1 || D % 4 == 2)
            continue;
        trace_entry e = trace(J, D);
        CHECK(e.certified);
        CHECK(e.rounded == g.coeff(D));
    }
}

TEST_CASE("traces of Faber polynomials")
{
    modular_function J2 = make_function("J2");
    CHECK(J2.pole_order() == 2);
    trace_entry e = trace(J2, 4);
    CHECK(e.certified);
    CHECK(e.rounded == 287244);
    CHECK(trace(J2, 3).rounded == 53256);
    CHECK_THROWS_AS(make_function("J0"), std::invalid_argument);
    CHECK_THROWS_AS(make_function("K"), std::invalid_argument);
    CHECK_THROWS_AS(trace(J2, 4, 2), std::invalid_argument);
}

TEST_CASE("level p Hauptmodul")
{
    q_series t2 = hauptmodul_series(2, 4);
    CHECK(t2.coeff(-1) == 1);
    CHECK(t2.coeff(0) == 0);
    CHECK(t2.coeff(1) == 4372);
    CHECK(t2.coeff(2) == 96256);
    q_series t3 = hauptmodul_series(3, 3);
    CHECK(t3.coeff(1) == 783);
    CHECK_THROWS_AS(hauptmodul_series(11, 3), std::invalid_argument);

    // level-p traces round to rationals with certification
    modular_function T = make_function("T", 2);
    for (long D : {7L, 8L, 15L, 20L}) {
        trace_entry e = trace(T, D, 2);
        CHECK(e.certified);
    }
}

TEST_CASE("trace tables do not depend on the thread count")
{
    modular_function J = make_function("J");
    std::vector<long> Ds = {3, 4, 7, 8, 11, 12, 15, 16, 19, 20};
    set_threads(1);
    auto a = trace_table(J, Ds);
    set_threads(4);
    auto b = trace_table(J, Ds);
    set_threads(0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rounded == b[i].rounded);
        CHECK(a[i].residual == b[i].residual);
    }
}

TEST_CASE("Kloosterman sums")
{
    CHECK(kloosterman(1, 1, 1) == doctest::Approx(1));
    CHECK(kloosterman(1, 1, 2) == doctest::Approx(1));
    CHECK(kloosterman(1, 1, 3) == doctest::Approx(-1));
    for (long c = 1; c <= 1500; c += (c < 200 ? 1 : 7)) {
        for (long m : {1L, 2L, 3L, 6L}) {
            for (long n : {1L, 2L, 5L, 9L, 12L}) {
                double a = kloosterman(m, n, c), b = kloosterman_naive(m, n, c);
                CHECK(std::fabs(a - b) < 1e-9 * c);
                CHECK(std::fabs(a) <= c + 1e-9);
            }
        }
        CHECK(kloosterman(1 + c, 2, c) == doctest::Approx(kloosterman(1, 2, c)).epsilon(1e-9));
    }
    CHECK(std::fabs(kloosterman_hp(1, 1, 97).value.to_double() - kloosterman_naive(1, 1, 97)) < 1e-12);
}

TEST_CASE("exponential sum S")
{
    CHECK(exp_sum_S(3, 4) == doctest::Approx(-2));
    CHECK(exp_sum_S(4, 4) == doctest::Approx(2));
    CHECK(exp_sum_S(1, 4) == doctest::Approx(0));
    for (long c = 1; c <= 300; ++c)
        for (long D = 3; D <= 40; ++D) {
            CHECK(std::fabs(exp_sum_S(D, c)) <= c + 1e-9);
            CHECK(std::fabs(exp_sum_S(D + c, c) - exp_sum_S(D, c)) < 1e-9);
        }
    CHECK(std::fabs(exp_sum_S_hp(3, 4, 100).value.to_double() + 2) < 1e-25);
}

TEST_CASE("Bessel functions")
{
    for (double z : {1.0, 10.0}) {
        mp_real x(z, 200);
        real_hp v = bessel_i(0.5, x, 200);
        mp_real closed = sqrt(mp_real(2L, 200) / (mp_real::pi(200) * x)) * sinh(x);
        CHECK(std::fabs((v.value - closed).to_double()) < 1e-50 * closed.to_double());
        CHECK(bessel_i(0.5, z) == doctest::Approx(closed.to_double()).epsilon(1e-14));
    }
    CHECK(bessel_i(3, mp_real(0L, 64), 64).value.is_zero());
    CHECK(bessel_i(3, mp_real(1L, 64), 64).to_double() == doctest::Approx(bessel_series_oracle(3, 1.0)).epsilon(1e-15));
    CHECK(bessel_i(3, 1.0) == doctest::Approx(bessel_series_oracle(3, 1.0)).epsilon(1e-14));
    // asymptotic branch against the power series at higher precision
    for (double nu : {3.0, 7.0, 13.0}) {
        real_hp a = bessel_i(nu, mp_real(80L, 128), 96);
        real_hp b = bessel_i(nu, mp_real(80L, 400), 400);
        double rel = std::fabs((a.value - b.value).to_double()) / b.to_double();
        CHECK(rel < 1e-26);
        CHECK(std::fabs((a.value - b.value).to_double()) <= a.error_bound + b.error_bound);
    }
    CHECK_THROWS_AS(bessel_i(2.0, mp_real(1L, 64), 64), std::invalid_argument);
}

TEST_CASE("Poincare series")
{
    poincare_result a = poincare_coeff(4, 1, 1, 3000);
    poincare_result b = poincare_coeff_serial(4, 1, 1, 3000);
    CHECK(std::fabs(a.value - b.value) < 1e-6);
    CHECK(std::fabs(a.value - 141444) < 0.5);
    poincare_result c = poincare_coeff(4, 1, 1, 6000);
    CHECK(std::fabs(c.value - a.value) <= a.tail_bound);
    CHECK_THROWS_AS(poincare_coeff(3, 1, 1, 10), std::invalid_argument);
}

TEST_CASE("exact formula partial sums")
{
    const double pi = std::numbers::pi;
    CHECK(exact_formula_tJ(3, 4).to_double() == doctest::Approx(-8 - 2 * std::sinh(pi * std::sqrt(3.0))));
    CHECK(exact_formula_tJ(3, 4).to_double() == doctest::Approx(-238.76).epsilon(1e-4));
    CHECK(exact_formula_tJ(4, 4).to_double() == doctest::Approx(-12 + 2 * std::sinh(2 * pi)));
    CHECK(std::fabs(exact_formula_tJ(3, 4000).to_double() + 248) < 2.0);
    CHECK_THROWS_AS(exact_formula_tJ(3, 6), std::invalid_argument);
}

TEST_CASE("Duke statistic and asymptotics")
{
    CHECK(duke_statistic(3).to_double() == doctest::Approx(-744));
    CHECK(duke_statistic(4).to_double() == doctest::Approx(984));
    // against the certified trace minus e(-alpha) for the forms with Im(alpha) > 1
    modular_function J = make_function("J");
    for (long D : {7L, 8L, 11L, 23L, 47L}) {
        double h = hurwitz(D).get_d();
        double t = trace(J, D).rounded.get_d();
        for (const auto& Q : enumerate_reduced(D)) {
            double y = std::sqrt(double(D)) / (2.0 * Q.a);
            if (y > 1)
                t -= std::exp(2 * std::numbers::pi * y) * std::cos(2 * std::numbers::pi * Q.b / (2.0 * Q.a));
        }
        CHECK(duke_statistic(D).to_double() == doctest::Approx(t / h).epsilon(1e-6));
    }
    CHECK(asymptotic_residual(3).to_double() == doctest::Approx(-248 + std::exp(std::numbers::pi * std::sqrt(3.0))));
    CHECK(asymptotic_residual(4).to_double() == doctest::Approx(492 - std::exp(2 * std::numbers::pi)));
}

TEST_CASE("beta integral")
{
    CHECK(beta_integral(0).to_double() == 2.0);
    for (double s : {0.01, 0.3, 1.0, 4.0, 25.0}) {
        double oracle = 2 * std::exp(-s) - 2 * std::sqrt(std::numbers::pi * s) * std::erfc(std::sqrt(s));
        double v = beta_integral(s).to_double();
        CHECK(std::fabs(v - oracle) < 1e-12);
        CHECK(v <= std::exp(-s) / s);
    }
}

TEST_CASE("regularized averages")
{
    average_result one = regularized_average(make_function("1"));
    CHECK(std::fabs(one.value.to_double() - 1) < 1e-6);
    average_result J = regularized_average(make_function("J"), 1e-8);
    CHECK(std::fabs(J.value.to_double() + 24) < 1e-3);
    CHECK_THROWS_AS(regularized_average(make_function("j")), std::invalid_argument);
}
