#include "doctest.h"

#include "cmtrace/qexp.hpp"

using namespace cmtrace;

TEST_CASE("eta")
{
    q_series e = eta_series(mpq_class(6));
    CHECK(e.denom() == 24);
    CHECK(e.coeff(mpq_class(1, 24)) == 1);
    CHECK(e.coeff(mpq_class(25, 24)) == -1);
    CHECK(e.coeff(mpq_class(49, 24)) == -1);
    CHECK(e.coeff(mpq_class(73, 24)) == 0);
    CHECK(e.coeff(mpq_class(121, 24)) == 1);
    CHECK_THROWS_AS(eta_series(mpq_class(1, 48)), std::invalid_argument);

    q_series e24 = eta_series(mpq_class(6)).pow(24);
    CHECK(e24.valuation_num() == 24);
    CHECK(e24.integral());
    q_series d = delta_series(6);
    for (long n = 1; n < 6; ++n)
        CHECK(e24.coeff(n) == d.coeff(n));
    CHECK(d.coeff(2) == -24);
    CHECK(d.coeff(3) == 252);
}

TEST_CASE("eisenstein")
{
    CHECK(eisenstein(4, 5).coeff(1) == 240);
    CHECK(eisenstein(4, 5).coeff(2) == 2160);
    for (int k : {4, 6, 8, 10, 12, 14})
        CHECK(eisenstein(k, 3).coeff(0) == 1);
    CHECK(eisenstein(6, 3).coeff(1) == -504);
    CHECK_THROWS_AS(eisenstein(5, 3), std::invalid_argument);
    CHECK_THROWS_AS(eisenstein(16, 3), std::invalid_argument);
    // E4^2 = E8 and E4 E6 = E10
    CHECK((eisenstein(4, 30) * eisenstein(4, 30)) == eisenstein(8, 30));
    CHECK((eisenstein(4, 30) * eisenstein(6, 30)) == eisenstein(10, 30));
}

TEST_CASE("j and J")
{
    q_series j = j_series(5);
    CHECK(j.coeff(-1) == 1);
    CHECK(j.coeff(0) == 744);
    CHECK(j.coeff(1) == 196884);
    CHECK(j.coeff(2) == 21493760);
    CHECK(j.coeff(3) == 864299970);
    CHECK(J_series(5).coeff(0) == 0);
    CHECK_THROWS_AS(j.coeff(5), truncation_error);
    CHECK(j_series(200).integral());
}

TEST_CASE("g and the plus condition")
{
    q_series g = g_series(201);
    CHECK(g.coeff(-1) == -1);
    CHECK(g.coeff(0) == 2);
    CHECK(g.coeff(3) == -248);
    CHECK(g.coeff(4) == 492);
    CHECK(g.coeff(7) == -4119);
    CHECK(g.coeff(8) == 7256);
    CHECK(g.integral());
    CHECK(plus_support(g));
    CHECK(g.trunc() == 201);
    q_series eq = eta_quotient_g(10);
    CHECK(eq.coeff(-1) == 1);
    CHECK(eq.coeff(3) == 248);
    // the quotient agrees with theta_1(t) E4(4t) / eta(4t)^6, theta_1 = sum (-1)^n q^{n^2}
    std::map<long, mpq_class> th1;
    for (long n = 0; n * n < 12; ++n)
        th1[n * n] = n == 0 ? 1 : (n % 2 ? -2 : 2);
    q_series alt = q_series::from_terms(1, 12, th1) * eisenstein(4, 3).scale_q(4) /
                   euler_product(3).scale_q(4).pow(6);
    for (long n = 0; n < 10; ++n)
        CHECK(alt.coeff(n) == eq.coeff(n - 1));
}

TEST_CASE("theta")
{
    q_series t = theta_series(10);
    CHECK(t.coeff(0) == 1);
    CHECK(t.coeff(1) == 2);
    CHECK(t.coeff(3) == 0);
    CHECK(t.coeff(9) == 2);
}

TEST_CASE("series arithmetic")
{
    long T = 20;
    q_series e4 = eisenstein(4, T);
    q_series e24 = euler_product(T).pow(24);
    q_series lhs = e24 * (e4.pow(3) / e24);
    CHECK(lhs == e4.pow(3));
    q_series e44 = e4.scale_q(4);
    CHECK(e44.coeff(4) == 240);
    CHECK(e44.coeff(5) == 0);
    CHECK(e44.trunc() == 80);
    CHECK_THROWS_AS(e4 / q_series(1, 10), std::domain_error);

    // truncation bookkeeping of a Laurent product
    q_series a = q_series::monomial(1, -2, 1, 5) + q_series::monomial(3, 1, 1, 5);
    q_series b = q_series::monomial(1, 0, 1, 4);
    CHECK((a * b).trunc() == 2);
    CHECK((a.inverse()).trunc() == 9);
    CHECK_THROWS_AS((a * b).coeff(2), truncation_error);

    // mixed denominators
    q_series half = q_series::monomial(1, 1, 2, 10);
    q_series s = half + q_series::monomial(1, 1, 1, 4);
    CHECK(s.denom() == 2);
    CHECK(s.coeff(mpq_class(1, 2)) == 1);
    CHECK(s.coeff(1) == 1);
    CHECK((half * half).coeff(1) == 1);
}

TEST_CASE("faber polynomials")
{
    auto f1 = faber(1, 10);
    CHECK(f1.series == J_series(10));
    CHECK(f1.poly == std::vector<mpz_class>{-744, 1});

    auto f2 = faber(2, 30);
    CHECK(f2.poly == std::vector<mpz_class>{159768, -1488, 1});
    CHECK(f2.series.coeff(0) == 0);
    CHECK(f2.series.coeff(-1) == 0);
    // J^2 - 2*196884 is the only combination of the shape q^-2 + O(q)
    q_series J = J_series(33);
    q_series oracle = J * J - q_series::monomial(393768, 0, 1, 40);
    for (long n = -2; n < 30; ++n)
        CHECK(f2.series.coeff(n) == oracle.coeff(n));

    for (long m = 1; m <= 5; ++m) {
        auto f = faber(m, 40);
        CHECK(f.series.coeff(-m) == 1);
        CHECK(f.series.integral());
        for (long e = -m + 1; e <= 0; ++e)
            CHECK(f.series.coeff(e) == 0);
        CHECK(f.poly.back() == 1);
    }
}

TEST_CASE("weight k bases")
{
    q_series f1 = weight_basis(4, 1, 5);
    CHECK(f1.coeff(-1) == 1);
    CHECK(f1.coeff(0) == 0);
    CHECK(f1.coeff(1) == 141444);
    CHECK(f1.coeff(2) == 68234240);
    CHECK(f1.coeff(3) == 6446476530);
    CHECK(f1.coeff(4) == mpq_class(mpz_class("275423256576")));
    // E4 (j - 984)
    q_series oracle = eisenstein(4, 8) * (j_series(7) - q_series::monomial(984, 0, 1, 7));
    for (long n = -1; n < 5; ++n)
        CHECK(f1.coeff(n) == oracle.coeff(n));
    CHECK_THROWS_AS(weight_basis(12, 1, 5), std::invalid_argument);
    CHECK_THROWS_AS(weight_basis(5, 1, 5), std::invalid_argument);
    for (int k : {4, 6, 8, 10, 14})
        for (long m = 1; m <= 3; ++m) {
            q_series f = weight_basis(k, m, 12);
            CHECK(f.coeff(-m) == 1);
            CHECK(f.coeff(0) == 0);
            CHECK(f.integral());
            CHECK((f * delta_series(12).pow(m)).valuation_num() >= 0);
        }
}

TEST_CASE("sigma1")
{
    CHECK(sigma1(0) == mpq_class(-1, 24));
    CHECK(sigma1(6) == 12);
    CHECK(sigma1(mpq_class(3, 2)) == 0);
    CHECK(sigma1(-2) == 0);
}

TEST_CASE("predicted principal parts")
{
    auto pJ = predicted_series({{1, 1}}, 1);
    CHECK(*pJ.constant == 2);
    CHECK(pJ.coeffs == std::map<long, mpq_class>{{-1, -1}});

    auto pJ2 = predicted_series({{2, 1}}, 1);
    CHECK(*pJ2.constant == 6);
    CHECK(pJ2.coeffs == std::map<long, mpq_class>{{-1, -1}, {-4, -2}});

    auto pJ3 = predicted_series({{3, 1}}, 1);
    CHECK(*pJ3.constant == 8);
    CHECK(pJ3.coeffs == std::map<long, mpq_class>{{-1, -1}, {-9, -3}});

    auto p0 = predicted_series({}, 1);
    CHECK(*p0.constant == 0);
    CHECK(p0.coeffs.empty());

    CHECK_THROWS_AS(predicted_series({{0, 1}}, 1), std::invalid_argument);

    // level p: sigma1(n) + p sigma1(n/p)
    auto p2 = predicted_series({{1, 1}}, 2);
    CHECK(*p2.constant == 1);
    auto p2b = predicted_series({{2, 1}}, 2);
    CHECK(*p2b.constant == 3 + 2);
}

TEST_CASE("plus space solver")
{
    q_series g = g_series(120);
    principal_part pg;
    pg.coeffs[-1] = -1;
    q_series s = plus_space_solve(pg, 120);
    CHECK(s == g);

    CHECK(plus_space_solve(principal_part{}, 60).is_zero());

    principal_part p2 = predicted_series({{2, 1}}, 1);
    q_series s2 = plus_space_solve(p2, 60);
    CHECK(s2.coeff(0) == 6);
    CHECK(s2.coeff(3) == 53256);
    CHECK(s2.integral());
    CHECK(plus_support(s2));

    principal_part p3 = predicted_series({{3, 1}}, 1);
    q_series s3 = plus_space_solve(p3, 60);
    CHECK(s3.coeff(0) == 8);
    CHECK(plus_support(s3));

    principal_part bad;
    bad.coeffs[-2] = 1;
    CHECK_THROWS_AS(plus_space_solve(bad, 20), std::invalid_argument);
}
