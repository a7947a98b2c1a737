#include "doctest.h"

#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "cmtrace/qform.hpp"

using namespace cmtrace;

namespace {

// Orbit search under T^{+-1} and S inside a coefficient box; the reduced
// member is picked with an independent predicate.
quad_form reduce_by_search(quad_form start)
{
    std::set<quad_form> seen{start};
    std::queue<quad_form> todo;
    todo.push(start);
    auto ok = [](const quad_form& f) {
        long long ab = std::llabs(f.b);
        if (ab > f.a || f.a > f.c)
            return false;
        return !((ab == f.a || f.a == f.c) && f.b < 0);
    };
    while (!todo.empty()) {
        quad_form f = todo.front();
        todo.pop();
        if (ok(f))
            return f;
        quad_form next[] = {{f.a, f.b + 2 * f.a, f.a + f.b + f.c},
                            {f.a, f.b - 2 * f.a, f.a - f.b + f.c},
                            {f.c, -f.b, f.a}};
        for (auto& n : next) {
            if (std::llabs(n.a) > 400 || std::llabs(n.b) > 400 || std::llabs(n.c) > 400)
                continue;
            if (seen.insert(n).second)
                todo.push(n);
        }
    }
    return {};
}

mpq_class sigma(long long n)
{
    long long s = 0;
    for (long long d = 1; d <= n; ++d)
        if (n % d == 0)
            s += d;
    return mpq_class(static_cast<long>(s));
}

sl2z random_sl2z(std::mt19937_64& rng, int bound)
{
    std::uniform_int_distribution<int> u(-bound, bound);
    for (;;) {
        long long a = u(rng), c = u(rng);
        if (std::gcd(a, c) != 1)
            continue;
        // extend (a, c) to a matrix, then shear
        long long old_r = a, r = c, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            long long q = old_r / r;
            old_r -= q * r;
            std::swap(old_r, r);
            old_s -= q * s;
            std::swap(old_s, s);
            old_t -= q * t;
            std::swap(old_t, t);
        }
        if (old_r < 0) {
            old_s = -old_s;
            old_t = -old_t;
        }
        sl2z g{a, -old_t, c, old_s};
        long long k = u(rng) % 3;
        g = g * sl2z{1, k, 0, 1};
        if (std::llabs(g.b) <= bound && std::llabs(g.d) <= bound)
            return g;
    }
}

} // namespace

TEST_CASE("reduce examples")
{
    CHECK(reduce({1, 1, 1}) == quad_form{1, 1, 1});
    CHECK(reduce({1, 5, 7}) == quad_form{1, 1, 1});
    CHECK(reduce({1, 5, 7}) == reduce_by_search({1, 5, 7}));
    CHECK(reduce({6, 1, 1}) == quad_form{1, 1, 6});
    CHECK(reduce({6, 1, 1}) == reduce_by_search({6, 1, 1}));
    CHECK(reduce({3, -3, 1}) == reduce_by_search({3, -3, 1}));
    CHECK_THROWS_AS(reduce({1, 3, 1}), std::invalid_argument);
    CHECK_THROWS_AS(reduce({-1, 0, -1}), std::invalid_argument);
}

TEST_CASE("reduce transform is consistent")
{
    for (quad_form q : {quad_form{1, 5, 7}, quad_form{17, 23, 9}, quad_form{6, 1, 1}, quad_form{101, -200, 100}}) {
        auto r = reduce_with_transform(q);
        CHECK(act(q, r.transform) == r.form);
        CHECK(r.transform.a * r.transform.d - r.transform.b * r.transform.c == 1);
    }
}

TEST_CASE("reduce agrees with orbit search on small forms")
{
    for (long long a = 1; a <= 12; ++a)
        for (long long b = -12; b <= 12; ++b)
            for (long long c = 1; c <= 12; ++c) {
                quad_form q{a, b, c};
                if (!q.positive_definite())
                    continue;
                REQUIRE(reduce(q) == reduce_by_search(q));
            }
}

TEST_CASE("reduction is a class invariant")
{
    std::mt19937_64 rng(20240611);
    for (long long D = 3; D <= 10000; D += (D < 400 ? 1 : 37)) {
        auto forms = enumerate_reduced(D);
        for (const auto& q : forms) {
            for (int k = 0; k < 4; ++k) {
                sl2z g = random_sl2z(rng, 20);
                REQUIRE(reduce(act(q, g)) == q);
            }
        }
    }
}

TEST_CASE("enumerate_reduced")
{
    CHECK(enumerate_reduced(3) == std::vector<quad_form>{{1, 1, 1}});
    CHECK(enumerate_reduced(4) == std::vector<quad_form>{{1, 0, 1}});
    CHECK(enumerate_reduced(23) == std::vector<quad_form>{{1, 1, 6}, {2, -1, 3}, {2, 1, 3}});
    CHECK(enumerate_reduced(5).empty());
    CHECK(enumerate_reduced(6).empty());
    // Im(alpha) >= sqrt(3)/2 on reduced forms
    for (long long D = 3; D < 3000; ++D)
        for (const auto& q : enumerate_reduced(D))
            REQUIRE(std::sqrt(double(D)) / (2.0 * q.a) >= std::sqrt(3.0) / 2 - 1e-12);
}

TEST_CASE("stabilizer orders")
{
    CHECK(stabilizer_order({1, 1, 1}) == 3);
    CHECK(stabilizer_order({1, 0, 1}) == 2);
    CHECK(stabilizer_order({1, 1, 6}) == 1);
    CHECK(stabilizer_order({2, 2, 2}) == 3);
    CHECK(stabilizer_order({1, 5, 7}) == 3);
}

TEST_CASE("cm points")
{
    auto p = make_cm_point({2, 1, 3}, 128);
    CHECK(p.neg_b == -1);
    CHECK(p.D == 23);
    CHECK(p.two_a == 4);
    CHECK(p.value.re.to_double() == doctest::Approx(-0.25));
    CHECK(p.value.im.to_double() == doctest::Approx(std::sqrt(23.0) / 4));
    auto z = p.value;
    mp_complex res = z * z * mp_real(2L, 128) + z + mp_complex(mp_real(3L, 128), mp_real(0L, 128));
    CHECK(abs(res).to_double() < std::ldexp(1.0, -120));
    CHECK(make_cm_point({1, 0, 1}, 64).value.im.to_double() == 1.0);
    CHECK_THROWS_AS(make_cm_point({1, 0, 1}, 16), std::invalid_argument);
}

TEST_CASE("hurwitz values and the class number relation")
{
    CHECK(hurwitz(0) == mpq_class(-1, 12));
    CHECK(hurwitz(3) == mpq_class(1, 3));
    CHECK(hurwitz(4) == mpq_class(1, 2));
    CHECK(hurwitz(23) == 3);
    CHECK(hurwitz(7) == 1);
    CHECK(hurwitz(2) == 0);
    for (long long n = 1; n <= 300; ++n) {
        mpq_class lhs = 0;
        for (long long t = -2 * n; t <= 2 * n; ++t)
            if (t * t <= 4 * n)
                lhs += hurwitz(4 * n - t * t);
        mpq_class rhs = 2 * sigma(n);
        for (long long d = 1; d <= n; ++d)
            if (n % d == 0)
                rhs -= static_cast<long>(std::min(d, n / d));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("fundamental discriminants")
{
    CHECK(is_fundamental(3));
    CHECK_FALSE(is_fundamental(12));
    CHECK(is_fundamental(20));
    CHECK(is_fundamental(4));
    CHECK(is_fundamental(8));
    CHECK_FALSE(is_fundamental(16));
    CHECK_FALSE(is_fundamental(27));
    CHECK_FALSE(is_fundamental(5));
}

namespace {

// Connected components of forms with p | a inside a box under T, the lower
// shear [[1,0],[p,1]] and the Fricke map.
std::vector<std::set<quad_form>> orbit_components(long long D, long long p, long long box)
{
    std::set<quad_form> all;
    for (long long a = p; a <= box; a += p)
        for (long long b = -box; b <= box; ++b) {
            long long num = b * b + D;
            if (num % (4 * a) == 0 && num / (4 * a) <= box)
                all.insert({a, b, num / (4 * a)});
        }
    std::vector<std::set<quad_form>> comps;
    std::set<quad_form> done;
    for (const auto& s : all) {
        if (done.count(s))
            continue;
        std::set<quad_form> comp{s};
        std::queue<quad_form> todo;
        todo.push(s);
        done.insert(s);
        while (!todo.empty()) {
            quad_form f = todo.front();
            todo.pop();
            std::vector<quad_form> next{act(f, {1, 1, 0, 1}), act(f, {1, -1, 0, 1}), act(f, {1, 0, p, 1}),
                                        act(f, {1, 0, -p, 1}), {p * f.c, -f.b, f.a / p}};
            for (auto& n : next) {
                if (!all.count(n) || done.count(n))
                    continue;
                done.insert(n);
                comp.insert(n);
                todo.push(n);
            }
        }
        comps.push_back(comp);
    }
    return comps;
}

int roots_mod_p(const quad_form& q, long long p)
{
    int n = 0;
    for (long long t = 0; t < p; ++t)
        if (((q.a + q.b * t + q.c * t * t) % p + p) % p == 0)
            ++n;
    if (q.c % p == 0)
        ++n;
    return n;
}

} // namespace

TEST_CASE("level p orbits against a bounded orbit search")
{
    CHECK(level_p_orbits(3, 1).size() == 1);
    CHECK(level_p_orbits(3, 1)[0].stabilizer_order == 3);
    CHECK_THROWS_AS(level_p_orbits(3, 4), std::invalid_argument);

    for (long long p : {2LL, 3LL}) {
        for (long long D : {3LL, 4LL, 7LL, 8LL, 11LL, 15LL, 20LL, 23LL, 24LL, 31LL, 35LL, 39LL}) {
            auto reps = level_p_orbits(D, p);
            auto comps = orbit_components(D, p, 60);
            CAPTURE(D);
            CAPTURE(p);
            REQUIRE(reps.size() == comps.size());
            std::set<std::size_t> hit;
            for (const auto& r : reps) {
                CHECK(r.form.a % p == 0);
                CHECK(r.form.D() == D);
                for (std::size_t i = 0; i < comps.size(); ++i)
                    if (comps[i].count(r.form))
                        hit.insert(i);
            }
            CHECK(hit.size() == comps.size());
        }
    }
}

TEST_CASE("level p mass formula and Fricke closure")
{
    for (long long p : {2LL, 3LL, 5LL, 7LL, 11LL}) {
        for (long long D = 3; D <= 300; ++D) {
            if (D % 4 == 1 || D % 4 == 2)
                continue;
            mpq_class mass = 0;
            for (const auto& r : level_p_orbits(D, p)) {
                REQUIRE(r.form.a % p == 0);
                REQUIRE(r.group == group_tag::fricke_extended);
                REQUIRE((r.stabilizer_order == 1 || r.stabilizer_order == 2 || r.stabilizer_order == 3 ||
                         r.stabilizer_order == 4 || r.stabilizer_order == 6));
                mass += mpq_class(1, r.stabilizer_order);
                // Fricke image lands in the same Fricke-extended orbit
                auto img = gamma0_class(fricke(r.form, p), p);
                bool found = false;
                for (const auto& s : level_p_orbits(D, p)) {
                    if (gamma0_class(s.form, p) == img || gamma0_class(fricke(s.form, p), p) == img) {
                        CHECK(s.form == r.form);
                        found = true;
                    }
                }
                REQUIRE(found);
            }
            mpq_class expect = 0;
            for (const auto& q : enumerate_reduced(D))
            {
                mpq_class w(roots_mod_p(q, p), 2 * stabilizer_order(q));
                w.canonicalize();
                expect += w;
            }
            CAPTURE(D);
            CAPTURE(p);
            REQUIRE(mass == expect);
        }
    }
}

TEST_CASE("level 1 orbits agree with the reduced forms")
{
    for (long long D = 3; D <= 2000; ++D) {
        auto reps = level_p_orbits(D, 1);
        auto red = enumerate_reduced(D);
        REQUIRE(reps.size() == red.size());
        for (std::size_t i = 0; i < red.size(); ++i) {
            REQUIRE(reps[i].form == red[i]);
            REQUIRE(reps[i].stabilizer_order == stabilizer_order(red[i]));
        }
    }
}
