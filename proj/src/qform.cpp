#include "cmtrace/qform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmtrace {

std::string quad_form::str() const
{
    std::ostringstream os;
    os << '[' << a << ',' << b << ',' << c << ']';
    return os.str();
}

sl2z operator*(const sl2z& x, const sl2z& y)
{
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

sl2z inverse(const sl2z& g) { return {g.d, -g.b, -g.c, g.a}; }

quad_form act(const quad_form& q, const sl2z& g)
{
    quad_form r;
    r.a = q.eval(g.a, g.c);
    r.b = 2 * q.a * g.a * g.b + q.b * (g.a * g.d + g.b * g.c) + 2 * q.c * g.c * g.d;
    r.c = q.eval(g.b, g.d);
    return r;
}

namespace {

i64 floor_div(i64 x, i64 y)
{
    i64 q = x / y;
    if ((x % y != 0) && ((x < 0) != (y < 0)))
        --q;
    return q;
}

i64 mod(i64 x, i64 m)
{
    i64 r = x % m;
    return r < 0 ? r + m : r;
}

i64 inv_mod(i64 x, i64 m)
{
    i64 g = m, a = mod(x, m), u = 0, v = 1;
    while (a != 0) {
        i64 q = g / a;
        g -= q * a;
        std::swap(g, a);
        u -= q * v;
        std::swap(u, v);
    }
    if (g != 1)
        throw std::invalid_argument("inv_mod: not invertible");
    return mod(u, m);
}

const sl2z S_mat{0, -1, 1, 0};
const sl2z R_mat{0, -1, 1, 1};

bool is_squarefree(i64 n)
{
    for (i64 d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0)
            return false;
    return true;
}

// PSL2(Z) automorphs of a reduced form
std::vector<sl2z> automorphs(const quad_form& r)
{
    std::vector<sl2z> out{sl2z{}};
    if (r.a == r.b && r.b == r.c) {
        out.push_back(R_mat);
        out.push_back(R_mat * R_mat);
    } else if (r.b == 0 && r.a == r.c) {
        out.push_back(S_mat);
    }
    return out;
}

struct pt {
    i64 r, t;
    friend bool operator==(const pt&, const pt&) = default;
    friend auto operator<=>(const pt&, const pt&) = default;
};

pt normalize(i64 r, i64 t, i64 p)
{
    r = mod(r, p);
    t = mod(t, p);
    if (r != 0)
        return {1, mod(t * inv_mod(r, p), p)};
    return {0, 1};
}

pt apply(const sl2z& g, const pt& x, i64 p)
{
    return normalize(g.a * x.r + g.b * x.t, g.c * x.r + g.d * x.t, p);
}

pt canonical(const quad_form& red, const pt& x, i64 p)
{
    pt best = x;
    for (const auto& g : automorphs(red))
        best = std::min(best, apply(g, x, p));
    return best;
}

int point_stabilizer(const quad_form& red, const pt& x, i64 p)
{
    int n = 0;
    for (const auto& g : automorphs(red))
        if (apply(g, x, p) == x)
            ++n;
    return n;
}

// x u - s y = 1
sl2z complete(i64 x, i64 y)
{
    i64 old_r = x, r = y, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i64 q = floor_div(old_r, r);
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
        old_t -= q * t;
        std::swap(old_t, t);
    }
    // old_s*x + old_t*y = old_r = +-1
    if (old_r < 0) {
        old_s = -old_s;
        old_t = -old_t;
    }
    return {x, -old_t, y, old_s};
}

quad_form normalize_b(quad_form q)
{
    i64 k = floor_div(q.a - q.b, 2 * q.a);
    return act(q, sl2z{1, k, 0, 1});
}

// smallest-a form in the Gamma_0(p)-class labelled (red, orbit of x)
quad_form best_in_class(const quad_form& red, const pt& x, i64 p)
{
    pt target = canonical(red, x, p);
    i64 bound = red.eval(x.r, x.t);
    const double Dd = static_cast<double>(red.D());
    quad_form best{};
    bool have = false;
    i64 ymax = static_cast<i64>(std::sqrt(4.0 * red.a * bound / Dd)) + 1;
    for (i64 y = -ymax; y <= ymax; ++y) {
        double rem = static_cast<double>(bound) - Dd * y * y / (4.0 * red.a);
        if (rem < -1.0)
            continue;
        double cx = -static_cast<double>(red.b) * y / (2.0 * red.a);
        double w = std::sqrt(std::max(rem, 0.0) / red.a) + 1.0;
        for (i64 xx = static_cast<i64>(std::floor(cx - w)); xx <= static_cast<i64>(std::ceil(cx + w)); ++xx) {
            if (std::gcd(xx, y) != 1)
                continue;
            i64 v = red.eval(xx, y);
            if (v > bound || v % p != 0)
                continue;
            if (canonical(red, normalize(xx, y, p), p) != target)
                continue;
            quad_form f = normalize_b(act(red, complete(xx, y)));
            if (!have || f < best) {
                best = f;
                have = true;
            }
        }
    }
    if (!have)
        throw std::logic_error("best_in_class: lift not found");
    return best;
}

} // namespace

reduction reduce_with_transform(const quad_form& q)
{
    if (!q.positive_definite())
        throw std::invalid_argument("reduce: form " + q.str() + " is not positive definite");
    reduction r{q, sl2z{}};
    for (;;) {
        if (r.form.b > r.form.a || r.form.b <= -r.form.a) {
            i64 k = floor_div(r.form.a - r.form.b, 2 * r.form.a);
            sl2z t{1, k, 0, 1};
            r.form = act(r.form, t);
            r.transform = r.transform * t;
        }
        if (r.form.a > r.form.c) {
            r.form = act(r.form, S_mat);
            r.transform = r.transform * S_mat;
            continue;
        }
        break;
    }
    if (r.form.a == r.form.c && r.form.b < 0) {
        r.form = act(r.form, S_mat);
        r.transform = r.transform * S_mat;
    }
    return r;
}

quad_form reduce(const quad_form& q) { return reduce_with_transform(q).form; }

bool is_reduced(const quad_form& q)
{
    if (!q.positive_definite())
        return false;
    i64 ab = q.b < 0 ? -q.b : q.b;
    if (ab > q.a || q.a > q.c)
        return false;
    if ((ab == q.a || q.a == q.c) && q.b < 0)
        return false;
    return true;
}

std::vector<quad_form> enumerate_reduced(i64 D)
{
    std::vector<quad_form> out;
    if (D <= 0 || (D % 4 != 0 && D % 4 != 3))
        return out;
    for (i64 a = 1; 3 * a * a <= D; ++a) {
        for (i64 b = -a; b <= a; ++b) {
            if (mod(b, 2) != D % 2)
                continue;
            i64 num = b * b + D;
            if (num % (4 * a) != 0)
                continue;
            quad_form q{a, b, num / (4 * a)};
            if (is_reduced(q))
                out.push_back(q);
        }
    }
    return out;
}

int stabilizer_order(const quad_form& q)
{
    quad_form r = reduce(q);
    if (r.a == r.b && r.b == r.c)
        return 3;
    if (r.b == 0 && r.a == r.c)
        return 2;
    return 1;
}

cm_point make_cm_point(const quad_form& q, int bits)
{
    if (bits < 32)
        throw std::invalid_argument("cm_point: precision below 32 bits");
    if (!q.positive_definite())
        throw std::invalid_argument("cm_point: form " + q.str() + " is not positive definite");
    cm_point p;
    p.form = q;
    p.neg_b = -q.b;
    p.D = q.D();
    p.two_a = 2 * q.a;
    mp_real den(static_cast<long>(p.two_a), bits);
    p.value = mp_complex(mp_real(static_cast<long>(p.neg_b), bits) / den,
                         sqrt(mp_real(static_cast<long>(p.D), bits)) / den);
    return p;
}

mpq_class hurwitz(i64 D)
{
    if (D == 0)
        return mpq_class(-1, 12);
    mpq_class h = 0;
    for (const auto& q : enumerate_reduced(D))
        h += mpq_class(1, stabilizer_order(q));
    h.canonicalize();
    return h;
}

bool is_fundamental(i64 D)
{
    if (D <= 0)
        return false;
    if (D % 4 == 3)
        return is_squarefree(D);
    if (D % 4 == 0) {
        i64 m = D / 4;
        return (m % 4 == 1 || m % 4 == 2) && is_squarefree(m);
    }
    return false;
}

bool is_prime(i64 n)
{
    if (n < 2)
        return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

quad_form fricke(const quad_form& q, i64 p)
{
    if (q.a % p != 0)
        throw std::invalid_argument("fricke: p does not divide a in " + q.str());
    return {p * q.c, -q.b, q.a / p};
}

gamma0_label gamma0_class(const quad_form& q, i64 p)
{
    if (q.a % p != 0)
        throw std::invalid_argument("gamma0_class: p does not divide a in " + q.str());
    reduction red = reduce_with_transform(q);
    sl2z m = inverse(red.transform);
    pt x = canonical(red.form, normalize(m.a, m.c, p), p);
    return {red.form, x.r, x.t};
}

std::vector<orbit_rep> level_p_orbits(i64 D, i64 p)
{
    std::vector<orbit_rep> out;
    if (p == 1) {
        for (const auto& q : enumerate_reduced(D))
            out.push_back({q, stabilizer_order(q), group_tag::full_modular, 1});
        return out;
    }
    if (!is_prime(p))
        throw std::invalid_argument("level_p_orbits: p = " + std::to_string(p) + " is not prime");

    struct cls {
        gamma0_label label;
        quad_form best;
        int stab;
    };
    std::vector<cls> classes;
    for (const auto& red : enumerate_reduced(D)) {
        std::vector<pt> seen;
        auto consider = [&](pt x) {
            pt c = canonical(red, x, p);
            if (std::find(seen.begin(), seen.end(), c) != seen.end())
                return;
            seen.push_back(c);
            classes.push_back({{red, c.r, c.t}, best_in_class(red, c, p), point_stabilizer(red, c, p)});
        };
        for (i64 t = 0; t < p; ++t)
            if (mod(red.eval(1, t), p) == 0)
                consider({1, t});
        if (mod(red.c, p) == 0)
            consider({0, 1});
    }

    std::vector<bool> used(classes.size(), false);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        gamma0_label img = gamma0_class(fricke(classes[i].best, p), p);
        quad_form best = classes[i].best;
        int stab = classes[i].stab;
        if (img == classes[i].label) {
            stab *= 2;
        } else {
            for (std::size_t j = i + 1; j < classes.size(); ++j) {
                if (!used[j] && classes[j].label == img) {
                    used[j] = true;
                    best = std::min(best, classes[j].best);
                    break;
                }
            }
        }
        out.push_back({best, stab, group_tag::fricke_extended, p});
    }
    std::sort(out.begin(), out.end(), [](const orbit_rep& x, const orbit_rep& y) { return x.form < y.form; });
    return out;
}

} // namespace cmtrace
