#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmtrace/analytic.hpp"
#include "cmtrace/parallel.hpp"

namespace cmtrace {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

long mod(long a, long m)
{
    long r = a % m;
    return r < 0 ? r + m : r;
}

long mulmod(long a, long b, long m)
{
    return static_cast<long>(static_cast<__int128>(a) * b % m);
}

long powmod(long b, long e, long m)
{
    long r = 1 % m;
    b = mod(b, m);
    while (e > 0) {
        if (e & 1)
            r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

// inverse of a modulo m, a coprime to m
long inverse_mod(long a, long m)
{
    long g = m, x = 0, r = mod(a, m), y = 1;
    while (r != 0) {
        long t = g / r;
        g -= t * r;
        std::swap(g, r);
        x -= t * y;
        std::swap(x, y);
    }
    return mod(x, m);
}

std::vector<std::pair<long, int>> factor(long n)
{
    std::vector<std::pair<long, int>> f;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p)
            continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.emplace_back(p, e);
    }
    if (n > 1)
        f.emplace_back(n, 1);
    return f;
}

long primitive_root_prime_power(long p, long q)
{
    auto fs = factor(p - 1);
    long g = 2;
    for (;; ++g) {
        bool ok = true;
        for (auto [r, e] : fs)
            if (powmod(g, (p - 1) / r, p) == 1) {
                ok = false;
                break;
            }
        if (ok)
            break;
    }
    if (q > p && powmod(g, p - 1, p * p) == 1)
        g += p;
    return g;
}

// cos(2 pi r / q) for r in [0,q), by rotation reseeded every 64 steps
void fill_cos_table(std::vector<double>& tab, long q)
{
    tab.resize(q);
    const double step = two_pi / static_cast<double>(q);
    const double cs = std::cos(step), sn = std::sin(step);
    double c = 1.0, s = 0.0;
    for (long r = 0; r < q; ++r) {
        if ((r & 63) == 0) {
            c = std::cos(step * static_cast<double>(r));
            s = std::sin(step * static_cast<double>(r));
        }
        tab[r] = c;
        double nc = c * cs - s * sn;
        s = s * cs + c * sn;
        c = nc;
    }
}

// K(1, a; q) for an odd prime power q = p^e, walking the cyclic unit group
double kloosterman_cyclic(long a, long p, long q)
{
    thread_local std::vector<long> pw;
    thread_local std::vector<double> cosq;
    const long phi = q - q / p;
    const long g = primitive_root_prime_power(p, q);
    pw.resize(phi);
    pw[0] = 1;
    for (long k = 1; k < phi; ++k)
        pw[k] = mulmod(pw[k - 1], g, q);
    fill_cos_table(cosq, q);
    a = mod(a, q);
    double sum = 0.0;
    if (a % p != 0) {
        long l = 0;
        while (pw[l] != a)
            ++l;
        // d = g^k, a/d = g^{l-k}
        for (long k = 0; k < phi; ++k) {
            long idx = l - k;
            if (idx < 0)
                idx += phi;
            long r = pw[k] + pw[idx];
            if (r >= q)
                r -= q;
            sum += cosq[r];
        }
    } else {
        for (long k = 0; k < phi; ++k) {
            long r = (pw[k] + mulmod(a, pw[k == 0 ? 0 : phi - k], q)) % q;
            sum += cosq[r];
        }
    }
    return sum;
}

} // namespace

double kloosterman_naive(long m, long n, long c)
{
    if (c < 1)
        throw std::invalid_argument("kloosterman: c must be positive");
    double sum = 0.0;
    for (long d = 0; d < c; ++d) {
        if (std::gcd(d, c) != 1)
            continue;
        long db = inverse_mod(d, c);
        long r = mod(mulmod(mod(m, c), db, c) + mulmod(mod(n, c), d, c), c);
        sum += std::cos(two_pi * static_cast<double>(r) / static_cast<double>(c));
    }
    return sum;
}

double kloosterman(long m, long n, long c)
{
    if (c < 1)
        throw std::invalid_argument("kloosterman: c must be positive");
    if (c < 64)
        return kloosterman_naive(m, n, c);
    double prod = 1.0;
    for (auto [p, e] : factor(c)) {
        long q = 1;
        for (int i = 0; i < e; ++i)
            q *= p;
        long u = inverse_mod((c / q) % q, q);
        long mu = mulmod(mod(m, q), u, q), nu = mulmod(mod(n, q), u, q);
        double part;
        if (p == 2 || q < 16 || (mu % p == 0 && nu % p == 0)) {
            part = kloosterman_naive(mu, nu, q);
        } else {
            long unit = mu % p != 0 ? mu : nu;
            long other = mu % p != 0 ? nu : mu;
            part = kloosterman_cyclic(mulmod(unit, other, q), p, q);
        }
        if (part == 0.0)
            return 0.0;
        prod *= part;
    }
    return prod;
}

real_hp kloosterman_hp(long m, long n, long c)
{
    if (c < 1)
        throw std::invalid_argument("kloosterman: c must be positive");
    const mpfr_prec_t prec = 128;
    mp_real sum(0L, prec);
    mp_real twopi = mp_real::pi(prec) * 2L;
    long terms = 0;
    for (long d = 0; d < c; ++d) {
        if (std::gcd(d, c) != 1)
            continue;
        long db = inverse_mod(d, c);
        long r = mod(mulmod(mod(m, c), db, c) + mulmod(mod(n, c), d, c), c);
        sum += cos(twopi * mp_real(r, prec) / c);
        ++terms;
    }
    return real_hp(sum, std::ldexp(static_cast<double>(terms), -120));
}

std::vector<long> sqrt_residues(long D, long c)
{
    if (c < 1)
        throw std::invalid_argument("exp_sum_S: c must be positive");
    std::vector<long> xs;
    long target = mod(-D, c);
    for (long x = 0; x < c; ++x)
        if (mulmod(x, x, c) == target)
            xs.push_back(x);
    return xs;
}

double exp_sum_S(long D, long c)
{
    double s = 0.0;
    for (long x : sqrt_residues(D, c))
        s += std::cos(two_pi * static_cast<double>(mod(2 * x, c)) / static_cast<double>(c));
    return s;
}

real_hp exp_sum_S_hp(long D, long c, int bits)
{
    const mpfr_prec_t prec = bits + 16;
    mp_real sum(0L, prec);
    mp_real twopi = mp_real::pi(prec) * 2L;
    long terms = 0;
    for (long x : sqrt_residues(D, c)) {
        sum += cos(twopi * mp_real(mod(2 * x, c), prec) / c);
        ++terms;
    }
    return real_hp(sum, std::ldexp(static_cast<double>(terms + 1), -bits));
}

namespace {

void check_poincare(int k, long m, long n, long c_max)
{
    if (k < 4 || k > 14 || k % 2)
        throw std::invalid_argument("poincare_coeff: weight must be even in [4,14]");
    if (m < 1 || n < 1)
        throw std::invalid_argument("poincare_coeff: m and n must be positive");
    if (c_max < 1)
        throw std::invalid_argument("poincare_coeff: c_max must be positive");
}

// the principal part q^-m enters through K(-m, n, c)
double poincare_term(int k, long m, long n, long c)
{
    const double x = 2.0 * two_pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n)) / static_cast<double>(c);
    return kloosterman(-m, n, c) / static_cast<double>(c) * bessel_i(k - 1, x);
}

poincare_result finish(int k, long m, long n, long c_max, const std::vector<double>& terms)
{
    poincare_result r;
    r.c_max = c_max;
    const double pref = two_pi * ((k / 2) % 2 ? -1.0 : 1.0) *
                        std::pow(static_cast<double>(n) / static_cast<double>(m), (k - 1) / 2.0);
    double sum = 0.0, block = 0.0;
    for (long c = 1; c <= c_max; ++c) {
        sum += terms[c - 1];
        if (2 * c > c_max)
            block += terms[c - 1];
    }
    r.value = pref * sum;
    r.last_block = std::fabs(pref * block);
    // |K| <= c and I_nu(x) <= (x/2)^nu cosh(x) / nu!, summed over c > c_max
    const double s = two_pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    const double C = static_cast<double>(c_max);
    r.tail_bound = std::fabs(pref) * std::pow(s, k - 1) * std::cosh(2.0 * s / C) / std::tgamma(k) *
                   std::pow(C, -(k - 2)) / (k - 2);
    return r;
}

} // namespace

poincare_result poincare_coeff(int k, long m, long n, long c_max)
{
    check_poincare(k, m, n, c_max);
    std::vector<double> terms(c_max);
    const long block = 512;
    const long blocks = (c_max + block - 1) / block;
    // larger c cost more; hand them out first
    parallel_for(blocks, [&](std::size_t bi) {
        long b = blocks - 1 - static_cast<long>(bi);
        long hi = std::min(c_max, (b + 1) * block);
        for (long c = b * block + 1; c <= hi; ++c)
            terms[c - 1] = poincare_term(k, m, n, c);
    });
    return finish(k, m, n, c_max, terms);
}

poincare_result poincare_coeff_serial(int k, long m, long n, long c_max)
{
    check_poincare(k, m, n, c_max);
    std::vector<double> terms(c_max);
    for (long c = 1; c <= c_max; ++c) {
        const double x = 2.0 * two_pi * std::sqrt(static_cast<double>(m) * static_cast<double>(n)) /
                         static_cast<double>(c);
        terms[c - 1] = kloosterman_naive(-m, n, c) / static_cast<double>(c) * bessel_i(k - 1, x);
    }
    return finish(k, m, n, c_max, terms);
}

real_hp exact_formula_tJ(long D, long c_max, int bits)
{
    if (D <= 0 || (D % 4 != 0 && D % 4 != 3))
        throw std::invalid_argument("exact_formula_tJ: D must be positive and = 0,3 mod 4");
    if (c_max < 4 || c_max % 4)
        throw std::invalid_argument("exact_formula_tJ: c_max must be a positive multiple of 4");
    const mpfr_prec_t prec = bits + 32;
    mp_real sum(mpq_class(hurwitz(D) * -24), prec);
    mp_real four_pi_rtD = mp_real::pi(prec) * 4L * sqrt(mp_real(D, prec));
    double err = 0.0;
    for (long c = 4; c <= c_max; c += 4) {
        real_hp s = exp_sum_S_hp(D, c, bits);
        if (s.value.is_zero())
            continue;
        mp_real y = four_pi_rtD / c;
        mp_real ey = exp(y);
        mp_real sh = (ey - mp_real(1L, prec) / ey) / 2L;
        sum += s.value * sh;
        err += s.error_bound * sh.to_double() + std::ldexp(std::fabs(sh.to_double()) * c, -bits);
    }
    return real_hp(sum, err);
}

} // namespace cmtrace
