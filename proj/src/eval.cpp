#include "cmtrace/analytic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "cmtrace/parallel.hpp"

namespace cmtrace {

namespace {

constexpr double pi = std::numbers::pi;

long hauptmodul_exponent(long p)
{
    switch (p) {
    case 2: case 3: case 5: case 7: case 13:
        return 24 / (p - 1);
    default:
        throw std::invalid_argument("hauptmodul: Gamma_0^*(" + std::to_string(p) +
                                    ") Hauptmodul available for p in {2,3,5,7,13}");
    }
}

std::mutex haupt_mutex;
std::map<long, std::shared_ptr<const q_series>> haupt_cache;

std::shared_ptr<const q_series> cached_hauptmodul(long p, long trunc)
{
    std::lock_guard<std::mutex> lock(haupt_mutex);
    auto it = haupt_cache.find(p);
    if (it != haupt_cache.end() && it->second->trunc_num() >= trunc)
        return it->second;
    auto s = std::make_shared<const q_series>(hauptmodul_series(p, trunc));
    haupt_cache[p] = s;
    return s;
}

// log of the coefficient growth cap e^{4 pi sqrt(m n)} times |q|^n
double log_tail_term(long m, long n, double y)
{
    return 4.0 * pi * std::sqrt(static_cast<double>(std::max(m, 1L)) * static_cast<double>(n)) -
           2.0 * pi * y * static_cast<double>(n);
}

// smallest N with sum_{n >= N} e^{4 pi sqrt(mn)} |q|^n below e^{log_target}; returns the bound too
long series_cutoff(long m, double y, double log_target, double& log_bound)
{
    for (long N = 1; N < 100000; ++N) {
        double lt = log_tail_term(m, N, y);
        double ratio = 2.0 * pi * std::sqrt(static_cast<double>(std::max(m, 1L))) / (2.0 * std::sqrt(double(N))) -
                       2.0 * pi * y;
        if (ratio < -0.1 && lt - std::log1p(-std::exp(ratio)) < log_target) {
            log_bound = lt - std::log1p(-std::exp(ratio));
            return N;
        }
    }
    throw precision_error("series evaluation: point too close to the real axis");
}

} // namespace

long modular_function::pole_order() const
{
    if (constant_one)
        return 0;
    if (!j_poly.empty())
        return static_cast<long>(j_poly.size()) - 1;
    return -series->valuation_num() / series->denom();
}

q_series modular_function::expansion(long trunc) const
{
    if (constant_one)
        return q_series::monomial(1, 0, 1, trunc);
    if (!j_poly.empty()) {
        long m = pole_order();
        q_series j = j_series(trunc + m + 1);
        q_series acc = q_series::monomial(0, 0, 1, trunc + m + 1);
        q_series jp = q_series::monomial(1, 0, 1, trunc + 2 * m + 2);
        for (std::size_t i = 0; i < j_poly.size(); ++i) {
            if (sgn(j_poly[i]) != 0)
                acc += jp * mpq_class(j_poly[i]);
            if (i + 1 < j_poly.size())
                jp = jp * j;
        }
        return acc.truncated(trunc);
    }
    if (series->trunc_num() >= trunc * series->denom())
        return series->truncated_int(trunc);
    if (level > 1 && name == "T")
        return cached_hauptmodul(level, trunc)->truncated_int(trunc);
    throw truncation_error("modular function " + name + ": expansion known only below q^" +
                           series->trunc().get_str());
}

mpz_class modular_function::denominator() const
{
    if (constant_one || !j_poly.empty())
        return 1;
    mpz_class l = 1;
    for (const auto& [k, v] : series->terms())
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    return l;
}

q_series hauptmodul_series(long p, long trunc)
{
    long r = hauptmodul_exponent(p);
    long T = trunc + 2;
    q_series P = euler_product(T);
    q_series Pp = euler_product((T + p - 1) / p).scale_q(p).truncated(T);
    q_series ratio = (P / Pp).pow(r);
    q_series a = ratio.shift_num(-1);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), p, r / 2);
    q_series b = ratio.inverse().shift_num(1) * mpq_class(scale);
    q_series t = a + b + q_series::monomial(r, 0, 1, T);
    return t.truncated(trunc);
}

modular_function make_function(const std::string& name, long level)
{
    modular_function f;
    f.name = name;
    f.level = 1;
    if (name == "1") {
        f.constant_one = true;
        f.level = level;
        return f;
    }
    if (name == "T") {
        if (level < 2)
            throw std::invalid_argument("function T needs a level p >= 2");
        f.level = level;
        f.series = cached_hauptmodul(level, 400);
        return f;
    }
    if (level != 1)
        throw std::invalid_argument("function " + name + " is defined for the full modular group only");
    if (name == "j") {
        f.j_poly = {0, 1};
        return f;
    }
    if (name == "J") {
        f.j_poly = {-744, 1};
        return f;
    }
    if (name.size() > 1 && name[0] == 'J') {
        long m = 0;
        try {
            std::size_t pos = 0;
            m = std::stol(name.substr(1), &pos);
            if (pos != name.size() - 1)
                m = 0;
        } catch (const std::exception&) {
            m = 0;
        }
        if (m < 1 || m > 64)
            throw std::invalid_argument("unknown function '" + name + "'");
        f.j_poly = faber(m, 1).poly;
        return f;
    }
    throw std::invalid_argument("unknown function '" + name + "' (expected 1, j, J, J<m> or T)");
}

modular_function function_from_series(const std::string& name, const q_series& s, long level)
{
    if (s.denom() != 1)
        throw std::invalid_argument("function_from_series: exponents must be integral");
    modular_function f;
    f.name = name;
    f.level = level;
    f.series = std::make_shared<const q_series>(s);
    return f;
}

complex_hp eval_j(const mp_complex& tau, int bits)
{
    const double y = tau.im.to_double();
    if (!(y > 0.0))
        throw std::invalid_argument("eval_j: Im(tau) must be positive");
    const mpfr_prec_t prec = bits + 16;
    mp_complex tt(mp_real(0L, prec), mp_real(0L, prec));
    tt.re += tau.re;
    tt.im += tau.im;
    const double log2q = -2.0 * pi * y / std::log(2.0);
    const double target = -(bits + 24.0);

    // Euler product by the pentagonal number series
    mp_complex P(mp_real(1L, prec), mp_real(0L, prec));
    double log2_errP = 0.0;
    for (long k = 1;; ++k) {
        long e1 = k * (3 * k - 1) / 2, e2 = k * (3 * k + 1) / 2;
        if (e1 * log2q < target) {
            log2_errP = std::log2(4.0) + e1 * log2q;
            break;
        }
        mp_complex t1 = expi2pi(tt * mp_complex(mp_real(e1, prec), mp_real(0L, prec)));
        mp_complex t2 = expi2pi(tt * mp_complex(mp_real(e2, prec), mp_real(0L, prec)));
        if (k % 2)
            P -= t1 + t2;
        else
            P += t1 + t2;
    }

    // E4 by Horner in q
    long N = 1;
    while (N * log2q + 3.0 * std::log2(double(N)) + 9.0 > target)
        ++N;
    mp_complex q = expi2pi(tt);
    mp_complex acc(mp_real(0L, prec), mp_real(0L, prec));
    for (long n = N - 1; n >= 1; --n) {
        mpz_class s3 = 0;
        for (long d = 1; d * d <= n; ++d)
            if (n % d == 0) {
                s3 += mpz_class(d) * d * d;
                if (d != n / d)
                    s3 += mpz_class(n / d) * (n / d) * (n / d);
            }
        acc = acc * q;
        acc.re += mp_real(s3, prec);
    }
    acc = acc * q;
    mp_complex E4 = acc * mp_real(240L, prec);
    E4.re += mp_real(1L, prec);
    const double log2_errE4 = std::log2(240.0 * 1.21 * 2.0) + 3.0 * std::log2(double(N)) + N * log2q;

    mp_complex P24 = P;
    for (int i = 0; i < 4; ++i) // P^16
        P24 = P24 * P24;
    mp_complex P8 = P * P;
    P8 = P8 * P8;
    P8 = P8 * P8;
    P24 = P24 * P8;
    mp_complex Delta = q * P24;
    mp_complex E43 = E4 * E4 * E4;
    mp_complex j = E43 / Delta;

    const double aE4 = abs(E4).to_double();
    const double aP = abs(P).to_double();
    const double aD = abs(Delta).to_double();
    const double aj = abs(j).to_double();
    const double errE4 = std::ldexp(1.0, static_cast<int>(std::ceil(log2_errE4)));
    const double errP = std::ldexp(1.0, static_cast<int>(std::ceil(log2_errP)));
    const double errD = std::exp(-2.0 * pi * y) * 25.0 * std::pow(aP + errP, 23.0) * errP;
    const double rnd = std::ldexp(1.0, -static_cast<int>(prec) + 12);
    double err = 3.0 * (aE4 + errE4) * (aE4 + errE4) * errE4 / aD + aj * errD / aD;
    err += rnd * (aj + (aE4 + 1.0) * (aE4 + 1.0) * (aE4 + 1.0) / aD);
    return complex_hp(j, err);
}

complex_hp eval_modular(const modular_function& f, const mp_complex& tau, int bits, double abs_tol)
{
    const mpfr_prec_t prec = bits;
    complex_hp out;
    if (f.constant_one) {
        out = complex_hp(mp_complex(mp_real(1L, prec), mp_real(0L, prec)), 0.0);
    } else if (!f.j_poly.empty()) {
        if (tau.im.to_double() < std::sqrt(3.0) / 2.0 - 1e-12)
            throw std::invalid_argument("eval_modular: reduce tau to the fundamental domain first");
        complex_hp j = eval_j(tau, bits);
        mp_complex acc(mp_real(0L, prec + 16), mp_real(0L, prec + 16));
        double aj = abs(j.value).to_double() + j.error_bound;
        double deriv = 0.0, mag = 0.0;
        for (long i = static_cast<long>(f.j_poly.size()) - 1; i >= 0; --i) {
            acc = acc * j.value;
            acc.re += mp_real(f.j_poly[i], prec + 16);
            double ci = std::fabs(f.j_poly[i].get_d());
            if (i > 0)
                deriv += i * ci * std::pow(aj, static_cast<double>(i - 1));
            mag += ci * std::pow(aj, static_cast<double>(i));
        }
        double err = deriv * j.error_bound + mag * std::ldexp(1.0, -static_cast<int>(prec) + 8);
        out = complex_hp(acc, err);
    } else {
        const double y = tau.im.to_double();
        long m = f.pole_order();
        double log_bound = 0.0;
        long N = series_cutoff(m, y, -(bits + 8.0) * std::log(2.0), log_bound);
        q_series s = f.expansion(N);
        mp_complex q = expi2pi(mp_complex(mp_real(tau.re), mp_real(tau.im)));
        mp_complex acc(mp_real(0L, prec + 16), mp_real(0L, prec + 16));
        long v = s.valuation_num();
        double mag = 0.0;
        for (long n = N - 1; n >= v; --n) {
            acc = acc * q;
            mpq_class c = s.coeff(n);
            if (sgn(c) != 0) {
                acc.re += mp_real(c, prec + 16);
                mag += std::fabs(c.get_d()) * std::exp(-2.0 * pi * y * static_cast<double>(n));
            }
        }
        // multiply back q^v
        mp_complex qv = expi2pi(mp_complex(mp_real(tau.re) * v, mp_real(tau.im) * v));
        acc = acc * qv;
        double err = std::exp(log_bound) + mag * std::ldexp(1.0, -static_cast<int>(prec) + 8);
        out = complex_hp(acc, err);
    }
    if (out.error_bound > abs_tol)
        throw precision_error("eval_modular: certified error " + std::to_string(out.error_bound) +
                              " exceeds the requested tolerance");
    return out;
}

series_evaluator::series_evaluator(const modular_function& f, double ymin)
{
    if (f.constant_one) {
        val_ = 0;
        c_ = {1.0};
        return;
    }
    long m = f.pole_order();
    double lb = 0.0;
    long N = series_cutoff(m, ymin, std::log(1e-22), lb);
    q_series s = f.expansion(N);
    val_ = std::min(s.valuation_num(), 0L);
    c_.assign(N - val_, 0.0);
    for (const auto& [k, v] : s.terms())
        c_[k - val_] = v.get_d();
}

std::complex<double> series_evaluator::operator()(std::complex<double> z, bool holomorphic_only) const
{
    const std::complex<double> q = std::exp(std::complex<double>(0.0, 2.0 * pi) * z);
    std::complex<double> hol = 0.0;
    long n0 = std::max(0L, val_);
    for (long n = val_ + static_cast<long>(c_.size()) - 1; n >= n0; --n)
        hol = hol * q + c_[n - val_];
    if (n0 > 0)
        hol *= std::pow(q, static_cast<double>(n0));
    if (holomorphic_only || val_ >= 0)
        return hol;
    std::complex<double> qi = 1.0 / q, polar = 0.0, qp = 1.0;
    for (long n = -1; n >= val_; --n) {
        qp *= qi;
        polar += c_[n - val_] * qp;
    }
    return hol + polar;
}

int precision_policy(long D, long pole_order)
{
    long m = std::max(1L, pole_order);
    return static_cast<int>(m * static_cast<long>(std::ceil(pi * std::sqrt(static_cast<double>(D)) / std::log(2.0))) +
                            64);
}

trace_entry trace(const modular_function& f, long D, long p, int bits)
{
    if (!f.constant_one && f.level != p)
        throw std::invalid_argument("trace: function " + f.name + " is not defined on level " + std::to_string(p));
    trace_entry e;
    e.D = D;
    e.p = p;
    e.f = f.name;
    e.bits = bits > 0 ? bits : precision_policy(D, f.pole_order());
    e.rounded = 0;
    const mpfr_prec_t prec = e.bits;
    mp_complex sum(mp_real(0L, prec), mp_real(0L, prec));
    double err = 0.0;
    for (const auto& orb : level_p_orbits(D, p)) {
        cm_point cm = make_cm_point(orb.form, e.bits);
        complex_hp v = eval_modular(f, cm.value, e.bits);
        mp_real w(1L, prec);
        w /= mp_real(static_cast<long>(orb.stabilizer_order), prec);
        sum += v.value * w;
        err += v.error_bound / orb.stabilizer_order;
    }
    e.value = real_hp(sum.re, err);
    e.imag = sum.im.to_double();
    // CM values are algebraic integers; stabilizer weights bring denominators dividing 6 (level 1) or 12
    mpz_class grid = f.denominator() * (p == 1 ? 6 : 12);
    mp_real scaled = sum.re * mp_real(grid, prec);
    mpz_class k = scaled.round_to_integer();
    e.rounded = mpq_class(k, grid);
    e.rounded.canonicalize();
    mp_real diff = sum.re - mp_real(e.rounded, prec);
    e.residual = std::fabs(diff.to_double());
    e.certified = e.residual < 1e-6 && err < 1e-6 && std::fabs(e.imag) < 1e-6;
    return e;
}

std::vector<trace_entry> trace_table(const modular_function& f, const std::vector<long>& Ds, long p, int bits)
{
    if (f.level > 1 || p > 1)
        f.expansion(1);
    return parallel_map<trace_entry>(Ds.size(), [&](std::size_t i) { return trace(f, Ds[i], p, bits); });
}

} // namespace cmtrace
