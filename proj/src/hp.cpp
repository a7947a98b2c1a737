#include "cmtrace/hp.hpp"

#include <algorithm>
#include <climits>
#include <vector>

namespace cmtrace {

namespace {

mpfr_prec_t max_prec(const mp_real& a, const mp_real& b)
{
    return std::max(a.prec(), b.prec());
}

} // namespace

mp_real::mp_real(mpfr_prec_t prec)
{
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
}

mp_real::mp_real(double x, mpfr_prec_t prec)
{
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, x, MPFR_RNDN);
}

mp_real::mp_real(long x, mpfr_prec_t prec)
{
    mpfr_init2(v_, prec);
    mpfr_set_si(v_, x, MPFR_RNDN);
}

mp_real::mp_real(const mpz_class& x, mpfr_prec_t prec)
{
    mpfr_init2(v_, prec);
    mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN);
}

mp_real::mp_real(const mpq_class& x, mpfr_prec_t prec)
{
    mpfr_init2(v_, prec);
    mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN);
}

mp_real::mp_real(const mp_real& o)
{
    mpfr_init2(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

mp_real::mp_real(mp_real&& o) noexcept
{
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
}

mp_real& mp_real::operator=(const mp_real& o)
{
    if (this != &o) {
        mpfr_set_prec(v_, o.prec());
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

mp_real& mp_real::operator=(mp_real&& o) noexcept
{
    mpfr_swap(v_, o.v_);
    return *this;
}

mp_real::~mp_real() { mpfr_clear(v_); }

long mp_real::exponent2() const
{
    if (mpfr_zero_p(v_))
        return LONG_MIN / 4;
    return mpfr_get_exp(v_);
}

mpz_class mp_real::round_to_integer() const
{
    mpz_class r;
    mpfr_get_z(r.get_mpz_t(), v_, MPFR_RNDN);
    return r;
}

std::string mp_real::to_string(int digits) const
{
    char* s = nullptr;
    if (digits <= 0)
        digits = static_cast<int>(prec() * 0.30103) + 1;
    mpfr_asprintf(&s, "%.*Rg", digits, v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

mp_real& mp_real::operator+=(const mp_real& o)
{
    if (o.prec() > prec())
        mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

mp_real& mp_real::operator-=(const mp_real& o)
{
    if (o.prec() > prec())
        mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

mp_real& mp_real::operator*=(const mp_real& o)
{
    if (o.prec() > prec())
        mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

mp_real& mp_real::operator/=(const mp_real& o)
{
    if (o.prec() > prec())
        mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}

mp_real mp_real::operator-() const
{
    mp_real r(prec());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
}

mp_real mp_real::pi(mpfr_prec_t prec)
{
    mp_real r(prec);
    mpfr_const_pi(r.get(), MPFR_RNDN);
    return r;
}

mp_real operator+(const mp_real& a, const mp_real& b)
{
    mp_real r(max_prec(a, b));
    mpfr_add(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

mp_real operator-(const mp_real& a, const mp_real& b)
{
    mp_real r(max_prec(a, b));
    mpfr_sub(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

mp_real operator*(const mp_real& a, const mp_real& b)
{
    mp_real r(max_prec(a, b));
    mpfr_mul(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

mp_real operator/(const mp_real& a, const mp_real& b)
{
    mp_real r(max_prec(a, b));
    mpfr_div(r.get(), a.get(), b.get(), MPFR_RNDN);
    return r;
}

mp_real operator*(const mp_real& a, long b)
{
    mp_real r(a.prec());
    mpfr_mul_si(r.get(), a.get(), b, MPFR_RNDN);
    return r;
}

mp_real operator/(const mp_real& a, long b)
{
    mp_real r(a.prec());
    mpfr_div_si(r.get(), a.get(), b, MPFR_RNDN);
    return r;
}

bool operator<(const mp_real& a, const mp_real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }
bool operator>(const mp_real& a, const mp_real& b) { return mpfr_greater_p(a.get(), b.get()) != 0; }

#define CMTRACE_UNARY(name, fn)                       \
    mp_real name(const mp_real& x)                    \
    {                                                 \
        mp_real r(x.prec());                          \
        fn(r.get(), x.get(), MPFR_RNDN);              \
        return r;                                     \
    }

CMTRACE_UNARY(abs, mpfr_abs)
CMTRACE_UNARY(sqrt, mpfr_sqrt)
CMTRACE_UNARY(exp, mpfr_exp)
CMTRACE_UNARY(log, mpfr_log)
CMTRACE_UNARY(sin, mpfr_sin)
CMTRACE_UNARY(cos, mpfr_cos)
CMTRACE_UNARY(sinh, mpfr_sinh)

#undef CMTRACE_UNARY

mp_real pow(const mp_real& x, long n)
{
    mp_real r(x.prec());
    mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
    return r;
}

mp_complex& mp_complex::operator+=(const mp_complex& o)
{
    re += o.re;
    im += o.im;
    return *this;
}

mp_complex& mp_complex::operator-=(const mp_complex& o)
{
    re -= o.re;
    im -= o.im;
    return *this;
}

mp_complex& mp_complex::operator*=(const mp_complex& o)
{
    *this = *this * o;
    return *this;
}

mp_complex operator+(const mp_complex& a, const mp_complex& b) { return {a.re + b.re, a.im + b.im}; }
mp_complex operator-(const mp_complex& a, const mp_complex& b) { return {a.re - b.re, a.im - b.im}; }

mp_complex operator*(const mp_complex& a, const mp_complex& b)
{
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

mp_complex operator*(const mp_complex& a, const mp_real& b) { return {a.re * b, a.im * b}; }

mp_complex operator/(const mp_complex& a, const mp_complex& b)
{
    mp_real den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

mp_real abs(const mp_complex& z)
{
    mp_real r(z.prec());
    mpfr_hypot(r.get(), z.re.get(), z.im.get(), MPFR_RNDN);
    return r;
}

mp_complex conj(const mp_complex& z) { return {z.re, -z.im}; }

mp_complex exp(const mp_complex& z)
{
    mp_real m = exp(z.re);
    mp_real s(z.prec()), c(z.prec());
    mpfr_sin_cos(s.get(), c.get(), z.im.get(), MPFR_RNDN);
    return {m * c, m * s};
}

mp_complex expi2pi(const mp_complex& z)
{
    mp_real twopi = mp_real::pi(z.prec()) * 2L;
    mp_complex w(-(twopi * z.im), twopi * z.re);
    return exp(w);
}

real_hp real_hp::from_double(double v, double err) { return {mp_real(v, 53), err}; }

complex_hp complex_hp::from_complex(std::complex<double> v, double err)
{
    return {mp_complex(mp_real(v.real(), 53), mp_real(v.imag(), 53)), err};
}

} // namespace cmtrace
