#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cmtrace/analytic.hpp"

namespace cmtrace {

namespace {

bool supported_order(double nu)
{
    if (nu == 0.5)
        return true;
    return nu >= 3 && nu <= 13 && nu == std::floor(nu);
}

} // namespace

double bessel_i(double nu, double x)
{
    if (x < 0)
        throw std::invalid_argument("bessel_i: x must be nonnegative");
    if (nu == 0.5) {
        if (x == 0)
            return 0.0;
        return std::sqrt(2.0 / (std::numbers::pi * x)) * std::sinh(x);
    }
    return std::cyl_bessel_i(nu, x);
}

real_hp bessel_i(double nu, const mp_real& x, int bits)
{
    if (!supported_order(nu))
        throw std::invalid_argument("bessel_i: order must be 1/2 or an integer in [3,13]");
    if (x.sign() < 0)
        throw std::invalid_argument("bessel_i: x must be nonnegative");
    const mpfr_prec_t prec = bits + 32;
    if (x.is_zero())
        return real_hp(mp_real(0L, prec), 0.0);
    mp_real xx(0L, prec);
    xx += x;
    const double xd = xx.to_double();

    if (nu == 0.5) {
        mp_real ex = exp(xx);
        mp_real sh = (ex - mp_real(1L, prec) / ex) / 2L;
        mp_real v = sqrt(mp_real(2L, prec) / (mp_real::pi(prec) * xx)) * sh;
        return real_hp(v, std::fabs(v.to_double()) * std::ldexp(1.0, -bits));
    }

    const long n = static_cast<long>(nu);
    if (2.0 * xd > bits * std::log(2.0) + 10.0) {
        // e^x / sqrt(2 pi x) * sum (-1)^k a_k(nu) / x^k, stopped at the requested size or the smallest term
        mp_real term(1L, prec), sum(1L, prec);
        double last = 1.0;
        double omitted = 0.0;
        for (long k = 1;; ++k) {
            mp_real next = term * mp_real((2 * k - 1) * (2 * k - 1) - 4 * n * n, prec) / (8 * k) / xx;
            double mag = std::fabs(next.to_double());
            bool past_peak = (2 * k - 1) * (2 * k - 1) > 4 * n * n;
            if ((past_peak && mag > last) || mag < std::ldexp(1.0, -bits - 8)) {
                omitted = mag;
                break;
            }
            term = next;
            sum += term;
            last = mag;
        }
        mp_real scale = exp(xx) / sqrt(mp_real::pi(prec) * xx * 2L);
        mp_real v = scale * sum;
        double sd = scale.to_double();
        // remainder at most twice the first omitted term; the e^{-x} branch is below 2^-bits relative
        double err = sd * (2.0 * omitted + std::ldexp(1.0, -bits));
        if (err > std::fabs(v.to_double()) * std::ldexp(1.0, -bits + 4))
            throw precision_error("bessel_i: asymptotic remainder too large for the requested precision");
        return real_hp(v, err);
    }

    // sum (x/2)^{2k+n} / (k! (k+n)!)
    mp_real half = xx / 2L;
    mp_real h2 = half * half;
    mp_real term = pow(half, n);
    for (long i = 2; i <= n; ++i)
        term /= mp_real(i, prec);
    mp_real sum = term;
    for (long k = 1;; ++k) {
        term = term * h2 / (k * (k + n));
        sum += term;
        double ratio = h2.to_double() / static_cast<double>((k + 1) * (k + 1 + n));
        if (ratio < 0.5 && term.to_double() < sum.to_double() * std::ldexp(1.0, -bits - 8)) {
            double tail = term.to_double() * ratio / (1.0 - ratio);
            return real_hp(sum, tail + sum.to_double() * std::ldexp(1.0, -bits));
        }
    }
}

} // namespace cmtrace
