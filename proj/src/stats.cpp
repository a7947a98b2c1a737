#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cmtrace/analytic.hpp"
#include "cmtrace/quadrature.hpp"

namespace cmtrace {

namespace {

constexpr double pi = std::numbers::pi;

const series_evaluator& J_evaluator()
{
    static const series_evaluator ev(make_function("J"), std::sqrt(3.0) / 2.0);
    return ev;
}

} // namespace

real_hp duke_statistic(long D)
{
    if (D <= 0 || (D % 4 != 0 && D % 4 != 3))
        throw std::invalid_argument("duke_statistic: D must be positive and = 0,3 mod 4");
    const series_evaluator& J = J_evaluator();
    // J(alpha) - e(-alpha) is the holomorphic part, so large q^-1 terms never cancel numerically
    double sum = 0.0;
    for (const auto& Q : enumerate_reduced(D)) {
        const double w = 1.0 / stabilizer_order(Q);
        const std::complex<double> alpha(-static_cast<double>(Q.b) / (2.0 * Q.a),
                                         std::sqrt(static_cast<double>(D)) / (2.0 * Q.a));
        std::complex<double> v = J(alpha, true);
        if (alpha.imag() <= 1.0)
            v += std::exp(std::complex<double>(0.0, -2.0 * pi) * alpha);
        sum += w * v.real();
    }
    const double H = hurwitz(D).get_d();
    return real_hp::from_double(sum / H, 1e-9 * (std::fabs(sum) + 1.0) / H);
}

real_hp asymptotic_residual(long D, int bits)
{
    if (D <= 0 || (D % 4 != 0 && D % 4 != 3))
        throw std::invalid_argument("asymptotic_residual: D must be positive and = 0,3 mod 4");
    trace_entry t = trace(make_function("J"), D, 1, bits);
    const mpfr_prec_t prec = t.bits + 16;
    mp_real main = exp(mp_real::pi(prec) * sqrt(mp_real(D, prec)));
    mp_real tv = t.certified ? mp_real(t.rounded, prec) : t.value.value;
    mp_real r = D % 2 ? tv + main : tv - main;
    double err = (t.certified ? 0.0 : t.value.error_bound) + std::ldexp(main.to_double(), -t.bits);
    return real_hp(r, err);
}

average_result regularized_average(const modular_function& f, double tol)
{
    if (f.level != 1)
        throw std::invalid_argument("regularized_average: level 1 functions only");
    average_result out;
    out.Y = 2.0;
    const double Y = out.Y;
    const double y0 = std::sqrt(3.0) / 2.0;
    if (!f.constant_one) {
        q_series s = f.expansion(1);
        if (sgn(s.coeff(0)) != 0)
            throw std::invalid_argument("regularized_average: constant term must vanish (or f = 1)");
    }
    series_evaluator ev;
    if (!f.constant_one)
        ev = series_evaluator(f, y0);
    auto value = [&](double x, double y) {
        return f.constant_one ? 1.0 : ev(std::complex<double>(x, y)).real();
    };
    long evals = 0;
    // f(-conj z) = conj f(z) for real coefficients: integrate over x >= 0 and double the real part
    auto column = [&](double x) {
        double lo = std::sqrt(1.0 - x * x);
        quad_result r = integrate([&](double y) { return cplx(value(x, y) / (y * y), 0.0); }, lo, Y, tol / 10);
        evals += r.evaluations;
        return cplx(r.value.real(), 0.0);
    };
    quad_result outer = integrate(column, 0.0, 0.5, tol / 4);
    double v = 2.0 * outer.value.real() * 3.0 / pi;
    double err = 2.0 * outer.error * 3.0 / pi;
    if (f.constant_one)
        v += 3.0 / pi / Y; // the strip above Y has area 1/Y
    out.value = real_hp::from_double(v, err);
    out.evaluations = evals + outer.evaluations;
    return out;
}

real_hp beta_integral(double s, double tol)
{
    if (!(s >= 0.0))
        throw std::invalid_argument("beta_integral: s must be nonnegative");
    if (s == 0.0)
        return real_hp::from_double(2.0, 0.0);
    // t = 1/r^2 turns the half-line into 2 * int_0^1 exp(-s/r^2) dr, smooth at r = 0
    quad_result r = integrate([s](double x) { return cplx(x > 0 ? std::exp(-s / (x * x)) : 0.0, 0.0); }, 0.0, 1.0,
                              tol / 2);
    return real_hp::from_double(2.0 * r.value.real(), 2.0 * r.error);
}

} // namespace cmtrace
