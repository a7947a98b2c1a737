#ifndef CMTRACE_HP_HPP
#define CMTRACE_HP_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <gmpxx.h>
#include <mpfr.h>

namespace cmtrace {

/* Thrown when a requested accuracy cannot be certified within budget. */
struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Thrown when an enumeration or quadrature budget is exhausted. */
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/*
 * RAII wrapper around mpfr_t.  Every value carries its own precision;
 * binary operations produce a result at the larger operand precision.
 */
class mp_real {
    mpfr_t v_;

public:
    explicit mp_real(mpfr_prec_t prec = 53);
    mp_real(double x, mpfr_prec_t prec);
    mp_real(long x, mpfr_prec_t prec);
    mp_real(const mpz_class& x, mpfr_prec_t prec);
    mp_real(const mpq_class& x, mpfr_prec_t prec);
    mp_real(const mp_real& o);
    mp_real(mp_real&& o) noexcept;
    mp_real& operator=(const mp_real& o);
    mp_real& operator=(mp_real&& o) noexcept;
    ~mp_real();

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long exponent2() const; // floor(log2|x|)+1, or a large negative number for zero
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    mpz_class round_to_integer() const;
    std::string to_string(int digits = 0) const;

    mp_real& operator+=(const mp_real& o);
    mp_real& operator-=(const mp_real& o);
    mp_real& operator*=(const mp_real& o);
    mp_real& operator/=(const mp_real& o);
    mp_real operator-() const;

    static mp_real pi(mpfr_prec_t prec);
};

mp_real operator+(const mp_real& a, const mp_real& b);
mp_real operator-(const mp_real& a, const mp_real& b);
mp_real operator*(const mp_real& a, const mp_real& b);
mp_real operator/(const mp_real& a, const mp_real& b);
mp_real operator*(const mp_real& a, long b);
mp_real operator/(const mp_real& a, long b);
bool operator<(const mp_real& a, const mp_real& b);
bool operator>(const mp_real& a, const mp_real& b);

mp_real abs(const mp_real& x);
mp_real sqrt(const mp_real& x);
mp_real exp(const mp_real& x);
mp_real log(const mp_real& x);
mp_real sin(const mp_real& x);
mp_real cos(const mp_real& x);
mp_real sinh(const mp_real& x);
mp_real pow(const mp_real& x, long n);

struct mp_complex {
    mp_real re;
    mp_real im;

    explicit mp_complex(mpfr_prec_t prec = 53) : re(prec), im(prec) {}
    mp_complex(mp_real r, mp_real i) : re(std::move(r)), im(std::move(i)) {}

    mpfr_prec_t prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }
    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

    mp_complex& operator+=(const mp_complex& o);
    mp_complex& operator-=(const mp_complex& o);
    mp_complex& operator*=(const mp_complex& o);
};

mp_complex operator+(const mp_complex& a, const mp_complex& b);
mp_complex operator-(const mp_complex& a, const mp_complex& b);
mp_complex operator*(const mp_complex& a, const mp_complex& b);
mp_complex operator*(const mp_complex& a, const mp_real& b);
mp_complex operator/(const mp_complex& a, const mp_complex& b);
mp_real abs(const mp_complex& z);
mp_complex conj(const mp_complex& z);
mp_complex exp(const mp_complex& z);
/* e(z) = exp(2 pi i z) */
mp_complex expi2pi(const mp_complex& z);

/*
 * A value with a mantissa-bit budget and a nonnegative absolute error
 * bound.  Values computed in hardware doubles carry bits == 53.
 */
struct real_hp {
    mp_real value;
    double error_bound = 0.0;

    real_hp() : value(53) {}
    real_hp(mp_real v, double err) : value(std::move(v)), error_bound(err) {}
    static real_hp from_double(double v, double err);

    int bits() const { return static_cast<int>(value.prec()); }
    double to_double() const { return value.to_double(); }
};

struct complex_hp {
    mp_complex value;
    double error_bound = 0.0;

    complex_hp() : value(53) {}
    complex_hp(mp_complex v, double err) : value(std::move(v)), error_bound(err) {}
    static complex_hp from_complex(std::complex<double> v, double err);

    int bits() const { return static_cast<int>(value.prec()); }
    std::complex<double> to_complex() const { return value.to_complex(); }
};

} // namespace cmtrace

#endif
