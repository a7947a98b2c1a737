#ifndef CMTRACE_ANALYTIC_HPP
#define CMTRACE_ANALYTIC_HPP

#include <complex>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmtrace/hp.hpp"
#include "cmtrace/qexp.hpp"
#include "cmtrace/qform.hpp"

namespace cmtrace {

/*
 * A modular function for Gamma_0^*(level): either a polynomial in j (level 1)
 * or an exact q-expansion q^-m + ... with integer exponents.
 */
struct modular_function {
    std::string name;
    long level = 1;
    std::vector<mpz_class> j_poly; // j_poly[i] multiplies j^i
    std::shared_ptr<const q_series> series;
    bool constant_one = false;

    long pole_order() const;
    // exact expansion to the given integer truncation
    q_series expansion(long trunc) const;
    // lcm of coefficient denominators (1 for integral functions)
    mpz_class denominator() const;
};

// "1", "j", "J", "J<m>" (Faber polynomial), or "T" for the Gamma_0^*(p) Hauptmodul
modular_function make_function(const std::string& name, long level = 1);
modular_function function_from_series(const std::string& name, const q_series& s, long level);

// (eta(t)/eta(pt))^r + r + p^{r/2} (eta(pt)/eta(t))^r with r = 24/(p-1), p in {2,3,5,7,13}
q_series hauptmodul_series(long p, long trunc);

complex_hp eval_j(const mp_complex& tau, int bits);
complex_hp eval_modular(const modular_function& f, const mp_complex& tau, int bits,
                        double abs_tol = std::numeric_limits<double>::infinity());

// fast double-precision evaluation of an expansion on Im z >= ymin
class series_evaluator {
    long val_ = 0;
    std::vector<double> c_;

public:
    series_evaluator() = default;
    series_evaluator(const modular_function& f, double ymin);
    // f(z); with holomorphic_only the q^{<0} part is dropped
    std::complex<double> operator()(std::complex<double> z, bool holomorphic_only = false) const;
    long terms() const { return static_cast<long>(c_.size()); }
};

struct trace_entry {
    long D = 0;
    long p = 1;
    std::string f;
    real_hp value;
    double imag = 0.0;
    mpq_class rounded;
    double residual = 0.0;
    bool certified = false;
    int bits = 0;
};

int precision_policy(long D, long pole_order);
trace_entry trace(const modular_function& f, long D, long p = 1, int bits = 0);
std::vector<trace_entry> trace_table(const modular_function& f, const std::vector<long>& Ds, long p = 1,
                                     int bits = 0);

// Kloosterman sums
double kloosterman_naive(long m, long n, long c);
double kloosterman(long m, long n, long c);
real_hp kloosterman_hp(long m, long n, long c);

// S(D,c) = sum over x mod c with x^2 = -D (mod c) of e(2x/c)
std::vector<long> sqrt_residues(long D, long c);
double exp_sum_S(long D, long c);
real_hp exp_sum_S_hp(long D, long c, int bits);

double bessel_i(double nu, double x);
real_hp bessel_i(double nu, const mp_real& x, int bits);

struct poincare_result {
    double value = 0.0;
    double tail_bound = 0.0; // rigorous bound for the omitted c > c_max
    double last_block = 0.0; // |contribution of c in (c_max/2, c_max]|
    long c_max = 0;
};

poincare_result poincare_coeff(int k, long m, long n, long c_max);
poincare_result poincare_coeff_serial(int k, long m, long n, long c_max);

real_hp exact_formula_tJ(long D, long c_max, int bits = 128);

real_hp duke_statistic(long D);
real_hp asymptotic_residual(long D, int bits = 0);

struct average_result {
    real_hp value;
    double Y = 1.0;
    long evaluations = 0;
};

average_result regularized_average(const modular_function& f, double tol = 1e-8);

real_hp beta_integral(double s, double tol = 1e-14);

} // namespace cmtrace

#endif
