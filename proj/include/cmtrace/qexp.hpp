#ifndef CMTRACE_QEXP_HPP
#define CMTRACE_QEXP_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cmtrace {

struct truncation_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/*
 * Truncated Laurent series sum c_k q^{k/denom}.  Coefficients are known
 * exactly for k < trunc_num; asking for anything at or past that bound is
 * an error.  Storage is dense from the lowest stored index.
 */
class q_series {
    long denom_ = 1;
    long trunc_ = 0;
    long lo_ = 0;
    std::vector<mpq_class> c_;

    void normalize();

public:
    q_series() = default;
    q_series(long denom, long trunc_num);

    static q_series monomial(const mpq_class& coeff, long exp_num, long denom, long trunc_num);
    static q_series from_terms(long denom, long trunc_num, const std::map<long, mpq_class>& terms);

    long denom() const { return denom_; }
    long trunc_num() const { return trunc_; }
    mpq_class trunc() const;
    long valuation_num() const; // trunc_num() when no nonzero coefficient is stored
    bool is_zero() const;

    mpq_class coeff_num(long k) const;
    mpq_class coeff(long n) const; // integer exponent
    mpq_class coeff(const mpq_class& e) const;
    void set_num(long k, const mpq_class& v);

    std::map<long, mpq_class> terms() const; // nonzero coefficients only

    q_series with_denom(long d) const;
    q_series truncated(long trunc_num) const;
    q_series truncated_int(long trunc) const { return truncated(trunc * denom_); }

    q_series& operator+=(const q_series& o);
    q_series& operator-=(const q_series& o);
    q_series& operator*=(const mpq_class& s);
    q_series operator-() const;

    q_series inverse() const;
    q_series pow(long n) const;
    q_series scale_q(long N) const;
    q_series shift_num(long k) const; // times q^{k/denom}
    q_series q_derivative() const;    // q d/dq

    bool integral() const;
    bool operator==(const q_series& o) const;
};

q_series operator+(q_series a, const q_series& b);
q_series operator-(q_series a, const q_series& b);
q_series operator*(const q_series& a, const q_series& b);
q_series operator*(q_series a, const mpq_class& s);
q_series operator/(const q_series& a, const q_series& b);

// Standard series; trunc is an integer bound on the q-exponent.
q_series euler_product(long trunc); // prod (1 - q^n)
q_series eta_series(const mpq_class& trunc);
q_series eisenstein(int k, long trunc); // k in {2,4,...,14}
q_series delta_series(long trunc);
q_series j_series(long trunc);
q_series J_series(long trunc);
// eta(t)^2 E4(4t) / (eta(2t) eta(4t)^6) = q^-1 - 2 + 248 q^3 - ...
q_series eta_quotient_g(long trunc);
// the trace generating series -q^-1 + 2 + sum t_J(D) q^D, which is minus the quotient
q_series g_series(long trunc);
q_series theta_series(long trunc);

struct faber_result {
    q_series series;
    std::vector<mpz_class> poly; // poly[i] multiplies j^i; monic of degree m
};

faber_result faber(long m, long trunc);
q_series weight_basis(int k, long m, long trunc);

mpq_class sigma1(const mpq_class& x);

struct principal_part {
    std::map<long, mpq_class> coeffs; // negative exponent -> coefficient
    std::optional<mpq_class> constant;

    bool operator==(const principal_part&) const = default;
};

// a maps n to a(-n), i.e. the principal part sum a(-n) q^{-n} of f
principal_part predicted_series(const std::map<long, mpq_class>& a, long p);

// Weakly holomorphic weight 3/2 plus form on Gamma_0(4) with given principal part.
q_series plus_space_solve(const principal_part& pp, long trunc);

// true when every coefficient at an integer exponent = 1,2 (mod 4) vanishes
bool plus_support(const q_series& f);

std::string to_string(const q_series& f, int max_terms = 12);

} // namespace cmtrace

#endif
