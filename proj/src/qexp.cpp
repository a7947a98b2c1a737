#include "cmtrace/qexp.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cmtrace {

namespace {

long ceil_div(long a, long b)
{
    long q = a / b;
    if (a % b != 0 && ((a < 0) == (b < 0)))
        ++q;
    return q;
}

mpz_class divisor_power_sum(long n, int e)
{
    mpz_class s = 0, t;
    for (long d = 1; d * d <= n; ++d) {
        if (n % d != 0)
            continue;
        mpz_ui_pow_ui(t.get_mpz_t(), d, e);
        s += t;
        if (d != n / d) {
            mpz_ui_pow_ui(t.get_mpz_t(), n / d, e);
            s += t;
        }
    }
    return s;
}

} // namespace

q_series::q_series(long denom, long trunc_num) : denom_(denom), trunc_(trunc_num), lo_(trunc_num)
{
    if (denom < 1)
        throw std::invalid_argument("q_series: denominator must be positive");
}

q_series q_series::monomial(const mpq_class& coeff, long exp_num, long denom, long trunc_num)
{
    q_series s(denom, trunc_num);
    if (exp_num < trunc_num)
        s.set_num(exp_num, coeff);
    return s;
}

q_series q_series::from_terms(long denom, long trunc_num, const std::map<long, mpq_class>& terms)
{
    q_series s(denom, trunc_num);
    if (terms.empty())
        return s;
    long lo = terms.begin()->first;
    long hi = terms.rbegin()->first;
    if (hi >= trunc_num)
        throw truncation_error("q_series: term at or beyond truncation");
    s.lo_ = lo;
    s.c_.assign(hi - lo + 1, mpq_class(0));
    for (const auto& [k, v] : terms)
        s.c_[k - lo] = v;
    s.normalize();
    return s;
}

void q_series::normalize()
{
    if (lo_ + static_cast<long>(c_.size()) > trunc_)
        c_.resize(std::max(0L, trunc_ - lo_));
    while (!c_.empty() && sgn(c_.back()) == 0)
        c_.pop_back();
    std::size_t first = 0;
    while (first < c_.size() && sgn(c_[first]) == 0)
        ++first;
    if (first == c_.size()) {
        c_.clear();
        lo_ = trunc_;
        return;
    }
    if (first > 0) {
        c_.erase(c_.begin(), c_.begin() + static_cast<long>(first));
        lo_ += static_cast<long>(first);
    }
}

mpq_class q_series::trunc() const
{
    mpq_class t(trunc_, denom_);
    t.canonicalize();
    return t;
}

long q_series::valuation_num() const { return c_.empty() ? trunc_ : lo_; }

bool q_series::is_zero() const { return c_.empty(); }

mpq_class q_series::coeff_num(long k) const
{
    if (k >= trunc_) {
        std::ostringstream os;
        os << "q_series: coefficient at exponent " << k << "/" << denom_ << " requested, known only below " << trunc_
           << "/" << denom_;
        throw truncation_error(os.str());
    }
    if (k < lo_ || k >= lo_ + static_cast<long>(c_.size()))
        return 0;
    return c_[k - lo_];
}

mpq_class q_series::coeff(long n) const { return coeff_num(n * denom_); }

mpq_class q_series::coeff(const mpq_class& e) const
{
    mpq_class scaled = e * denom_;
    scaled.canonicalize();
    if (scaled.get_den() != 1) {
        // exponent not on the lattice; still enforce the truncation contract
        if (e >= trunc())
            throw truncation_error("q_series: coefficient beyond truncation");
        return 0;
    }
    return coeff_num(scaled.get_num().get_si());
}

void q_series::set_num(long k, const mpq_class& v)
{
    if (k >= trunc_)
        throw truncation_error("q_series: cannot set coefficient beyond truncation");
    if (c_.empty()) {
        if (sgn(v) == 0)
            return;
        lo_ = k;
        c_.assign(1, v);
        return;
    }
    if (k < lo_) {
        c_.insert(c_.begin(), lo_ - k, mpq_class(0));
        lo_ = k;
    }
    if (k >= lo_ + static_cast<long>(c_.size()))
        c_.resize(k - lo_ + 1, mpq_class(0));
    c_[k - lo_] = v;
    normalize();
}

std::map<long, mpq_class> q_series::terms() const
{
    std::map<long, mpq_class> out;
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (sgn(c_[i]) != 0)
            out.emplace(lo_ + static_cast<long>(i), c_[i]);
    return out;
}

q_series q_series::with_denom(long d) const
{
    if (d % denom_ != 0)
        throw std::invalid_argument("q_series: new denominator must be a multiple");
    long f = d / denom_;
    if (f == 1)
        return *this;
    q_series r(d, trunc_ * f);
    if (c_.empty())
        return r;
    r.lo_ = lo_ * f;
    r.c_.assign((c_.size() - 1) * f + 1, mpq_class(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
        r.c_[i * f] = c_[i];
    return r;
}

q_series q_series::truncated(long trunc_num) const
{
    if (trunc_num > trunc_)
        throw truncation_error("q_series: cannot extend truncation");
    q_series r = *this;
    r.trunc_ = trunc_num;
    r.normalize();
    return r;
}

q_series& q_series::operator+=(const q_series& o)
{
    if (o.denom_ != denom_) {
        long d = std::lcm(denom_, o.denom_);
        *this = with_denom(d);
        return *this += o.with_denom(d);
    }
    trunc_ = std::min(trunc_, o.trunc_);
    for (std::size_t i = 0; i < o.c_.size(); ++i) {
        long k = o.lo_ + static_cast<long>(i);
        if (k >= trunc_)
            break;
        if (sgn(o.c_[i]) == 0)
            continue;
        if (c_.empty() || k < lo_ || k >= lo_ + static_cast<long>(c_.size())) {
            set_num(k, o.c_[i]);
        } else {
            c_[k - lo_] += o.c_[i];
        }
    }
    normalize();
    return *this;
}

q_series& q_series::operator-=(const q_series& o) { return *this += -o; }

q_series& q_series::operator*=(const mpq_class& s)
{
    for (auto& v : c_)
        v *= s;
    normalize();
    return *this;
}

q_series q_series::operator-() const
{
    q_series r = *this;
    for (auto& v : r.c_)
        v = -v;
    return r;
}

bool q_series::integral() const
{
    for (const auto& v : c_)
        if (v.get_den() != 1)
            return false;
    return true;
}

bool q_series::operator==(const q_series& o) const
{
    return denom_ == o.denom_ && trunc_ == o.trunc_ && terms() == o.terms();
}

q_series operator+(q_series a, const q_series& b) { return a += b; }
q_series operator-(q_series a, const q_series& b) { return a -= b; }
q_series operator*(q_series a, const mpq_class& s) { return a *= s; }

q_series operator*(const q_series& a0, const q_series& b0)
{
    if (a0.denom() != b0.denom()) {
        long d = std::lcm(a0.denom(), b0.denom());
        return a0.with_denom(d) * b0.with_denom(d);
    }
    long T = std::min(a0.trunc_num() + b0.valuation_num(), b0.trunc_num() + a0.valuation_num());
    q_series r(a0.denom(), T);
    if (a0.is_zero() || b0.is_zero())
        return r;
    auto ta = a0.terms();
    auto tb = b0.terms();
    long lo = a0.valuation_num() + b0.valuation_num();
    if (lo >= T)
        return r;
    std::vector<std::pair<long, const mpq_class*>> va, vb;
    for (const auto& [k, v] : ta)
        va.emplace_back(k, &v);
    for (const auto& [k, v] : tb)
        vb.emplace_back(k, &v);
    std::map<long, mpq_class> out;
    if (a0.integral() && b0.integral()) {
        std::vector<mpz_class> acc(T - lo);
        for (const auto& [ka, pa] : va) {
            for (const auto& [kb, pb] : vb) {
                if (ka + kb >= T)
                    break;
                mpz_addmul(acc[ka + kb - lo].get_mpz_t(), pa->get_num_mpz_t(), pb->get_num_mpz_t());
            }
        }
        for (std::size_t i = 0; i < acc.size(); ++i)
            if (sgn(acc[i]) != 0)
                out.emplace(lo + static_cast<long>(i), mpq_class(acc[i]));
    } else {
        std::vector<mpq_class> acc(T - lo);
        mpq_class tmp;
        for (const auto& [ka, pa] : va) {
            for (const auto& [kb, pb] : vb) {
                if (ka + kb >= T)
                    break;
                mpq_mul(tmp.get_mpq_t(), pa->get_mpq_t(), pb->get_mpq_t());
                acc[ka + kb - lo] += tmp;
            }
        }
        for (std::size_t i = 0; i < acc.size(); ++i)
            if (sgn(acc[i]) != 0)
                out.emplace(lo + static_cast<long>(i), acc[i]);
    }
    return q_series::from_terms(a0.denom(), T, out);
}

q_series q_series::inverse() const
{
    if (c_.empty())
        throw std::domain_error("q_series: division by a series with zero leading term");
    long v = lo_;
    long L = trunc_ - v;
    std::vector<mpq_class> b(L);
    mpq_class inv0 = 1 / c_[0];
    b[0] = inv0;
    mpq_class acc, tmp;
    for (long n = 1; n < L; ++n) {
        acc = 0;
        long top = std::min<long>(n, static_cast<long>(c_.size()) - 1);
        for (long i = 1; i <= top; ++i) {
            if (sgn(c_[i]) == 0 || sgn(b[n - i]) == 0)
                continue;
            mpq_mul(tmp.get_mpq_t(), c_[i].get_mpq_t(), b[n - i].get_mpq_t());
            acc += tmp;
        }
        b[n] = -acc * inv0;
    }
    q_series r(denom_, trunc_ - 2 * v);
    r.lo_ = -v;
    r.c_ = std::move(b);
    r.normalize();
    return r;
}

q_series operator/(const q_series& a, const q_series& b)
{
    if (a.denom() != b.denom()) {
        long d = std::lcm(a.denom(), b.denom());
        return a.with_denom(d) / b.with_denom(d);
    }
    return a * b.inverse();
}

q_series q_series::pow(long n) const
{
    if (n < 0)
        return inverse().pow(-n);
    if (n == 0) {
        long rel = trunc_ - valuation_num();
        return monomial(1, 0, denom_, rel);
    }
    q_series base = *this;
    q_series result;
    bool have = false;
    while (n > 0) {
        if (n & 1) {
            result = have ? result * base : base;
            have = true;
        }
        n >>= 1;
        if (n > 0)
            base = base * base;
    }
    return result;
}

q_series q_series::scale_q(long N) const
{
    if (N < 1)
        throw std::invalid_argument("scale_q: N must be positive");
    q_series r(denom_, trunc_ * N);
    if (c_.empty())
        return r;
    r.lo_ = lo_ * N;
    r.c_.assign((c_.size() - 1) * N + 1, mpq_class(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
        r.c_[i * N] = c_[i];
    return r;
}

q_series q_series::shift_num(long k) const
{
    q_series r = *this;
    r.lo_ += k;
    r.trunc_ += k;
    return r;
}

q_series q_series::q_derivative() const
{
    q_series r = *this;
    for (std::size_t i = 0; i < r.c_.size(); ++i)
        r.c_[i] *= mpq_class(lo_ + static_cast<long>(i), denom_);
    r.normalize();
    return r;
}

q_series euler_product(long trunc)
{
    std::map<long, mpq_class> t;
    for (long k = 0;; ++k) {
        long e1 = k * (3 * k - 1) / 2;
        long e2 = k * (3 * k + 1) / 2;
        if (e1 >= trunc)
            break;
        int s = (k % 2 == 0) ? 1 : -1;
        t[e1] = s;
        if (k > 0 && e2 < trunc)
            t[e2] = s;
    }
    return q_series::from_terms(1, trunc, t);
}

q_series eta_series(const mpq_class& trunc)
{
    if (trunc <= mpq_class(1, 24))
        throw std::invalid_argument("eta: truncation must exceed 1/24");
    mpq_class t24 = trunc * 24;
    mpz_class tn;
    mpz_cdiv_q(tn.get_mpz_t(), t24.get_num_mpz_t(), t24.get_den_mpz_t());
    long tnum = tn.get_si();
    long tint = ceil_div(tnum, 24);
    return euler_product(tint).with_denom(24).shift_num(1).truncated(tnum);
}

q_series eisenstein(int k, long trunc)
{
    mpq_class c;
    switch (k) {
    case 2: c = -24; break;
    case 4: c = 240; break;
    case 6: c = -504; break;
    case 8: c = 480; break;
    case 10: c = -264; break;
    case 12: c = mpq_class(65520, 691); break;
    case 14: c = -24; break;
    default: throw std::invalid_argument("eisenstein: unsupported weight " + std::to_string(k));
    }
    std::map<long, mpq_class> t;
    if (trunc > 0)
        t[0] = 1;
    for (long n = 1; n < trunc; ++n)
        t[n] = c * mpq_class(divisor_power_sum(n, k - 1));
    return q_series::from_terms(1, trunc, t);
}

q_series delta_series(long trunc)
{
    return euler_product(trunc).pow(24).shift_num(1).truncated(trunc);
}

q_series j_series(long trunc)
{
    if (trunc < 1)
        throw std::invalid_argument("j_series: truncation must be at least 1");
    q_series e4 = eisenstein(4, trunc + 1);
    q_series p24 = euler_product(trunc + 1).pow(24);
    return (e4.pow(3) / p24).shift_num(-1).truncated(trunc);
}

q_series J_series(long trunc) { return j_series(trunc) - q_series::monomial(744, 0, 1, trunc); }

q_series eta_quotient_g(long trunc)
{
    if (trunc < 1)
        throw std::invalid_argument("eta_quotient_g: truncation must be at least 1");
    long T = trunc + 1;
    q_series p1 = euler_product(T);
    q_series p2 = euler_product(ceil_div(T, 2)).scale_q(2).truncated(T);
    q_series p4 = euler_product(ceil_div(T, 4)).scale_q(4).truncated(T);
    q_series e44 = eisenstein(4, ceil_div(T, 4)).scale_q(4).truncated(T);
    q_series num = p1.pow(2) * e44;
    q_series den = p2 * p4.pow(6);
    return (num / den).shift_num(-1).truncated(trunc);
}

q_series g_series(long trunc) { return -eta_quotient_g(trunc); }

q_series theta_series(long trunc)
{
    std::map<long, mpq_class> t;
    for (long n = 0; n * n < trunc; ++n)
        t[n * n] = (n == 0) ? 1 : 2;
    return q_series::from_terms(1, trunc, t);
}

namespace {

// Reduce lead * j^m by multiples of lead * j^i until only q^{-m} remains
// among the non-positive exponents.
faber_result reduce_against_j(const q_series& lead, long m, long trunc)
{
    q_series j = j_series(trunc + m + 1);
    std::vector<q_series> basis;
    basis.push_back(lead.truncated_int(std::min(lead.trunc_num(), trunc + m + 1)));
    for (long i = 1; i <= m; ++i)
        basis.push_back(basis.back() * j);
    faber_result r;
    r.poly.assign(m + 1, 0);
    r.poly[m] = 1;
    q_series f = basis[m];
    for (long e = -(m - 1); e <= 0; ++e) {
        mpq_class c = f.coeff(e);
        if (sgn(c) == 0)
            continue;
        long i = -e;
        f -= basis[i] * c;
        if (c.get_den() != 1)
            throw std::logic_error("faber: non-integral reduction coefficient");
        r.poly[i] -= c.get_num();
    }
    if (f.trunc_num() < trunc)
        throw std::logic_error("faber: truncation loss");
    r.series = f.truncated(trunc);
    return r;
}

} // namespace

faber_result faber(long m, long trunc)
{
    if (m < 1)
        throw std::invalid_argument("faber: m must be positive");
    return reduce_against_j(q_series::monomial(1, 0, 1, trunc + m + 1), m, trunc);
}

q_series weight_basis(int k, long m, long trunc)
{
    if (k != 4 && k != 6 && k != 8 && k != 10 && k != 14)
        throw std::invalid_argument("weight_basis: weight " + std::to_string(k) +
                                    " unsupported (need 4, 6, 8, 10 or 14; weight 12 has a cusp form)");
    if (m < 1)
        throw std::invalid_argument("weight_basis: m must be positive");
    return reduce_against_j(eisenstein(k, trunc + m + 1), m, trunc).series;
}

mpq_class sigma1(const mpq_class& x0)
{
    mpq_class x = x0;
    x.canonicalize();
    if (x.get_den() != 1 || sgn(x) < 0)
        return 0;
    if (sgn(x) == 0)
        return mpq_class(-1, 24);
    long n = x.get_num().get_si();
    return mpq_class(divisor_power_sum(n, 1));
}

principal_part predicted_series(const std::map<long, mpq_class>& a, long p)
{
    if (p < 1)
        throw std::invalid_argument("predicted_series: p must be positive");
    principal_part out;
    mpq_class constant = 0;
    long nmax = 0;
    for (const auto& [n, v] : a) {
        if (n < 0)
            throw std::invalid_argument("predicted_series: keys are n for a(-n), n >= 0");
        if (n == 0 && sgn(v) != 0)
            throw std::invalid_argument("predicted_series: constant coefficient a(0) must vanish");
        nmax = std::max(nmax, n);
        constant += (sigma1(n) + p * sigma1(mpq_class(n, p))) * v;
    }
    for (long m = 1; m <= nmax; ++m) {
        mpq_class s = 0;
        for (long n = 1; m * n <= nmax; ++n) {
            auto it = a.find(m * n);
            if (it != a.end())
                s -= m * it->second;
        }
        if (sgn(s) != 0)
            out.coeffs[-m * m] = s;
    }
    out.constant = constant;
    return out;
}

bool plus_support(const q_series& f)
{
    for (const auto& [k, v] : f.terms()) {
        if (k % f.denom() != 0)
            return false;
        long e = k / f.denom();
        long r = ((e % 4) + 4) % 4;
        if (r == 1 || r == 2)
            return false;
    }
    return true;
}

namespace {

struct seed {
    std::string name;
    long pole;
    q_series series;
};

// rank of an exact matrix, destroying it
std::size_t exact_rank(std::vector<std::vector<mpq_class>> m)
{
    std::size_t rank = 0;
    std::size_t cols = m.empty() ? 0 : m[0].size();
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t piv = rank;
        while (piv < m.size() && sgn(m[piv][c]) == 0)
            ++piv;
        if (piv == m.size())
            continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = rank + 1; r < m.size(); ++r) {
            if (sgn(m[r][c]) == 0)
                continue;
            mpq_class f = m[r][c] / m[rank][c];
            for (std::size_t k = c; k < cols; ++k)
                m[r][k] -= f * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

} // namespace

q_series plus_space_solve(const principal_part& pp, long trunc)
{
    long M = 0;
    for (const auto& [e, v] : pp.coeffs) {
        if (e >= 0)
            throw std::invalid_argument("plus_space_solve: principal part exponents must be negative");
        long r = ((e % 4) + 4) % 4;
        if ((r == 1 || r == 2) && sgn(v) != 0)
            throw std::invalid_argument("plus_space_solve: exponent " + std::to_string(e) +
                                        " violates the plus condition");
        M = std::max(M, -e);
    }
    if (trunc < 1)
        throw std::invalid_argument("plus_space_solve: truncation must be at least 1");

    const long K = M / 4 + 1;
    const long Tw = trunc + 4;
    const long B = Tw + 4 * K + 12;

    q_series g = g_series(B);
    q_series th3 = theta_series(B).pow(3);
    long jt = ceil_div(B, 4) + 2;
    q_series j4 = j_series(jt).scale_q(4);
    // weight 3/2 Serre-type derivative of g, moved back to weight 3/2 with E10/Delta at 4 tau
    q_series e2_4 = eisenstein(2, jt).scale_q(4);
    q_series dg = g.q_derivative() * mpq_class(1, 4) - e2_4 * g * mpq_class(1, 8);
    q_series e10_4 = eisenstein(10, jt + 2).scale_q(4);
    q_series d4 = delta_series(jt + 2).scale_q(4);
    q_series h2 = dg * (e10_4 / d4);

    std::vector<seed> seeds;
    q_series jp = q_series::monomial(1, 0, 1, 4 * jt);
    for (long k = 0; k <= K; ++k) {
        if (4 * k + 1 <= M + 4)
            seeds.push_back({"g*j4^" + std::to_string(k), 4 * k + 1, g * jp});
        if (4 * k <= M + 4)
            seeds.push_back({"theta^3*j4^" + std::to_string(k), 4 * k, th3 * jp});
        if (4 * k + 5 <= M + 4)
            seeds.push_back({"dg*j4^" + std::to_string(k), 4 * k + 5, h2 * jp});
        jp = jp * j4;
    }
    long maxpole = 0;
    for (auto& s : seeds) {
        if (s.series.trunc_num() < Tw)
            throw std::logic_error("plus_space_solve: seed " + s.name + " lost truncation");
        s.series = s.series.truncated(Tw);
        maxpole = std::max(maxpole, s.pole);
    }

    const std::size_t ncol = seeds.size();
    std::vector<std::vector<mpq_class>> rows;
    for (long e = -maxpole; e < Tw; ++e) {
        long r = ((e % 4) + 4) % 4;
        bool pp_row = e < 0;
        bool plus_row = e >= 0 && (r == 1 || r == 2);
        if (!pp_row && !plus_row)
            continue;
        std::vector<mpq_class> row(ncol + 1);
        for (std::size_t s = 0; s < ncol; ++s)
            row[s] = seeds[s].series.coeff(e);
        if (pp_row) {
            auto it = pp.coeffs.find(e);
            row[ncol] = (it == pp.coeffs.end()) ? mpq_class(0) : it->second;
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::vector<mpq_class>> a = rows;
    for (auto& r : a)
        r.pop_back();
    std::size_t rank_a = exact_rank(a);
    std::size_t rank_ab = exact_rank(rows);
    if (rank_ab > rank_a) {
        std::ostringstream os;
        os << "plus_space_solve: principal part not reachable by the seed family (" << ncol << " seeds, rank "
           << rank_a << ", augmented rank " << rank_ab << ", max pole " << M << ")";
        throw solver_error(os.str());
    }

    // Gauss-Jordan on the augmented system, free variables set to zero
    std::vector<std::vector<mpq_class>> m = rows;
    std::vector<long> pivcol;
    std::size_t rk = 0;
    for (std::size_t c = 0; c < ncol && rk < m.size(); ++c) {
        std::size_t piv = rk;
        while (piv < m.size() && sgn(m[piv][c]) == 0)
            ++piv;
        if (piv == m.size())
            continue;
        std::swap(m[piv], m[rk]);
        mpq_class inv = 1 / m[rk][c];
        for (auto& v : m[rk])
            v *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == rk || sgn(m[r][c]) == 0)
                continue;
            mpq_class f = m[r][c];
            for (std::size_t k = c; k <= ncol; ++k)
                m[r][k] -= f * m[rk][k];
        }
        pivcol.push_back(static_cast<long>(c));
        ++rk;
    }
    std::vector<mpq_class> x(ncol, mpq_class(0));
    for (std::size_t i = 0; i < pivcol.size(); ++i)
        x[pivcol[i]] = m[i][ncol];

    q_series out(1, Tw);
    for (std::size_t s = 0; s < ncol; ++s)
        if (sgn(x[s]) != 0)
            out += seeds[s].series * x[s];

    if (rank_a < ncol) {
        // a dependency among seeds is harmless only if it is a dependency of series
        for (std::size_t c = 0; c < ncol; ++c) {
            if (std::find(pivcol.begin(), pivcol.end(), static_cast<long>(c)) != pivcol.end())
                continue;
            q_series v = seeds[c].series;
            for (std::size_t i = 0; i < pivcol.size(); ++i)
                if (sgn(m[i][c]) != 0)
                    v -= seeds[pivcol[i]].series * m[i][c];
            if (!v.is_zero()) {
                std::ostringstream os;
                os << "plus_space_solve: solution not unique (" << ncol << " seeds, rank " << rank_a
                   << "); free seed " << seeds[c].name << " leaves a nonzero plus form";
                throw solver_error(os.str());
            }
        }
    }

    out = out.truncated(trunc);
    for (long e = -maxpole; e < 0; ++e) {
        auto it = pp.coeffs.find(e);
        mpq_class want = (it == pp.coeffs.end()) ? mpq_class(0) : it->second;
        if (out.coeff(e) != want)
            throw solver_error("plus_space_solve: principal part check failed at exponent " + std::to_string(e));
    }
    if (!plus_support(out))
        throw solver_error("plus_space_solve: output violates the plus condition");
    return out;
}

std::string to_string(const q_series& f, int max_terms)
{
    std::ostringstream os;
    int n = 0;
    for (const auto& [k, v] : f.terms()) {
        if (n++ == max_terms) {
            os << " + ...";
            break;
        }
        if (n > 1)
            os << (sgn(v) < 0 ? " - " : " + ");
        else if (sgn(v) < 0)
            os << "-";
        os << mpq_class(abs(v)).get_str();
        mpq_class e(k, f.denom());
        e.canonicalize();
        os << "*q^" << (e.get_den() == 1 ? e.get_num().get_str() : "(" + e.get_str() + ")");
    }
    if (n == 0)
        os << "0";
    os << " + O(q^" << f.trunc().get_str() << ")";
    return os.str();
}

} // namespace cmtrace
