#include "cmtrace/thetalift.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

#include "cmtrace/parallel.hpp"
#include "cmtrace/quadrature.hpp"

namespace cmtrace {

namespace {

constexpr double pi = std::numbers::pi;

cvec e(double t) { return std::polar(1.0, 2.0 * pi * t); }

mpq_class frac(const mpq_class& x)
{
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    mpq_class r = x - fl;
    r.canonicalize();
    return r;
}

mpq_class mod_rat(const mpq_class& x, long m)
{
    mpq_class y = x / m;
    return frac(y) * m;
}

bool is_integer(const mpq_class& x) { return x.get_den() == 1; }

mpq_class qvalue_exact(const rat3& X) { return -X[0] * X[0] - X[1] * X[2]; }

mpq_class pairing_exact(const rat3& X, const rat3& Y)
{
    return -2 * X[0] * Y[0] - X[1] * Y[2] - X[2] * Y[1];
}

// integral over r > R of (v r^2 + 1/2pi) e^{-pi v r^2} 4 pi r^2 / sqrt 2
double shell_tail(double R, double v)
{
    const double a = pi * v;
    const double ea = std::exp(-a * R * R);
    const double i2 = R * ea / (2 * a) + std::sqrt(pi) * std::erfc(std::sqrt(a) * R) / (4 * std::pow(a, 1.5));
    const double i4 = R * R * R * ea / (2 * a) + 3.0 / (2 * a) * i2;
    return 4 * pi / std::sqrt(2.0) * (v * i4 + i2 / (2 * pi));
}

} // namespace

double qvalue(const lattice_vector& X) { return -X.x1 * X.x1 - X.x2 * X.x3; }

double pairing(const lattice_vector& X, const lattice_vector& Y)
{
    return -2 * X.x1 * Y.x1 - X.x2 * Y.x3 - X.x3 * Y.x2;
}

lattice_vector act(const sl2z& g, const lattice_vector& X)
{
    const double a = g.a, b = g.b, c = g.c, d = g.d;
    // [[a,b],[c,d]] [[x1,x2],[x3,-x1]] [[d,-b],[-c,a]]
    const double m11 = a * X.x1 + b * X.x3, m12 = a * X.x2 - b * X.x1;
    const double m21 = c * X.x1 + d * X.x3, m22 = c * X.x2 - d * X.x1;
    return {m11 * d - m12 * c, -m11 * b + m12 * a, m21 * d - m22 * c};
}

lattice_vector x_of_z(cvec z)
{
    const double x = z.real(), y = z.imag();
    if (!(y > 0))
        throw std::invalid_argument("x_of_z: Im z must be positive");
    return {-x / y, std::norm(z) / y, -1.0 / y};
}

lattice_vector vector_of_form(const quad_form& Q)
{
    if (!Q.positive_definite())
        throw std::invalid_argument("vector_of_form: form must be positive definite");
    return {-0.5 * static_cast<double>(Q.b), -static_cast<double>(Q.c), static_cast<double>(Q.a)};
}

double majorant(const lattice_vector& X, cvec z)
{
    const double p = pairing(X, x_of_z(z));
    return p * p - pairing(X, X);
}

cvec km_value(const lattice_vector& X, cvec tau, cvec z)
{
    const double u = tau.real(), v = tau.imag();
    if (!(v > 0))
        throw std::invalid_argument("km_value: Im tau must be positive");
    const double p = pairing(X, x_of_z(z));
    return e(qvalue(X) * u) * (v * p * p - 1.0 / (2 * pi)) * std::exp(-pi * v * majorant(X, z));
}

bool lattice_spec::contains(const rat3& X) const
{
    return is_integer(X[0]) && is_integer(X[1] / step[1]) && is_integer(X[2] / step[2]);
}

bool lattice_spec::in_dual(const rat3& X) const
{
    return is_integer(2 * X[0]) && is_integer(X[2] * step[1]) && is_integer(X[1] * step[2]);
}

rat3 lattice_spec::reduce(const rat3& h) const
{
    return {mod_rat(h[0], 1), mod_rat(h[1], step[1]), mod_rat(h[2], step[2])};
}

std::vector<rat3> lattice_spec::cosets() const
{
    std::vector<rat3> out;
    const long n = step[1] * step[2];
    for (long i = 0; i < 2; ++i)
        for (long j = 0; j < n; ++j)
            for (long k = 0; k < n; ++k)
                out.push_back({mpq_class(i, 2), mpq_class(j, step[2]), mpq_class(k, step[1])});
    for (auto& h : out)
        for (auto& x : h)
            x.canonicalize();
    return out;
}

lattice_spec level4() { return {"level4", 1, {1, 1, 1}}; }

lattice_spec level4p(long p)
{
    if (p < 1)
        throw std::invalid_argument("level4p: p must be positive");
    return {"level4p", p, {1, 2, 2 * p}};
}

int coset_of_form(const quad_form& Q) { return static_cast<int>(((Q.b % 2) + 2) % 2); }

kernel_result theta_kernel(const lattice_spec& L, const rat3& hq, cvec tau, cvec z, double tol, double radius_scale)
{
    const double u = tau.real(), v = tau.imag();
    const double x = z.real(), y = z.imag();
    if (!(v > 0) || !(y > 0))
        throw std::invalid_argument("theta_kernel: tau and z must lie in the upper half plane");
    if (!(tol > 0))
        throw std::invalid_argument("theta_kernel: tol must be positive");
    if (!L.in_dual(hq))
        throw std::invalid_argument("theta_kernel: h is not in the dual lattice");
    const rat3 hr = L.reduce(hq);
    const double h1 = hr[0].get_d(), h2 = hr[1].get_d(), h3 = hr[2].get_d();
    const double s2 = static_cast<double>(L.step[1]), s3 = static_cast<double>(L.step[2]);
    const double covol = s2 * s3;

    double R = std::sqrt(std::max(1.0, std::log(1.0 / tol)) / (pi * v));
    while (shell_tail(R, v) / covol > tol / 4)
        R += 0.25;
    R *= radius_scale;
    const double R2 = R * R;

    kernel_result out;
    out.tail_bound = shell_tail(R, v) / covol;
    cvec sum = 0.0;
    long terms = 0;

    // rows with x3 != 0
    const long k3lo = static_cast<long>(std::ceil((-R / y - h3) / s3));
    const long k3hi = static_cast<long>(std::floor((R / y - h3) / s3));
    for (long k3 = k3lo; k3 <= k3hi; ++k3) {
        const double x3 = h3 + s3 * static_cast<double>(k3);
        if (x3 == 0.0)
            continue;
        const double b = x3 * y;
        const double c1 = x * x3;
        const long k1lo = static_cast<long>(std::ceil(c1 - R / std::sqrt(2.0) - h1));
        const long k1hi = static_cast<long>(std::floor(c1 + R / std::sqrt(2.0) - h1));
        for (long k1 = k1lo; k1 <= k1hi; ++k1) {
            const double x1 = h1 + static_cast<double>(k1);
            const double t = x1 - c1;
            const double rem = R2 - b * b - 2 * t * t;
            if (rem < 0)
                continue;
            const double wmax = y * std::sqrt(rem);
            const double c0 = 2 * x * x1 - x3 * x * x;
            const long k2lo = static_cast<long>(std::ceil((-wmax - c0 - h2) / s2));
            const long k2hi = static_cast<long>(std::floor((wmax - c0 - h2) / s2));
            for (long k2 = k2lo; k2 <= k2hi; ++k2) {
                const double x2 = h2 + s2 * static_cast<double>(k2);
                const double a = (x2 + c0) / y;
                const double p = a - b;
                const double maj = a * a + b * b + 2 * t * t;
                const double q = -x1 * x1 - x2 * x3;
                sum += e(q * u) * ((v * p * p - 1.0 / (2 * pi)) * std::exp(-pi * v * maj));
                ++terms;
            }
        }
    }

    // the x3 = 0 row: Poisson summation over x2 leaves a rapidly decaying series in k
    if (h3 == 0.0) {
        const double kfac = std::sqrt((std::log(1.0 / tol) + 40.0) * v / pi) / y * s2;
        const long kmax = std::max(1L, static_cast<long>(std::ceil(kfac)));
        const long k1lo = static_cast<long>(std::ceil(-R / std::sqrt(2.0) - h1));
        const long k1hi = static_cast<long>(std::floor(R / std::sqrt(2.0) - h1));
        const double y3v = y * y * y / std::pow(v, 1.5);
        for (long k1 = k1lo; k1 <= k1hi; ++k1) {
            const double x1 = h1 + static_cast<double>(k1);
            const double c = h2 + 2 * x * x1;
            double inner = 0.0;
            for (long k = 1; k <= kmax; ++k) {
                const double t = static_cast<double>(k) / s2;
                const double fh = -y3v * t * t * std::exp(-pi * t * t * y * y / v);
                inner += 2 * fh * std::cos(2 * pi * t * c);
                ++terms;
            }
            sum += e(-x1 * x1 * u) * (std::exp(-2 * pi * v * x1 * x1) * inner / s2);
        }
    }
    out.value = sum;
    out.terms = terms;
    return out;
}

namespace {

// crude envelope of |theta| high in the cusp
double kernel_envelope(double y, double v)
{
    return 8.0 * (1.0 + y * y * y) * std::pow(1.0 + v + 1.0 / v, 1.5) *
           (std::exp(-pi * y * y / v) + (1.0 + y / std::sqrt(v)) * std::exp(-pi * v * y * y));
}

} // namespace

integral_result theta_integral(const lattice_spec& L, const rat3& h, cvec tau, const modular_function& f, double tol)
{
    if (!(tol > 0))
        throw std::invalid_argument("theta_integral: tol must be positive");
    if (!f.constant_one && f.level != 1)
        throw std::invalid_argument("theta_integral: only full-level functions are supported");
    const double v = tau.imag();
    const double y0 = std::sqrt(3.0) / 2.0;
    const series_evaluator fe = f.constant_one ? series_evaluator() : series_evaluator(f, y0);
    const double mf = static_cast<double>(f.pole_order());
    auto fval = [&](cvec z) -> cvec { return f.constant_one ? cvec(1.0) : fe(z); };

    integral_result out;
    double Y = 2.0;
    while ((1.0 + std::exp(2 * pi * mf * Y)) * kernel_envelope(Y, v) > tol / 100) {
        Y += 0.05;
        if (Y > 200)
            throw budget_error("theta_integral: no cusp cutoff found");
    }
    out.Ycut = Y;

    std::atomic<long> evals{0};
    auto integrand = [&](cvec z) {
        cvec fz = fval(z);
        double kt = tol * 1e-3 / (1.0 + std::abs(fz));
        evals.fetch_add(1, std::memory_order_relaxed);
        return fz * theta_kernel(L, h, tau, z, kt).value / (z.imag() * z.imag());
    };

    // compact part below y = 2
    const double tol_a = tol / 3;
    quad_result A = integrate_panels(
        [&](double x) {
            const double lo = std::sqrt(1.0 - x * x);
            quad_result in = integrate([&](double y) { return integrand({x, y}); }, lo, 2.0, tol_a / 10);
            return in.value;
        },
        -0.5, 0.5, 4, tol_a);

    // cusp strip: periodic in x, so a uniform rule is spectrally accurate
    const int nx = 64;
    quad_result B = integrate(
        [&](double y) {
            cvec s = 0.0;
            for (int j = 0; j < nx; ++j)
                s += integrand({-0.5 + (j + 0.5) / nx, y});
            return s / static_cast<double>(nx);
        },
        2.0, Y, tol / 3);

    out.value = A.value + B.value;
    out.error = A.error + B.error + tol / 100;
    out.evaluations = evals.load();
    return out;
}

bool fourier_aliasing(const modular_function& f, const mpq_class& m, double v, int grid_size, double tol)
{
    const double md = m.get_d();
    if (f.constant_one) {
        // non-holomorphic terms sit at -N^2/4
        for (long N = 1; N <= 40; ++N) {
            mpq_class gap = (m + mpq_class(N * N, 4)) / grid_size;
            gap.canonicalize();
            if (is_integer(gap) && std::exp(-pi * N * N * v / 2 + 2 * pi * md * v) / (pi * N * N * v) > tol)
                return true;
        }
        return false;
    }
    const double k = static_cast<double>(f.pole_order());
    return md - grid_size >= -k * k / 4.0 - 1e-12;
}

fourier_result fourier_extract(const lattice_spec& L, const rat3& h, const mpq_class& m, double v,
                               const modular_function& f, int grid_size, double tol)
{
    if (grid_size < 8)
        throw std::invalid_argument("fourier_extract: grid_size must be at least 8");
    if (v < 1)
        throw std::invalid_argument("fourier_extract: v must be at least 1");
    if (frac(m - qvalue_exact(L.reduce(h))) != 0)
        throw std::invalid_argument("fourier_extract: m must lie in q(h) + Z");

    fourier_result out;
    const double md = m.get_d();
    out.aliasing = fourier_aliasing(f, m, v, grid_size, tol);

    auto vals = parallel_map<cvec>(grid_size, [&](std::size_t j) {
        const double u = static_cast<double>(j) / grid_size;
        return theta_integral(L, h, {u, v}, f, tol).value * e(-md * u);
    });
    cvec s = 0.0;
    for (const auto& x : vals)
        s += x;
    s *= std::exp(2 * pi * md * v) / (2.0 * grid_size);
    out.raw = s;
    out.value = real_hp::from_double(s.real(), std::exp(2 * pi * md * v) * tol + std::fabs(s.imag()));
    return out;
}

complex_hp eisen_prediction(cvec sigma, long trunc, int component)
{
    auto keep = [component](long D) { return component < 0 || (component == 0) == (D % 4 == 0); };
    const double u = sigma.real(), v = sigma.imag();
    if (!(v > 0))
        throw std::invalid_argument("eisen_prediction: Im must be positive");
    cvec s = 0.0;
    for (long D = 0; D <= trunc; ++D) {
        if (D % 4 == 1 || D % 4 == 2 || !keep(D))
            continue;
        s += hurwitz(D).get_d() * e(D * u / 4.0) * std::exp(-pi * D * v / 2);
    }
    // H(D) <= D for D >= 1
    double err = 0.0;
    {
        const double r = std::exp(-pi * v / 2);
        const double T = static_cast<double>(trunc + 1);
        err = (T + 1.0 / (1.0 - r)) * std::pow(r, T) / (1.0 - r);
    }
    cvec b = keep(0) ? beta_integral(0).to_double() : 0.0;
    for (long N = 1;; ++N) {
        const double s0 = pi * N * N * v;
        const double grow = std::exp(s0 / 2);
        if (std::exp(-s0 / 2) / s0 < 1e-20) {
            err += std::exp(-s0 / 2) / s0;
            break;
        }
        if (!keep(-N * N))
            continue;
        const double bN = beta_integral(s0).to_double();
        // N and -N
        b += 2.0 * bN * grow * e(-static_cast<double>(N * N) * u / 4.0);
    }
    s += b / (8 * pi * std::sqrt(v));
    return complex_hp::from_complex(s, err + 1e-14);
}

complex_hp series_prediction(const q_series& g, cvec sigma, int component)
{
    if (g.denom() != 1)
        throw std::invalid_argument("series_prediction: integral exponents expected");
    const double u = sigma.real(), v = sigma.imag();
    cvec s = 0.0;
    double last = 0.0;
    for (const auto& [n, c] : g.terms()) {
        if (component >= 0 && (component == 0) != (((n % 4) + 4) % 4 == 0))
            continue;
        cvec t = c.get_d() * e(n * u / 4.0) * std::exp(-pi * n * v / 2);
        s += t;
        last = std::abs(t);
    }
    return complex_hp::from_complex(s, last);
}

long disc_form::index_of(const rat3& h, const lattice_spec& L) const
{
    rat3 r = L.reduce(h);
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i] == r)
            return static_cast<long>(i);
    return -1;
}

smith_form smith_normal_form(const std::vector<std::vector<long>>& A0)
{
    const std::size_t n = A0.size();
    auto A = A0;
    smith_form s;
    s.U.assign(n, std::vector<long>(n, 0));
    s.V.assign(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        s.U[i][i] = s.V[i][i] = 1;
    auto swap_rows = [&](std::size_t i, std::size_t j) {
        std::swap(A[i], A[j]);
        std::swap(s.U[i], s.U[j]);
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < n; ++r) {
            std::swap(A[r][i], A[r][j]);
            std::swap(s.V[r][i], s.V[r][j]);
        }
    };
    auto add_row = [&](std::size_t dst, std::size_t src, long k) { // row dst += k row src
        for (std::size_t c = 0; c < n; ++c) {
            A[dst][c] += k * A[src][c];
            s.U[dst][c] += k * s.U[src][c];
        }
    };
    auto add_col = [&](std::size_t dst, std::size_t src, long k) {
        for (std::size_t r = 0; r < n; ++r) {
            A[r][dst] += k * A[r][src];
            s.V[r][dst] += k * s.V[r][src];
        }
    };
    for (std::size_t t = 0; t < n; ++t) {
        for (;;) {
            // smallest nonzero entry of the trailing block as pivot
            long best = 0;
            std::size_t bi = t, bj = t;
            for (std::size_t i = t; i < n; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (A[i][j] != 0 && (best == 0 || std::labs(A[i][j]) < best)) {
                        best = std::labs(A[i][j]);
                        bi = i;
                        bj = j;
                    }
            if (best == 0)
                break;
            swap_rows(t, bi);
            swap_cols(t, bj);
            bool clean = true;
            for (std::size_t i = t + 1; i < n; ++i) {
                add_row(i, t, -(A[i][t] / A[t][t]));
                if (A[i][t] != 0)
                    clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                add_col(j, t, -(A[t][j] / A[t][t]));
                if (A[t][j] != 0)
                    clean = false;
            }
            if (!clean)
                continue;
            // divisibility of the remaining block
            bool divides = true;
            for (std::size_t i = t + 1; i < n && divides; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (A[i][j] % A[t][t] != 0) {
                        add_row(t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides)
                break;
        }
    }
    s.d.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.d[i] = A[i][i];
    return s;
}

std::vector<std::vector<long>> gram_matrix(const lattice_spec& L)
{
    const long s = L.step[1] * L.step[2];
    return {{-2, 0, 0}, {0, 0, -s}, {0, -s, 0}};
}

disc_form disc_form_of(const lattice_spec& L)
{
    const auto G = gram_matrix(L);
    const smith_form sf = smith_normal_form(G);
    // generators V (1/d_i) e_i of G^-1 Z^3 / Z^3, in basis coordinates
    std::vector<std::array<mpq_class, 3>> gens;
    std::vector<long> orders;
    for (int i = 0; i < 3; ++i) {
        long d = std::labs(sf.d[i]);
        if (d == 0)
            throw std::invalid_argument("disc_form_of: degenerate Gram matrix");
        if (d == 1)
            continue;
        std::array<mpq_class, 3> g;
        for (int r = 0; r < 3; ++r) {
            g[r] = mpq_class(sf.V[r][i], d);
            g[r].canonicalize();
        }
        gens.push_back(g);
        orders.push_back(d);
    }
    auto to_x = [&](const std::array<mpq_class, 3>& c) {
        return rat3{c[0], c[1] * L.step[1], c[2] * L.step[2]};
    };
    std::set<rat3> seen;
    std::vector<long> k(gens.size(), 0);
    for (;;) {
        std::array<mpq_class, 3> c{0, 0, 0};
        for (std::size_t i = 0; i < gens.size(); ++i)
            for (int r = 0; r < 3; ++r)
                c[r] += k[i] * gens[i][r];
        seen.insert(L.reduce(to_x(c)));
        std::size_t i = 0;
        while (i < k.size() && ++k[i] == orders[i])
            k[i++] = 0;
        if (i == k.size())
            break;
    }
    disc_form d;
    d.elements.assign(seen.begin(), seen.end()); // zero sorts first
    const std::size_t n = d.elements.size();
    d.qvals.resize(n);
    d.pair.assign(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i) {
        d.qvals[i] = frac(qvalue_exact(d.elements[i]));
        for (std::size_t j = 0; j < n; ++j)
            d.pair[i][j] = frac(pairing_exact(d.elements[i], d.elements[j]));
    }
    d.signature_mod8 = 7; // signature (1,2)
    return d;
}

weil_matrices weil_rep(const disc_form& d)
{
    const std::size_t n = d.size();
    if (n == 0 || d.qvals.size() != n || d.pair.size() != n)
        throw std::invalid_argument("weil_rep: inconsistent discriminant form");
    std::map<rat3, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i)
        index[d.elements[i]] = i;
    for (std::size_t i = 0; i < n; ++i) {
        if (frac(2 * d.qvals[i] - d.pair[i][i]) != 0)
            throw std::invalid_argument("weil_rep: (h,h) != 2 q(h)");
        for (std::size_t j = 0; j < n; ++j)
            if (d.pair[i][j] != d.pair[j][i])
                throw std::invalid_argument("weil_rep: pairing not symmetric");
    }
    weil_matrices w;
    w.T.assign(n, std::vector<std::complex<double>>(n, 0.0));
    w.S.assign(n, std::vector<std::complex<double>>(n, 0.0));
    const std::complex<double> pref = e(1.0 / 8.0) / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        w.T[i][i] = e(d.qvals[i].get_d());
        for (std::size_t j = 0; j < n; ++j)
            w.S[j][i] = pref * e(-d.pair[i][j].get_d());
    }
    return w;
}

cmatrix matmul(const cmatrix& a, const cmatrix& b)
{
    const std::size_t n = a.size(), m = b[0].size(), k = b.size();
    cmatrix c(n, std::vector<std::complex<double>>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            const auto ail = a[i][l];
            if (ail == 0.0)
                continue;
            for (std::size_t j = 0; j < m; ++j)
                c[i][j] += ail * b[l][j];
        }
    return c;
}

double unitarity_defect(const cmatrix& a)
{
    const std::size_t n = a.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::complex<double> s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += a[i][k] * std::conj(a[j][k]);
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

double distance(const cmatrix& a, const cmatrix& b)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
    return worst;
}

} // namespace cmtrace
