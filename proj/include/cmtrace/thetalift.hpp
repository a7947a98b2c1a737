#ifndef CMTRACE_THETALIFT_HPP
#define CMTRACE_THETALIFT_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmtrace/analytic.hpp"
#include "cmtrace/hp.hpp"
#include "cmtrace/qform.hpp"

namespace cmtrace {

using cvec = std::complex<double>;

// X = [[x1, x2], [x3, -x1]]
struct lattice_vector {
    double x1 = 0, x2 = 0, x3 = 0;
};

double qvalue(const lattice_vector& X);                        // det X
double pairing(const lattice_vector& X, const lattice_vector& Y); // -tr(XY)
lattice_vector act(const sl2z& g, const lattice_vector& X);     // g X g^-1

lattice_vector x_of_z(cvec z);
lattice_vector vector_of_form(const quad_form& Q);
double majorant(const lattice_vector& X, cvec z);
cvec km_value(const lattice_vector& X, cvec tau, cvec z);

using rat3 = std::array<mpq_class, 3>;

/*
 * level4:  (b, c; a, -b), a,b,c integers
 * level4p: (b, 2c; 2ap, -b)
 * A lattice point is h + (k1, step[1] k2, step[2] k3).
 */
struct lattice_spec {
    std::string name;
    long p = 1;
    std::array<long, 3> step{1, 1, 1};

    bool contains(const rat3& X) const;
    bool in_dual(const rat3& X) const;
    std::vector<rat3> cosets() const; // representatives of L#/L, reduced into [0, step)
    rat3 reduce(const rat3& h) const;
};

lattice_spec level4();
lattice_spec level4p(long p);

// coset of X_Q in level4: 1 iff B is odd
int coset_of_form(const quad_form& Q);

struct kernel_result {
    cvec value;
    double tail_bound = 0.0; // estimate of the omitted lattice points
    long terms = 0;
};

// theta_h(tau, z): sum of km_value over h + L, with the x3 = 0 row Poisson-summed in x2
kernel_result theta_kernel(const lattice_spec& L, const rat3& h, cvec tau, cvec z, double tol,
                           double radius_scale = 1.0);

struct integral_result {
    cvec value;
    double error = 0.0;
    long evaluations = 0;
    double Ycut = 0.0;
};

integral_result theta_integral(const lattice_spec& L, const rat3& h, cvec tau, const modular_function& f,
                               double tol);

struct fourier_result {
    real_hp value;
    cvec raw;              // complex coefficient before taking the real part
    bool aliasing = false; // grid too coarse for the principal part
};

// true when e(m tau) can alias with a principal-part (or non-holomorphic) term on this grid
bool fourier_aliasing(const modular_function& f, const mpq_class& m, double v, int grid_size, double tol);

// coefficient of e(m tau) in I_h / 2 (X and -X give the same CM point)
fourier_result fourier_extract(const lattice_spec& L, const rat3& h, const mpq_class& m, double v,
                               const modular_function& f, int grid_size, double tol);

// sum H(D) e(D s/4) + (8 pi sqrt v)^-1 sum_N beta(pi N^2 v) e(-N^2 s/4)
// component h >= 0 keeps only the exponents = -h^2 (mod 4), i.e. the part belonging to I_h / 2
complex_hp eisen_prediction(cvec sigma, long trunc, int component = -1);
// sum c_n e(n s/4) for an integral-exponent series, e.g. g_series for f = J
complex_hp series_prediction(const q_series& g, cvec sigma, int component = -1);

struct disc_form {
    std::vector<rat3> elements; // in (x1, x2, x3) coordinates
    std::vector<mpq_class> qvals;
    std::vector<std::vector<mpq_class>> pair;
    int signature_mod8 = 7;

    std::size_t size() const { return elements.size(); }
    long index_of(const rat3& h, const lattice_spec& L) const;
};

// Smith normal form: U A V = diag(d), U and V unimodular
struct smith_form {
    std::vector<std::vector<long>> U, V;
    std::vector<long> d;
};
smith_form smith_normal_form(const std::vector<std::vector<long>>& A);

std::vector<std::vector<long>> gram_matrix(const lattice_spec& L);
disc_form disc_form_of(const lattice_spec& L);

using cmatrix = std::vector<std::vector<std::complex<double>>>;

struct weil_matrices {
    cmatrix S, T;
};

weil_matrices weil_rep(const disc_form& d);
cmatrix matmul(const cmatrix& a, const cmatrix& b);
double unitarity_defect(const cmatrix& a);            // max |a a^* - 1|
double distance(const cmatrix& a, const cmatrix& b); // max entry difference

} // namespace cmtrace

#endif
