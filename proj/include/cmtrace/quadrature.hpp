#ifndef CMTRACE_QUADRATURE_HPP
#define CMTRACE_QUADRATURE_HPP

#include <complex>
#include <functional>

namespace cmtrace {

using cplx = std::complex<double>;

struct quad_result {
    cplx value;
    double error = 0.0; // estimated absolute error
    long evaluations = 0;
};

/*
 * Adaptive Gauss-Kronrod (7/15) on [a,b] to absolute tolerance tol.  Intervals
 * are bisected in a fixed order, so the result depends only on the integrand.
 * Throws budget_error when max_evals is exhausted before tol is met.
 */
quad_result integrate(const std::function<cplx(double)>& f, double a, double b, double tol,
                      long max_evals = 2000000);

double integrate_real(const std::function<double(double)>& f, double a, double b, double tol,
                      double* err = nullptr);

// Splits [a,b] into equal panels, integrates them on the worker pool and sums
// in panel order.
quad_result integrate_panels(const std::function<cplx(double)>& f, double a, double b, int panels, double tol,
                             long max_evals = 2000000);

} // namespace cmtrace

#endif
