#include "cmtrace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "cmtrace/hp.hpp"
#include "cmtrace/parallel.hpp"

namespace cmtrace {

namespace {

const double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                       0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct segment {
    double a, b;
    cplx value;
    double error;
};

segment gk15(const std::function<cplx(double)>& f, double a, double b)
{
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx fc = f(c);
    cplx resk = fc * wgk[7];
    cplx resg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * xgk[j];
        cplx f1 = f(c - dx), f2 = f(c + dx);
        resk += wgk[j] * (f1 + f2);
        if (j % 2 == 1)
            resg += wg[j / 2] * (f1 + f2);
    }
    return {a, b, resk * h, std::abs((resk - resg) * h)};
}

struct by_error {
    bool operator()(const segment& x, const segment& y) const
    {
        if (x.error != y.error)
            return x.error < y.error;
        return x.a > y.a;
    }
};

} // namespace

quad_result integrate(const std::function<cplx(double)>& f, double a, double b, double tol, long max_evals)
{
    quad_result r;
    if (a == b)
        return r;
    std::priority_queue<segment, std::vector<segment>, by_error> heap;
    segment s = gk15(f, a, b);
    r.evaluations = 15;
    heap.push(s);
    double total_err = s.error;
    while (total_err > tol) {
        if (r.evaluations + 30 > max_evals)
            throw budget_error("integrate: evaluation budget exhausted before tolerance was met");
        segment worst = heap.top();
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            // interval at machine resolution; accept it as is
            heap.push({worst.a, worst.b, worst.value, 0.0});
            total_err -= worst.error;
            continue;
        }
        segment l = gk15(f, worst.a, m), u = gk15(f, m, worst.b);
        r.evaluations += 30;
        total_err += l.error + u.error - worst.error;
        heap.push(l);
        heap.push(u);
    }
    // sum in left-to-right order for a reproducible rounding pattern
    std::vector<segment> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const segment& x, const segment& y) { return x.a < y.a; });
    for (const auto& x : all) {
        r.value += x.value;
        r.error += x.error;
    }
    return r;
}

double integrate_real(const std::function<double(double)>& f, double a, double b, double tol, double* err)
{
    quad_result r = integrate([&](double x) { return cplx(f(x), 0.0); }, a, b, tol);
    if (err)
        *err = r.error;
    return r.value.real();
}

quad_result integrate_panels(const std::function<cplx(double)>& f, double a, double b, int panels, double tol,
                             long max_evals)
{
    std::vector<quad_result> parts(panels);
    double h = (b - a) / panels;
    parallel_for(panels, [&](std::size_t i) {
        double lo = a + h * static_cast<double>(i);
        double hi = (static_cast<int>(i) == panels - 1) ? b : lo + h;
        parts[i] = integrate(f, lo, hi, tol / panels, max_evals / panels);
    });
    quad_result r;
    for (const auto& p : parts) {
        r.value += p.value;
        r.error += p.error;
        r.evaluations += p.evaluations;
    }
    return r;
}

} // namespace cmtrace
