#ifndef CMTRACE_QFORM_HPP
#define CMTRACE_QFORM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cmtrace/hp.hpp"

namespace cmtrace {

using i64 = std::int64_t;

// [a,b,c] <-> a x^2 + b x y + c y^2
struct quad_form {
    i64 a = 0, b = 0, c = 0;

    i64 disc() const { return b * b - 4 * a * c; }
    i64 D() const { return 4 * a * c - b * b; }
    bool positive_definite() const { return a > 0 && c > 0 && disc() < 0; }
    i64 eval(i64 x, i64 y) const { return a * x * x + b * x * y + c * y * y; }
    std::string str() const;

    friend bool operator==(const quad_form&, const quad_form&) = default;
    friend auto operator<=>(const quad_form&, const quad_form&) = default;
};

struct sl2z {
    i64 a = 1, b = 0, c = 0, d = 1;

    friend bool operator==(const sl2z&, const sl2z&) = default;
};

sl2z operator*(const sl2z& x, const sl2z& y);
sl2z inverse(const sl2z& g);

// (Q o g)(v) = Q(g v).  The CM point transforms as alpha_{Q o g} = g^{-1} alpha_Q.
quad_form act(const quad_form& q, const sl2z& g);

struct reduction {
    quad_form form;
    sl2z transform; // form == act(input, transform)
};

reduction reduce_with_transform(const quad_form& q);
quad_form reduce(const quad_form& q);
bool is_reduced(const quad_form& q);

std::vector<quad_form> enumerate_reduced(i64 D);

int stabilizer_order(const quad_form& q);

struct cm_point {
    quad_form form;
    i64 neg_b = 0, D = 0, two_a = 0; // alpha = (neg_b + i sqrt(D)) / two_a
    mp_complex value;
};

cm_point make_cm_point(const quad_form& q, int bits);

mpq_class hurwitz(i64 D);
bool is_fundamental(i64 D);
bool is_prime(i64 n);

enum class group_tag { full_modular, fricke_extended };

struct orbit_rep {
    quad_form form;
    int stabilizer_order = 1;
    group_tag group = group_tag::full_modular;
    i64 p = 1;
};

std::vector<orbit_rep> level_p_orbits(i64 D, i64 p);

// The Fricke involution on forms with p | a.
quad_form fricke(const quad_form& q, i64 p);

// Canonical label of the Gamma_0(p)-class of q (p | a): the reduced form of
// its SL2(Z)-class together with a canonical point of P^1(F_p).
struct gamma0_label {
    quad_form reduced;
    i64 r = 0, t = 0;

    friend bool operator==(const gamma0_label&, const gamma0_label&) = default;
    friend auto operator<=>(const gamma0_label&, const gamma0_label&) = default;
};

gamma0_label gamma0_class(const quad_form& q, i64 p);

} // namespace cmtrace

#endif
