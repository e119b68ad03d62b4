#pragma once

#include <gmpxx.h>

#include <string>

#include "parlab/errors.hpp"

namespace parlab {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "num/den" or "num" (decimal points are rejected on purpose).
inline Rational parse_rational(const std::string& s) {
    if (s.empty() || s.find('.') != std::string::npos)
        throw input_error("not a rational string: '" + s + "'");
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw input_error("not a rational string: '" + s + "'");
    if (q.get_den() == 0) throw input_error("zero denominator: '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

inline Rational rational_pow(const Rational& q, unsigned long e) {
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), e);
    r.canonicalize();
    return r;
}

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace parlab
