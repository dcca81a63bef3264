#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "osl/errors.hpp"

namespace osl {

// All metric quantities are exact rationals.  Floating point appears only at
// the presentation layer (decimal columns, log values) and in convergence
// diagnostics, never in a comparison that a theorem depends on.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

// Parses "p/q" or "p" (q > 0 after normalization).  Decimal literals are
// rejected everywhere on purpose: the exactness guarantees would silently rot
// if "0.5" were accepted anywhere near the metric data.
Rational parse_rational(const std::string& text);

// "p/q", or just "p" for integers.  Canonical: lowest terms, q > 0.
std::string rational_str(const Rational& value);

// Deterministic decimal rendering with `sig` significant digits, pure integer
// arithmetic, round half to even.  Used for the human-readable columns next
// to the exact fractions.
std::string decimal_str(const Rational& value, int sig = 12);

// ln(value) rendered with `sig` significant digits (value > 0).
std::string log_decimal_str(const Rational& value, int sig = 12);

Float50 to_float(const Rational& value);

// Sign of c1*ln(A) - c2*ln(B) for A, B > 0, computed exactly via integer
// cross powers.  This is what makes "secant slopes strictly decrease" a
// theorem check instead of an epsilon test.
int cmp_log_linear(const Rational& c1, const Rational& A, const Rational& c2,
                   const Rational& B);

}  // namespace osl
