#include "osl/rational.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cctype>
#include <iomanip>
#include <sstream>

namespace osl {

namespace {

Integer pow10_int(long k) {
  return boost::multiprecision::pow(Integer(10), static_cast<unsigned>(k));
}

int sgn(const Rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

Rational parse_rational(const std::string& text) {
  // Accepts "p" or "p/q" with optional leading minus on p.  Anything that
  // smells like a decimal ("0.5", "1e-3") is rejected: metric data is exact.
  size_t i = 0;
  auto fail = [&]() -> Rational {
    throw MalformedInput("not an exact rational: '" + text + "'");
  };
  std::string num, den;
  if (i < text.size() && text[i] == '-') {
    num += '-';
    ++i;
  }
  size_t digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    num += text[i++];
    ++digits;
  }
  if (digits == 0) return fail();
  if (i < text.size()) {
    if (text[i] != '/') return fail();
    ++i;
    size_t den_digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      den += text[i++];
      ++den_digits;
    }
    if (den_digits == 0 || i != text.size()) return fail();
    if (Integer(den) == 0) throw MalformedInput("zero denominator: '" + text + "'");
    return Rational(Integer(num), Integer(den));
  }
  return Rational(Integer(num));
}

std::string rational_str(const Rational& value) {
  Integer n = numerator(value), d = denominator(value);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

std::string decimal_str(const Rational& value, int sig) {
  if (value == 0) return "0";
  Integer n = numerator(value), d = denominator(value);
  bool neg = n < 0;
  if (neg) n = -n;

  // Decimal exponent E with 10^E <= n/d < 10^{E+1}.
  long E = static_cast<long>(n.str().size()) - static_cast<long>(d.str().size());
  auto cmp_pow10 = [&](long e) {
    if (e >= 0) return n.compare(d * pow10_int(e));
    return (n * pow10_int(-e)).compare(d);
  };
  while (cmp_pow10(E) < 0) --E;
  while (cmp_pow10(E + 1) >= 0) ++E;

  // First `sig` significant digits, round half to even.
  long shift = sig - 1 - E;
  Integer num = n, den = d;
  if (shift >= 0)
    num *= pow10_int(shift);
  else
    den *= pow10_int(-shift);
  Integer q = num / den, r = num - q * den;
  Integer twice = r * 2;
  int c = twice.compare(den);
  if (c > 0 || (c == 0 && (q & 1) != 0)) ++q;
  std::string dig = q.str();
  if (static_cast<long>(dig.size()) > sig) {  // 99..9 rounded up to 100..0
    dig.pop_back();
    ++E;
  }
  size_t last = dig.find_last_not_of('0');
  dig.erase(last + 1);

  std::string out;
  if (E >= 0 && E < sig + 6) {
    if (E + 1 >= static_cast<long>(dig.size()))
      out = dig + std::string(E + 1 - dig.size(), '0');
    else
      out = dig.substr(0, E + 1) + "." + dig.substr(E + 1);
  } else if (E < 0 && E >= -9) {
    out = "0." + std::string(-E - 1, '0') + dig;
  } else {
    out = dig.substr(0, 1);
    if (dig.size() > 1) out += "." + dig.substr(1);
    out += "e" + std::to_string(E);
  }
  return neg ? "-" + out : out;
}

Float50 to_float(const Rational& value) {
  return Float50(numerator(value)) / Float50(denominator(value));
}

std::string log_decimal_str(const Rational& value, int sig) {
  if (value <= 0) throw BadParams("log of non-positive value");
  if (value == 1) return "0";
  Float50 l = log(to_float(value));
  std::ostringstream os;
  os << std::setprecision(sig) << l;
  return os.str();
}

namespace {

// Sign of m1*ln(A1) - m2*ln(A2) with A1, A2 > 1 and m1, m2 > 0, via floating
// intervals of increasing precision.  Returns 0 only for genuinely resolved
// equality; throws if the precision ladder cannot separate the terms.
template <unsigned Digits>
int interval_cmp(const Integer& m1, const Rational& A1, const Integer& m2,
                 const Rational& A2, bool* resolved) {
  using F = boost::multiprecision::number<
      boost::multiprecision::cpp_bin_float<Digits>>;
  F a1 = F(numerator(A1)) / F(denominator(A1));
  F a2 = F(numerator(A2)) / F(denominator(A2));
  F t1 = F(m1) * log(a1);
  F t2 = F(m2) * log(a2);
  F diff = t1 - t2;
  F scale = t1 + t2 + 1;
  F margin = scale * pow(F(10), -static_cast<int>(Digits) + 10);
  if (diff > margin) {
    *resolved = true;
    return 1;
  }
  if (diff < -margin) {
    *resolved = true;
    return -1;
  }
  *resolved = false;
  return 0;
}

int cmp_pos_terms(const Rational& c1, Rational A1, const Rational& c2,
                  Rational A2) {
  // Both terms positive: c_i > 0, A_i > 1.  Cross-multiply the coefficients.
  Integer m1 = numerator(c1) * denominator(c2);
  Integer m2 = numerator(c2) * denominator(c1);
  if (A1 == A2) return m1.compare(m2);
  if (m1 == m2) return A1.compare(A2);
  // If one base is a small power of the other, fold the relation into the
  // exponents so genuine equalities resolve exactly.
  for (int dir = 0; dir < 2; ++dir) {
    const Rational& big = dir == 0 ? A1 : A2;
    const Rational& small = dir == 0 ? A2 : A1;
    Rational p = small;
    for (int k = 1; k <= 64 && p <= big; ++k) {
      if (p == big) {
        Integer e1 = dir == 0 ? m1 * k : m1;
        Integer e2 = dir == 0 ? m2 : m2 * k;
        return e1.compare(e2);
      }
      p *= small;
    }
  }
  // Exact integer cross powers when the exponents are small enough.
  if (m1 <= 4096 && m2 <= 4096) {
    auto rational_pow = [](const Rational& a, unsigned m) {
      return Rational(boost::multiprecision::pow(numerator(a), m),
                      boost::multiprecision::pow(denominator(a), m));
    };
    Rational p1 = rational_pow(A1, m1.convert_to<unsigned>());
    Rational p2 = rational_pow(A2, m2.convert_to<unsigned>());
    return p1.compare(p2);
  }
  bool ok = false;
  int s = interval_cmp<50>(m1, A1, m2, A2, &ok);
  if (!ok) s = interval_cmp<100>(m1, A1, m2, A2, &ok);
  if (!ok) s = interval_cmp<200>(m1, A1, m2, A2, &ok);
  if (!ok) s = interval_cmp<400>(m1, A1, m2, A2, &ok);
  if (!ok)
    throw CertificateFailure("log-linear comparison unresolved at 400 digits");
  return s;
}

}  // namespace

int cmp_log_linear(const Rational& c1, const Rational& A, const Rational& c2,
                   const Rational& B) {
  if (A <= 0 || B <= 0) throw BadParams("cmp_log_linear needs positive bases");
  auto log_sign = [](const Rational& v) { return v > 1 ? 1 : (v == 1 ? 0 : -1); };
  int s1 = sgn(c1) * log_sign(A);
  int s2 = sgn(c2) * log_sign(B);
  if (s1 != s2) return s1 < s2 ? -1 : 1;
  if (s1 == 0) return 0;
  // Normalize both terms to |c| * ln(A') with A' > 1.
  Rational a1 = c1 > 0 ? A : Rational(1) / A;
  Rational a2 = c2 > 0 ? B : Rational(1) / B;
  Rational k1 = c1 > 0 ? c1 : -c1;
  Rational k2 = c2 > 0 ? c2 : -c2;
  if (s1 > 0) return cmp_pos_terms(k1, a1, k2, a2);
  // Both terms negative: t1 < t2 iff |t1| > |t2|.
  return -cmp_pos_terms(k1, Rational(1) / a1, k2, Rational(1) / a2);
}

}  // namespace osl
