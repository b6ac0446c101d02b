#include "smallforms/rational.hpp"

#include <cctype>
#include <cstddef>

#include "smallforms/errors.hpp"

namespace smallforms {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Integer pow10(unsigned long k) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, k);
  return out;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t");
  std::size_t end = text.find_last_not_of(" \t");
  if (begin == std::string::npos) {
    fail(errkind::parse, "empty rational literal");
  }
  std::string s = text.substr(begin, end - begin + 1);

  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = (s[0] == '-');
    s = s.substr(1);
  }
  if (s.empty()) {
    fail(errkind::parse, "rational literal has no digits: '" + text + "'");
  }

  // Split off a trailing exponent ("e" / "E") if present.
  long exp10 = 0;
  std::size_t epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    std::string epart = s.substr(epos + 1);
    s = s.substr(0, epos);
    bool eneg = false;
    if (!epart.empty() && (epart[0] == '+' || epart[0] == '-')) {
      eneg = (epart[0] == '-');
      epart = epart.substr(1);
    }
    if (!all_digits(epart) || epart.size() > 6) {
      fail(errkind::parse, "bad exponent in rational literal: '" + text + "'");
    }
    exp10 = std::stol(epart);
    if (eneg) exp10 = -exp10;
  }

  Integer num;
  Integer den(1);
  if (std::size_t slash = s.find('/'); slash != std::string::npos) {
    std::string ns = s.substr(0, slash);
    std::string ds = s.substr(slash + 1);
    if (!all_digits(ns) || !all_digits(ds)) {
      fail(errkind::parse, "bad fraction literal: '" + text + "'");
    }
    num = Integer(ns, 10);
    den = Integer(ds, 10);
    if (den == 0) {
      fail(errkind::parse, "zero denominator in rational literal: '" + text + "'");
    }
  } else if (std::size_t dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty()) {
      fail(errkind::parse, "bad decimal literal: '" + text + "'");
    }
    if (!whole.empty() && !all_digits(whole)) {
      fail(errkind::parse, "bad decimal literal: '" + text + "'");
    }
    if (!frac.empty() && !all_digits(frac)) {
      fail(errkind::parse, "bad decimal literal: '" + text + "'");
    }
    num = whole.empty() ? Integer(0) : Integer(whole, 10);
    if (!frac.empty()) {
      num = num * pow10(frac.size()) + Integer(frac, 10);
      den = pow10(frac.size());
    }
  } else {
    if (!all_digits(s)) {
      fail(errkind::parse, "bad integer literal: '" + text + "'");
    }
    num = Integer(s, 10);
  }

  if (exp10 > 0) {
    num *= pow10(static_cast<unsigned long>(exp10));
  } else if (exp10 < 0) {
    den *= pow10(static_cast<unsigned long>(-exp10));
  }
  if (negative) num = -num;

  Rational out(num, den);
  out.canonicalize();
  return out;
}

std::string format_rational(const Rational& v) {
  if (is_integer(v)) {
    return v.get_num().get_str();
  }
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

Integer rational_floor(const Rational& v) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
  return out;
}

Integer nearest_integer(const Rational& v) {
  Integer f = rational_floor(v);
  Rational frac = Rational(v - Rational(f));
  int c = cmp(frac, Rational(1, 2));
  if (c < 0) return f;
  if (c > 0) return Integer(f + 1);
  // Tie: pick the even neighbour.
  if (mpz_even_p(f.get_mpz_t())) return f;
  return Integer(f + 1);
}

Rational rational_pow(const Rational& base, long exp) {
  if (exp == 0) return Rational(1);
  bool invert = exp < 0;
  unsigned long k = invert ? static_cast<unsigned long>(-exp) : static_cast<unsigned long>(exp);
  if (invert && base == 0) {
    fail(errkind::domain, "zero base with negative exponent");
  }
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), k);
  Rational out = invert ? Rational(den, num) : Rational(num, den);
  out.canonicalize();
  return out;
}

Rational fractional_part(const Rational& v) {
  return Rational(v - Rational(rational_floor(v)));
}

}  // namespace smallforms
