#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "sweepout/errors.hpp"

namespace sweepout {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Integer floor_of(const Rational& x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

inline Integer ceil_of(const Rational& x) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

inline bool is_integer(const Rational& x) { return x.get_den() == 1; }

inline Integer pow_integer(const Integer& base, unsigned long exponent) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
  return r;
}

inline Rational pow_rational(const Rational& base, unsigned long exponent) {
  Rational r(pow_integer(base.get_num(), exponent), pow_integer(base.get_den(), exponent));
  r.canonicalize();
  return r;
}

/// Canonical "p/q" rendering used in every artifact file (q >= 1, always present).
inline std::string to_fraction_string(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline Integer parse_integer(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  s = s.substr(b);
  if (s.empty()) throw parse_error("empty integer literal");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw parse_error("malformed integer literal '" + s + "'");
  for (std::size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') throw parse_error("malformed integer literal '" + s + "'");
  if (s[0] == '+') s = s.substr(1);
  return Integer(s, 10);
}

/// Accepts "p/q", "p", and terminating decimals such as "0.05" or "-1.5",
/// converting the latter exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (auto slash = s.find('/'); slash != std::string::npos) {
    return make_rational(parse_integer(s.substr(0, slash)), parse_integer(s.substr(slash + 1)));
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    if (frac.empty()) throw parse_error("malformed decimal literal '" + s + "'");
    Integer w = parse_integer(whole);
    Integer f = parse_integer(frac);
    if (frac[0] == '-' || frac[0] == '+') throw parse_error("malformed decimal literal '" + s + "'");
    Integer scale = pow_integer(10, frac.size());
    Rational r = make_rational(w < 0 ? -w : w, 1) + make_rational(f, scale);
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_integer(s));
}

/// Decimal rendering for human-facing summaries only; never used where values
/// are re-read for verification.
inline std::string approx_decimal(const Rational& x, int digits = 6) {
  Integer scale = pow_integer(10, static_cast<unsigned long>(digits));
  Rational scaled = x * scale;
  Integer n = floor_of(scaled + Rational(1, 2));
  bool negative = n < 0;
  if (negative) n = -n;
  std::string s = n.get_str();
  if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  return negative ? "-" + s : s;
}

}  // namespace sweepout
