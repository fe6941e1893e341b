#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "boxworld/errors.hpp"

namespace boxworld {

/// Exact rational with arbitrary-precision numerator and denominator.
using Rational = mpq_class;

inline Rational make_rational(long num, unsigned long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Canonical "num/den" form; integers print without a denominator.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational from_double(double d) {
  Rational r(d);
  r.canonicalize();
  return r;
}

/// Parses "[-]digits[/digits]". Rejects zero denominators and anything else.
inline Rational parse_rational(std::string_view text) {
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };
  std::string_view body = text;
  if (!body.empty() && body.front() == '-') body.remove_prefix(1);
  const auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
  if (!digits(num) || (slash != std::string_view::npos && !digits(den)))
    throw ParseError("not a fraction: '" + std::string(text) + "'");
  if (slash != std::string_view::npos && den.find_first_not_of('0') == std::string_view::npos)
    throw ParseError("zero denominator: '" + std::string(text) + "'");
  Rational r(std::string(text), 10);
  r.canonicalize();
  return r;
}

}  // namespace boxworld
