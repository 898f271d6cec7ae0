#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "dsgrn/error.hpp"

namespace dsgrn {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational parse_rational(std::string_view text) {
  try {
    return Rational(std::string(text));
  } catch (const std::exception&) {
    fail(ErrorCode::SyntaxError, "bad rational '" + std::string(text) + "'");
  }
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Nearest rational with denominator 2^bits (numerator at least one).
inline Rational dyadic_round(double value, unsigned bits) {
  BigInt denominator = BigInt(1) << bits;
  double scaled = std::ldexp(value, static_cast<int>(bits));
  BigInt numerator(std::llround(scaled));
  if (numerator < 1) numerator = 1;
  return Rational(numerator, denominator);
}

}  // namespace dsgrn
