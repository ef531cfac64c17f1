#ifndef EXACTNN_SCALAR_HPP
#define EXACTNN_SCALAR_HPP

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>

namespace exactnn {

/// Arbitrary-precision rational kept in canonical form (lowest terms,
/// positive denominator) by GMP.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Arbitrary-precision integer, used by quantized networks.
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <class S>
concept ExactScalar = std::same_as<S, Rational> || std::same_as<S, Integer>;

enum class ScalarKind { Rational, Int };

template <ExactScalar S>
constexpr ScalarKind scalar_kind_of() {
  return std::same_as<S, Rational> ? ScalarKind::Rational : ScalarKind::Int;
}

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "12", "-0.05374", "3/4" or "1.5e-3" exactly.
Rational parse_rational(std::string_view text);

/// Parses an integer literal; a decimal that is integer-valued ("4.0") is
/// accepted, anything with a fractional part is a ParseError.
Integer parse_integer(std::string_view text);

/// Finite decimal expansion when the denominator is 2^a·5^b, else "p/q".
std::string to_decimal_string(const Rational& value);
std::string to_decimal_string(const Integer& value);

Integer round_half_away_from_zero(const Rational& value);

inline Rational to_rational(const Rational& value) { return value; }
inline Rational to_rational(const Integer& value) { return Rational(value); }

inline bool is_integral(const Rational& value) {
  return boost::multiprecision::denominator(value) == 1;
}

/// Converts a rational into scalar kind S; throws ParseError when S is
/// Integer and the value has a fractional part.
template <ExactScalar S>
S scalar_from_rational(const Rational& value) {
  if constexpr (std::same_as<S, Rational>) {
    return value;
  } else {
    if (!is_integral(value)) {
      throw ParseError("value " + to_decimal_string(value) + " is not an integer");
    }
    return Integer(boost::multiprecision::numerator(value));
  }
}

template <ExactScalar S>
S parse_scalar(std::string_view text) {
  if constexpr (std::same_as<S, Rational>) {
    return parse_rational(text);
  } else {
    return parse_integer(text);
  }
}

template <ExactScalar S>
S abs_value(const S& value) {
  return value < 0 ? S(-value) : value;
}

}  // namespace exactnn

#endif
