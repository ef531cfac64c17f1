#include "exactnn/scalar.hpp"

#include <cctype>

namespace exactnn {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Integer pow10(unsigned exponent) {
  Integer result = 1;
  Integer base = 10;
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    base *= base;
    exponent >>= 1U;
  }
  return result;
}

// Boost reads a leading 0 as an octal prefix, so digit strings are trimmed first.
Integer from_digits(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  return first == std::string_view::npos ? Integer(0) : Integer(std::string(digits.substr(first)));
}

[[noreturn]] void bad_literal(std::string_view text) {
  throw ParseError("invalid numeric literal \"" + std::string(text) + "\"");
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = text.substr(e + 1);
    text = text.substr(0, e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) bad_literal(original);
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
  }

  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
    if (!frac_part.empty() && !all_digits(frac_part)) bad_literal(original);
  }
  if (int_part.empty() && frac_part.empty()) bad_literal(original);
  if (!int_part.empty() && !all_digits(int_part)) bad_literal(original);

  std::string digits(int_part);
  digits.append(frac_part);
  Integer mantissa = from_digits(digits);
  exponent -= static_cast<long>(frac_part.size());

  Rational value(mantissa);
  if (exponent > 0) {
    value *= Rational(pow10(static_cast<unsigned>(exponent)));
  } else if (exponent < 0) {
    value /= Rational(pow10(static_cast<unsigned>(-exponent)));
  }
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  if (text.empty()) bad_literal(original);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
      negative = num.front() == '-';
      num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den)) bad_literal(original);
    Integer d = from_digits(den);
    if (d == 0) throw ParseError("zero denominator in \"" + std::string(original) + "\"");
    Rational value(from_digits(num), d);
    return negative ? Rational(-value) : value;
  }
  return parse_decimal(text, original);
}

Integer parse_integer(std::string_view text) {
  Rational value = parse_rational(text);
  if (!is_integral(value)) {
    throw ParseError("expected integer literal, got \"" + std::string(text) + "\"");
  }
  return Integer(boost::multiprecision::numerator(value));
}

std::string to_decimal_string(const Integer& value) { return value.str(); }

std::string to_decimal_string(const Rational& value) {
  Integer num = boost::multiprecision::numerator(value);
  Integer den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();

  unsigned twos = 0;
  unsigned fives = 0;
  Integer rest = den;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return num.str() + "/" + den.str();

  const unsigned places = std::max(twos, fives);
  Integer scaled = num * (pow10(places) / den);
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  return negative ? "-" + digits : digits;
}

Integer round_half_away_from_zero(const Rational& value) {
  Integer num = boost::multiprecision::numerator(value);
  Integer den = boost::multiprecision::denominator(value);
  const bool negative = num < 0;
  if (negative) num = -num;
  // floor((2·num + den) / (2·den)) rounds halves up for nonnegative values
  Integer rounded = (2 * num + den) / (2 * den);
  return negative ? Integer(-rounded) : rounded;
}

}  // namespace exactnn
