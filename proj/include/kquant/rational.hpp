#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <vector>

namespace kquant {

using Rational = boost::multiprecision::cpp_rational;

/// Exact literal: integer, fraction "p/q" or terminating decimal "0.25".
Rational parse_rational(const std::string& text);

/// "[1/2, 1]" or "1/2, 1"; an empty list is allowed.
std::vector<Rational> parse_rational_list(const std::string& text);

/// "p/q" in lowest terms, or "p" for integers.
std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Splits "key = value; key = value" (semicolons or newlines) into a map.
/// Throws ParseError on malformed or duplicate keys.
std::map<std::string, std::string> parse_assignments(const std::string& text);

}  // namespace kquant
