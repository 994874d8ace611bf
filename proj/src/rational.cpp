#include "kquant/rational.hpp"

#include <cctype>

#include "kquant/error.hpp"

namespace kquant {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

boost::multiprecision::cpp_int parse_integer(const std::string& raw, const std::string& context) {
  std::string s = trim(raw);
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s = s.substr(1);
  }
  if (!all_digits(s)) throw Error(ErrorCode::ParseError, "not a rational literal: '" + context + "'");
  boost::multiprecision::cpp_int value(s);
  return negative ? -value : value;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const auto num = parse_integer(s.substr(0, slash), s);
    const auto den = parse_integer(s.substr(slash + 1), s);
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + s + "'");
    return Rational(num, den);
  }
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    const std::string frac = s.substr(dot + 1);
    if (!frac.empty() && !all_digits(frac)) throw Error(ErrorCode::ParseError, "not a rational literal: '" + s + "'");
    const bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const auto int_part = parse_integer(whole, s);
    const auto frac_part = frac.empty() ? boost::multiprecision::cpp_int(0) : boost::multiprecision::cpp_int(frac);
    const Rational magnitude = Rational(negative ? -int_part : int_part) + Rational(frac_part, scale);
    return negative ? -magnitude : magnitude;
  }
  return Rational(parse_integer(s, s));
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw Error(ErrorCode::ParseError, "unterminated list '" + s + "'");
    s = trim(s.substr(1, s.size() - 2));
  }
  std::vector<Rational> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(parse_rational(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::map<std::string, std::string> parse_assignments(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find_first_of(";\n", start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    const auto hash = item.find('#');
    if (hash != std::string::npos) item = item.substr(0, hash);
    item = trim(item);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "expected 'key = value' in '" + item + "'");
      const std::string key = trim(item.substr(0, eq));
      if (key.empty()) throw Error(ErrorCode::ParseError, "empty key in '" + item + "'");
      if (out.count(key)) throw Error(ErrorCode::ParseError, "duplicate key '" + key + "'");
      out[key] = trim(item.substr(eq + 1));
    }
    start = end + 1;
  }
  return out;
}

}  // namespace kquant
