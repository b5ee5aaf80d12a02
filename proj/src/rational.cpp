#include "arvdm/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace arvdm {

namespace {

std::int64_t parse_int(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty number");
  std::size_t pos = 0;
  long long v = std::stoll(s, &pos);
  if (pos != s.size())
    throw std::invalid_argument("Rational::parse: bad integer '" + s + "'");
  return v;
}

}  // namespace

Rational Rational::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot);
    std::string tail = s.substr(dot + 1);
    if (tail.empty())
      throw std::invalid_argument("Rational::parse: bad decimal '" + text + "'");
    bool neg = !head.empty() && head[0] == '-';
    if (neg || (!head.empty() && head[0] == '+')) head = head.substr(1);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < tail.size(); ++i) {
      if (den > INT64_MAX / 10)
        throw std::overflow_error("Rational::parse: too many decimal digits");
      den *= 10;
    }
    std::int64_t whole = head.empty() ? 0 : parse_int(head);
    std::int64_t frac = parse_int(tail);
    if (frac < 0) throw std::invalid_argument("Rational::parse: bad decimal '" + text + "'");
    Rational r = Rational(whole) + Rational(frac, den);
    return neg ? -r : r;
  }
  return Rational(parse_int(s));
}

}  // namespace arvdm
