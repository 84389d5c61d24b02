#include "braess/rational.hpp"

#include <cctype>

namespace braess {

Rational rat(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string rat_str(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::string num = text, den = "1";
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  auto valid_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  if (!valid_int(num) || !valid_int(den)) return std::nullopt;
  mpz_class n(num), d(den);
  if (d == 0) return std::nullopt;
  Rational r;
  r.get_num() = n;
  r.get_den() = d;
  r.canonicalize();
  return r;
}

double rat_double(const Rational& value) { return value.get_d(); }

}  // namespace braess
