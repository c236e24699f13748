#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qsg {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Errors raised by operations whose preconditions or configured caps are
// violated. Validation problems are reported through ValidationReport
// instead; this type is for programmatic misuse and resource limits.
class QsgError : public std::runtime_error {
 public:
  explicit QsgError(const std::string& what) : std::runtime_error(what) {}
};

class CapExceeded : public QsgError {
 public:
  CapExceeded(const std::string& what, const BigInt& count)
      : QsgError(what), count_(count) {}
  const BigInt& count() const { return count_; }

 private:
  BigInt count_;
};

// Canonical text form: "p/q" in lowest terms, or a bare integer when q = 1.
// cpp_rational keeps values normalized, so str() already matches.
inline std::string rational_to_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Accepts "p", "-p", "p/q" with optional sign on the numerator. Returns
// nullopt on malformed input (including q = 0).
inline std::optional<Rational> rational_from_string(std::string_view s) {
  auto parse_int = [](std::string_view t, BigInt& out) -> bool {
    if (t.empty()) return false;
    std::size_t i = 0;
    bool neg = false;
    if (t[0] == '-' || t[0] == '+') {
      neg = t[0] == '-';
      i = 1;
      if (i == t.size()) return false;
    }
    BigInt v = 0;
    for (; i < t.size(); ++i) {
      if (t[i] < '0' || t[i] > '9') return false;
      v = v * 10 + (t[i] - '0');
    }
    out = neg ? -v : v;
    return true;
  };
  std::size_t slash = s.find('/');
  BigInt num, den = 1;
  if (slash == std::string_view::npos) {
    if (!parse_int(s, num)) return std::nullopt;
  } else {
    if (!parse_int(s.substr(0, slash), num)) return std::nullopt;
    if (!parse_int(s.substr(slash + 1), den)) return std::nullopt;
    if (den <= 0) return std::nullopt;
  }
  return Rational(num, den);
}

inline Rational rational_pow(const Rational& base, std::uint64_t e) {
  BigInt n = boost::multiprecision::pow(
      boost::multiprecision::numerator(base), static_cast<unsigned>(e));
  BigInt d = boost::multiprecision::pow(
      boost::multiprecision::denominator(base), static_cast<unsigned>(e));
  return Rational(n, d);
}

}  // namespace qsg
