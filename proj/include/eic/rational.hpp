#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "eic/errors.hpp"

namespace eic {

namespace rat_detail {

inline __int128 abs128(__int128 v) { return v < 0 ? -v : v; }

inline __int128 gcd128(__int128 a, __int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace rat_detail

// Exact rational with canonical form den > 0, gcd(num, den) = 1. Used for
// threshold comparisons where the operating point is known exactly.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rat(long long n, long long d) { *this = make(n, d); }

  static Rat make(__int128 n, __int128 d) {
    if (d == 0) throw param_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = rat_detail::gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > std::numeric_limits<long long>::max() ||
        n < std::numeric_limits<long long>::min() ||
        d > std::numeric_limits<long long>::max())
      throw param_error("rational overflow");
    Rat r;
    r.num = static_cast<long long>(n);
    r.den = static_cast<long long>(d);
    return r;
  }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    __int128 l = static_cast<__int128>(a.num) * b.den;
    __int128 r = static_cast<__int128>(b.num) * a.den;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(static_cast<__int128>(a.num) * b.den +
                    static_cast<__int128>(b.num) * a.den,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(static_cast<__int128>(a.num) * b.den -
                    static_cast<__int128>(b.num) * a.den,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(static_cast<__int128>(a.num) * b.num,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw param_error("rational division by zero");
    return make(static_cast<__int128>(a.num) * b.den,
                static_cast<__int128>(a.den) * b.num);
  }
};

inline double to_double(const Rat& r) {
  return double(r.num) / double(r.den);
}

// Accepts "p/q", plain integers, and decimals with up to 18 digits; anything
// else (or a zero denominator) yields nullopt so callers can fall back to
// plain floating-point parsing.
inline std::optional<Rat> parse_rat(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  if (s.empty()) return std::nullopt;

  auto parse_ll = [](const std::string& piece,
                     long long& out) -> bool {
    if (piece.empty() || piece.size() > 19) return false;
    const char* first = piece.data();
    const char* last = piece.data() + piece.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
  };

  std::size_t slash = s.find('/');
  if (slash != std::string::npos) {
    long long p = 0, q = 0;
    if (!parse_ll(s.substr(0, slash), p)) return std::nullopt;
    if (!parse_ll(s.substr(slash + 1), q)) return std::nullopt;
    if (q == 0) return std::nullopt;
    return Rat{p, q};
  }

  std::size_t dot = s.find('.');
  if (dot == std::string::npos) {
    long long v = 0;
    if (!parse_ll(s, v)) return std::nullopt;
    return Rat{v};
  }

  std::string ip = s.substr(0, dot);
  std::string fp = s.substr(dot + 1);
  bool neg = !ip.empty() && ip[0] == '-';
  if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
  if (ip.empty()) ip = "0";
  if (fp.empty() || fp.size() > 17) return std::nullopt;
  long long ipart = 0, fpart = 0;
  if (!parse_ll(ip, ipart)) return std::nullopt;
  if (!parse_ll(fp, fpart)) return std::nullopt;
  if (ipart < 0 || fpart < 0) return std::nullopt;
  __int128 den = 1;
  for (std::size_t k = 0; k < fp.size(); ++k) den *= 10;
  __int128 num = static_cast<__int128>(ipart) * den + fpart;
  if (neg) num = -num;
  return Rat::make(num, den);
}

}  // namespace eic
