#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace trainpoly {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline int sign_of(const Int& v) { return v.sign(); }
inline int sign_of(const Rat& v) { return v.sign(); }

inline std::int64_t to_i64(const Int& v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("integer out of int64 range");
  return static_cast<std::int64_t>(v);
}

inline double to_double(const Rat& v) { return static_cast<double>(v); }

inline std::string to_string(const Int& v) { return v.str(); }

// "p/q" or "p"; q > 0 enforced by normalization.
inline Rat parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s));
  return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

inline std::string rational_to_string(const Rat& v) {
  std::ostringstream os;
  os << numerator(v);
  if (denominator(v) != 1) os << "/" << denominator(v);
  return os.str();
}

// Divides by the gcd of the entries; zero vectors are left alone.
inline void make_primitive(std::vector<Int>& v) {
  Int g = 0;
  for (const auto& x : v) g = boost::multiprecision::gcd(g, x);
  if (g > 1)
    for (auto& x : v) x /= g;
}

// Clears denominators and makes the result primitive.
inline std::vector<Int> primitive_integer_vector(const std::vector<Rat>& v) {
  Int lcm = 1;
  for (const auto& x : v)
    lcm = boost::multiprecision::lcm(lcm, Int(denominator(x)));
  std::vector<Int> out;
  out.reserve(v.size());
  for (const auto& x : v)
    out.push_back(Int(numerator(x)) * (lcm / Int(denominator(x))));
  make_primitive(out);
  return out;
}

// Deterministic xorshift-based generator; std::uniform_int_distribution is
// implementation-defined, so fixtures roll their own.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    std::uint64_t x = state_;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t state_;
};

}  // namespace trainpoly
