#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "trainpoly/numeric.hpp"

namespace trainpoly {

// Coordinates of a group element in the active character basis.
using ExponentVector = std::vector<std::int64_t>;

// Element of the integral group ring: finite exponent-vector -> coefficient
// map with no zero coefficients stored. std::map keys give the canonical
// lexicographic term order used for serialization.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  explicit LaurentPoly(std::size_t nvars) : nvars_(nvars) {}

  static LaurentPoly zero(std::size_t nvars) { return LaurentPoly(nvars); }

  static LaurentPoly constant(std::size_t nvars, Int c) {
    LaurentPoly p(nvars);
    p.add_term(ExponentVector(nvars, 0), std::move(c));
    return p;
  }

  static LaurentPoly monomial(ExponentVector e, Int c = 1) {
    LaurentPoly p(e.size());
    p.add_term(std::move(e), std::move(c));
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<ExponentVector, Int>& terms() const { return terms_; }

  void add_term(ExponentVector e, Int c) {
    if (e.size() != nvars_) throw std::invalid_argument("exponent length mismatch");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(std::move(e), std::move(c));
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Int coefficient(const ExponentVector& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Int(0) : it->second;
  }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) {
    check_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }

  friend LaurentPoly operator-(const LaurentPoly& a) {
    LaurentPoly out(a.nvars_);
    for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, -c);
    return out;
  }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    a.check_vars(b);
    LaurentPoly out(a.nvars_);
    ExponentVector e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  bool operator==(const LaurentPoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }

  // Exact value at a strictly positive rational point.
  Rat eval_positive(const std::vector<Rat>& point) const {
    if (point.size() != nvars_) throw std::invalid_argument("point length mismatch");
    for (const auto& x : point)
      if (x <= 0) throw std::invalid_argument("nonpositive coordinate");
    Rat total = 0;
    for (const auto& [e, c] : terms_) {
      Rat term = Rat(c);
      for (std::size_t i = 0; i < nvars_; ++i) term *= rational_power(point[i], e[i]);
      total += term;
    }
    return total;
  }

  double eval_positive(const std::vector<double>& point) const {
    if (point.size() != nvars_) throw std::invalid_argument("point length mismatch");
    for (double x : point)
      if (!(x > 0)) throw std::invalid_argument("nonpositive coordinate");
    double total = 0;
    for (const auto& [e, c] : terms_) {
      double term = static_cast<double>(Rat(c));
      for (std::size_t i = 0; i < nvars_; ++i)
        term *= std::pow(point[i], static_cast<double>(e[i]));
      total += term;
    }
    return total;
  }

  // One-variable collapse along an integral covector u: each term lands on
  // exponent <u, e>, coefficients summed.
  LaurentPoly substitute_character(const std::vector<std::int64_t>& u) const {
    if (u.size() != nvars_) throw std::invalid_argument("covector length mismatch");
    LaurentPoly out(1);
    for (const auto& [e, c] : terms_) {
      std::int64_t k = 0;
      for (std::size_t i = 0; i < nvars_; ++i) k += u[i] * e[i];
      out.add_term({k}, c);
    }
    return out;
  }

  // Rewrites exponent vectors through a unimodular coordinate change.
  LaurentPoly map_exponents(const std::vector<std::vector<std::int64_t>>& matrix) const {
    LaurentPoly out(matrix.size());
    for (const auto& [e, c] : terms_) {
      ExponentVector ne(matrix.size(), 0);
      for (std::size_t r = 0; r < matrix.size(); ++r)
        for (std::size_t i = 0; i < nvars_; ++i) ne[r] += matrix[r][i] * e[i];
      out.add_term(std::move(ne), c);
    }
    return out;
  }

  // x -> x * t^v, where x is variable `axis` and v lives in the remaining
  // coordinates.
  LaurentPoly substitute_axis_twist(std::size_t axis, const std::vector<std::int64_t>& v) const {
    LaurentPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      ExponentVector ne = e;
      std::size_t vi = 0;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (i == axis) continue;
        ne[i] += v[vi++] * e[axis];
      }
      out.add_term(std::move(ne), c);
    }
    return out;
  }

  std::set<ExponentVector> newton_support() const {
    if (is_zero()) throw std::invalid_argument("zero polynomial has no support");
    std::set<ExponentVector> s;
    for (const auto& [e, c] : terms_) s.insert(e);
    return s;
  }

  // Canonical representative up to +-monomial: minimal exponent 0 in every
  // variable and positive coefficient on the lexicographically largest term.
  LaurentPoly unit_normalized() const {
    if (is_zero()) throw std::invalid_argument("zero polynomial has no unit normalization");
    ExponentVector shift(nvars_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
      for (std::size_t i = 0; i < nvars_; ++i)
        shift[i] = first ? e[i] : std::min(shift[i], e[i]);
      first = false;
    }
    LaurentPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      ExponentVector ne(nvars_);
      for (std::size_t i = 0; i < nvars_; ++i) ne[i] = e[i] - shift[i];
      out.terms_.emplace(std::move(ne), c);
    }
    if (out.terms_.rbegin()->second < 0)
      for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }

  bool equal_up_to_units(const LaurentPoly& o) const {
    if (is_zero() || o.is_zero()) return is_zero() && o.is_zero();
    return unit_normalized() == o.unit_normalized();
  }

  std::string to_string(const std::vector<std::string>& vars) const {
    if (is_zero()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      Int mag = c < 0 ? Int(-c) : c;
      if (!s.empty())
        s += c < 0 ? " - " : " + ";
      else if (c < 0)
        s += "-";
      std::string mono;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += vars[i];
        if (e[i] != 1) mono += "^" + std::to_string(e[i]);
      }
      if (mono.empty())
        s += trainpoly::to_string(mag);
      else {
        if (mag != 1) s += trainpoly::to_string(mag) + "*";
        s += mono;
      }
    }
    return s;
  }

 private:
  void check_vars(const LaurentPoly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("exponent length mismatch");
  }

  static Rat rational_power(const Rat& base, std::int64_t k) {
    if (k == 0) return 1;
    Rat b = k > 0 ? base : Rat(1) / base;
    std::uint64_t n = k > 0 ? k : -k;
    Rat acc = 1;
    while (n) {
      if (n & 1) acc *= b;
      b *= b;
      n >>= 1;
    }
    return acc;
  }

  std::size_t nvars_ = 0;
  std::map<ExponentVector, Int> terms_;
};

using RingMatrix = std::vector<std::vector<LaurentPoly>>;

inline RingMatrix ring_matrix_mul(const RingMatrix& a, const RingMatrix& b) {
  const std::size_t n = a.size();
  const std::size_t nv = n ? a[0][0].nvars() : 0;
  RingMatrix out(n, std::vector<LaurentPoly>(n, LaurentPoly(nv)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

// Exact determinant by cofactor expansion over column subsets, minors memoized
// by bitmask. Row m-k is expanded against the k remaining columns.
inline LaurentPoly determinant(const RingMatrix& mat) {
  const std::size_t m = mat.size();
  for (const auto& row : mat)
    if (row.size() != m) throw std::invalid_argument("matrix not square");
  const std::size_t nv = m ? mat[0][0].nvars() : 0;
  if (m == 0) return LaurentPoly::constant(nv, 1);
  if (m > 24) throw std::invalid_argument("determinant: matrix too large for minor memoization");

  std::vector<LaurentPoly> memo(std::size_t(1) << m, LaurentPoly(nv));
  std::vector<bool> done(std::size_t(1) << m, false);
  memo[0] = LaurentPoly::constant(nv, 1);
  done[0] = true;

  auto rec = [&](auto&& self, std::uint32_t mask) -> const LaurentPoly& {
    if (done[mask]) return memo[mask];
    const std::size_t k = static_cast<std::size_t>(__builtin_popcount(mask));
    const std::size_t row = m - k;
    LaurentPoly acc(nv);
    int parity = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (!(mask & (1u << j))) continue;
      if (!mat[row][j].is_zero()) {
        LaurentPoly contrib = mat[row][j] * self(self, mask & ~(1u << j));
        if (parity % 2 == 0)
          acc += contrib;
        else
          acc -= contrib;
      }
      ++parity;
    }
    memo[mask] = std::move(acc);
    done[mask] = true;
    return memo[mask];
  };
  return rec(rec, static_cast<std::uint32_t>((std::size_t(1) << m) - 1));
}

// xI - A for a matrix over the H0-part of the ring; the result gains the
// stable variable as a final coordinate.
inline RingMatrix char_matrix(const RingMatrix& a) {
  const std::size_t m = a.size();
  const std::size_t nv = m ? a[0][0].nvars() : 0;
  RingMatrix out(m, std::vector<LaurentPoly>(m, LaurentPoly(nv + 1)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      LaurentPoly entry(nv + 1);
      for (const auto& [e, c] : a[i][j].terms()) {
        ExponentVector ne = e;
        ne.push_back(0);
        entry.add_term(std::move(ne), -c);
      }
      if (i == j) {
        ExponentVector x(nv + 1, 0);
        x[nv] = 1;
        entry.add_term(std::move(x), 1);
      }
      out[i][j] = std::move(entry);
    }
  return out;
}

}  // namespace trainpoly
