#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "trainpoly/cones.hpp"
#include "trainpoly/laurent.hpp"
#include "trainpoly/twisted.hpp"

namespace trainpoly {

inline LaurentPoly specialize(const LaurentPoly& p, const std::vector<std::int64_t>& u) {
  return p.substitute_character(u).unit_normalized();
}

// ---------------------------------------------------------------------------
// Exact real-root isolation via Sturm sequences over the rationals.
// ---------------------------------------------------------------------------

namespace sturm_detail {

using Poly = std::vector<Int>;  // dense, index = degree, no trailing zeros

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Poly from_laurent(const LaurentPoly& q) {
  if (q.nvars() != 1) throw std::invalid_argument("single-variable polynomial required");
  if (q.is_zero()) throw std::invalid_argument("zero polynomial");
  std::int64_t min_exp = q.terms().begin()->first[0];
  std::int64_t max_exp = q.terms().rbegin()->first[0];
  Poly p(static_cast<std::size_t>(max_exp - min_exp) + 1, Int(0));
  for (const auto& [e, c] : q.terms()) p[static_cast<std::size_t>(e[0] - min_exp)] = c;
  return p;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(Int(k) * p[k]);
  trim(d);
  return d;
}

inline void make_primitive_poly(Poly& p) {
  Int g = 0;
  for (const auto& c : p) g = boost::multiprecision::gcd(g, c);
  if (g > 1)
    for (auto& c : p) c /= g;
}

// Remainder of a by b up to a positive rational factor.
inline Poly positive_remainder(const Poly& a, const Poly& b) {
  if (b.empty()) throw std::invalid_argument("division by zero polynomial");
  std::vector<Rat> r(a.begin(), a.end());
  const Rat lead = Rat(b.back());
  while (r.size() >= b.size()) {
    while (!r.empty() && r.back() == 0) r.pop_back();
    if (r.size() < b.size()) break;
    Rat f = r.back() / lead;
    std::size_t off = r.size() - b.size();
    for (std::size_t k = 0; k < b.size(); ++k) r[off + k] -= f * Rat(b[k]);
    r.pop_back();
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
  Int lcm = 1;
  for (const auto& x : r) lcm = boost::multiprecision::lcm(lcm, Int(denominator(x)));
  Poly out;
  for (const auto& x : r) out.push_back(Int(numerator(x)) * (lcm / Int(denominator(x))));
  make_primitive_poly(out);
  return out;
}

inline Poly poly_gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = positive_remainder(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  make_primitive_poly(a);
  return a;
}

// Exact quotient p / d, known to divide.
inline Poly exact_quotient(const Poly& p, const Poly& d) {
  std::vector<Rat> r(p.begin(), p.end());
  std::vector<Rat> q(p.size() - d.size() + 1, Rat(0));
  const Rat lead = Rat(d.back());
  for (std::size_t k = q.size(); k-- > 0;) {
    Rat f = r[k + d.size() - 1] / lead;
    q[k] = f;
    for (std::size_t j = 0; j < d.size(); ++j) r[k + j] -= f * Rat(d[j]);
  }
  Int lcm = 1;
  for (const auto& x : q) lcm = boost::multiprecision::lcm(lcm, Int(denominator(x)));
  Poly out;
  for (const auto& x : q) out.push_back(Int(numerator(x)) * (lcm / Int(denominator(x))));
  make_primitive_poly(out);
  trim(out);
  return out;
}

inline int sign_at(const Poly& p, const Rat& x) {
  Rat acc = 0;
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + Rat(p[k]);
  return acc.sign();
}

struct SturmChain {
  std::vector<Poly> seq;

  int variations(const Rat& x) const {
    int count = 0, prev = 0;
    for (const auto& p : seq) {
      int s = sign_at(p, x);
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++count;
      prev = s;
    }
    return count;
  }

  // Distinct real roots in (a, b].
  int roots_in(const Rat& a, const Rat& b) const { return variations(a) - variations(b); }
};

inline SturmChain sturm_chain(Poly p) {
  make_primitive_poly(p);
  Poly d = derivative(p);
  if (!d.empty()) {
    Poly g = poly_gcd(p, d);
    if (g.size() > 1) p = exact_quotient(p, g);  // squarefree part
  }
  SturmChain chain;
  chain.seq.push_back(p);
  Poly s1 = derivative(p);
  if (s1.empty()) return chain;
  chain.seq.push_back(s1);
  while (chain.seq.back().size() > 1) {
    Poly r = positive_remainder(chain.seq[chain.seq.size() - 2], chain.seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    chain.seq.push_back(std::move(r));
  }
  return chain;
}

inline Rat cauchy_bound(const Poly& p) {
  Rat m = 0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    Rat v = abs(Rat(p[k]) / Rat(p.back()));
    if (v > m) m = v;
  }
  return m + 1;
}

}  // namespace sturm_detail

// Largest real root in (0, oo), isolated exactly and bisected to tol.
inline double largest_real_root(const LaurentPoly& q, double tol = 1e-9) {
  using namespace sturm_detail;
  Poly p = from_laurent(q);
  if (p.size() <= 1) throw std::invalid_argument("no positive real root");
  SturmChain chain = sturm_chain(p);
  Rat lo = 0, hi = cauchy_bound(p);
  if (chain.roots_in(lo, hi) == 0) throw std::invalid_argument("no positive real root");
  Rat width_target(tol);
  while (hi - lo > width_target) {
    Rat mid = (lo + hi) / 2;
    if (chain.roots_in(mid, hi) >= 1)
      lo = mid;
    else
      hi = mid;
  }
  return to_double((lo + hi) / 2);
}

// ---------------------------------------------------------------------------
// Perron-Frobenius data by power iteration.
// ---------------------------------------------------------------------------

struct PerronFrobeniusData {
  double eigenvalue = 0;
  std::vector<double> left_eigenvector;  // strictly positive, sums to 1
  double residual = 0;                   // max |U A - E U| / E
  int iterations = 0;
};

namespace pf_detail {

// Left PF data of a nonnegative irreducible matrix. Iterates on A + I, which
// is primitive whenever A is irreducible, so periodic transition matrices
// converge too.
inline PerronFrobeniusData power_iteration(const std::vector<std::vector<double>>& a, double tol,
                                           int cap) {
  const std::size_t m = a.size();
  std::vector<double> u(m, 1.0 / static_cast<double>(m));
  double lambda = 0;
  int it = 0;
  for (; it < cap; ++it) {
    std::vector<double> next(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) next[j] += u[i] * a[i][j];
      next[i] += u[i];  // the +I shift
    }
    double total = 0;
    for (double x : next) total += x;
    double delta = 0;
    for (std::size_t j = 0; j < m; ++j) {
      next[j] /= total;
      delta = std::max(delta, std::abs(next[j] - u[j]));
    }
    double change = std::abs(total - lambda);
    lambda = total;
    u = std::move(next);
    if (it > 0 && change <= tol * lambda && delta <= tol) break;
  }
  if (it >= cap) throw std::runtime_error("power iteration did not converge");

  PerronFrobeniusData out;
  out.eigenvalue = lambda - 1.0;
  out.left_eigenvector = u;
  out.iterations = it + 1;
  double res = 0;
  for (std::size_t j = 0; j < m; ++j) {
    double row = 0;
    for (std::size_t i = 0; i < m; ++i) row += u[i] * a[i][j];
    res = std::max(res, std::abs(row - out.eigenvalue * u[j]));
  }
  out.residual = res / out.eigenvalue;
  return out;
}

inline std::vector<std::vector<double>> evaluate_labels(const LabeledTransitionGraph& l,
                                                        const std::vector<double>& log_point) {
  const std::size_t m = l.node_count();
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0));
  for (const auto& arc : l.arcs) {
    double dot = 0;
    for (std::size_t k = 0; k < l.h0_rank; ++k)
      dot += log_point[k] * static_cast<double>(to_i64(arc.label[k]));
    a[arc.occ.target][arc.occ.source] += std::exp(dot);
  }
  return a;
}

}  // namespace pf_detail

// Left PF eigendata of A(t) evaluated at a strictly positive point.
inline PerronFrobeniusData pf_eigen(const LabeledTransitionGraph& l,
                                    const std::vector<double>& point, double tol = 1e-12,
                                    int cap = 1000000) {
  if (point.size() != l.h0_rank) throw std::invalid_argument("point length mismatch");
  std::vector<double> logs(point.size());
  for (std::size_t k = 0; k < point.size(); ++k) {
    if (!(point[k] > 0)) throw std::invalid_argument("nonpositive coordinate");
    logs[k] = std::log(point[k]);
  }
  return pf_detail::power_iteration(pf_detail::evaluate_labels(l, logs), tol, cap);
}

struct EntropyResult {
  double value = 0;  // the homogeneity-normalizing parameter q
  double bracket_width = 0;  // final bisection bracket
  std::vector<std::pair<double, double>> samples;  // (q, F(q)) along the search
  int pf_evaluations = 0;
};

// Entropy on the cone: the unique q > 0 with log E(exp(q u)) = q u(x),
// located by bracketed bisection. u is an internal covector; membership is
// checked exactly against the supplied cone (the Fried cone in the pipeline).
inline EntropyResult entropy(const LabeledTransitionGraph& l, const OpenCone& cone,
                             const std::vector<Rat>& u, double tol = 1e-12) {
  if (u.size() != l.h0_rank + 1) throw std::invalid_argument("covector length mismatch");
  if (!contains(cone, u)) throw std::invalid_argument("class outside the cone");

  std::vector<double> alpha(l.h0_rank);
  for (std::size_t k = 0; k < l.h0_rank; ++k) alpha[k] = to_double(u[k]);
  const double wu = to_double(u.back());

  EntropyResult res;
  auto f = [&](double q) {
    std::vector<double> logs(alpha.size());
    for (std::size_t k = 0; k < alpha.size(); ++k) logs[k] = q * alpha[k];
    auto pf = pf_detail::power_iteration(pf_detail::evaluate_labels(l, logs), 1e-13, 1000000);
    ++res.pf_evaluations;
    double val = std::log(pf.eigenvalue) - q * wu;
    res.samples.emplace_back(q, val);
    return val;
  };

  double q_lo = tol;
  if (!(f(q_lo) > 0))
    throw std::runtime_error("bracketing failure: F not positive near zero");
  double q_hi = q_lo;
  bool bracketed = false;
  for (int k = 1; k <= 40; ++k) {
    q_hi = tol * std::ldexp(1.0, k);
    if (f(q_hi) < 0) {
      bracketed = true;
      break;
    }
    q_lo = q_hi;
  }
  if (!bracketed) {
    std::string msg = "bracketing failure within 2^40*tol; F samples:";
    for (const auto& [q, v] : res.samples)
      msg += " (" + std::to_string(q) + ", " + std::to_string(v) + ")";
    throw std::runtime_error(msg);
  }
  while (q_hi - q_lo > tol) {
    double mid = 0.5 * (q_lo + q_hi);
    if (f(mid) > 0)
      q_lo = mid;
    else
      q_hi = mid;
  }
  res.value = 0.5 * (q_lo + q_hi);
  res.bracket_width = q_hi - q_lo;
  return res;
}

struct StretchResult {
  double value = 0;       // e^{H(u)}
  double sturm_value = 0; // largest root of the specialization, when computed
  bool cross_checked = false;
};

// Stretch factor of an integral class in the cone; cross-checked against the
// exact largest root of the specialization when the polynomial is supplied.
inline StretchResult stretch(const LabeledTransitionGraph& l, const OpenCone& cone,
                             const std::vector<Rat>& u, const LaurentPoly* mc_internal = nullptr,
                             double tol = 1e-9) {
  for (const auto& x : u)
    if (denominator(x) != 1) throw std::invalid_argument("stretch needs an integral class");
  double entropy_tol = std::min(tol, 1e-10);
  EntropyResult h = entropy(l, cone, u, entropy_tol);
  StretchResult out;
  out.value = std::exp(h.value);
  if (mc_internal) {
    std::vector<std::int64_t> ui(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) ui[k] = to_i64(Int(numerator(u[k])));
    out.sturm_value = largest_real_root(specialize(*mc_internal, ui), tol);
    out.cross_checked = std::abs(out.sturm_value - out.value) < 1e-6 * out.sturm_value;
  }
  return out;
}

}  // namespace trainpoly
