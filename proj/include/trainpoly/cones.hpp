#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "trainpoly/laurent.hpp"
#include "trainpoly/numeric.hpp"

namespace trainpoly {

// ---------------------------------------------------------------------------
// Exact rational feasibility of { a_i . u >= r_i } with u free.
// Infeasible systems come with Farkas multipliers: lambda >= 0 with
// sum lambda_i a_i = 0 and sum lambda_i r_i > 0.
// ---------------------------------------------------------------------------

struct LpResult {
  bool feasible = false;
  std::vector<Rat> point;    // when feasible
  std::vector<Rat> farkas;   // per input row, when infeasible
};

namespace lp_detail {

struct FmRow {
  std::vector<Rat> a;
  Rat r;
  std::vector<Rat> mult;  // provenance over the original rows
};

inline LpResult fourier_motzkin(const std::vector<std::vector<Rat>>& a,
                                const std::vector<Rat>& rhs) {
  const std::size_t d = a.empty() ? 0 : a[0].size();
  const std::size_t n = a.size();
  std::vector<FmRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    FmRow row{a[i], rhs[i], std::vector<Rat>(n, 0)};
    row.mult[i] = 1;
    rows.push_back(std::move(row));
  }

  std::vector<std::vector<FmRow>> layers(d);
  for (std::size_t v = d; v-- > 0;) {
    layers[v] = rows;
    std::vector<FmRow> next;
    std::vector<const FmRow*> lower, upper;
    for (const auto& row : rows) {
      if (row.a[v] > 0)
        lower.push_back(&row);
      else if (row.a[v] < 0)
        upper.push_back(&row);
      else
        next.push_back(row);
    }
    for (const FmRow* lo : lower)
      for (const FmRow* up : upper) {
        // lo.a[v] * up + |up.a[v]| * lo eliminates u_v.
        Rat cl = -up->a[v], cu = lo->a[v];
        FmRow comb;
        comb.a.resize(d);
        for (std::size_t k = 0; k < d; ++k) comb.a[k] = cl * lo->a[k] + cu * up->a[k];
        comb.r = cl * lo->r + cu * up->r;
        comb.mult.resize(n);
        for (std::size_t k = 0; k < n; ++k) comb.mult[k] = cl * lo->mult[k] + cu * up->mult[k];
        bool trivial = comb.r <= 0 &&
                       std::all_of(comb.a.begin(), comb.a.end(), [](const Rat& x) { return x == 0; });
        if (!trivial) next.push_back(std::move(comb));
      }
    // Drop exact duplicates to tame growth.
    std::sort(next.begin(), next.end(), [](const FmRow& x, const FmRow& y) {
      return std::tie(x.a, x.r) < std::tie(y.a, y.r);
    });
    next.erase(std::unique(next.begin(), next.end(),
                           [](const FmRow& x, const FmRow& y) {
                             return x.a == y.a && x.r == y.r;
                           }),
               next.end());
    rows = std::move(next);
  }

  for (const auto& row : rows)
    if (row.r > 0) return {false, {}, row.mult};

  // Back-substitute a point, tightest bounds first.
  LpResult res;
  res.feasible = true;
  res.point.assign(d, 0);
  for (std::size_t v = 0; v < d; ++v) {
    std::optional<Rat> lo, hi;
    for (const auto& row : layers[v]) {
      if (row.a[v] == 0) continue;
      Rat bound = row.r;
      for (std::size_t k = 0; k < v; ++k) bound -= row.a[k] * res.point[k];
      bound /= row.a[v];
      if (row.a[v] > 0) {
        if (!lo || bound > *lo) lo = bound;
      } else {
        if (!hi || bound < *hi) hi = bound;
      }
    }
    if (lo && hi)
      res.point[v] = (*lo + *hi) / 2;
    else if (lo)
      res.point[v] = *lo + 1;
    else if (hi)
      res.point[v] = *hi - 1;
  }
  return res;
}

// Phase-1 simplex with Bland's rule, exact rationals. Minimizes the sum of
// artificial variables for { M u - s = r, s >= 0 } with u split into
// nonnegative parts.
inline LpResult simplex(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& rhs) {
  const std::size_t d = a.empty() ? 0 : a[0].size();
  const std::size_t n = a.size();
  const std::size_t real_cols = 2 * d + n;  // u+, u-, surplus
  std::vector<std::size_t> art_of_row(n, SIZE_MAX);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (rhs[i] >= 0) art_of_row[i] = n_art++;
  const std::size_t cols = real_cols + n_art;

  std::vector<std::vector<Rat>> t(n, std::vector<Rat>(cols + 1, 0));
  std::vector<std::size_t> basis(n);
  for (std::size_t i = 0; i < n; ++i) {
    int flip = rhs[i] >= 0 ? 1 : -1;
    for (std::size_t c = 0; c < d; ++c) {
      t[i][2 * c] = flip * a[i][c];
      t[i][2 * c + 1] = -flip * a[i][c];
    }
    t[i][2 * d + i] = -flip;  // surplus
    t[i][cols] = flip * rhs[i];
    if (flip > 0) {
      t[i][real_cols + art_of_row[i]] = 1;
      basis[i] = real_cols + art_of_row[i];
    } else {
      basis[i] = 2 * d + i;  // surplus enters the basis directly
    }
  }

  // Objective row: z_j - c_j for minimize sum of artificials.
  std::vector<Rat> obj(cols + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (basis[i] >= real_cols)
      for (std::size_t j = 0; j <= cols; ++j) obj[j] += t[i][j];
  for (std::size_t k = 0; k < n_art; ++k) obj[real_cols + k] -= 1;

  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (obj[j] > 0) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (t[i][enter] <= 0) continue;
      if (leave == n) {
        leave = i;
        continue;
      }
      Rat cur = t[i][cols] / t[i][enter];
      Rat best = t[leave][cols] / t[leave][enter];
      if (cur < best || (cur == best && basis[i] < basis[leave])) leave = i;
    }
    if (leave == n) throw std::logic_error("phase-1 objective unbounded");
    Rat piv = t[leave][enter];
    for (auto& x : t[leave]) x /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rat f = t[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
    }
    if (obj[enter] != 0) {
      Rat f = obj[enter];
      for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  if (obj[cols] > 0) {
    // Farkas multipliers read off the surplus columns: the z-c entry of
    // row i's surplus is -flip_i * y_i, and the valid multiplier on the
    // original >= row is flip_i * y_i = -obj[2d + i]. Optimality makes
    // these nonnegative and sum lambda_i a_i = 0, sum lambda_i r_i > 0.
    LpResult res;
    res.feasible = false;
    res.farkas.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      res.farkas[i] = -obj[2 * d + i];
      if (res.farkas[i] < 0) throw std::logic_error("negative Farkas multiplier");
    }
    return res;
  }

  LpResult res;
  res.feasible = true;
  res.point.assign(d, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (basis[i] < 2 * d) {
      std::size_t c = basis[i] / 2;
      if (basis[i] % 2 == 0)
        res.point[c] += t[i][cols];
      else
        res.point[c] -= t[i][cols];
    }
  }
  return res;
}

// Phase-1 simplex in combination space: minimize the artificials of
// { sum lambda_i n_i = h, lambda >= 0 }. Only d rows, so it stays cheap when
// the normal list is long. Dual certificates become separating functionals.
struct ConeCombinationResult {
  bool inside = false;
  std::vector<Rat> lambda;     // the combination when inside
  std::vector<Rat> separator;  // y with y.n_i >= 0 for all i, y.h < 0
};

inline ConeCombinationResult simplex_cone_membership(const std::vector<std::vector<Int>>& normals,
                                                     const std::vector<Int>& h) {
  const std::size_t d = h.size();
  const std::size_t k = normals.size();
  const std::size_t cols = k + d;  // lambdas then artificials

  std::vector<std::vector<Rat>> t(d, std::vector<Rat>(cols + 1, 0));
  std::vector<std::size_t> basis(d);
  for (std::size_t r = 0; r < d; ++r) {
    int flip = h[r] >= 0 ? 1 : -1;
    for (std::size_t j = 0; j < k; ++j) t[r][j] = flip * Rat(normals[j][r]);
    t[r][k + r] = 1;
    t[r][cols] = flip * Rat(h[r]);
    basis[r] = k + r;
  }
  std::vector<Rat> obj(cols + 1, 0);  // z_j - c_j for minimizing sum artificials
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t j = 0; j <= cols; ++j) obj[j] += t[r][j];
  for (std::size_t r = 0; r < d; ++r) obj[k + r] -= 1;

  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (obj[j] > 0) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = d;
    for (std::size_t r = 0; r < d; ++r) {
      if (t[r][enter] <= 0) continue;
      if (leave == d) {
        leave = r;
        continue;
      }
      Rat cur = t[r][cols] / t[r][enter];
      Rat best = t[leave][cols] / t[leave][enter];
      if (cur < best || (cur == best && basis[r] < basis[leave])) leave = r;
    }
    if (leave == d) throw std::logic_error("cone phase-1 unbounded");
    Rat piv = t[leave][enter];
    for (auto& x : t[leave]) x /= piv;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == leave || t[r][enter] == 0) continue;
      Rat f = t[r][enter];
      for (std::size_t j = 0; j <= cols; ++j) t[r][j] -= f * t[leave][j];
    }
    Rat f = obj[enter];
    if (f != 0)
      for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * t[leave][j];
    basis[leave] = enter;
  }

  ConeCombinationResult res;
  if (obj[cols] > 0) {
    // y_r = (z-c of artificial r) + 1 satisfies y.(flip_r n_j[r]) <= 0 per
    // column; undo the row flips and negate to separate.
    res.inside = false;
    res.separator.assign(d, 0);
    for (std::size_t r = 0; r < d; ++r) {
      Rat y = obj[k + r] + 1;
      res.separator[r] = h[r] >= 0 ? -y : y;
    }
    return res;
  }
  res.inside = true;
  res.lambda.assign(k, 0);
  for (std::size_t r = 0; r < d; ++r)
    if (basis[r] < k) res.lambda[basis[r]] = t[r][cols];
  return res;
}

}  // namespace lp_detail

// Dispatches on ambient dimension: Fourier-Motzkin stays exact and small in
// low dimension, the exact simplex covers the rest.
inline LpResult solve_feasibility(const std::vector<std::vector<Rat>>& a,
                                  const std::vector<Rat>& rhs) {
  const std::size_t d = a.empty() ? 0 : a[0].size();
  if (d <= 4) return lp_detail::fourier_motzkin(a, rhs);
  return lp_detail::simplex(a, rhs);
}

// ---------------------------------------------------------------------------
// Open rational polyhedral cones { u : <n_i, u> > 0 }.
// ---------------------------------------------------------------------------

struct OpenCone {
  std::size_t dim = 0;
  std::vector<std::vector<Int>> inequalities;  // primitive, deduped, lex order
  std::vector<std::string> coordinates;        // names of the active coordinates
  bool minimal = false;
};

inline OpenCone make_open_cone(std::size_t dim, std::vector<std::vector<Int>> ineqs,
                               std::vector<std::string> coords = {}) {
  OpenCone c;
  c.dim = dim;
  c.coordinates = std::move(coords);
  for (auto& v : ineqs) {
    if (v.size() != dim) throw std::invalid_argument("inequality dimension mismatch");
    if (std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; }))
      throw std::invalid_argument("zero inequality vector");
    make_primitive(v);
  }
  std::sort(ineqs.begin(), ineqs.end());
  ineqs.erase(std::unique(ineqs.begin(), ineqs.end()), ineqs.end());
  c.inequalities = std::move(ineqs);
  return c;
}

// Dual cone of the top stable-degree term of the Newton polytope; the last
// variable is the stable coordinate.
inline OpenCone mcmullen_cone(const LaurentPoly& p) {
  if (p.is_zero()) throw std::invalid_argument("zero polynomial");
  const std::size_t b = p.nvars();
  std::optional<ExponentVector> top;
  bool unique = true;
  for (const auto& [e, c] : p.terms()) {
    if (!top || e[b - 1] > (*top)[b - 1]) {
      top = e;
      unique = true;
    } else if (e[b - 1] == (*top)[b - 1]) {
      unique = false;
    }
  }
  if (!unique) throw std::invalid_argument("no unique top term in the stable coordinate");
  std::vector<std::vector<Int>> ineqs;
  for (const auto& [e, c] : p.terms()) {
    if (e == *top) continue;
    std::vector<Int> v(b);
    for (std::size_t k = 0; k < b; ++k) v[k] = Int((*top)[k]) - Int(e[k]);
    ineqs.push_back(std::move(v));
  }
  return make_open_cone(b, std::move(ineqs));
}

inline OpenCone fried_cone(const std::vector<std::vector<Int>>& orbit_classes, std::size_t dim) {
  return make_open_cone(dim, orbit_classes);
}

inline bool contains(const OpenCone& c, const std::vector<Rat>& u) {
  if (u.size() != c.dim) throw std::invalid_argument("dimension mismatch");
  for (const auto& n : c.inequalities) {
    Rat dot = 0;
    for (std::size_t k = 0; k < c.dim; ++k) dot += Rat(n[k]) * u[k];
    if (dot <= 0) return false;
  }
  return true;
}

inline std::optional<std::vector<Rat>> interior_point(const OpenCone& c) {
  std::vector<std::vector<Rat>> a;
  std::vector<Rat> rhs;
  for (const auto& n : c.inequalities) {
    std::vector<Rat> row(c.dim);
    for (std::size_t k = 0; k < c.dim; ++k) row[k] = Rat(n[k]);
    a.push_back(std::move(row));
    rhs.push_back(1);
  }
  if (a.empty()) return std::vector<Rat>(c.dim, 0);
  LpResult r = solve_feasibility(a, rhs);
  if (!r.feasible) return std::nullopt;
  return r.point;
}

struct ConicMembership {
  bool inside = false;
  std::vector<Rat> combination;  // target as a nonneg combination of the normals
  std::vector<Rat> separator;    // u with <n_i,u> >= 0 for all i, <h,u> < 0
};

// Farkas test: h in cone{n_i} iff no u satisfies n_i.u >= 0 and -h.u >= 1.
// Low dimensions run Fourier-Motzkin in u-space; above that the simplex works
// in combination space, where the tableau has only dim rows.
inline ConicMembership in_conic_hull(const std::vector<std::vector<Int>>& normals,
                                     const std::vector<Int>& h) {
  const std::size_t d = h.size();
  ConicMembership out;
  if (d > 4) {
    lp_detail::ConeCombinationResult r = lp_detail::simplex_cone_membership(normals, h);
    out.inside = r.inside;
    out.combination = std::move(r.lambda);
    out.separator = std::move(r.separator);
    return out;
  }

  std::vector<std::vector<Rat>> a;
  std::vector<Rat> rhs;
  for (const auto& n : normals) {
    std::vector<Rat> row(d);
    for (std::size_t k = 0; k < d; ++k) row[k] = Rat(n[k]);
    a.push_back(std::move(row));
    rhs.push_back(0);
  }
  std::vector<Rat> neg(d);
  for (std::size_t k = 0; k < d; ++k) neg[k] = -Rat(h[k]);
  a.push_back(std::move(neg));
  rhs.push_back(1);

  LpResult r = lp_detail::fourier_motzkin(a, rhs);
  if (r.feasible) {
    out.inside = false;
    out.separator = std::move(r.point);
    return out;
  }
  // Multipliers: sum over normals lambda_i n_i - mu h = 0 with mu = last
  // multiplier > 0, so h = sum (lambda_i / mu) n_i.
  Rat mu = r.farkas.back();
  if (mu <= 0) throw std::logic_error("degenerate Farkas certificate");
  out.inside = true;
  out.combination.assign(normals.size(), 0);
  for (std::size_t i = 0; i < normals.size(); ++i) out.combination[i] = r.farkas[i] / mu;
  return out;
}

// Extreme subset of the normals: n is redundant iff it lies in the conic
// hull of the others. The result is order-independent.
inline OpenCone minimalize(const OpenCone& c) {
  std::vector<std::vector<Int>> keep = c.inequalities;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      std::vector<std::vector<Int>> others;
      for (std::size_t j = 0; j < keep.size(); ++j)
        if (j != i) others.push_back(keep[j]);
      if (others.empty()) break;
      if (in_conic_hull(others, keep[i]).inside) {
        keep.erase(keep.begin() + i);
        changed = true;
        break;
      }
    }
  }
  OpenCone out = make_open_cone(c.dim, std::move(keep), c.coordinates);
  out.minimal = true;
  return out;
}

struct ConeEquality {
  bool equal = false;
  // When equal: per-inequality conic combinations, first cone's normals in
  // terms of the second's and vice versa.
  std::vector<std::vector<Rat>> first_in_second;
  std::vector<std::vector<Rat>> second_in_first;
  // When unequal: exact point inside exactly one of the cones.
  std::vector<Rat> witness;
  int witness_side = 0;  // 1: inside first only; 2: inside second only
};

inline ConeEquality cones_equal(const OpenCone& c1, const OpenCone& c2) {
  if (c1.dim != c2.dim) throw std::invalid_argument("ambient dimension mismatch");
  auto p1 = interior_point(c1), p2 = interior_point(c2);
  if (!p1 || !p2) throw std::invalid_argument("empty cone input");

  auto witness_from = [&](const std::vector<Rat>& sep, const std::vector<Int>& violated,
                          const std::vector<Rat>& inside_pt) {
    // sep is >= 0 on the containing cone's normals and < 0 on `violated`;
    // scale it against an interior point to make all inequalities strict.
    Rat sep_dot = 0, int_dot = 0;
    for (std::size_t k = 0; k < sep.size(); ++k) {
      sep_dot += Rat(violated[k]) * sep[k];
      int_dot += Rat(violated[k]) * inside_pt[k];
    }
    Rat scale = int_dot > 0 ? (int_dot / -sep_dot) + 1 : Rat(1);
    std::vector<Rat> w(sep.size());
    for (std::size_t k = 0; k < sep.size(); ++k) w[k] = scale * sep[k] + inside_pt[k];
    return w;
  };

  ConeEquality out;
  for (const auto& n : c2.inequalities) {
    ConicMembership mem = in_conic_hull(c1.inequalities, n);
    if (!mem.inside) {
      out.equal = false;
      out.witness = witness_from(mem.separator, n, *p1);
      out.witness_side = 1;
      return out;
    }
    out.second_in_first.push_back(std::move(mem.combination));
  }
  for (const auto& n : c1.inequalities) {
    ConicMembership mem = in_conic_hull(c2.inequalities, n);
    if (!mem.inside) {
      out.equal = false;
      out.witness = witness_from(mem.separator, n, *p2);
      out.witness_side = 2;
      return out;
    }
    out.first_in_second.push_back(std::move(mem.combination));
  }
  out.equal = true;
  return out;
}

}  // namespace trainpoly
