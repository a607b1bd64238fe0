#pragma once

#include <stdexcept>
#include <vector>

#include "trainpoly/numeric.hpp"

namespace trainpoly {

using IntMat = std::vector<std::vector<Int>>;

inline IntMat identity_matrix(std::size_t n) {
  IntMat m(n, std::vector<Int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline IntMat mat_mul(const IntMat& a, const IntMat& b) {
  const std::size_t n = a.size(), p = b.empty() ? 0 : b[0].size(), k = b.size();
  IntMat out(n, std::vector<Int>(p, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (std::size_t j = 0; j < p; ++j) out[i][j] += a[i][t] * b[t][j];
    }
  return out;
}

inline Int mat_det(IntMat a) {
  // Bareiss fraction-free elimination.
  const std::size_t n = a.size();
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t piv = k + 1;
      while (piv < n && a[piv][k] == 0) ++piv;
      if (piv == n) return 0;
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign > 0 ? a[n - 1][n - 1] : -a[n - 1][n - 1];
}

// Inverse of a unimodular integer matrix, computed by rational elimination;
// throws if the matrix is not invertible over the integers.
inline IntMat unimodular_inverse(const IntMat& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(2 * n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(m[i][j]);
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw std::invalid_argument("matrix not invertible");
    std::swap(a[c], a[piv]);
    Rat d = a[c][c];
    for (auto& x : a[c]) x /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rat f = a[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  IntMat inv(n, std::vector<Int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (denominator(a[i][n + j]) != 1)
        throw std::invalid_argument("matrix not unimodular");
      inv[i][j] = numerator(a[i][n + j]);
    }
  return inv;
}

struct SmithDecomposition {
  IntMat u;  // unimodular
  IntMat d;  // diagonal with divisibility chain, nonzero entries first
  IntMat v;  // unimodular
};

// U * A * V = D over Z.
inline SmithDecomposition smith_normal_form(IntMat a) {
  const std::size_t n = a.size();
  const std::size_t m = n ? a[0].size() : 0;
  IntMat u = identity_matrix(n);
  IntMat v = identity_matrix(m);

  auto swap_rows = [&](std::size_t i, std::size_t j) {
    std::swap(a[i], a[j]);
    std::swap(u[i], u[j]);
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < n; ++r) std::swap(a[r][i], a[r][j]);
    for (std::size_t r = 0; r < m; ++r) std::swap(v[r][i], v[r][j]);
  };
  auto add_row = [&](std::size_t dst, std::size_t src, const Int& f) {
    for (std::size_t c = 0; c < m; ++c) a[dst][c] += f * a[src][c];
    for (std::size_t c = 0; c < n; ++c) u[dst][c] += f * u[src][c];
  };
  auto add_col = [&](std::size_t dst, std::size_t src, const Int& f) {
    for (std::size_t r = 0; r < n; ++r) a[r][dst] += f * a[r][src];
    for (std::size_t r = 0; r < m; ++r) v[r][dst] += f * v[r][src];
  };
  auto negate_row = [&](std::size_t i) {
    for (auto& x : a[i]) x = -x;
    for (auto& x : u[i]) x = -x;
  };

  const std::size_t rank_bound = std::min(n, m);
  auto diagonalize = [&]() {
    for (std::size_t t = 0; t < rank_bound; ++t) {
      // Move a minimal-magnitude nonzero entry of the remaining block to (t,t).
      std::size_t pr = t, pc = t;
      bool found = false;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < m; ++j) {
          if (a[i][j] == 0) continue;
          if (!found || abs(a[i][j]) < abs(a[pr][pc])) {
            pr = i;
            pc = j;
            found = true;
          }
        }
      if (!found) return;
      swap_rows(t, pr);
      swap_cols(t, pc);

      bool dirty = true;
      while (dirty) {
        dirty = false;
        for (std::size_t i = t + 1; i < n; ++i) {
          if (a[i][t] == 0) continue;
          Int q = a[i][t] / a[t][t];
          add_row(i, t, -q);
          if (a[i][t] != 0) {
            swap_rows(t, i);
            dirty = true;
          }
        }
        for (std::size_t j = t + 1; j < m; ++j) {
          if (a[t][j] == 0) continue;
          Int q = a[t][j] / a[t][t];
          add_col(j, t, -q);
          if (a[t][j] != 0) {
            swap_cols(t, j);
            dirty = true;
          }
        }
      }
      if (a[t][t] < 0) negate_row(t);
    }
  };

  diagonalize();
  // Repair the divisibility chain; each pass replaces an offending adjacent
  // pair (p, q) by (gcd, lcm), strictly decreasing the diagonal
  // lexicographically, so this terminates.
  bool chain_ok = false;
  while (!chain_ok) {
    chain_ok = true;
    for (std::size_t t = 0; t + 1 < rank_bound; ++t) {
      if (a[t][t] == 0 || a[t + 1][t + 1] == 0) continue;
      if (a[t + 1][t + 1] % a[t][t] == 0) continue;
      chain_ok = false;
      add_col(t, t + 1, 1);  // block becomes [[p, 0], [q, q]]
      while (a[t + 1][t] != 0) {
        Int q = a[t][t] / a[t + 1][t];
        add_row(t, t + 1, -q);
        swap_rows(t, t + 1);
      }
      if (a[t][t] < 0) negate_row(t);
      Int g = a[t][t];
      add_col(t + 1, t, -(a[t][t + 1] / g));
      if (a[t + 1][t + 1] < 0) negate_row(t + 1);
      break;
    }
  }
  return {std::move(u), std::move(a), std::move(v)};
}

}  // namespace trainpoly
