#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trainpoly/graph.hpp"
#include "trainpoly/laurent.hpp"
#include "trainpoly/smith.hpp"

namespace trainpoly {

// Cellular 1-chain: finite edge -> coefficient map.
using Chain = std::map<std::string, Int>;

inline void chain_add(Chain& a, const Chain& b, const Int& scale = 1) {
  for (const auto& [e, c] : b) {
    Int& v = a[e];
    v += scale * c;
    if (v == 0) a.erase(e);
  }
}

inline Chain chain_of_path(const EdgePath& p) {
  Chain c;
  for (const auto& s : p) {
    Int& v = c[s.edge];
    v += s.sign;
    if (v == 0) c.erase(s.edge);
  }
  return c;
}

// Pushes a chain through the map, edge by edge.
inline Chain push_chain(const GraphMap& g, const Chain& c) {
  Chain out;
  for (const auto& [e, coeff] : c)
    chain_add(out, chain_of_path(g.edge_image.at(e)), coeff);
  return out;
}

// Rational valuation on edges plus a stable-letter value at the root.
struct CohomologyClass {
  std::string name;
  std::map<std::string, Rat> edge_values;
  Rat stable_value = 0;

  Rat value_on_chain(const Chain& c) const {
    Rat v = 0;
    for (const auto& [e, coeff] : c) {
      auto it = edge_values.find(e);
      if (it != edge_values.end()) v += Rat(coeff) * it->second;
    }
    return v;
  }
};

class MarkedAbelianization {
 public:
  GraphMap base;
  std::string root;
  std::set<std::string> tree;
  std::map<std::string, Chain> tree_paths;       // rho(v), root to v
  std::vector<std::string> cycle_edges;          // non-tree edges in id order
  std::vector<Chain> cycle_basis;                // z_e = rho(o(e)) + e - rho(t(e))
  IntMat h1_action;                              // f_* columns in cycle coordinates
  SmithDecomposition smith;                      // of h1_action - I
  std::size_t b = 0;                             // rank of H
  IntMat pi0;                                    // (b-1) x cycles, kills im(f_*-I)
  IntMat pi0_section;                            // cycles x (b-1), pi0*section = I
  Chain root_image_path;                         // rho(f(root)), threaded to labels

  std::size_t h0_rank() const { return b - 1; }

  // Classes vanish on torsion automatically; only its presence is surfaced.
  bool has_coinvariant_torsion() const {
    for (std::size_t i = 0; i < smith.d.size(); ++i)
      if (smith.d[i][i] > 1) return true;
    return false;
  }

  // Coordinates of a 1-cycle in the cycle basis: its non-tree coefficients.
  std::vector<Int> cycle_coordinates(const Chain& c) const {
    std::vector<Int> out(cycle_edges.size(), 0);
    for (std::size_t i = 0; i < cycle_edges.size(); ++i) {
      auto it = c.find(cycle_edges[i]);
      if (it != c.end()) out[i] = it->second;
    }
    return out;
  }

  std::vector<Int> pi0_of_cycle(const Chain& c) const {
    std::vector<Int> coords = cycle_coordinates(c);
    std::vector<Int> out(h0_rank(), 0);
    for (std::size_t r = 0; r < out.size(); ++r)
      for (std::size_t j = 0; j < coords.size(); ++j) out[r] += pi0[r][j] * coords[j];
    return out;
  }
};

struct ClassViolation {
  std::size_t cycle_index;
  Rat value_on_cycle;
  Rat value_on_image;
};

inline std::vector<ClassViolation> validate_class(const MarkedAbelianization& m,
                                                  const CohomologyClass& u) {
  std::vector<ClassViolation> bad;
  for (std::size_t i = 0; i < m.cycle_basis.size(); ++i) {
    Rat v = u.value_on_chain(m.cycle_basis[i]);
    Rat w = u.value_on_chain(push_chain(m.base, m.cycle_basis[i]));
    if (v != w) bad.push_back({i, v, w});
  }
  return bad;
}

// The induced valuation on H in internal coordinates: (u on the pi0-section
// basis, u on the stable class). Well defined for f-invariant classes.
inline std::vector<Rat> class_on_H(const MarkedAbelianization& m, const CohomologyClass& u) {
  if (!validate_class(m, u).empty())
    throw std::invalid_argument("class is not f-invariant on cycles: " + u.name);
  std::vector<Rat> cov(m.b, 0);
  for (std::size_t k = 0; k + 1 < m.b; ++k) {
    Rat a = 0;
    for (std::size_t j = 0; j < m.cycle_basis.size(); ++j)
      if (m.pi0_section[j][k] != 0)
        a += Rat(m.pi0_section[j][k]) * u.value_on_chain(m.cycle_basis[j]);
    cov[k] = a;
  }
  cov[m.b - 1] = u.stable_value;
  return cov;
}

inline int vertex_period(const GraphMap& g, const std::string& v) {
  std::string w = v;
  for (std::size_t k = 1; k <= g.graph.vertices.size() + 1; ++k) {
    w = g.vertex_image.at(w);
    if (w == v) return static_cast<int>(k);
  }
  return -1;  // not periodic
}

inline std::string default_root(const GraphMap& g) {
  int best_period = -1;
  std::string best;
  for (const auto& v : g.graph.vertices) {
    int p = vertex_period(g, v);
    if (p < 0) continue;
    if (best_period < 0 || p < best_period) {
      best_period = p;
      best = v;
    }
  }
  if (best_period < 0) throw std::logic_error("no periodic vertex");
  return best;
}

inline std::set<std::string> default_spanning_tree(const Graph& g, const std::string& root) {
  std::set<std::string> tree;
  std::set<std::string> reached{root};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : g.edges) {
      bool has_from = reached.count(e.from), has_to = reached.count(e.to);
      if (has_from == has_to) continue;
      tree.insert(e.id);
      reached.insert(has_from ? e.to : e.from);
      grew = true;
    }
  }
  return tree;
}

inline MarkedAbelianization mark(const GraphMap& g,
                                 std::optional<std::string> root_opt = std::nullopt,
                                 std::optional<std::set<std::string>> tree_opt = std::nullopt) {
  auto rep = validate_graph_map(g);
  if (!rep.ok()) throw std::invalid_argument("invalid graph map: " + rep.summary());
  if (!is_irreducible(g)) throw std::invalid_argument("transition matrix not irreducible");
  if (!is_expanding(g)) throw std::invalid_argument("map not expanding");
  if (auto tt = is_train_track(g); !tt.ok)
    throw std::invalid_argument("not a train track map");

  MarkedAbelianization m;
  m.base = g;
  m.root = root_opt ? *root_opt : default_root(g);
  if (g.graph.vertex_index(m.root) < 0) throw std::invalid_argument("root not a vertex");
  m.tree = tree_opt ? *tree_opt : default_spanning_tree(g.graph, m.root);

  // Tree paths by search from the root across tree edges only.
  std::map<std::string, Chain> rho;
  rho[m.root] = Chain{};
  std::set<std::string> covered;
  for (const auto& id : m.tree)
    if (g.graph.edge_index(id) < 0) throw std::invalid_argument("tree edge not in graph: " + id);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : g.graph.edges) {
      if (!m.tree.count(e.id)) continue;
      bool has_from = rho.count(e.from), has_to = rho.count(e.to);
      if (has_from && !has_to) {
        Chain c = rho[e.from];
        chain_add(c, Chain{{e.id, 1}});
        rho[e.to] = std::move(c);
        grew = true;
      } else if (has_to && !has_from) {
        Chain c = rho[e.to];
        chain_add(c, Chain{{e.id, 1}}, -1);
        rho[e.from] = std::move(c);
        grew = true;
      }
    }
  }
  if (rho.size() != g.graph.vertices.size() || m.tree.size() != g.graph.vertices.size() - 1)
    throw std::invalid_argument("tree is not spanning");
  m.tree_paths = std::move(rho);
  m.root_image_path = m.tree_paths.at(g.vertex_image.at(m.root));

  for (const auto& e : g.graph.edges) {
    if (m.tree.count(e.id)) continue;
    Chain z = m.tree_paths.at(e.from);
    chain_add(z, Chain{{e.id, 1}});
    chain_add(z, m.tree_paths.at(e.to), -1);
    m.cycle_edges.push_back(e.id);
    m.cycle_basis.push_back(std::move(z));
  }

  const std::size_t c = m.cycle_basis.size();
  m.h1_action.assign(c, std::vector<Int>(c, 0));
  for (std::size_t j = 0; j < c; ++j) {
    std::vector<Int> col = m.cycle_coordinates(push_chain(g, m.cycle_basis[j]));
    for (std::size_t i = 0; i < c; ++i) m.h1_action[i][j] = col[i];
  }

  IntMat fixed_part = m.h1_action;
  for (std::size_t i = 0; i < c; ++i) fixed_part[i][i] -= 1;
  m.smith = smith_normal_form(fixed_part);

  std::vector<std::size_t> zero_rows;
  for (std::size_t i = 0; i < c; ++i)
    if (m.smith.d[i][i] == 0) zero_rows.push_back(i);
  m.b = 1 + zero_rows.size();

  IntMat u_inv = unimodular_inverse(m.smith.u);
  m.pi0.assign(zero_rows.size(), std::vector<Int>(c, 0));
  m.pi0_section.assign(c, std::vector<Int>(zero_rows.size(), 0));
  for (std::size_t k = 0; k < zero_rows.size(); ++k) {
    // Orientation fix: first nonzero entry of each pi0 row positive.
    int flip = 1;
    for (std::size_t j = 0; j < c; ++j)
      if (m.smith.u[zero_rows[k]][j] != 0) {
        flip = m.smith.u[zero_rows[k]][j] < 0 ? -1 : 1;
        break;
      }
    for (std::size_t j = 0; j < c; ++j) {
      m.pi0[k][j] = flip * m.smith.u[zero_rows[k]][j];
      m.pi0_section[j][k] = flip * u_inv[j][zero_rows[k]];
    }
  }

  // pi0 kills im(f_* - I) and pi0 * section = I; cheap postconditions.
  for (std::size_t r = 0; r < m.pi0.size(); ++r)
    for (std::size_t j = 0; j < c; ++j) {
      Int dot = 0;
      for (std::size_t t = 0; t < c; ++t) dot += m.pi0[r][t] * fixed_part[t][j];
      if (dot != 0) throw std::logic_error("pi0 fails to kill im(f_* - I)");
    }
  for (std::size_t r = 0; r < m.pi0.size(); ++r)
    for (std::size_t k = 0; k < m.pi0.size(); ++k) {
      Int dot = 0;
      for (std::size_t t = 0; t < c; ++t) dot += m.pi0[r][t] * m.pi0_section[t][k];
      if (dot != (r == k ? 1 : 0)) throw std::logic_error("pi0 section mismatch");
    }
  return m;
}

// Maps internal H-coordinates to user character values and back.
class CoordinateSystem {
 public:
  std::vector<std::string> names;
  IntMat value_matrix;      // rows: characters evaluated on internal basis
  IntMat inverse_matrix;    // value_matrix^{-1}

  std::size_t dim() const { return names.size(); }

  ExponentVector vector_to_coords(const std::vector<Int>& internal) const {
    ExponentVector out(dim(), 0);
    for (std::size_t r = 0; r < dim(); ++r) {
      Int acc = 0;
      for (std::size_t j = 0; j < dim(); ++j) acc += value_matrix[r][j] * internal[j];
      out[r] = to_i64(acc);
    }
    return out;
  }

  // Classes transform by the inverse transpose, so the pairing in output
  // coordinates is the plain dot product.
  std::vector<Rat> class_to_coords(const std::vector<Rat>& covector) const {
    std::vector<Rat> out(dim(), 0);
    for (std::size_t r = 0; r < dim(); ++r)
      for (std::size_t j = 0; j < dim(); ++j)
        out[r] += Rat(inverse_matrix[j][r]) * covector[j];
    return out;
  }

  std::vector<std::vector<std::int64_t>> exponent_map() const {
    std::vector<std::vector<std::int64_t>> mm(dim(), std::vector<std::int64_t>(dim()));
    for (std::size_t r = 0; r < dim(); ++r)
      for (std::size_t j = 0; j < dim(); ++j) mm[r][j] = to_i64(value_matrix[r][j]);
    return mm;
  }

  LaurentPoly to_coords(const LaurentPoly& internal_poly) const {
    return internal_poly.map_exponents(exponent_map());
  }
};

inline CoordinateSystem make_coordinates(const MarkedAbelianization& m,
                                         const std::vector<CohomologyClass>& chars) {
  if (chars.size() != m.b)
    throw std::invalid_argument("coordinate system needs exactly b characters");
  CoordinateSystem cs;
  cs.value_matrix.assign(m.b, std::vector<Int>(m.b, 0));
  for (std::size_t r = 0; r < m.b; ++r) {
    std::vector<Rat> cov = class_on_H(m, chars[r]);
    for (std::size_t j = 0; j < m.b; ++j) {
      if (denominator(cov[j]) != 1)
        throw std::invalid_argument("character not integral: " + chars[r].name);
      cs.value_matrix[r][j] = numerator(cov[j]);
    }
    cs.names.push_back(chars[r].name);
  }
  Int det = mat_det(cs.value_matrix);
  if (det != 1 && det != -1)
    throw std::invalid_argument("character family not unimodular (det " + to_string(det) + ")");
  cs.inverse_matrix = unimodular_inverse(cs.value_matrix);
  return cs;
}

// Identity coordinates on the internal basis, for b-agnostic plumbing.
inline CoordinateSystem internal_coordinates(const MarkedAbelianization& m) {
  CoordinateSystem cs;
  cs.value_matrix = identity_matrix(m.b);
  cs.inverse_matrix = identity_matrix(m.b);
  for (std::size_t i = 0; i + 1 < m.b; ++i) cs.names.push_back("t" + std::to_string(i + 1));
  cs.names.push_back("x");
  return cs;
}

}  // namespace trainpoly
