#pragma once

#include <string>
#include <vector>

#include "trainpoly/laurent.hpp"
#include "trainpoly/marking.hpp"
#include "trainpoly/twisted.hpp"

namespace trainpoly {

// Characters realizing the internal coordinate system as honest cohomology
// classes: the H0 dual basis supported on non-tree edges, plus the stable
// coordinate. Always valid, integral, and unimodular.
inline std::vector<CohomologyClass> internal_characters(const MarkedAbelianization& m) {
  std::vector<CohomologyClass> chars;
  for (std::size_t r = 0; r + 1 < m.b; ++r) {
    CohomologyClass u;
    u.name = "t" + std::to_string(r + 1) + "*";
    for (std::size_t j = 0; j < m.cycle_edges.size(); ++j)
      if (m.pi0[r][j] != 0) u.edge_values[m.cycle_edges[j]] = Rat(m.pi0[r][j]);
    chars.push_back(std::move(u));
  }
  CohomologyClass w;
  w.name = "x*";
  w.stable_value = 1;
  chars.push_back(std::move(w));
  return chars;
}

// det(xI - A(t)) in internal coordinates: variables t_1..t_{b-1}, x.
inline LaurentPoly mcmullen_det(const MarkedAbelianization&, const LabeledTransitionGraph& l) {
  return determinant(char_matrix(l.matrix()));
}

// The cycle-polynomial route: x^m plus one signed monomial per nonempty set
// of pairwise node-disjoint circuits.
inline LaurentPoly mcmullen_cycle(const LabeledTransitionGraph& l) {
  const std::size_t nodes = l.node_count();
  const std::size_t b = l.h0_rank + 1;
  if (nodes >= 64) throw std::invalid_argument("too many edges for circuit masks");
  std::vector<Circuit> ys = circuits(l);

  std::vector<std::uint64_t> masks(ys.size(), 0);
  std::vector<std::vector<Int>> p_exps(ys.size());
  std::vector<std::size_t> lens(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    OrbitClass oc = orbit_class(l, ys[i]);
    p_exps[i] = oc.p_exponent;
    lens[i] = oc.length;
    for (std::size_t a : ys[i].arcs) masks[i] |= std::uint64_t(1) << l.arcs[a].occ.source;
  }

  LaurentPoly poly(b);
  ExponentVector top(b, 0);
  top[b - 1] = static_cast<std::int64_t>(nodes);
  poly.add_term(std::move(top), 1);

  std::vector<Int> acc(l.h0_rank, 0);
  auto rec = [&](auto&& self, std::size_t from, std::uint64_t used, std::size_t len,
                 int count) -> void {
    for (std::size_t i = from; i < ys.size(); ++i) {
      if (masks[i] & used) continue;
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += p_exps[i][k];
      std::size_t nlen = len + lens[i];
      ExponentVector e(b);
      for (std::size_t k = 0; k < acc.size(); ++k) e[k] = to_i64(acc[k]);
      e[b - 1] = static_cast<std::int64_t>(nodes - nlen);
      poly.add_term(std::move(e), (count + 1) % 2 ? -1 : 1);
      self(self, i + 1, used | masks[i], nlen, count + 1);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] -= p_exps[i][k];
    }
  };
  rec(rec, 0, 0, 0, 0);
  return poly;
}

inline LaurentPoly mcmullen_cycle(const MarkedAbelianization&, const LabeledTransitionGraph& l) {
  return mcmullen_cycle(l);
}

struct SubdivisionCheck {
  LaurentPoly subdivided;  // m' in the supplied coordinates
  LaurentPoly predicted;   // m * det(xI - B), same coordinates
  bool ok = false;
};

// Pulls a class back through a subdivision: the first segment of each edge
// carries the whole value. Cycle values and f-invariance are preserved.
inline CohomologyClass pull_back_class(const CohomologyClass& u, const SubdivisionResult& sub) {
  CohomologyClass out;
  out.name = u.name;
  out.stable_value = u.stable_value;
  for (const auto& [e, v] : u.edge_values)
    if (v != 0) out.edge_values[sub.segments.at(e).front()] = v;
  return out;
}

// Executable subdivision identity: the polynomial of the subdivided map
// equals m * det(xI - B(t)) up to units, compared in fixed user coordinates.
inline SubdivisionCheck check_subdivision(const MarkedAbelianization& m,
                                          const std::vector<CohomologyClass>& chars,
                                          const LaurentPoly& mc_internal,
                                          const SubdivisionResult& sub, const RingMatrix& b) {
  CoordinateSystem cs = make_coordinates(m, chars);

  LaurentPoly factor = b.empty() ? LaurentPoly::constant(m.b, 1) : determinant(char_matrix(b));
  SubdivisionCheck chk;
  chk.predicted = cs.to_coords(mc_internal * factor);

  std::vector<CohomologyClass> chars2;
  chars2.reserve(chars.size());
  for (const auto& u : chars) chars2.push_back(pull_back_class(u, sub));
  MarkedAbelianization m2 = mark(sub.map, m.root);
  CoordinateSystem cs2 = make_coordinates(m2, chars2);
  chk.subdivided = cs2.to_coords(mcmullen_det(m2, build_labels(m2)));

  chk.ok = chk.subdivided.equal_up_to_units(chk.predicted);
  return chk;
}

}  // namespace trainpoly
