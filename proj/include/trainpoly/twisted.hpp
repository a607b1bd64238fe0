#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "trainpoly/laurent.hpp"
#include "trainpoly/marking.hpp"
#include "trainpoly/subdivide.hpp"

namespace trainpoly {

// One occurrence of target inside the image of source; position is 1-based.
struct Occurrence {
  std::size_t source = 0;  // edge index e_j
  std::size_t target = 0;  // edge index e_i
  int position = 1;
  int sign = 1;
};

struct Arc {
  Occurrence occ;
  std::vector<Int> label;       // H0-coordinates
  std::vector<Int> orbit_step;  // full H-class of the step; last entry is 1
};

// Cyclic arc sequence with pairwise distinct nodes, stored in canonical
// rotation (least source node first).
struct Circuit {
  std::vector<std::size_t> arcs;
};

class LabeledTransitionGraph {
 public:
  std::vector<std::string> nodes;  // edge ids of the underlying graph
  std::vector<Arc> arcs;           // ordered by (source, position)
  std::size_t h0_rank = 0;

  std::size_t node_count() const { return nodes.size(); }

  // Adjacency matrix over Z[H0]: entry (i, j) sums t^label over arcs j -> i.
  RingMatrix matrix() const {
    const std::size_t m = node_count();
    RingMatrix a(m, std::vector<LaurentPoly>(m, LaurentPoly(h0_rank)));
    for (const auto& arc : arcs) {
      ExponentVector e(h0_rank);
      for (std::size_t k = 0; k < h0_rank; ++k) e[k] = to_i64(arc.label[k]);
      a[arc.occ.target][arc.occ.source].add_term(std::move(e), 1);
    }
    return a;
  }

  std::size_t arc_index(std::size_t source, int position) const {
    for (std::size_t i = 0; i < arcs.size(); ++i)
      if (arcs[i].occ.source == source && arcs[i].occ.position == position) return i;
    throw std::invalid_argument("no arc at that occurrence");
  }

  // Gauge change by a potential on nodes; a genuine coboundary, so all
  // contract values are unaffected.
  LabeledTransitionGraph with_gauge(const std::vector<std::vector<Int>>& omega) const {
    LabeledTransitionGraph out = *this;
    for (auto& arc : out.arcs)
      for (std::size_t k = 0; k < h0_rank; ++k)
        arc.label[k] += omega[arc.occ.target][k] - omega[arc.occ.source][k];
    return out;
  }

  // Test hook: perturbs a single arc label (generally NOT a coboundary).
  LabeledTransitionGraph with_perturbed_label(std::size_t source, int position,
                                              const std::vector<Int>& delta) const {
    LabeledTransitionGraph out = *this;
    Arc& arc = out.arcs[arc_index(source, position)];
    for (std::size_t k = 0; k < h0_rank; ++k) {
      arc.label[k] += delta[k];
      arc.orbit_step[k] -= delta[k];
    }
    return out;
  }
};

// Builds the homology-labeled transition graph. For each occurrence the
// correction chain
//   delta = rho(f(root)) + f_#(rho(o(e_j))) + prefix + (sign<0 ? -e_i : 0)
//           - rho(o(e_i))
// is a 1-cycle; the arc label is -pi0(delta) and the orbit step (pi0(delta), 1).
inline LabeledTransitionGraph build_labels(const MarkedAbelianization& m) {
  const GraphMap& g = m.base;
  LabeledTransitionGraph out;
  out.h0_rank = m.h0_rank();
  for (const auto& e : g.graph.edges) out.nodes.push_back(e.id);

  for (std::size_t j = 0; j < g.graph.edges.size(); ++j) {
    const Edge& ej = g.graph.edges[j];
    const EdgePath& img = g.edge_image.at(ej.id);
    Chain base = m.root_image_path;
    chain_add(base, push_chain(g, m.tree_paths.at(ej.from)));
    Chain prefix;  // chain of img[0..l-1)
    for (std::size_t l = 0; l < img.size(); ++l) {
      const SignedStep& st = img[l];
      const Edge& ei = g.graph.edges[g.graph.edge_index(st.edge)];
      Chain delta = base;
      chain_add(delta, prefix);
      if (st.sign < 0) chain_add(delta, Chain{{st.edge, 1}}, -1);
      chain_add(delta, m.tree_paths.at(ei.from), -1);

      std::vector<Int> p = m.pi0_of_cycle(delta);
      Arc arc;
      arc.occ = {j, static_cast<std::size_t>(g.graph.edge_index(st.edge)),
                 static_cast<int>(l + 1), st.sign};
      arc.label.resize(out.h0_rank);
      arc.orbit_step.resize(m.b);
      for (std::size_t k = 0; k < out.h0_rank; ++k) {
        arc.label[k] = -p[k];
        arc.orbit_step[k] = p[k];
      }
      arc.orbit_step[m.b - 1] = 1;
      out.arcs.push_back(std::move(arc));

      chain_add(prefix, chain_of_path({st}));
    }
  }
  return out;
}

// A(1,...,1): occurrence counts; always equals the transition matrix.
inline IntMatrix evaluate_at_one(const LabeledTransitionGraph& l) {
  const std::size_t m = l.node_count();
  IntMatrix a(m, std::vector<Int>(m, 0));
  for (const auto& arc : l.arcs) a[arc.occ.target][arc.occ.source] += 1;
  return a;
}

// All simple directed cycles, every parallel-arc choice enumerated, in
// canonical order: anchored at their least node, arcs tried in index order.
inline std::vector<Circuit> circuits(const LabeledTransitionGraph& l) {
  const std::size_t m = l.node_count();
  std::vector<std::vector<std::size_t>> out_arcs(m);
  for (std::size_t i = 0; i < l.arcs.size(); ++i)
    out_arcs[l.arcs[i].occ.source].push_back(i);

  std::vector<Circuit> found;
  std::vector<std::size_t> path;
  std::vector<bool> on_path(m, false);
  for (std::size_t s = 0; s < m; ++s) {
    auto rec = [&](auto&& self, std::size_t u) -> void {
      for (std::size_t a : out_arcs[u]) {
        std::size_t v = l.arcs[a].occ.target;
        if (v == s) {
          path.push_back(a);
          found.push_back({path});
          path.pop_back();
        } else if (v > s && !on_path[v]) {
          path.push_back(a);
          on_path[v] = true;
          self(self, v);
          on_path[v] = false;
          path.pop_back();
        }
      }
    };
    rec(rec, s);
  }
  return found;
}

struct OrbitClass {
  std::vector<Int> h_class;     // internal coordinates, length b
  std::vector<Int> p_exponent;  // exponent of the circuit monomial p_y, length b-1
  std::size_t length = 0;
};

inline OrbitClass orbit_class(const LabeledTransitionGraph& l, const Circuit& y) {
  const std::size_t b = l.h0_rank + 1;
  OrbitClass oc;
  oc.h_class.assign(b, 0);
  oc.p_exponent.assign(l.h0_rank, 0);
  oc.length = y.arcs.size();
  for (std::size_t a : y.arcs) {
    const Arc& arc = l.arcs[a];
    for (std::size_t k = 0; k < b; ++k) oc.h_class[k] += arc.orbit_step[k];
    for (std::size_t k = 0; k < l.h0_rank; ++k) oc.p_exponent[k] += arc.label[k];
  }
  // p_y^{-1} x^{|y|} equals the class by construction; keep the tripwire.
  for (std::size_t k = 0; k < l.h0_rank; ++k)
    if (oc.h_class[k] != -oc.p_exponent[k]) throw std::logic_error("orbit form identity failed");
  if (oc.h_class[b - 1] != Int(oc.length)) throw std::logic_error("orbit form identity failed");
  return oc;
}

inline OrbitClass orbit_class(const MarkedAbelianization&, const LabeledTransitionGraph& l,
                              const Circuit& y) {
  return orbit_class(l, y);
}

// Greedy factorization of a closed arc walk into circuits; the excised
// classes sum to the class of the walk.
inline std::vector<Circuit> decompose_closed_walk(const LabeledTransitionGraph& l,
                                                  const std::vector<std::size_t>& walk) {
  if (walk.empty()) return {};
  for (std::size_t i = 0; i < walk.size(); ++i) {
    std::size_t next = (i + 1) % walk.size();
    if (l.arcs[walk[i]].occ.target != l.arcs[walk[next]].occ.source)
      throw std::invalid_argument("walk is not a closed arc chain");
  }
  auto canonical = [&](std::vector<std::size_t> arcs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < arcs.size(); ++i)
      if (l.arcs[arcs[i]].occ.source < l.arcs[arcs[best]].occ.source) best = i;
    std::rotate(arcs.begin(), arcs.begin() + best, arcs.end());
    return Circuit{std::move(arcs)};
  };

  std::vector<Circuit> out;
  std::vector<std::size_t> stack;
  std::map<std::size_t, std::size_t> node_pos;  // node -> index in stack whose arc leaves it
  for (std::size_t w : walk) {
    node_pos.emplace(l.arcs[w].occ.source, stack.size());
    stack.push_back(w);
    std::size_t v = l.arcs[w].occ.target;
    auto it = node_pos.find(v);
    if (it != node_pos.end()) {
      std::size_t p = it->second;
      out.push_back(canonical({stack.begin() + p, stack.end()}));
      for (std::size_t i = p; i < stack.size(); ++i) node_pos.erase(l.arcs[stack[i]].occ.source);
      stack.resize(p);
    }
  }
  if (!stack.empty()) throw std::logic_error("closed walk failed to decompose");
  return out;
}

// B(t): one signed monomial per column, the lifted one-step dynamics on the
// orbit points. Exponents use the same labels as the transition graph.
inline RingMatrix subdivision_factor(const MarkedAbelianization& m,
                                     const LabeledTransitionGraph& l, const PointOrbit& orbit) {
  const std::size_t p = orbit.points.size();
  RingMatrix b(p, std::vector<LaurentPoly>(p, LaurentPoly(m.h0_rank())));
  for (std::size_t j = 0; j < p; ++j) {
    const OrbitPoint& pt = orbit.points[j];
    int ei = m.base.graph.edge_index(pt.host_edge);
    if (ei < 0) throw std::invalid_argument("orbit not over this graph");
    const Arc& arc = l.arcs[l.arc_index(static_cast<std::size_t>(ei), pt.position)];
    ExponentVector e(m.h0_rank());
    for (std::size_t k = 0; k < m.h0_rank(); ++k) e[k] = to_i64(arc.label[k]);
    b[pt.next][j].add_term(std::move(e), pt.sign > 0 ? 1 : -1);
  }
  return b;
}

}  // namespace trainpoly
