#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "trainpoly/numeric.hpp"

namespace trainpoly {

// Letters are +-(generator index + 1); words are freely reduced on input.
using Word = std::vector<int>;

inline Word free_reduce(const Word& w) {
  Word out;
  for (int letter : w) {
    if (letter == 0) throw std::invalid_argument("zero letter");
    if (!out.empty() && out.back() == -letter)
      out.pop_back();
    else
      out.push_back(letter);
  }
  return out;
}

struct FreeGroupEndo {
  int rank = 0;
  std::vector<Word> images;  // images[i] is the image of generator i+1

  Word apply(const Word& w) const {
    Word out;
    for (int letter : w) {
      int g = letter > 0 ? letter : -letter;
      if (g < 1 || g > rank) throw std::invalid_argument("letter out of rank");
      const Word& img = images[g - 1];
      if (letter > 0)
        out.insert(out.end(), img.begin(), img.end());
      else
        for (auto it = img.rbegin(); it != img.rend(); ++it) out.push_back(-*it);
    }
    return free_reduce(out);
  }
};

inline FreeGroupEndo identity_endo(int rank) {
  FreeGroupEndo e;
  e.rank = rank;
  for (int g = 1; g <= rank; ++g) e.images.push_back({g});
  return e;
}

// outer o inner.
inline FreeGroupEndo compose(const FreeGroupEndo& outer, const FreeGroupEndo& inner) {
  if (outer.rank != inner.rank) throw std::invalid_argument("rank mismatch");
  FreeGroupEndo out;
  out.rank = outer.rank;
  for (const Word& w : inner.images) out.images.push_back(outer.apply(w));
  return out;
}

// Based, edge-labeled graph; after folding it is an immersion.
struct FoldedGraph {
  struct LabeledEdge {
    int from, label, to;  // label > 0
    auto operator<=>(const LabeledEdge&) const = default;
  };
  int vertex_count = 0;
  int base = 0;
  std::vector<LabeledEdge> edges;

  // Deterministic transition in the immersed graph; -1 when absent.
  int step(int v, int signed_label) const {
    for (const auto& e : edges) {
      if (signed_label > 0 && e.from == v && e.label == signed_label) return e.to;
      if (signed_label < 0 && e.to == v && e.label == -signed_label) return e.from;
    }
    return -1;
  }

  bool traces_closed_loop(const Word& w) const {
    int v = base;
    for (int letter : w) {
      v = step(v, letter);
      if (v < 0) return false;
    }
    return v == base;
  }
};

namespace fold_detail {

struct DSU {
  std::vector<int> parent;
  explicit DSU(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);  // keep the least index
  }
};

}  // namespace fold_detail

// Wedge of loops spelling the image words, folded to an immersion. The
// violation scan order is deterministic; `shuffle_seed` picks alternative
// orders for confluence testing.
inline FoldedGraph fold(const FreeGroupEndo& e, std::uint64_t shuffle_seed = 0) {
  std::vector<FoldedGraph::LabeledEdge> edges;
  int nv = 1;
  for (const Word& w : e.images) {
    int cur = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int nxt = (i + 1 == w.size()) ? 0 : nv++;
      if (w[i] > 0)
        edges.push_back({cur, w[i], nxt});
      else
        edges.push_back({nxt, -w[i], cur});
      cur = nxt;
    }
  }

  fold_detail::DSU dsu(nv);
  Rng rng(shuffle_seed);
  bool changed = true;
  while (changed) {
    changed = false;
    // Collect all violations: pairs of distinct edges with the same source
    // and label, in either direction.
    std::vector<std::pair<std::size_t, std::size_t>> violations;
    std::map<std::pair<int, int>, std::size_t> seen;  // (vertex, signed label) -> edge
    auto scan = [&](std::size_t idx, int v, int lab) {
      auto [it, fresh] = seen.emplace(std::make_pair(v, lab), idx);
      if (!fresh && it->second != idx) violations.emplace_back(it->second, idx);
    };
    for (std::size_t i = 0; i < edges.size(); ++i) {
      scan(i, dsu.find(edges[i].from), edges[i].label);
      scan(i, dsu.find(edges[i].to), -edges[i].label);
    }
    if (violations.empty()) break;
    std::size_t pick = shuffle_seed ? rng.below(violations.size()) : 0;
    auto [i, j] = violations[pick];
    // Identify the far endpoints and drop the duplicate edge.
    int ti = dsu.find(edges[i].from) == dsu.find(edges[j].from) ? edges[i].to : edges[i].from;
    int tj = dsu.find(edges[j].from) == dsu.find(edges[i].from) ? edges[j].to : edges[j].from;
    dsu.unite(dsu.find(ti), dsu.find(tj));
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(j));
    changed = true;
  }

  // Quotient to representatives with compact numbering, base first.
  std::map<int, int> renum;
  auto num = [&](int v) {
    int r = dsu.find(v);
    auto it = renum.find(r);
    if (it != renum.end()) return it->second;
    int id = static_cast<int>(renum.size());
    renum[r] = id;
    return id;
  };
  FoldedGraph out;
  out.base = num(0);
  std::set<FoldedGraph::LabeledEdge> dedup;
  for (const auto& ed : edges) dedup.insert({num(ed.from), ed.label, num(ed.to)});
  out.edges.assign(dedup.begin(), dedup.end());
  out.vertex_count = static_cast<int>(renum.size());
  return out;
}

// Core: strip valence-1 vertices other than the base.
inline FoldedGraph core_of(FoldedGraph g) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> valence(g.vertex_count, 0);
    for (const auto& e : g.edges) {
      valence[e.from]++;
      valence[e.to]++;
    }
    for (int v = 0; v < g.vertex_count; ++v) {
      if (v == g.base || valence[v] != 1) continue;
      std::vector<FoldedGraph::LabeledEdge> kept;
      for (const auto& e : g.edges)
        if (e.from != v && e.to != v) kept.push_back(e);
      g.edges = std::move(kept);
      changed = true;
    }
    if (changed) {
      // Renumber to drop isolated vertices (base kept).
      std::map<int, int> renum;
      renum[g.base] = 0;
      for (const auto& e : g.edges) {
        renum.emplace(e.from, static_cast<int>(renum.size()));
        renum.emplace(e.to, static_cast<int>(renum.size()));
      }
      for (auto& e : g.edges) {
        e.from = renum[e.from];
        e.to = renum[e.to];
      }
      g.base = 0;
      g.vertex_count = static_cast<int>(renum.size());
    }
  }
  return g;
}

// First Betti number of the folded core: the rank of the image subgroup.
inline int image_rank(const FreeGroupEndo& e) {
  FoldedGraph c = core_of(fold(e));
  return static_cast<int>(c.edges.size()) - c.vertex_count + 1;
}

// Hopficity: an endomorphism of F_n is injective iff its image has rank n.
inline bool is_injective(const FreeGroupEndo& e) { return image_rank(e) == e.rank; }

// Every generator's loop must lift closed at the base of the folded graph.
inline bool is_surjective(const FreeGroupEndo& e) {
  FoldedGraph g = fold(e);
  for (int gidx = 1; gidx <= e.rank; ++gidx)
    if (!g.traces_closed_loop({gidx})) return false;
  return true;
}

struct StableImage {
  int index = 0;
  std::vector<int> ranks;  // b1 of phi^0, phi^1, ... up to stabilization
};

inline StableImage stable_image_index(const FreeGroupEndo& e, int cap = 64) {
  if (cap < 1) throw std::invalid_argument("cap must be at least 1");
  StableImage out;
  out.ranks.push_back(e.rank);  // phi^0
  FreeGroupEndo power = e;
  for (int i = 1; i <= cap + 1; ++i) {
    int r = image_rank(power);
    if (r > out.ranks.back()) throw std::logic_error("rank sequence increased");
    out.ranks.push_back(r);
    if (r == out.ranks[out.ranks.size() - 2]) {
      out.index = i - 1;
      return out;
    }
    power = compose(e, power);
  }
  throw std::runtime_error("stable image cap exceeded");
}

// BFS numbering from the base with label-ordered neighbors; equal canonical
// forms mean label-isomorphic based graphs.
inline std::vector<FoldedGraph::LabeledEdge> canonical_form(const FoldedGraph& g, int rank) {
  std::vector<int> order(g.vertex_count, -1);
  std::vector<int> queue{g.base};
  order[g.base] = 0;
  int next_id = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int v = queue[head];
    for (int lab = 1; lab <= rank; ++lab)
      for (int s : {lab, -lab}) {
        int w = g.step(v, s);
        if (w >= 0 && order[w] < 0) {
          order[w] = next_id++;
          queue.push_back(w);
        }
      }
  }
  std::vector<FoldedGraph::LabeledEdge> canon;
  for (const auto& e : g.edges) canon.push_back({order[e.from], e.label, order[e.to]});
  std::sort(canon.begin(), canon.end());
  return canon;
}

}  // namespace trainpoly
