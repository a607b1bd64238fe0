#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trainpoly/numeric.hpp"

namespace trainpoly {

struct Edge {
  std::string id;
  std::string from;
  std::string to;
};

struct Graph {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;  // fixed positive orientations

  int vertex_index(const std::string& v) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] == v) return static_cast<int>(i);
    return -1;
  }
  int edge_index(const std::string& id) const {
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edges[i].id == id) return static_cast<int>(i);
    return -1;
  }
  std::size_t edge_count() const { return edges.size(); }
};

// One signed traversal of an edge; sign -1 runs the edge against its
// orientation.
struct SignedStep {
  std::string edge;
  int sign = 1;

  bool operator==(const SignedStep&) const = default;
  auto operator<=>(const SignedStep&) const = default;
};

using EdgePath = std::vector<SignedStep>;

struct GraphMap {
  Graph graph;
  std::map<std::string, std::string> vertex_image;
  std::map<std::string, EdgePath> edge_image;
};

using IntMatrix = std::vector<std::vector<Int>>;

struct ValidationError {
  std::string kind;  // "endpoint mismatch", "dangling edge id", ...
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationError> errors;
  bool ok() const { return errors.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& e : errors) {
      if (!s.empty()) s += "; ";
      s += e.kind + ": " + e.detail;
    }
    return s;
  }
};

inline std::string step_origin(const Graph& g, const SignedStep& s) {
  const Edge& e = g.edges[g.edge_index(s.edge)];
  return s.sign > 0 ? e.from : e.to;
}

inline std::string step_terminus(const Graph& g, const SignedStep& s) {
  const Edge& e = g.edges[g.edge_index(s.edge)];
  return s.sign > 0 ? e.to : e.from;
}

inline std::string path_origin(const Graph& g, const EdgePath& p) {
  return step_origin(g, p.front());
}

inline std::string path_terminus(const Graph& g, const EdgePath& p) {
  return step_terminus(g, p.back());
}

inline EdgePath reversed(const EdgePath& p) {
  EdgePath out;
  out.reserve(p.size());
  for (auto it = p.rbegin(); it != p.rend(); ++it)
    out.push_back({it->edge, -it->sign});
  return out;
}

// Valence counts both endpoints of loops.
inline std::map<std::string, int> vertex_valences(const Graph& g) {
  std::map<std::string, int> val;
  for (const auto& v : g.vertices) val[v] = 0;
  for (const auto& e : g.edges) {
    val[e.from]++;
    val[e.to]++;
  }
  return val;
}

inline ValidationReport validate_graph_map(const GraphMap& g) {
  ValidationReport rep;
  const Graph& gr = g.graph;

  std::set<std::string> ids;
  for (const auto& e : gr.edges) {
    if (!ids.insert(e.id).second)
      rep.errors.push_back({"duplicate edge id", e.id});
    if (gr.vertex_index(e.from) < 0)
      rep.errors.push_back({"dangling edge id", e.id + " origin " + e.from});
    if (gr.vertex_index(e.to) < 0)
      rep.errors.push_back({"dangling edge id", e.id + " terminus " + e.to});
  }
  if (!rep.ok()) return rep;

  for (const auto& [v, val] : vertex_valences(gr))
    if (val == 1) rep.errors.push_back({"valence-1 vertex", v});

  for (const auto& v : gr.vertices) {
    auto it = g.vertex_image.find(v);
    if (it == g.vertex_image.end()) {
      rep.errors.push_back({"missing vertex image", v});
    } else if (gr.vertex_index(it->second) < 0) {
      rep.errors.push_back({"vertex image not a vertex", v + " -> " + it->second});
    }
  }
  if (!rep.ok()) return rep;

  for (const auto& e : gr.edges) {
    auto it = g.edge_image.find(e.id);
    if (it == g.edge_image.end() || it->second.empty()) {
      rep.errors.push_back({"empty image", e.id});
      continue;
    }
    const EdgePath& p = it->second;
    bool bad_ref = false;
    for (const auto& s : p)
      if (gr.edge_index(s.edge) < 0) {
        rep.errors.push_back({"dangling edge id", "image of " + e.id + " uses " + s.edge});
        bad_ref = true;
      }
    if (bad_ref) continue;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      if (step_terminus(gr, p[i]) != step_origin(gr, p[i + 1]))
        rep.errors.push_back(
            {"endpoint mismatch", "image of " + e.id + " breaks at step " + std::to_string(i + 1)});
    if (path_origin(gr, p) != g.vertex_image.at(e.from))
      rep.errors.push_back({"endpoint mismatch", "image of " + e.id + " starts at " +
                                                     path_origin(gr, p) + ", expected f(" + e.from + ")"});
    if (path_terminus(gr, p) != g.vertex_image.at(e.to))
      rep.errors.push_back({"endpoint mismatch", "image of " + e.id + " ends at " +
                                                     path_terminus(gr, p) + ", expected f(" + e.to + ")"});
  }
  return rep;
}

// Entry (e, e') counts occurrences of e (either sign) in the image of e'.
inline IntMatrix transition_matrix(const GraphMap& g) {
  const std::size_t m = g.graph.edge_count();
  IntMatrix a(m, std::vector<Int>(m, 0));
  for (std::size_t j = 0; j < m; ++j) {
    const EdgePath& p = g.edge_image.at(g.graph.edges[j].id);
    for (const auto& s : p) a[g.graph.edge_index(s.edge)][j] += 1;
  }
  return a;
}

// Strong connectivity of the digraph with an arc e' -> e per positive entry.
inline bool is_irreducible(const GraphMap& g) {
  IntMatrix a = transition_matrix(g);
  const std::size_t m = a.size();
  if (m == 0) return false;
  auto reach = [&](bool transpose) {
    std::vector<bool> seen(m, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < m; ++w) {
        const Int& entry = transpose ? a[v][w] : a[w][v];
        if (entry > 0 && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach(false) && reach(true);
}

inline bool is_permutation_matrix(const IntMatrix& a) {
  const std::size_t m = a.size();
  for (std::size_t i = 0; i < m; ++i) {
    int ones = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (a[i][j] == 0) continue;
      if (a[i][j] != 1) return false;
      ++ones;
    }
    if (ones != 1) return false;
  }
  for (std::size_t j = 0; j < m; ++j) {
    Int col = 0;
    for (std::size_t i = 0; i < m; ++i) col += a[i][j];
    if (col != 1) return false;
  }
  return true;
}

// Only defined for irreducible maps (the pipeline's standing hypothesis).
inline bool is_expanding(const GraphMap& g) {
  if (!is_irreducible(g)) throw std::invalid_argument("irreducibility required");
  return !is_permutation_matrix(transition_matrix(g));
}

// A direction is an outgoing edge-germ at a vertex.
struct Germ {
  std::string edge;
  int sign = 1;  // +1: germ at origin pointing along e; -1: germ at terminus

  bool operator==(const Germ&) const = default;
  auto operator<=>(const Germ&) const = default;
};

inline std::string germ_vertex(const Graph& g, const Germ& d) {
  const Edge& e = g.edges[g.edge_index(d.edge)];
  return d.sign > 0 ? e.from : e.to;
}

// Induced map on directions: first germ of the image path.
inline Germ derivative_map(const GraphMap& g, const Germ& d) {
  const EdgePath& p = g.edge_image.at(d.edge);
  if (d.sign > 0) return {p.front().edge, p.front().sign};
  return {p.back().edge, -p.back().sign};
}

struct Turn {
  Germ a, b;  // stored sorted, so the pair is unordered

  Turn(Germ x, Germ y) {
    if (y < x) std::swap(x, y);
    a = x;
    b = y;
  }
  bool degenerate() const { return a == b; }
  bool operator==(const Turn&) const = default;
  auto operator<=>(const Turn&) const = default;
};

struct TrainTrackResult {
  bool ok = true;
  std::optional<Turn> offending_turn;  // the taken turn whose orbit degenerates
  int power = 0;                       // iterations of Df until degeneration
};

// Taken turns: consecutive germ pairs inside edge images plus the turn at
// every valence-2 vertex, closed under the direction map. A degenerate image
// means some iterate backtracks.
inline TrainTrackResult is_train_track(const GraphMap& g, int max_power = 0) {
  const Graph& gr = g.graph;

  std::vector<Germ> germs;
  for (const auto& e : gr.edges) {
    germs.push_back({e.id, +1});
    germs.push_back({e.id, -1});
  }
  std::sort(germs.begin(), germs.end(),
            [&](const Germ& x, const Germ& y) {
              auto kx = std::tuple(germ_vertex(gr, x), x.edge, x.sign);
              auto ky = std::tuple(germ_vertex(gr, y), y.edge, y.sign);
              return kx < ky;
            });
  // The closure visits each turn at most once, so the number of germ pairs
  // bounds the iteration; an explicit max_power only tightens it.
  const int n_germs = static_cast<int>(germs.size());
  if (max_power <= 0) max_power = n_germs * n_germs + 2;

  std::set<Turn> taken;
  for (const auto& e : gr.edges) {
    const EdgePath& p = g.edge_image.at(e.id);
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      taken.insert(Turn({p[i].edge, -p[i].sign}, {p[i + 1].edge, p[i + 1].sign}));
  }
  auto valences = vertex_valences(gr);
  for (const auto& v : gr.vertices) {
    if (valences[v] != 2) continue;
    std::vector<Germ> at_v;
    for (const auto& d : germs)
      if (germ_vertex(gr, d) == v) at_v.push_back(d);
    if (at_v.size() == 2) taken.insert(Turn(at_v[0], at_v[1]));
  }

  // Deterministic closure; terminates on the finite turn set, max_power is a
  // safety bound only.
  std::map<Turn, std::pair<Turn, int>> origin;  // turn -> (root taken turn, power)
  std::vector<Turn> frontier;
  for (const auto& t : taken) {
    origin.emplace(t, std::make_pair(t, 0));
    frontier.push_back(t);
  }
  for (int k = 0; k < max_power && !frontier.empty(); ++k) {
    std::vector<Turn> next;
    for (const auto& t : frontier) {
      Turn img(derivative_map(g, t.a), derivative_map(g, t.b));
      auto [root, pw] = origin.at(t);
      if (img.degenerate()) return {false, root, pw + 1};
      if (origin.emplace(img, std::make_pair(root, pw + 1)).second)
        next.push_back(img);
    }
    frontier = std::move(next);
  }
  return {true, std::nullopt, 0};
}

struct IteratedPath {
  EdgePath path;
  std::vector<std::size_t> backtracks;  // positions i with step i+1 undoing step i
};

// f^n(e) with immediate backtracking reported, never silently removed.
inline IteratedPath iterate_edge(const GraphMap& g, const std::string& edge, int n) {
  EdgePath cur{{edge, +1}};
  for (int k = 0; k < n; ++k) {
    EdgePath next;
    for (const auto& s : cur) {
      const EdgePath& img = g.edge_image.at(s.edge);
      if (s.sign > 0)
        next.insert(next.end(), img.begin(), img.end());
      else {
        EdgePath rev = reversed(img);
        next.insert(next.end(), rev.begin(), rev.end());
      }
    }
    cur = std::move(next);
  }
  IteratedPath out{std::move(cur), {}};
  for (std::size_t i = 0; i + 1 < out.path.size(); ++i)
    if (out.path[i].edge == out.path[i + 1].edge &&
        out.path[i].sign == -out.path[i + 1].sign)
      out.backtracks.push_back(i);
  return out;
}

}  // namespace trainpoly
