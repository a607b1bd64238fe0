#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trainpoly/graph.hpp"
#include "trainpoly/numeric.hpp"
#include "trainpoly/stallings.hpp"
#include "trainpoly/subdivide.hpp"

namespace trainpoly {

namespace random_detail {

// Non-backtracking random walk of exact length from `from` to `to`.
inline std::optional<EdgePath> random_walk(Rng& rng, const Graph& g, const std::string& from,
                                           const std::string& to, int length) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    EdgePath path;
    std::string at = from;
    bool stuck = false;
    for (int step = 0; step < length; ++step) {
      std::vector<SignedStep> germs;
      for (const auto& e : g.edges) {
        SignedStep fwd{e.id, +1}, bwd{e.id, -1};
        bool block_fwd = !path.empty() && path.back().edge == e.id && path.back().sign == -1;
        bool block_bwd = !path.empty() && path.back().edge == e.id && path.back().sign == +1;
        if (e.from == at && !block_fwd) germs.push_back(fwd);
        if (e.to == at && !block_bwd) germs.push_back(bwd);
      }
      if (germs.empty()) {
        stuck = true;
        break;
      }
      SignedStep pick = germs[rng.below(germs.size())];
      path.push_back(pick);
      at = step_terminus(g, pick);
    }
    if (!stuck && at == to) return path;
  }
  return std::nullopt;
}

inline Graph random_shape(Rng& rng, int max_edges) {
  Graph g;
  if (rng.below(2) == 0) {
    int n = static_cast<int>(rng.range(2, std::min(6, max_edges)));
    g.vertices = {"v"};
    for (int i = 0; i < n; ++i)
      g.edges.push_back({std::string(1, static_cast<char>('a' + i)), "v", "v"});
  } else {
    g.vertices = {"L", "R"};
    int bridges = static_cast<int>(rng.range(2, 3));
    int loops = static_cast<int>(rng.range(1, std::min<std::int64_t>(2, max_edges - bridges)));
    char name = 'a';
    for (int i = 0; i < bridges; ++i) g.edges.push_back({std::string(1, name++), "L", "R"});
    for (int i = 0; i < loops; ++i) {
      std::string v = rng.below(2) ? "L" : "R";
      g.edges.push_back({std::string(1, name++), v, v});
    }
  }
  return g;
}

}  // namespace random_detail

// Rejection-samples expanding irreducible train track maps; deterministic for
// a given generator state.
inline GraphMap random_train_track_map(Rng& rng, int max_edges = 8, int max_attempts = 20000) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Graph shape = random_detail::random_shape(rng, max_edges);
    GraphMap g;
    g.graph = shape;
    bool ok = true;
    for (const auto& v : shape.vertices)
      g.vertex_image[v] = shape.vertices[rng.below(shape.vertices.size())];
    for (const auto& e : shape.edges) {
      int len = static_cast<int>(rng.range(1, 4));
      auto walk = random_detail::random_walk(rng, shape, g.vertex_image[e.from],
                                             g.vertex_image[e.to], len);
      if (!walk) walk = random_detail::random_walk(rng, shape, g.vertex_image[e.from],
                                                   g.vertex_image[e.to], len + 1);
      if (!walk) {
        ok = false;
        break;
      }
      g.edge_image[e.id] = *walk;
    }
    if (!ok) continue;
    if (!validate_graph_map(g).ok()) continue;
    if (!is_irreducible(g)) continue;
    if (!is_expanding(g)) continue;
    if (!is_train_track(g).ok) continue;
    return g;
  }
  throw std::runtime_error("random map generation exhausted its attempt budget");
}

// A periodic point the subdivision machinery accepts, if any: occurrence
// chains of period up to 3, scanned deterministically.
inline std::optional<PeriodicPointSpec> find_periodic_point(const GraphMap& g) {
  for (int period = 1; period <= 3; ++period)
    for (const auto& e : g.graph.edges) {
      const EdgePath& img = g.edge_image.at(e.id);
      for (int l = 1; l <= static_cast<int>(img.size()); ++l) {
        PeriodicPointSpec spec{e.id, l, period};
        try {
          subdivide_at_invariant_set(g, {spec});
          return spec;
        } catch (const std::invalid_argument&) {
        }
      }
    }
  return std::nullopt;
}

inline FreeGroupEndo random_endomorphism(Rng& rng, int max_rank = 5) {
  FreeGroupEndo e;
  e.rank = static_cast<int>(rng.range(2, max_rank));
  for (int i = 0; i < e.rank; ++i) {
    int len = static_cast<int>(rng.range(0, 4));
    Word w;
    for (int k = 0; k < len; ++k) {
      int g = static_cast<int>(rng.range(1, e.rank));
      int letter = rng.below(2) ? g : -g;
      if (!w.empty() && w.back() == -letter) letter = -letter;
      w.push_back(letter);
    }
    e.images.push_back(free_reduce(w));
  }
  return e;
}

}  // namespace trainpoly
