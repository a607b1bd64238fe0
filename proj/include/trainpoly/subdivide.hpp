#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trainpoly/graph.hpp"

namespace trainpoly {

// A periodic point named symbolically: the occurrence of some edge at
// `position` (1-based) in the image of `edge` is the first step of a
// period-`period` occurrence chain whose affine branch fixes the point.
struct PeriodicPointSpec {
  std::string edge;
  int position = 1;
  int period = 1;
};

struct OrbitPoint {
  std::string host_edge;
  Rat coordinate;       // in (0,1), exact
  std::string vertex;   // name of the vertex created at this point
  int position = 1;     // occurrence of f(host_edge) carrying the image
  int sign = 1;         // orientation of that occurrence
  std::size_t next = 0; // index of the image point in the orbit list
};

struct PointOrbit {
  std::vector<OrbitPoint> points;  // sorted by (host edge, coordinate)
  bool empty() const { return points.empty(); }
};

struct SubdivisionResult {
  GraphMap map;
  PointOrbit orbit;
  // Original edge id -> its segment ids in order; single-entry for uncut edges.
  std::map<std::string, std::vector<std::string>> segments;
};

namespace detail {

struct AffineStep {
  // Branch of f through one occurrence: x in ((l-1)/k, l/k) of the source
  // edge maps to sign > 0 ? k*x - (l-1) : l - k*x in the target edge.
  std::string source, target;
  int position, sign, source_len;
  Rat apply(const Rat& x) const {
    Rat y = Rat(source_len) * x - (position - 1);
    return sign > 0 ? y : Rat(1) - y;
  }
  bool domain_contains(const Rat& x) const {
    return Rat(position - 1) < Rat(source_len) * x && Rat(source_len) * x < Rat(position);
  }
};

inline AffineStep occurrence_step(const GraphMap& g, const std::string& edge, int position) {
  const EdgePath& img = g.edge_image.at(edge);
  if (position < 1 || position > static_cast<int>(img.size()))
    throw std::invalid_argument("occurrence position out of range for " + edge);
  const SignedStep& s = img[position - 1];
  return {edge, s.edge, position, s.sign, static_cast<int>(img.size())};
}

// Depth-first search for the lexicographically least occurrence chain of the
// given period that starts with the pinned occurrence and closes up.
inline std::optional<std::vector<AffineStep>> find_closing_chain(const GraphMap& g,
                                                                 const PeriodicPointSpec& spec) {
  std::vector<AffineStep> chain{occurrence_step(g, spec.edge, spec.position)};
  auto rec = [&](auto&& self) -> bool {
    if (static_cast<int>(chain.size()) == spec.period)
      return chain.back().target == spec.edge;
    const std::string& cur = chain.back().target;
    const EdgePath& img = g.edge_image.at(cur);
    for (int l = 1; l <= static_cast<int>(img.size()); ++l) {
      chain.push_back(occurrence_step(g, cur, l));
      if (self(self)) return true;
      chain.pop_back();
    }
    return false;
  };
  if (!rec(rec)) return std::nullopt;
  return chain;
}

}  // namespace detail

// Subdivides the graph at the full forward orbits of the specified periodic
// points; image paths are split combinatorially at the corresponding image
// points. Errors when a point is not periodic under the declared data or an
// orbit hits a vertex.
inline SubdivisionResult subdivide_at_invariant_set(const GraphMap& g,
                                                    const std::vector<PeriodicPointSpec>& specs) {
  auto rep = validate_graph_map(g);
  if (!rep.ok()) throw std::invalid_argument("invalid graph map: " + rep.summary());
  if (specs.empty()) {
    SubdivisionResult id{g, {}, {}};
    for (const auto& e : g.graph.edges) id.segments[e.id] = {e.id};
    return id;
  }

  // Locate each spec's periodic point exactly.
  std::map<std::string, std::vector<Rat>> cuts;  // host edge -> coordinates
  std::vector<std::pair<std::string, Rat>> points;
  auto add_point = [&](const std::string& e, const Rat& x) {
    auto& v = cuts[e];
    if (std::find(v.begin(), v.end(), x) == v.end()) {
      v.push_back(x);
      points.emplace_back(e, x);
    }
  };

  for (const auto& spec : specs) {
    if (spec.period < 1) throw std::invalid_argument("period must be positive");
    auto chain = detail::find_closing_chain(g, spec);
    if (!chain)
      throw std::invalid_argument("point not periodic under the declared data: no closing chain from " +
                                  spec.edge + ":" + std::to_string(spec.position));
    // Composite affine branch y = a*x + b over the chain.
    Rat a = 1, b = 0;
    for (const auto& st : *chain) {
      // st: y = sign * (k*x - (l-1)) (+ 1 when reversed)
      Rat k = Rat(st.source_len);
      Rat shift = st.sign > 0 ? Rat(1 - st.position) : Rat(st.position);
      Rat scale = st.sign > 0 ? k : -k;
      a = scale * a;
      b = scale * b + shift;
    }
    if (a == 1)
      throw std::invalid_argument("point not periodic under the declared data: branch has no isolated fixed point");
    Rat x = b / (Rat(1) - a);
    // Forward-check the itinerary and record the orbit.
    Rat cur = x;
    for (const auto& st : *chain) {
      if (!st.domain_contains(cur))
        throw std::invalid_argument("orbit hits a vertex (itinerary leaves the declared chain)");
      add_point(st.source, cur);
      cur = st.apply(cur);
    }
    if (cur != x) throw std::logic_error("branch fixed point failed to close");
  }

  // Orbit points in deterministic order, with their one-step dynamics.
  std::sort(points.begin(), points.end());
  PointOrbit orbit;
  auto point_index = [&](const std::string& e, const Rat& x) -> std::size_t {
    for (std::size_t i = 0; i < points.size(); ++i)
      if (points[i].first == e && points[i].second == x) return i;
    throw std::invalid_argument("orbit not f-invariant: image point missing");
  };
  for (const auto& [e, x] : points) {
    const int k = static_cast<int>(g.edge_image.at(e).size());
    Rat scaled = Rat(k) * x;
    Int l_floor = numerator(scaled) / denominator(scaled);
    if (Rat(l_floor) == scaled) throw std::invalid_argument("orbit hits a vertex");
    int l = static_cast<int>(l_floor) + 1;
    auto st = detail::occurrence_step(g, e, l);
    Rat y = st.apply(x);
    OrbitPoint p;
    p.host_edge = e;
    p.coordinate = x;
    p.vertex = e + "@" + rational_to_string(x);
    p.position = l;
    p.sign = st.sign;
    p.next = point_index(st.target, y);
    orbit.points.push_back(std::move(p));
  }

  for (auto& [e, v] : cuts) std::sort(v.begin(), v.end());

  // Segment naming: primes for readability at small cut counts.
  auto segment_name = [&](const std::string& e, std::size_t q) {
    if (!cuts.count(e)) return e;
    std::string s = e;
    for (std::size_t i = 0; i <= q && i < 3; ++i) s += '\'';
    if (q >= 3) s += std::to_string(q + 1);
    return s;
  };
  auto cut_coords = [&](const std::string& e) {
    std::vector<Rat> c{Rat(0)};
    if (cuts.count(e)) c.insert(c.end(), cuts[e].begin(), cuts[e].end());
    c.push_back(Rat(1));
    return c;
  };
  auto vertex_at = [&](const std::string& e, const Rat& x) -> std::string {
    if (x == 0) return g.graph.edges[g.graph.edge_index(e)].from;
    if (x == 1) return g.graph.edges[g.graph.edge_index(e)].to;
    return e + "@" + rational_to_string(x);
  };

  GraphMap out;
  out.graph.vertices = g.graph.vertices;
  for (const auto& p : orbit.points) out.graph.vertices.push_back(p.vertex);
  for (const auto& e : g.graph.edges) {
    auto c = cut_coords(e.id);
    for (std::size_t q = 0; q + 1 < c.size(); ++q)
      out.graph.edges.push_back({segment_name(e.id, q), vertex_at(e.id, c[q]), vertex_at(e.id, c[q + 1])});
  }

  out.vertex_image = g.vertex_image;
  for (const auto& p : orbit.points)
    out.vertex_image[p.vertex] = orbit.points[p.next].vertex;

  // Image of segment [a1, a2] of e: the subpath of f(e) between parameters
  // k*a1 and k*a2, refined along the cuts of the target edges.
  for (const auto& e : g.graph.edges) {
    const EdgePath& img = g.edge_image.at(e.id);
    const int k = static_cast<int>(img.size());
    auto c = cut_coords(e.id);
    for (std::size_t q = 0; q + 1 < c.size(); ++q) {
      const Rat a1 = c[q], a2 = c[q + 1];
      EdgePath seg_img;
      for (int l = 1; l <= k; ++l) {
        Rat lo = Rat(l - 1, k), hi = Rat(l, k);
        Rat o1 = std::max(a1, lo), o2 = std::min(a2, hi);
        if (!(o1 < o2)) continue;
        const SignedStep& st = img[l - 1];
        Rat y1 = Rat(k) * o1 - (l - 1), y2 = Rat(k) * o2 - (l - 1);
        Rat t1 = st.sign > 0 ? y1 : Rat(1) - y2;
        Rat t2 = st.sign > 0 ? y2 : Rat(1) - y1;
        auto tc = cut_coords(st.edge);
        auto idx = [&](const Rat& x) {
          for (std::size_t i = 0; i < tc.size(); ++i)
            if (tc[i] == x) return i;
          throw std::logic_error("image endpoint is not a cut point");
        };
        std::size_t i1 = idx(t1), i2 = idx(t2);
        if (st.sign > 0)
          for (std::size_t i = i1; i < i2; ++i)
            seg_img.push_back({segment_name(st.edge, i), +1});
        else
          for (std::size_t i = i2; i-- > i1;)
            seg_img.push_back({segment_name(st.edge, i), -1});
      }
      out.edge_image[segment_name(e.id, q)] = std::move(seg_img);
    }
  }

  auto rep2 = validate_graph_map(out);
  if (!rep2.ok()) throw std::logic_error("subdivision produced invalid map: " + rep2.summary());

  SubdivisionResult res{std::move(out), std::move(orbit), {}};
  for (const auto& e : g.graph.edges) {
    auto c = cut_coords(e.id);
    auto& segs = res.segments[e.id];
    for (std::size_t q = 0; q + 1 < c.size(); ++q) segs.push_back(segment_name(e.id, q));
  }
  return res;
}

}  // namespace trainpoly
