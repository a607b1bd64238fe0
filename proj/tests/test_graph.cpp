#include <doctest.h>

#include "fixtures.hpp"
#include "trainpoly/graph.hpp"
#include "trainpoly/random_gen.hpp"
#include "trainpoly/subdivide.hpp"

using namespace trainpoly;

namespace {

GraphMap rose(std::vector<EdgePath> images) {
  GraphMap g;
  g.graph.vertices = {"v"};
  for (std::size_t i = 0; i < images.size(); ++i)
    g.graph.edges.push_back({std::string(1, static_cast<char>('a' + i)), "v", "v"});
  g.vertex_image["v"] = "v";
  for (std::size_t i = 0; i < images.size(); ++i)
    g.edge_image[std::string(1, static_cast<char>('a' + i))] = images[i];
  return g;
}

// Reverse the orientation of one edge, rewriting all images accordingly.
GraphMap reverse_edge(GraphMap g, const std::string& id) {
  Edge& e = g.graph.edges[g.graph.edge_index(id)];
  std::swap(e.from, e.to);
  for (auto& [eid, path] : g.edge_image)
    for (auto& s : path)
      if (s.edge == id) s.sign = -s.sign;
  g.edge_image[id] = reversed(g.edge_image[id]);
  return g;
}

GraphMap rename_edges(const GraphMap& g, const std::map<std::string, std::string>& ren) {
  GraphMap out;
  out.graph.vertices = g.graph.vertices;
  out.vertex_image = g.vertex_image;
  for (const auto& e : g.graph.edges) out.graph.edges.push_back({ren.at(e.id), e.from, e.to});
  for (const auto& [id, path] : g.edge_image) {
    EdgePath p = path;
    for (auto& s : p) s.edge = ren.at(s.edge);
    out.edge_image[ren.at(id)] = std::move(p);
  }
  return out;
}

}  // namespace

TEST_CASE("running example validates") {
  CHECK(validate_graph_map(fixtures::running_example()).ok());
}

TEST_CASE("endpoint mismatch is reported with the offending edge") {
  GraphMap g = fixtures::running_example();
  g.edge_image["a"] = {{"c", 1}};  // c starts at R but f(L) = L
  auto rep = validate_graph_map(g);
  REQUIRE_FALSE(rep.ok());
  bool found = false;
  for (const auto& e : rep.errors)
    if (e.kind == "endpoint mismatch" && e.detail.find("a") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("valence-1 vertices are rejected") {
  GraphMap g = fixtures::running_example();
  g.graph.vertices.push_back("X");
  g.graph.edges.push_back({"e", "R", "X"});
  g.vertex_image["X"] = "R";
  g.edge_image["e"] = {{"c", 1}};
  auto rep = validate_graph_map(g);
  REQUIRE_FALSE(rep.ok());
  bool found = false;
  for (const auto& e : rep.errors)
    if (e.kind == "valence-1 vertex" && e.detail == "X") found = true;
  CHECK(found);
}

TEST_CASE("empty and dangling images are reported") {
  GraphMap g = fixtures::running_example();
  g.edge_image["b"] = {};
  auto rep = validate_graph_map(g);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.errors.front().kind == "empty image");

  g = fixtures::running_example();
  g.edge_image["b"] = {{"zz", 1}};
  rep = validate_graph_map(g);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.errors.front().kind == "dangling edge id");
}

TEST_CASE("transition matrix of the running example") {
  IntMatrix a = transition_matrix(fixtures::running_example());
  IntMatrix want = {{0, 1, 1, 2}, {0, 0, 1, 2}, {0, 0, 0, 1}, {1, 0, 0, 1}};
  CHECK(a == want);
}

TEST_CASE("transition matrix: identity rose and hand-counted oracle") {
  GraphMap id3 = rose({{{"a", 1}}, {{"b", 1}}, {{"c", 1}}});
  IntMatrix a = transition_matrix(id3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(a[i][j] == (i == j ? 1 : 0));

  // f(a)=ab, f(b)=a: occurrences counted by hand.
  GraphMap g = rose({{{"a", 1}, {"b", 1}}, {{"a", 1}}});
  IntMatrix t = transition_matrix(g);
  CHECK(t == IntMatrix{{1, 1}, {1, 0}});
}

TEST_CASE("irreducibility") {
  CHECK(is_irreducible(fixtures::running_example()));
  CHECK_FALSE(is_irreducible(rose({{{"a", 1}}, {{"b", 1}}})));
  CHECK(is_irreducible(rose({{{"b", 1}}, {{"a", 1}, {"b", 1}}})));
}

TEST_CASE("expansion requires irreducibility and rejects permutations") {
  CHECK(is_expanding(fixtures::running_example()));
  CHECK_FALSE(is_expanding(rose({{{"b", 1}}, {{"a", 1}}})));
  CHECK(is_expanding(rose({{{"b", 1}}, {{"a", 1}, {"b", 1}}})));
  CHECK_THROWS_AS(is_expanding(rose({{{"a", 1}}, {{"b", 1}}})), std::invalid_argument);
}

TEST_CASE("train track detection") {
  CHECK(is_train_track(fixtures::running_example()).ok);

  // f(a)=b, f(b)=bab^-1: f^2(b) = bab^-1 . b . ba^-1b^-1 cancels.
  GraphMap bad = rose({{{"b", 1}}, {{"b", 1}, {"a", 1}, {"b", -1}}});
  auto res = is_train_track(bad);
  CHECK_FALSE(res.ok);
  CHECK(res.offending_turn.has_value());

  // The same cancellation is visible in the iterated edge path.
  auto it2 = iterate_edge(bad, "b", 2);
  CHECK_FALSE(it2.backtracks.empty());

  // Simplicial automorphisms are locally injective everywhere.
  GraphMap swap = rose({{{"b", 1}}, {{"a", 1}}});
  CHECK(is_train_track(swap).ok);
}

TEST_CASE("iterate_edge matches hand iteration") {
  GraphMap g = fixtures::running_example();
  auto f2a = iterate_edge(g, "a", 2);
  EdgePath want = {{"b", 1}, {"a", -1}, {"d", 1}, {"b", -1}, {"a", 1}, {"c", 1}};
  CHECK(f2a.path == want);
  CHECK(f2a.backtracks.empty());

  auto f0 = iterate_edge(g, "c", 0);
  CHECK(f0.path == EdgePath{{"c", 1}});

  GraphMap fib = rose({{{"a", 1}, {"b", 1}}, {{"a", 1}}});
  auto f3 = iterate_edge(fib, "a", 3);
  EdgePath want3 = {{"a", 1}, {"b", 1}, {"a", 1}, {"a", 1}, {"b", 1}};
  CHECK(f3.path == want3);
}

namespace {

// Independent oracle: iterate each taken turn's germ pair directly. Merges can
// only happen within the orbit tails, so #germs + 1 steps decide.
bool train_track_oracle(const GraphMap& g) {
  std::vector<Germ> germs;
  for (const auto& e : g.graph.edges) {
    germs.push_back({e.id, +1});
    germs.push_back({e.id, -1});
  }
  std::vector<std::pair<Germ, Germ>> taken;
  for (const auto& e : g.graph.edges) {
    const EdgePath& p = g.edge_image.at(e.id);
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      taken.push_back({{p[i].edge, -p[i].sign}, {p[i + 1].edge, p[i + 1].sign}});
  }
  auto valences = vertex_valences(g.graph);
  for (const auto& v : g.graph.vertices) {
    if (valences[v] != 2) continue;
    std::vector<Germ> at_v;
    for (const auto& d : germs)
      if (germ_vertex(g.graph, d) == v) at_v.push_back(d);
    taken.push_back({at_v[0], at_v[1]});
  }
  for (auto [a, b] : taken)
    for (std::size_t k = 0; k <= germs.size() + 1; ++k) {
      if (a == b) return false;
      a = derivative_map(g, a);
      b = derivative_map(g, b);
    }
  return true;
}

}  // namespace

TEST_CASE("turn closure agrees with the pair-iteration oracle on raw candidates") {
  Rng rng(424243);
  int candidates = 0;
  while (candidates < 60) {
    Graph shape = random_detail::random_shape(rng, 6);
    GraphMap g;
    g.graph = shape;
    bool ok = true;
    for (const auto& v : shape.vertices)
      g.vertex_image[v] = shape.vertices[rng.below(shape.vertices.size())];
    for (const auto& e : shape.edges) {
      auto walk = random_detail::random_walk(rng, shape, g.vertex_image[e.from],
                                             g.vertex_image[e.to],
                                             static_cast<int>(rng.range(1, 4)));
      if (!walk) {
        ok = false;
        break;
      }
      g.edge_image[e.id] = *walk;
    }
    if (!ok || !validate_graph_map(g).ok()) continue;
    ++candidates;
    CHECK(is_train_track(g).ok == train_track_oracle(g));
  }
}

TEST_CASE("train track maps never develop backtracking within the direction bound") {
  for (const GraphMap& g :
       {fixtures::running_example(), rose({{{"a", 1}, {"b", 1}}, {{"a", 1}}})}) {
    int bound = 2 * 2 * static_cast<int>(g.graph.edge_count());
    for (const auto& e : g.graph.edges)
      for (int n = 1; n <= std::min(bound, 6); ++n)
        CHECK(iterate_edge(g, e.id, n).backtracks.empty());
  }
}

TEST_CASE("dynamical checks are invariant under relabeling and reorientation") {
  GraphMap g = fixtures::running_example();
  GraphMap renamed = rename_edges(g, {{"a", "p"}, {"b", "q"}, {"c", "r"}, {"d", "s"}});
  CHECK(is_irreducible(renamed) == is_irreducible(g));
  CHECK(is_expanding(renamed) == is_expanding(g));
  CHECK(is_train_track(renamed).ok == is_train_track(g).ok);

  for (const char* id : {"a", "b", "c", "d"}) {
    GraphMap rev = reverse_edge(g, id);
    REQUIRE(validate_graph_map(rev).ok());
    CHECK(is_irreducible(rev));
    CHECK(is_expanding(rev));
    CHECK(is_train_track(rev).ok);
  }
}

TEST_CASE("subdivision at the d fixed point reproduces the split images") {
  GraphMap g = fixtures::running_example();
  auto sub = subdivide_at_invariant_set(g, {{"d", 3, 1}});
  CHECK(sub.map.graph.edges.size() == 5);
  REQUIRE(sub.orbit.points.size() == 1);
  CHECK(sub.orbit.points[0].host_edge == "d");
  CHECK(sub.orbit.points[0].sign == 1);
  CHECK(sub.orbit.points[0].next == 0);

  const auto& segs = sub.segments.at("d");
  REQUIRE(segs.size() == 2);
  EdgePath d1 = sub.map.edge_image.at(segs[0]);
  EdgePath d2 = sub.map.edge_image.at(segs[1]);
  CHECK(d1 == EdgePath{{"b", 1}, {"a", -1}, {segs[0], 1}});
  CHECK(d2 == EdgePath{{segs[1], 1}, {"b", -1}, {"a", 1}, {"c", 1}});
  CHECK(sub.map.edge_image.at("a") == EdgePath{{segs[0], 1}, {segs[1], 1}});
}

TEST_CASE("empty invariant set leaves the map unchanged") {
  GraphMap g = fixtures::running_example();
  auto sub = subdivide_at_invariant_set(g, {});
  CHECK(sub.map.graph.edges.size() == g.graph.edges.size());
  CHECK(sub.map.edge_image == g.edge_image);
  CHECK(sub.orbit.empty());
}

TEST_CASE("a period-2 orbit subdivides into a 6-edge map") {
  // The branch through f(a) = d and the reversed a-occurrence of f(d) fixes
  // the two-point orbit {2/7 in a, 2/7 in d}.
  GraphMap g = fixtures::running_example();
  auto sub = subdivide_at_invariant_set(g, {{"a", 1, 2}});
  CHECK(sub.map.graph.edges.size() == 6);
  REQUIRE(sub.orbit.points.size() == 2);
  CHECK(sub.orbit.points[0].host_edge == "a");
  CHECK(sub.orbit.points[0].coordinate == Rat(2, 7));
  CHECK(sub.orbit.points[1].host_edge == "d");
  CHECK(sub.orbit.points[1].coordinate == Rat(2, 7));
  CHECK(sub.orbit.points[0].next == 1);
  CHECK(sub.orbit.points[1].next == 0);
  CHECK(sub.orbit.points[0].sign == 1);
  CHECK(sub.orbit.points[1].sign == -1);  // the a-occurrence in f(d) is reversed
  CHECK(is_train_track(sub.map).ok);
}

TEST_CASE("orbits through vertices are rejected") {
  // f(a)=b, f(b)=ab: every short occurrence chain fixes a vertex, never an
  // interior point.
  GraphMap g = rose({{{"b", 1}}, {{"a", 1}, {"b", 1}}});
  CHECK_THROWS_WITH_AS(subdivide_at_invariant_set(g, {{"b", 1, 2}}),
                       doctest::Contains("vertex"), std::invalid_argument);
  CHECK_THROWS_AS(subdivide_at_invariant_set(g, {{"a", 1, 1}}), std::invalid_argument);
}

TEST_CASE("declared period with no closing chain is rejected") {
  GraphMap g = fixtures::running_example();
  // f(b) = a and no occurrence chain returns to b in one step.
  CHECK_THROWS_WITH_AS(subdivide_at_invariant_set(g, {{"b", 1, 1}}),
                       doctest::Contains("not periodic"), std::invalid_argument);
}

TEST_CASE("subdivision refines the transition matrix") {
  GraphMap g = fixtures::running_example();
  IntMatrix a = transition_matrix(g);
  for (const auto& spec : {PeriodicPointSpec{"d", 3, 1}, PeriodicPointSpec{"a", 1, 2}}) {
    auto sub = subdivide_at_invariant_set(g, {spec});
    IntMatrix a2 = transition_matrix(sub.map);
    for (std::size_t i = 0; i < g.graph.edges.size(); ++i)
      for (std::size_t j = 0; j < g.graph.edges.size(); ++j) {
        const auto& rows = sub.segments.at(g.graph.edges[i].id);
        const auto& cols = sub.segments.at(g.graph.edges[j].id);
        Int total = 0;
        for (const auto& r : rows)
          for (const auto& c : cols)
            total += a2[sub.map.graph.edge_index(r)][sub.map.graph.edge_index(c)];
        // Each occurrence of e_i crosses every segment of e_i exactly once.
        CHECK(total == a[i][j] * Int(rows.size()));
      }
  }
}

TEST_CASE("train track property survives subdivision on random maps") {
  Rng rng(20240817);
  int tested = 0;
  while (tested < 8) {
    GraphMap g = random_train_track_map(rng);
    auto spec = find_periodic_point(g);
    if (!spec) continue;
    auto sub = subdivide_at_invariant_set(g, {*spec});
    CHECK(validate_graph_map(sub.map).ok());
    CHECK(is_train_track(sub.map).ok);
    CHECK(is_irreducible(sub.map));
    ++tested;
  }
}
