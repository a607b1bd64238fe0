#pragma once

#include "trainpoly/graph.hpp"
#include "trainpoly/marking.hpp"
#include "trainpoly/stallings.hpp"

namespace fixtures {

using namespace trainpoly;

// Two vertices L, R; edges a, b, d: L -> R and c: R -> R, with
// f(a) = d, f(b) = a, f(c) = b^-1 a, f(d) = b a^-1 d b^-1 a c.
inline GraphMap running_example() {
  GraphMap g;
  g.graph.vertices = {"L", "R"};
  g.graph.edges = {{"a", "L", "R"}, {"b", "L", "R"}, {"c", "R", "R"}, {"d", "L", "R"}};
  g.vertex_image = {{"L", "L"}, {"R", "R"}};
  g.edge_image["a"] = {{"d", 1}};
  g.edge_image["b"] = {{"a", 1}};
  g.edge_image["c"] = {{"b", -1}, {"a", 1}};
  g.edge_image["d"] = {{"b", 1}, {"a", -1}, {"d", 1}, {"b", -1}, {"a", 1}, {"c", 1}};
  return g;
}

// Characters pinning the published coordinates: s* is 1 on each gamma loop
// and 0 on the stable letter, w* the other way around.
inline CohomologyClass s_star() {
  CohomologyClass u;
  u.name = "s*";
  u.edge_values = {{"a", Rat(0)}, {"b", Rat(-1)}, {"c", Rat(1)}, {"d", Rat(1)}};
  u.stable_value = 0;
  return u;
}

inline CohomologyClass w_star() {
  CohomologyClass u;
  u.name = "w*";
  u.stable_value = 1;
  return u;
}

// u0 = (0,1), u1 = (-1,2), u2 = (-1,1) in (s*, w*) coordinates.
inline CohomologyClass u0() {
  CohomologyClass u = w_star();
  u.name = "u0";
  return u;
}

inline CohomologyClass u1() {
  CohomologyClass u;
  u.name = "u1";
  u.edge_values = {{"a", Rat(0)}, {"b", Rat(1)}, {"c", Rat(-1)}, {"d", Rat(-1)}};
  u.stable_value = 2;
  return u;
}

inline CohomologyClass u2() {
  CohomologyClass u;
  u.name = "u2";
  u.edge_values = {{"a", Rat(0)}, {"b", Rat(1)}, {"c", Rat(-1)}, {"d", Rat(-1)}};
  u.stable_value = 1;
  return u;
}

inline MarkedAbelianization running_marking() {
  return mark(running_example(), std::string("R"), std::set<std::string>{"a"});
}

// phi1: the rank-5 injective, non-surjective endomorphism; generators
// x1..x5 stand for the shift basis.
inline FreeGroupEndo phi1() {
  FreeGroupEndo e;
  e.rank = 5;
  e.images = {{2}, {3}, {4}, {5}, {5, 2, -1, 2, 1, -2, -4}};
  return e;
}

// phi2: the rank-4 automorphism.
inline FreeGroupEndo phi2() {
  FreeGroupEndo e;
  e.rank = 4;
  e.images = {{2}, {3}, {4}, {4, 2, -1, 2, 2, -3, -4}};
  return e;
}

}  // namespace fixtures
