#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "trainpoly/mcpoly.hpp"
#include "trainpoly/pipeline.hpp"
#include "trainpoly/random_gen.hpp"
#include "trainpoly/spectral.hpp"

using namespace trainpoly;

namespace {

struct Setup {
  MarkedAbelianization m;
  CoordinateSystem cs;
  LabeledTransitionGraph labels;
  LaurentPoly mc;
  OpenCone cone;
};

Setup running_setup() {
  Setup s;
  s.m = fixtures::running_marking();
  s.cs = make_coordinates(s.m, {fixtures::s_star(), fixtures::w_star()});
  s.labels = build_labels(s.m);
  s.mc = mcmullen_det(s.m, s.labels);
  std::vector<std::vector<Int>> classes;
  for (const auto& y : circuits(s.labels)) classes.push_back(orbit_class(s.labels, y).h_class);
  s.cone = fried_cone(classes, s.m.b);
  return s;
}

std::vector<std::int64_t> integral_covector(const Setup& s, const CohomologyClass& u) {
  std::vector<Rat> cov = class_on_H(s.m, u);
  std::vector<std::int64_t> out;
  for (const auto& x : cov) out.push_back(to_i64(Int(numerator(x))));
  return out;
}

LaurentPoly zeta_poly(std::vector<std::pair<std::int64_t, Int>> terms) {
  LaurentPoly p(1);
  for (auto& [e, c] : terms) p.add_term({e}, c);
  return p;
}

}  // namespace

TEST_CASE("specializations at u1 and u2 match the published polynomials") {
  Setup s = running_setup();
  LaurentPoly at_u1 = specialize(s.mc, integral_covector(s, fixtures::u1()));
  CHECK(at_u1 == zeta_poly({{9, 1}, {5, -1}, {4, -1}, {3, -1}, {2, -1}, {1, -1}, {0, -2}}));

  LaurentPoly at_u2 = specialize(s.mc, integral_covector(s, fixtures::u2()));
  CHECK(at_u2 == zeta_poly({{6, 1}, {3, -3}, {1, -3}, {0, -1}}));
}

TEST_CASE("specialization at u0 is the characteristic polynomial of A(1)") {
  Setup s = running_setup();
  LaurentPoly at_u0 = specialize(s.mc, integral_covector(s, fixtures::u0()));

  // Independent route: char poly of the integer transition matrix.
  IntMatrix a = transition_matrix(s.m.base);
  RingMatrix xa(a.size(), std::vector<LaurentPoly>(a.size(), LaurentPoly(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j] != 0) xa[i][j] = LaurentPoly::constant(0, a[i][j]);
  LaurentPoly char_poly = determinant(char_matrix(xa));
  CHECK(at_u0.equal_up_to_units(char_poly));
}

TEST_CASE("largest real root by Sturm bisection") {
  CHECK(largest_real_root(zeta_poly({{1, 1}, {0, -2}}), 1e-9) == doctest::Approx(2.0).epsilon(1e-9));

  Setup s = running_setup();
  double r1 = largest_real_root(specialize(s.mc, integral_covector(s, fixtures::u1())), 1e-9);
  CHECK(std::abs(r1 - 1.35827) < 1e-4);
  double r2 = largest_real_root(specialize(s.mc, integral_covector(s, fixtures::u2())), 1e-9);
  CHECK(std::abs(r2 - 1.632992) < 1e-4);

  // No positive real root.
  CHECK_THROWS_AS(largest_real_root(zeta_poly({{2, 1}, {0, 1}}), 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(largest_real_root(zeta_poly({{5, 3}}), 1e-9), std::invalid_argument);

  // Multiple roots are handled through the squarefree part:
  // (z-1)^2 (z-3) = z^3 - 5z^2 + 7z - 3.
  double r3 = largest_real_root(zeta_poly({{3, 1}, {2, -5}, {1, 7}, {0, -3}}), 1e-10);
  CHECK(r3 == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("pf_eigen matches the Sturm route on the running example") {
  Setup s = running_setup();
  auto pf = pf_eigen(s.labels, std::vector<double>(s.m.h0_rank(), 1.0), 1e-13);
  double sturm = largest_real_root(specialize(s.mc, integral_covector(s, fixtures::u0())), 1e-12);
  CHECK(std::abs(pf.eigenvalue - sturm) < 1e-9);
  CHECK(pf.residual < 1e-11);
  for (double x : pf.left_eigenvector) CHECK(x > 0);
}

TEST_CASE("pf_eigen handles a 1x1 matrix and a periodic matrix") {
  GraphMap doubling;
  doubling.graph.vertices = {"v"};
  doubling.graph.edges = {{"a", "v", "v"}};
  doubling.vertex_image["v"] = "v";
  doubling.edge_image["a"] = {{"a", 1}, {"a", 1}};
  auto pf1 = pf_eigen(build_labels(mark(doubling)), {}, 1e-13);
  CHECK(pf1.eigenvalue == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pf1.left_eigenvector == std::vector<double>{1.0});

  // f(a) = b, f(b) = aa has the period-2 transition matrix [[0,2],[1,0]];
  // plain power iteration oscillates, the shifted iteration converges.
  GraphMap periodic;
  periodic.graph.vertices = {"v"};
  periodic.graph.edges = {{"a", "v", "v"}, {"b", "v", "v"}};
  periodic.vertex_image["v"] = "v";
  periodic.edge_image["a"] = {{"b", 1}};
  periodic.edge_image["b"] = {{"a", 1}, {"a", 1}};
  MarkedAbelianization m = mark(periodic);
  auto pf2 = pf_eigen(build_labels(m), std::vector<double>(m.h0_rank(), 1.0), 1e-13);
  CHECK(pf2.eigenvalue == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
}

TEST_CASE("log of the leading eigenvalue is convex along the t axis") {
  Setup s = running_setup();
  auto log_e = [&](double t) {
    return std::log(pf_eigen(s.labels, std::vector<double>{t}, 1e-13).eigenvalue);
  };
  CHECK(log_e(1.0) <= 0.5 * (log_e(0.5) + log_e(2.0)) + 1e-9);
}

TEST_CASE("entropy recovers the published stretch factors") {
  Setup s = running_setup();
  std::vector<Rat> u1 = class_on_H(s.m, fixtures::u1());
  EntropyResult h1 = entropy(s.labels, s.cone, u1, 1e-10);
  CHECK(std::abs(h1.value - std::log(1.35827)) < 1e-4);

  std::vector<Rat> u0 = class_on_H(s.m, fixtures::u0());
  EntropyResult h0 = entropy(s.labels, s.cone, u0, 1e-10);
  double sturm = largest_real_root(specialize(s.mc, integral_covector(s, fixtures::u0())), 1e-12);
  CHECK(std::abs(std::exp(h0.value) - sturm) < 1e-6);
}

TEST_CASE("entropy is homogeneous of degree -1") {
  Setup s = running_setup();
  std::vector<Rat> u0 = class_on_H(s.m, fixtures::u0());
  EntropyResult h = entropy(s.labels, s.cone, u0, 1e-12);
  std::vector<Rat> doubled = u0;
  for (auto& x : doubled) x *= 2;
  EntropyResult h2 = entropy(s.labels, s.cone, doubled, 1e-12);
  CHECK(std::abs(h2.value - h.value / 2) < 1e-9);
}

TEST_CASE("entropy rejects classes outside the cone") {
  Setup s = running_setup();
  // (1,1) in (s*,w*) coordinates: internal covector is the inverse-transpose
  // image, here (-1, 1).
  std::vector<Rat> outside = {Rat(-1), Rat(1)};
  // Double-check this really is (1,1) in published coordinates.
  CHECK(s.cs.class_to_coords(outside) == std::vector<Rat>{1, 1});
  CHECK_THROWS_AS(entropy(s.labels, s.cone, outside, 1e-10), std::invalid_argument);
}

TEST_CASE("stretch factors with the dual-route cross-check") {
  Setup s = running_setup();
  StretchResult r1 = stretch(s.labels, s.cone, class_on_H(s.m, fixtures::u1()), &s.mc, 1e-9);
  CHECK(std::abs(r1.value - 1.35827) < 1e-4);
  CHECK(r1.cross_checked);

  StretchResult r2 = stretch(s.labels, s.cone, class_on_H(s.m, fixtures::u2()), &s.mc, 1e-9);
  CHECK(std::abs(r2.value - 1.632992) < 1e-4);
  CHECK(r2.cross_checked);

  // Lambda(k u) = Lambda(u)^{1/k}.
  std::vector<Rat> u0 = class_on_H(s.m, fixtures::u0());
  std::vector<Rat> tripled = u0;
  for (auto& x : tripled) x *= 3;
  StretchResult a = stretch(s.labels, s.cone, u0, nullptr, 1e-9);
  StretchResult b = stretch(s.labels, s.cone, tripled, nullptr, 1e-9);
  CHECK(std::abs(b.value - std::pow(a.value, 1.0 / 3.0)) < 1e-6);

  CHECK_THROWS_AS(stretch(s.labels, s.cone, {Rat(1, 2), Rat(1)}, nullptr, 1e-9),
                  std::invalid_argument);
}

TEST_CASE("pf residuals stay below10x the tolerance on random maps") {
  Rng rng(701);
  for (int trial = 0; trial < 6; ++trial) {
    GraphMap g = random_train_track_map(rng);
    MarkedAbelianization m = mark(g);
    LabeledTransitionGraph l = build_labels(m);
    std::vector<double> point(m.h0_rank());
    for (auto& x : point) x = 0.5 + 0.25 * static_cast<double>(rng.below(7));
    auto pf = pf_eigen(l, point, 1e-12);
    CHECK(pf.residual < 1e-11);
    for (double x : pf.left_eigenvector) CHECK(x > 0);
  }
}
