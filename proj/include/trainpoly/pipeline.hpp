#pragma once

#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "trainpoly/json_io.hpp"
#include "trainpoly/mcpoly.hpp"
#include "trainpoly/spectral.hpp"

namespace trainpoly {

inline constexpr const char* kReportSchema = "trainpoly/1";

struct AnalyzeOptions {
  std::optional<std::string> root;
  std::optional<std::set<std::string>> tree;
  std::vector<std::string> coord_names;  // names into the classes file; empty = internal
  double tol = 1e-9;
  std::string route = "det";  // det | cycle | both
  bool check = false;         // force both routes and the full identity battery
  // Test hook: adds a vector to one occurrence label (source edge, position).
  std::optional<std::tuple<std::string, int, std::vector<Int>>> corrupt_label;
};

struct AnalyzeResult {
  int exit_code = 0;  // 0 ok, 2 validation failure, 3 identity-check failure
  Json report;
};

struct PipelineState {
  MarkedAbelianization marking;
  CoordinateSystem coords;
  std::vector<CohomologyClass> characters;
  LabeledTransitionGraph labels;        // feeds the polynomial and its cone
  LabeledTransitionGraph orbit_labels;  // feeds circuits and the Fried cone
  LaurentPoly mc_internal;              // route per options
  OpenCone fried_internal;              // all circuit inequalities, internal coordinates
  OpenCone mcmullen_internal;
  std::vector<Circuit> circuit_list;
};

inline std::vector<CohomologyClass> select_characters(const MarkedAbelianization& m,
                                                      const std::vector<CohomologyClass>& classes,
                                                      const std::vector<std::string>& names) {
  if (names.empty()) return internal_characters(m);
  std::vector<CohomologyClass> chars;
  for (const auto& name : names) {
    auto it = std::find_if(classes.begin(), classes.end(),
                           [&](const CohomologyClass& u) { return u.name == name; });
    if (it == classes.end()) throw std::invalid_argument("coordinate character not found: " + name);
    chars.push_back(*it);
  }
  return chars;
}

inline OpenCone cone_to_coords(const OpenCone& internal, const CoordinateSystem& cs) {
  std::vector<std::vector<Int>> ineqs;
  for (const auto& n : internal.inequalities) {
    ExponentVector e = cs.vector_to_coords(n);
    ineqs.emplace_back(e.begin(), e.end());
  }
  OpenCone out = make_open_cone(internal.dim, std::move(ineqs), cs.names);
  out.minimal = internal.minimal;
  return out;
}

inline PipelineState run_pipeline(const GraphMap& g, const std::vector<CohomologyClass>& classes,
                                  const AnalyzeOptions& opt) {
  PipelineState st;
  st.marking = mark(g, opt.root, opt.tree);
  st.characters = select_characters(st.marking, classes, opt.coord_names);
  st.coords = make_coordinates(st.marking, st.characters);
  st.labels = build_labels(st.marking);
  st.orbit_labels = st.labels;
  if (opt.corrupt_label) {
    // Test hook. The Fried side keeps the honest orbit data: the two cones
    // agree for every consistent labeling, so only a labeling that disagrees
    // with the closed orbits can trip the equality diagnostic.
    const auto& [edge, pos, delta] = *opt.corrupt_label;
    int idx = st.marking.base.graph.edge_index(edge);
    if (idx < 0) throw std::invalid_argument("corrupt-label edge not found: " + edge);
    st.labels = st.labels.with_perturbed_label(static_cast<std::size_t>(idx), pos, delta);
  }

  st.mc_internal = opt.route == "cycle" ? mcmullen_cycle(st.labels)
                                        : mcmullen_det(st.marking, st.labels);
  st.circuit_list = circuits(st.orbit_labels);

  std::vector<std::vector<Int>> classes_internal;
  for (const auto& y : st.circuit_list)
    classes_internal.push_back(orbit_class(st.orbit_labels, y).h_class);
  st.fried_internal = fried_cone(classes_internal, st.marking.b);
  st.mcmullen_internal = mcmullen_cone(st.mc_internal);
  return st;
}

inline Json provenance_json(const PipelineState& st, const AnalyzeOptions& opt) {
  Json j;
  j["schema"] = kReportSchema;
  j["root"] = st.marking.root;
  j["tree"] = std::vector<std::string>(st.marking.tree.begin(), st.marking.tree.end());
  j["coordinates"] = st.coords.names;
  j["rank"] = st.marking.b;
  j["coinvariant_torsion"] = st.marking.has_coinvariant_torsion();
  j["route"] = opt.route;
  j["tolerance"] = opt.tol;
  return j;
}

inline Json circuits_json(const PipelineState& st) {
  Json arr = Json::array();
  for (const auto& y : st.circuit_list) {
    OrbitClass oc = orbit_class(st.orbit_labels, y);
    Json item;
    Json nodes = Json::array();
    for (std::size_t a : y.arcs)
      nodes.push_back(st.orbit_labels.nodes[st.orbit_labels.arcs[a].occ.source]);
    item["nodes"] = std::move(nodes);
    std::vector<Int> pexp_full(st.marking.b, 0);
    for (std::size_t k = 0; k + 1 < st.marking.b; ++k) pexp_full[k] = oc.p_exponent[k];
    item["p_exponents"] = st.coords.vector_to_coords(pexp_full);
    item["orbit_class"] = st.coords.vector_to_coords(oc.h_class);
    arr.push_back(std::move(item));
  }
  return arr;
}

inline Json class_report_json(const PipelineState& st, const CohomologyClass& u, double tol,
                              bool with_samples = false) {
  Json j;
  j["name"] = u.name;
  auto violations = validate_class(st.marking, u);
  if (!violations.empty()) {
    j["valid"] = false;
    Json v = Json::array();
    for (const auto& bad : violations)
      v.push_back({{"cycle", bad.cycle_index},
                   {"value_on_cycle", rational_to_string(bad.value_on_cycle)},
                   {"value_on_image", rational_to_string(bad.value_on_image)}});
    j["violations"] = std::move(v);
    return j;
  }
  j["valid"] = true;
  std::vector<Rat> cov = class_on_H(st.marking, u);
  std::vector<Rat> out_coords = st.coords.class_to_coords(cov);
  Json coords = Json::array();
  for (const auto& x : out_coords) coords.push_back(rational_to_string(x));
  j["coordinates"] = std::move(coords);

  bool inside = contains(st.fried_internal, cov);
  j["in_cone"] = inside;
  if (!inside) return j;

  bool integral = std::all_of(cov.begin(), cov.end(),
                              [](const Rat& x) { return denominator(x) == 1; });
  EntropyResult h = entropy(st.orbit_labels, st.fried_internal, cov, std::min(tol, 1e-10));
  j["entropy"] = {{"value", h.value},
                  {"tolerance", std::min(tol, 1e-10)},
                  {"route", "pf-level-set"},
                  {"residual", h.bracket_width}};
  if (with_samples) {
    Json samples = Json::array();
    for (const auto& [q, fq] : h.samples) samples.push_back({{"q", q}, {"F", fq}});
    j["entropy"]["samples"] = std::move(samples);
  }
  if (integral) {
    std::vector<std::int64_t> ui(cov.size());
    for (std::size_t k = 0; k < cov.size(); ++k) ui[k] = to_i64(Int(numerator(cov[k])));
    LaurentPoly spec = specialize(st.mc_internal, ui);
    j["specialization"] = polynomial_to_json(spec, {"zeta"});
    double root = largest_real_root(spec, tol);
    j["stretch"] = {{"value", root},
                    {"tolerance", tol},
                    {"route", "sturm-bisection"},
                    {"pf_value", std::exp(h.value)},
                    {"residual", std::abs(std::exp(h.value) - root)}};
  } else {
    j["stretch"] = {{"value", std::exp(h.value)}, {"tolerance", tol}, {"route", "pf-level-set"}};
  }
  return j;
}

// The batch entry point behind `analyze`: every stage, checks included.
inline AnalyzeResult analyze(const GraphMap& g, const std::vector<CohomologyClass>& classes,
                             const AnalyzeOptions& opt) {
  AnalyzeResult res;
  auto validation = validate_graph_map(g);
  if (!validation.ok()) {
    res.exit_code = 2;
    res.report["schema"] = kReportSchema;
    res.report["stage"] = "validate";
    Json errs = Json::array();
    for (const auto& e : validation.errors) errs.push_back({{"kind", e.kind}, {"detail", e.detail}});
    res.report["errors"] = std::move(errs);
    return res;
  }
  if (!is_irreducible(g) || !is_expanding(g)) {
    res.exit_code = 2;
    res.report["schema"] = kReportSchema;
    res.report["stage"] = "validate";
    res.report["errors"] = Json::array({Json{{"kind", "dynamics"},
                                             {"detail", "map must be irreducible and expanding"}}});
    return res;
  }
  if (auto tt = is_train_track(g); !tt.ok) {
    res.exit_code = 2;
    res.report["schema"] = kReportSchema;
    res.report["stage"] = "validate";
    res.report["errors"] = Json::array(
        {Json{{"kind", "train-track"},
              {"detail", "offending turn {" + tt.offending_turn->a.edge +
                             (tt.offending_turn->a.sign > 0 ? "+" : "-") + ", " +
                             tt.offending_turn->b.edge +
                             (tt.offending_turn->b.sign > 0 ? "+" : "-") + "} degenerates at power " +
                             std::to_string(tt.power)}}});
    return res;
  }

  PipelineState st;
  try {
    st = run_pipeline(g, classes, opt);
  } catch (const std::invalid_argument& ex) {
    res.exit_code = 2;
    res.report["schema"] = kReportSchema;
    res.report["stage"] = "mark";
    res.report["errors"] = Json::array({Json{{"kind", "marking"}, {"detail", ex.what()}}});
    return res;
  }

  res.report = provenance_json(st, opt);
  res.report["transition_matrix_consistent"] = (evaluate_at_one(st.orbit_labels) == transition_matrix(g));
  res.report["polynomial"] = polynomial_to_json(st.coords.to_coords(st.mc_internal), st.coords.names);

  if (opt.route == "both" || opt.check) {
    LaurentPoly other = opt.route == "cycle" ? mcmullen_det(st.marking, st.labels)
                                             : mcmullen_cycle(st.marking, st.labels);
    bool same = other == st.mc_internal;
    res.report["route_check"] = same ? "det==cycle" : "MISMATCH";
    if (!same) {
      res.report["other_route_polynomial"] =
          polynomial_to_json(st.coords.to_coords(other), st.coords.names);
      res.exit_code = 3;
    }
  }

  res.report["circuits"] = circuits_json(st);
  res.report["mcmullen_cone"] = cone_to_json(cone_to_coords(minimalize(st.mcmullen_internal), st.coords));
  res.report["fried_cone"] = cone_to_json(cone_to_coords(minimalize(st.fried_internal), st.coords));

  ConeEquality eq = cones_equal(st.mcmullen_internal, st.fried_internal);
  res.report["cones_equal"] = eq.equal;
  if (!eq.equal) {
    // Either a label-gauge defect or a violated standing hypothesis; report both.
    Json w = Json::array();
    std::vector<Rat> witness_coords = st.coords.class_to_coords(eq.witness);
    for (const auto& x : witness_coords) w.push_back(rational_to_string(x));
    res.report["cone_mismatch"] = {
        {"witness_class", std::move(w)},
        {"inside", eq.witness_side == 1 ? "mcmullen_cone" : "fried_cone"},
        {"diagnosis",
         "labels are not a consistent homology grading, or the input is not an "
         "expanding irreducible train track map"}};
    res.exit_code = 3;
    return res;
  }

  Json per_class = Json::array();
  for (const auto& u : classes) per_class.push_back(class_report_json(st, u, opt.tol));
  res.report["classes"] = std::move(per_class);
  return res;
}

}  // namespace trainpoly
