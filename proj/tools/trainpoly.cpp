// Command-line front end: loads graph-map fixtures, runs the pipeline, and
// emits machine-readable reports (schema "trainpoly/1").

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trainpoly/pipeline.hpp"
#include "trainpoly/random_gen.hpp"

using namespace trainpoly;

namespace {

struct CommonArgs {
  std::string graph_file;
  std::string classes_file;
  std::string coords_file;
  std::string root;
  std::string tree;  // comma separated edge ids
  double tol = 1e-9;
  bool json = false;
  std::string corrupt;  // EDGE:POS:d1,d2,...
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_graph = true) {
  if (needs_graph)
    cmd->add_option("graphmap", args.graph_file, "graph map JSON file")->required();
  cmd->add_option("--classes", args.classes_file, "cohomology classes JSON file");
  cmd->add_option("--coords", args.coords_file, "coordinate character names JSON file");
  cmd->add_option("--root", args.root, "basepoint vertex");
  cmd->add_option("--tree", args.tree, "spanning tree edge ids, comma separated");
  cmd->add_option("--tol", args.tol, "numeric tolerance");
  cmd->add_flag("--json", args.json, "emit the full JSON report");
  cmd->add_option("--corrupt-label", args.corrupt, "test hook: EDGE:POS:d1,d2,... label perturbation")
      ->group("");
}

AnalyzeOptions to_options(const CommonArgs& args) {
  AnalyzeOptions opt;
  if (!args.root.empty()) opt.root = args.root;
  if (!args.tree.empty()) {
    std::set<std::string> tree;
    std::stringstream ss(args.tree);
    std::string tok;
    while (std::getline(ss, tok, ',')) tree.insert(tok);
    opt.tree = tree;
  }
  if (!args.coords_file.empty())
    for (const auto& name : load_json_file(args.coords_file))
      opt.coord_names.push_back(name.get<std::string>());
  opt.tol = args.tol;
  if (!args.corrupt.empty()) {
    auto p1 = args.corrupt.find(':');
    auto p2 = args.corrupt.find(':', p1 + 1);
    std::string edge = args.corrupt.substr(0, p1);
    int pos = std::stoi(args.corrupt.substr(p1 + 1, p2 - p1 - 1));
    std::vector<Int> delta;
    std::stringstream ss(args.corrupt.substr(p2 + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) delta.emplace_back(tok);
    opt.corrupt_label = std::make_tuple(edge, pos, delta);
  }
  return opt;
}

GraphMap load_graph(const CommonArgs& args) {
  return graph_map_from_json(load_json_file(args.graph_file));
}

std::vector<CohomologyClass> load_classes(const CommonArgs& args) {
  if (args.classes_file.empty()) return {};
  return classes_from_json(load_json_file(args.classes_file));
}

void emit(const Json& report, bool json_flag) {
  if (json_flag)
    std::cout << report.dump(2) << "\n";
  else
    std::cout << report.dump() << "\n";
}

int run_validate(const CommonArgs& args) {
  GraphMap g = load_graph(args);
  auto rep = validate_graph_map(g);
  Json j;
  j["schema"] = kReportSchema;
  j["valid"] = rep.ok();
  if (!rep.ok()) {
    Json errs = Json::array();
    for (const auto& e : rep.errors) errs.push_back({{"kind", e.kind}, {"detail", e.detail}});
    j["errors"] = std::move(errs);
    emit(j, args.json);
    return 2;
  }
  j["irreducible"] = is_irreducible(g);
  j["expanding"] = j["irreducible"].get<bool>() && is_expanding(g);
  auto tt = is_train_track(g);
  j["train_track"] = tt.ok;
  if (!tt.ok)
    j["offending_turn"] = {{"a", tt.offending_turn->a.edge + (tt.offending_turn->a.sign > 0 ? "+" : "-")},
                           {"b", tt.offending_turn->b.edge + (tt.offending_turn->b.sign > 0 ? "+" : "-")},
                           {"power", tt.power}};
  emit(j, args.json);
  bool pipeline_ready = j["irreducible"].get<bool>() && j["expanding"].get<bool>() && tt.ok;
  return pipeline_ready ? 0 : 2;
}

int run_stage_report(const CommonArgs& args, const std::string& which, const std::string& klass,
                     const std::string& route, bool check_equal, bool with_samples = false) {
  GraphMap g = load_graph(args);
  auto classes = load_classes(args);
  AnalyzeOptions opt = to_options(args);
  if (!route.empty()) opt.route = route;

  PipelineState st;
  try {
    st = run_pipeline(g, classes, opt);
  } catch (const std::invalid_argument& ex) {
    Json j;
    j["schema"] = kReportSchema;
    j["stage"] = "validate";
    j["error"] = ex.what();
    emit(j, args.json);
    return 2;
  }

  Json j = provenance_json(st, opt);
  if (which == "polynomial") {
    j["polynomial"] = polynomial_to_json(st.coords.to_coords(st.mc_internal), st.coords.names);
    if (opt.route == "both") {
      LaurentPoly cyc = mcmullen_cycle(st.marking, st.labels);
      bool same = cyc == st.mc_internal;
      j["route_check"] = same ? "det==cycle" : "MISMATCH";
      if (!same) {
        emit(j, args.json);
        return 3;
      }
    }
  } else if (which == "orbits") {
    j["circuits"] = circuits_json(st);
  } else if (which == "cones") {
    j["mcmullen_cone"] = cone_to_json(cone_to_coords(minimalize(st.mcmullen_internal), st.coords));
    j["fried_cone"] = cone_to_json(cone_to_coords(minimalize(st.fried_internal), st.coords));
    if (check_equal) {
      ConeEquality eq = cones_equal(st.mcmullen_internal, st.fried_internal);
      j["cones_equal"] = eq.equal;
      if (!eq.equal) {
        Json w = Json::array();
        for (const auto& x : st.coords.class_to_coords(eq.witness)) w.push_back(rational_to_string(x));
        j["cone_mismatch"] = {{"witness_class", std::move(w)},
                              {"inside", eq.witness_side == 1 ? "mcmullen_cone" : "fried_cone"}};
        emit(j, args.json);
        return 3;
      }
    }
  } else {  // specialize | stretch | entropy for one class
    auto it = std::find_if(classes.begin(), classes.end(),
                           [&](const CohomologyClass& u) { return u.name == klass; });
    if (it == classes.end()) {
      Json err;
      err["schema"] = kReportSchema;
      err["error"] = "class not found: " + klass;
      emit(err, args.json);
      return 2;
    }
    Json cj = class_report_json(st, *it, opt.tol, with_samples);
    if (cj.contains("valid") && !cj["valid"].get<bool>()) {
      emit(cj, args.json);
      return 2;
    }
    j["class"] = std::move(cj);
  }
  emit(j, args.json);
  return 0;
}

int run_analyze(const CommonArgs& args, bool check, const std::string& route) {
  GraphMap g = load_graph(args);
  auto classes = load_classes(args);
  AnalyzeOptions opt = to_options(args);
  opt.check = check;
  if (!route.empty()) opt.route = route;
  AnalyzeResult res = analyze(g, classes, opt);
  emit(res.report, args.json);
  return res.exit_code;
}

int run_subdivide(const CommonArgs& args, const std::string& point) {
  GraphMap g = load_graph(args);
  auto classes = load_classes(args);
  AnalyzeOptions opt = to_options(args);

  auto p1 = point.find(':');
  auto p2 = point.find(':', p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos)
    throw CLI::ValidationError("--point expects EDGE:POSITION:PERIOD");
  PeriodicPointSpec spec{point.substr(0, p1), std::stoi(point.substr(p1 + 1, p2 - p1 - 1)),
                         std::stoi(point.substr(p2 + 1))};

  PipelineState st;
  SubdivisionResult sub;
  try {
    st = run_pipeline(g, classes, opt);
    sub = subdivide_at_invariant_set(g, {spec});
  } catch (const std::invalid_argument& ex) {
    Json j;
    j["schema"] = kReportSchema;
    j["error"] = ex.what();
    emit(j, args.json);
    return 2;
  }

  RingMatrix b = subdivision_factor(st.marking, st.labels, sub.orbit);
  SubdivisionCheck chk = check_subdivision(st.marking, st.characters, st.mc_internal, sub, b);

  Json j = provenance_json(st, opt);
  j["subdivided_map"] = graph_map_to_json(sub.map);
  Json orbit = Json::array();
  for (const auto& pt : sub.orbit.points)
    orbit.push_back({{"edge", pt.host_edge},
                     {"coordinate", rational_to_string(pt.coordinate)},
                     {"vertex", pt.vertex},
                     {"orientation_preserved", pt.sign > 0},
                     {"maps_to", sub.orbit.points[pt.next].vertex}});
  j["orbit"] = std::move(orbit);
  RingMatrix b_coords(b.size(), std::vector<LaurentPoly>(b.size(), LaurentPoly(st.marking.b)));
  Json bj = Json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < b.size(); ++k) {
      LaurentPoly lifted(st.marking.b);
      for (const auto& [e, c] : b[i][k].terms()) {
        ExponentVector full(st.marking.b, 0);
        for (std::size_t q = 0; q + 1 < st.marking.b; ++q) full[q] = e[q];
        lifted.add_term(std::move(full), c);
      }
      row.push_back(polynomial_to_json(st.coords.to_coords(lifted), st.coords.names));
    }
    bj.push_back(std::move(row));
  }
  j["subdivision_factor"] = std::move(bj);
  j["identity_holds"] = chk.ok;
  j["subdivided_polynomial"] = polynomial_to_json(chk.subdivided, st.coords.names);
  if (!chk.ok) {
    j["predicted_polynomial"] = polynomial_to_json(chk.predicted, st.coords.names);
    emit(j, args.json);
    return 3;
  }
  emit(j, args.json);
  return 0;
}

int run_endo_analyze(const std::string& file, bool json_flag) {
  FreeGroupEndo e = endo_from_json(load_json_file(file));
  Json j;
  j["schema"] = kReportSchema;
  j["rank"] = e.rank;
  j["image_rank"] = image_rank(e);
  j["injective"] = is_injective(e);
  j["surjective"] = is_surjective(e);
  StableImage st = stable_image_index(e);
  j["stable_index"] = st.index;
  j["rank_sequence"] = st.ranks;
  emit(j, json_flag);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"McMullen polynomials, cones, and stretch factors of train track maps"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string klass, route, point, endo_file;
  bool check = false, check_equal = false;
  std::uint64_t seed = 1;
  int edges = 8;

  auto* validate_cmd = app.add_subcommand("validate", "validate a graph map fixture");
  add_common(validate_cmd, args);

  auto* poly_cmd = app.add_subcommand("polynomial", "compute the McMullen polynomial");
  add_common(poly_cmd, args);
  poly_cmd->add_option("--route", route, "det | cycle | both")->default_val("det");

  auto* orbits_cmd = app.add_subcommand("orbits", "circuits and their orbit classes");
  add_common(orbits_cmd, args);

  auto* cones_cmd = app.add_subcommand("cones", "McMullen and Fried cones");
  add_common(cones_cmd, args);
  cones_cmd->add_flag("--check-equal", check_equal, "verify the two cones agree");

  auto* spec_cmd = app.add_subcommand("specialize", "specialize at an integral class");
  add_common(spec_cmd, args);
  spec_cmd->add_option("--class", klass, "class name")->required();

  auto* stretch_cmd = app.add_subcommand("stretch", "stretch factor of a class");
  add_common(stretch_cmd, args);
  stretch_cmd->add_option("--class", klass, "class name")->required();

  auto* entropy_cmd = app.add_subcommand("entropy", "entropy of a class in the cone");
  add_common(entropy_cmd, args);
  entropy_cmd->add_option("--class", klass, "class name")->required();
  bool samples = false;
  entropy_cmd->add_flag("--samples", samples, "include the (q, F(q)) bracket samples");

  auto* subdivide_cmd = app.add_subcommand("subdivide", "subdivide at a periodic point");
  add_common(subdivide_cmd, args);
  subdivide_cmd->add_option("--point", point, "EDGE:POSITION:PERIOD")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "full pipeline report");
  add_common(analyze_cmd, args);
  analyze_cmd->add_flag("--check", check, "run both polynomial routes and all identities");
  analyze_cmd->add_option("--route", route, "det | cycle | both");

  auto* endo_cmd = app.add_subcommand("endo", "free group endomorphism tools");
  auto* endo_analyze_cmd = endo_cmd->add_subcommand("analyze", "fold and report");
  endo_analyze_cmd->add_option("file", endo_file, "endomorphism JSON file")->required();
  bool endo_json = false;
  endo_analyze_cmd->add_flag("--json", endo_json, "emit the full JSON report");

  auto* random_cmd = app.add_subcommand("random-map", "emit a seeded random train track map");
  random_cmd->add_option("--seed", seed, "generator seed")->default_val(1);
  random_cmd->add_option("--edges", edges, "maximum edge count")->default_val(8);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate_cmd->parsed()) return run_validate(args);
    if (poly_cmd->parsed()) return run_stage_report(args, "polynomial", "", route, false);
    if (orbits_cmd->parsed()) return run_stage_report(args, "orbits", "", "", false);
    if (cones_cmd->parsed()) return run_stage_report(args, "cones", "", "", check_equal);
    if (spec_cmd->parsed()) return run_stage_report(args, "specialize", klass, "", false);
    if (stretch_cmd->parsed()) return run_stage_report(args, "stretch", klass, "", false);
    if (entropy_cmd->parsed()) return run_stage_report(args, "entropy", klass, "", false, samples);
    if (subdivide_cmd->parsed()) return run_subdivide(args, point);
    if (analyze_cmd->parsed()) return run_analyze(args, check, route);
    if (endo_cmd->parsed()) return run_endo_analyze(endo_file, endo_json);
    if (random_cmd->parsed()) {
      Rng rng(seed);
      std::cout << graph_map_to_json(random_train_track_map(rng, edges)).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& ex) {
    Json j;
    j["schema"] = kReportSchema;
    j["error"] = ex.what();
    std::cout << j.dump() << "\n";
    return 2;
  }
  return 0;
}
