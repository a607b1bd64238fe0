#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trainpoly/cones.hpp"
#include "trainpoly/graph.hpp"
#include "trainpoly/laurent.hpp"
#include "trainpoly/marking.hpp"
#include "trainpoly/stallings.hpp"

namespace trainpoly {

using Json = nlohmann::ordered_json;

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

inline void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

// --- graph maps -------------------------------------------------------------

inline GraphMap graph_map_from_json(const Json& j) {
  GraphMap g;
  for (const auto& v : j.at("vertices")) g.graph.vertices.push_back(v.get<std::string>());
  for (const auto& e : j.at("edges"))
    g.graph.edges.push_back({e.at("id").get<std::string>(), e.at("from").get<std::string>(),
                             e.at("to").get<std::string>()});
  for (const auto& [v, w] : j.at("vertex_images").items())
    g.vertex_image[v] = w.get<std::string>();
  for (const auto& [id, path] : j.at("edge_images").items()) {
    EdgePath p;
    for (const auto& s : path)
      p.push_back({s.at("edge").get<std::string>(), s.at("sign").get<int>()});
    g.edge_image[id] = std::move(p);
  }
  return g;
}

inline Json graph_map_to_json(const GraphMap& g) {
  Json j;
  j["vertices"] = g.graph.vertices;
  j["edges"] = Json::array();
  for (const auto& e : g.graph.edges)
    j["edges"].push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}});
  j["vertex_images"] = Json::object();
  for (const auto& v : g.graph.vertices) j["vertex_images"][v] = g.vertex_image.at(v);
  j["edge_images"] = Json::object();
  for (const auto& e : g.graph.edges) {
    Json path = Json::array();
    for (const auto& s : g.edge_image.at(e.id))
      path.push_back({{"edge", s.edge}, {"sign", s.sign}});
    j["edge_images"][e.id] = std::move(path);
  }
  return j;
}

// --- cohomology classes -----------------------------------------------------

inline CohomologyClass class_from_json(const Json& j) {
  CohomologyClass u;
  u.name = j.value("name", "");
  if (j.contains("edge_values"))
    for (const auto& [e, v] : j.at("edge_values").items())
      u.edge_values[e] = parse_rational(v.get<std::string>());
  if (j.contains("stable_value")) u.stable_value = parse_rational(j.at("stable_value").get<std::string>());
  return u;
}

inline Json class_to_json(const CohomologyClass& u) {
  Json j;
  j["name"] = u.name;
  j["edge_values"] = Json::object();
  for (const auto& [e, v] : u.edge_values) j["edge_values"][e] = rational_to_string(v);
  j["stable_value"] = rational_to_string(u.stable_value);
  return j;
}

inline std::vector<CohomologyClass> classes_from_json(const Json& j) {
  std::vector<CohomologyClass> out;
  for (const auto& item : j) out.push_back(class_from_json(item));
  return out;
}

// --- polynomials ------------------------------------------------------------

inline Json polynomial_to_json(const LaurentPoly& p, const std::vector<std::string>& variables) {
  Json j;
  j["variables"] = variables;
  j["terms"] = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json term;
    term["exponents"] = e;
    term["coefficient"] = to_string(c);
    j["terms"].push_back(std::move(term));
  }
  return j;
}

inline LaurentPoly polynomial_from_json(const Json& j) {
  const std::size_t nv = j.at("variables").size();
  LaurentPoly p(nv);
  for (const auto& term : j.at("terms")) {
    ExponentVector e = term.at("exponents").get<ExponentVector>();
    p.add_term(std::move(e), Int(term.at("coefficient").get<std::string>()));
  }
  return p;
}

// --- cones -------------------------------------------------------------------

inline Json cone_to_json(const OpenCone& c) {
  Json j;
  j["coordinates"] = c.coordinates;
  j["inequalities"] = Json::array();
  for (const auto& n : c.inequalities) {
    Json row = Json::array();
    for (const auto& x : n) row.push_back(to_i64(x));
    j["inequalities"].push_back(std::move(row));
  }
  j["strict"] = true;
  j["minimal"] = c.minimal;
  return j;
}

// --- free group endomorphisms -----------------------------------------------

inline int parse_letter(const std::string& tok) {
  bool neg = !tok.empty() && tok[0] == '-';
  std::string body = neg ? tok.substr(1) : tok;
  if (body.size() < 2 || body[0] != 'x') throw std::invalid_argument("bad letter token: " + tok);
  int g = std::stoi(body.substr(1));
  if (g < 1) throw std::invalid_argument("bad letter token: " + tok);
  return neg ? -g : g;
}

inline std::string letter_token(int letter) {
  return (letter < 0 ? "-x" : "x") + std::to_string(letter < 0 ? -letter : letter);
}

inline FreeGroupEndo endo_from_json(const Json& j) {
  FreeGroupEndo e;
  e.rank = j.at("rank").get<int>();
  for (const auto& img : j.at("images")) {
    Word w;
    for (const auto& tok : img) w.push_back(parse_letter(tok.get<std::string>()));
    Word reduced = free_reduce(w);
    if (reduced != w) throw std::invalid_argument("image word is not freely reduced");
    for (int letter : w)
      if (std::abs(letter) > e.rank) throw std::invalid_argument("letter out of rank");
    e.images.push_back(std::move(w));
  }
  if (static_cast<int>(e.images.size()) != e.rank)
    throw std::invalid_argument("endomorphism needs one image per generator");
  return e;
}

inline Json endo_to_json(const FreeGroupEndo& e) {
  Json j;
  j["rank"] = e.rank;
  j["images"] = Json::array();
  for (const Word& w : e.images) {
    Json img = Json::array();
    for (int letter : w) img.push_back(letter_token(letter));
    j["images"].push_back(std::move(img));
  }
  return j;
}

}  // namespace trainpoly
