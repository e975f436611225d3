#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "monores/balanced.hpp"
#include "monores/core.hpp"

namespace monores {

// Circuit file format:
//   {"r": 1.0, "s": 1.0, "nodes": ["a", ...],
//    "edges": [{"from": "a", "to": "b", "mu": 1.5}, ...]}
// Unknown keys are rejected so typos fail loudly instead of silently
// changing the instance.

inline Circuit circuit_from_json(const nlohmann::json& j, const std::string& source) {
  auto fail = [&source](const std::string& what) -> ParseError {
    return ParseError(source + ": " + what);
  };
  if (!j.is_object()) throw fail("circuit document must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "r" && key != "s" && key != "nodes" && key != "edges")
      throw fail("unknown key '" + key + "'");
  for (const char* key : {"r", "s", "nodes", "edges"})
    if (!j.contains(key)) throw fail(std::string("missing key '") + key + "'");
  if (!j.at("r").is_number() || !j.at("s").is_number())
    throw fail("'r' and 's' must be numbers");
  double r = j.at("r").get<double>();
  double s = j.at("s").get<double>();
  if (!(r > 0.0)) throw fail("'r' must be strictly positive");
  if (!(s > 0.0)) throw fail("'s' must be strictly positive");

  if (!j.at("nodes").is_array()) throw fail("'nodes' must be an array of labels");
  std::vector<std::string> labels;
  for (const auto& item : j.at("nodes")) {
    if (!item.is_string()) throw fail("'nodes' entries must be strings");
    labels.push_back(item.get<std::string>());
  }
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) throw fail("nodes[" + std::to_string(i) + "]: empty label");
    if (!index.emplace(labels[i], static_cast<int>(i)).second)
      throw fail("duplicate node label '" + labels[i] + "'");
  }

  if (!j.at("edges").is_array()) throw fail("'edges' must be an array");
  std::vector<Edge> edges;
  int eid = 0;
  for (const auto& item : j.at("edges")) {
    const std::string where = "edges[" + std::to_string(eid) + "]";
    if (!item.is_object()) throw fail(where + ": must be an object");
    for (const auto& [key, _] : item.items())
      if (key != "from" && key != "to" && key != "mu")
        throw fail(where + ": unknown key '" + key + "'");
    for (const char* key : {"from", "to", "mu"})
      if (!item.contains(key)) throw fail(where + ": missing key '" + key + "'");
    if (!item.at("from").is_string() || !item.at("to").is_string())
      throw fail(where + ": 'from'/'to' must be node labels");
    auto lookup = [&](const std::string& label) {
      auto it = index.find(label);
      if (it == index.end()) throw fail(where + ": unknown node label '" + label + "'");
      return it->second;
    };
    int tail = lookup(item.at("from").get<std::string>());
    int head = lookup(item.at("to").get<std::string>());
    if (tail == head) throw fail(where + ": self-loops are not allowed");
    if (!item.at("mu").is_number()) throw fail(where + ": 'mu' must be a number");
    double mu = item.at("mu").get<double>();
    if (!(mu > 0.0)) throw fail(where + ": mu must be strictly positive, got " +
                                std::to_string(mu));
    edges.push_back(Edge{eid, tail, head, mu});
    ++eid;
  }
  try {
    return Circuit(std::move(labels), std::move(edges), r, s);
  } catch (const Error& e) {
    throw fail(e.what());
  }
}

inline nlohmann::json circuit_to_json(const Circuit& c) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : c.edges())
    edges.push_back({{"from", c.label(e.tail)}, {"to", c.label(e.head)}, {"mu", e.mu}});
  return nlohmann::json{{"r", c.r()}, {"s", c.s()}, {"nodes", c.labels()}, {"edges", edges}};
}

inline Circuit load_circuit(std::istream& in, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  return circuit_from_json(j, source);
}

inline Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return load_circuit(in, path);
}

inline void save_circuit(const Circuit& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << circuit_to_json(c).dump(2) << '\n';
}

// Boundary file format: a JSON object mapping node labels to prescribed
// fluxes. Missing labels default to zero; the sum must vanish.

inline Boundary boundary_from_json(const nlohmann::json& j, const Circuit& c,
                                   const std::string& source) {
  if (!j.is_object()) throw ParseError(source + ": boundary document must be a JSON object");
  Boundary b(static_cast<std::size_t>(c.node_count()), 0.0);
  for (const auto& [key, value] : j.items()) {
    if (!c.has_label(key))
      throw ParseError(source + ": unknown node label '" + key + "'");
    if (!value.is_number())
      throw ParseError(source + ": flux for '" + key + "' must be a number");
    b[static_cast<std::size_t>(c.index_of(key))] = value.get<double>();
  }
  try {
    validate_boundary(c, b);
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  }
  return b;
}

inline Boundary load_boundary(const std::string& path, const Circuit& c) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return boundary_from_json(j, c, path);
}

}  // namespace monores
