#pragma once

// JSON document formats for games, formula games and digraphs, plus an
// inspection dump for encoded arenas. Serialization is canonical: fixed field
// order, two-space indent, lowest-terms rationals, sorted edge lists, zero
// distribution entries dropped, trailing newline. Parsing any document and
// serializing it again therefore yields a normal form that is stable under
// further round trips, byte for byte.

#include "qsg/game.hpp"
#include "qsg/reductions.hpp"
#include "qsg/static_games.hpp"
#include "qsg/weighted_game.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsg {

inline constexpr int64_t k_format_version = 1;

inline std::optional<CostKind> cost_kind_from_string(std::string_view s) {
  if (s == "Inf") return CostKind::Inf;
  if (s == "Sup") return CostKind::Sup;
  if (s == "LimInf") return CostKind::LimInf;
  if (s == "LimSup") return CostKind::LimSup;
  if (s == "Avg") return CostKind::Avg;
  if (s == "Disc") return CostKind::Disc;
  return std::nullopt;
}

namespace io_detail {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void doc_error(const std::string& where, const std::string& what) {
  throw QsgError("field '" + where + "': " + what);
}

// Json::parse reports a 1-based byte offset; turn it into line/column so a
// syntax error in a hand-edited document points at the right spot.
inline Json parse_root(const std::string& text, const char* what) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    if (byte > text.size()) byte = text.size();
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw QsgError("malformed " + std::string(what) + " document at line " +
                   std::to_string(line) + ", column " + std::to_string(column));
  }
  if (!root.is_object()) throw QsgError(std::string(what) + " document must be a JSON object");
  return root;
}

inline void reject_unknown_fields(const Json& root, const std::set<std::string>& known) {
  for (const auto& [key, value] : root.items())
    if (!known.count(key)) doc_error(key, "unknown field");
}

inline const Json& require_field(const Json& root, const std::string& name) {
  auto it = root.find(name);
  if (it == root.end()) doc_error(name, "missing");
  return *it;
}

inline void check_format_version(const Json& root) {
  const Json& v = require_field(root, "format_version");
  if (!v.is_number_integer() || v.get<int64_t>() != k_format_version)
    doc_error("format_version", "this tool reads version " + std::to_string(k_format_version));
}

inline int64_t get_int(const Json& j, const std::string& where) {
  if (j.is_number_unsigned() && j.get<uint64_t>() > uint64_t(INT64_MAX))
    doc_error(where, "integer out of range");
  if (!j.is_number_integer()) doc_error(where, "must be an integer");
  return j.get<int64_t>();
}

inline std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) doc_error(where, "must be a string");
  return j.get<std::string>();
}

// Rationals travel as a JSON integer or a lowest-terms string "p/q".
inline Rational get_rational(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(get_int(j, where));
  if (j.is_string()) {
    if (auto r = rational_from_string(j.get<std::string>())) return *r;
    doc_error(where, "not a rational; write an integer or \"p/q\"");
  }
  doc_error(where, "must be an integer or a rational string \"p/q\"");
}

inline Json rational_json(const Rational& r) {
  if (denominator(r) == 1 && numerator(r) >= INT64_MIN && numerator(r) <= INT64_MAX)
    return Json(numerator(r).convert_to<int64_t>());
  return Json(rational_to_string(r));
}

inline std::pair<std::string, std::string> get_edge_pair(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) doc_error(where, "must be a [source, target] pair");
  return {get_string(j[0], where + "[0]"), get_string(j[1], where + "[1]")};
}

inline std::string edge_key(const Qsg& g, uint32_t e) {
  return g.vertices[g.edges[e].first] + "->" + g.vertices[g.edges[e].second];
}

}  // namespace io_detail

// Reads a game document. Structural problems raise a QsgError naming the
// offending field; the finished game is then checked against the core
// invariants, so a successfully parsed game always validates.
inline Qsg parse_game(const std::string& text) {
  using io_detail::doc_error;
  using io_detail::Json;

  Json root = io_detail::parse_root(text, "game");
  io_detail::reject_unknown_fields(
      root, {"format_version", "vertices", "edges", "budget", "initial_vertex",
             "initial_distribution", "cost", "move_granularity", "final_vertices", "safe_edges",
             "threshold"});
  io_detail::check_format_version(root);

  Qsg g;
  std::map<std::string, uint32_t> vertex_id;
  {
    const Json& vs = io_detail::require_field(root, "vertices");
    if (!vs.is_array() || vs.empty()) doc_error("vertices", "must be a non-empty array");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      std::string name = io_detail::get_string(vs[i], "vertices[" + std::to_string(i) + "]");
      if (name.empty()) doc_error("vertices[" + std::to_string(i) + "]", "empty vertex name");
      if (!vertex_id.emplace(name, static_cast<uint32_t>(g.vertices.size())).second)
        doc_error("vertices[" + std::to_string(i) + "]", "duplicate vertex '" + name + "'");
      g.vertices.push_back(std::move(name));
    }
  }
  auto vertex_of = [&](const std::string& name, const std::string& where) {
    auto it = vertex_id.find(name);
    if (it == vertex_id.end()) doc_error(where, "unknown vertex '" + name + "'");
    return it->second;
  };

  {
    const Json& es = io_detail::require_field(root, "edges");
    if (!es.is_array()) doc_error("edges", "must be an array of [source, target] pairs");
    std::set<Edge> seen;
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      auto [a, b] = io_detail::get_edge_pair(es[i], where);
      Edge e{vertex_of(a, where + ": edge '" + a + "->" + b + "'"),
             vertex_of(b, where + ": edge '" + a + "->" + b + "'")};
      if (!seen.insert(e).second) doc_error(where, "duplicate edge '" + a + "->" + b + "'");
      g.edges.push_back(e);
    }
  }

  g.budget = io_detail::get_int(io_detail::require_field(root, "budget"), "budget");
  g.initial = vertex_of(io_detail::get_string(io_detail::require_field(root, "initial_vertex"),
                                              "initial_vertex"),
                        "initial_vertex");

  if (auto it = root.find("move_granularity"); it != root.end())
    g.granularity = io_detail::get_int(*it, "move_granularity");

  {
    const Json& cost = io_detail::require_field(root, "cost");
    if (!cost.is_object()) doc_error("cost", "must be an object {kind, lambda?}");
    io_detail::reject_unknown_fields(cost, {"kind", "lambda"});
    std::string kind = io_detail::get_string(io_detail::require_field(cost, "kind"), "cost.kind");
    auto k = cost_kind_from_string(kind);
    if (!k) doc_error("cost.kind", "unknown cost kind '" + kind + "'");
    if (*k == CostKind::Disc) {
      auto it = cost.find("lambda");
      if (it == cost.end()) doc_error("cost.lambda", "the Disc cost needs a lambda");
      g.cost = cost_disc(io_detail::get_rational(*it, "cost.lambda"));
    } else {
      if (cost.find("lambda") != cost.end())
        doc_error("cost.lambda", "only the Disc cost takes a lambda");
      g.cost = cost_of(*k);
    }
  }

  if (auto it = root.find("threshold"); it != root.end())
    g.threshold = io_detail::get_rational(*it, "threshold");

  g.normalize();

  if (auto it = root.find("final_vertices"); it != root.end()) {
    if (!it->is_array()) doc_error("final_vertices", "must be an array of vertex names");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "final_vertices[" + std::to_string(i) + "]";
      uint32_t v = vertex_of(io_detail::get_string((*it)[i], where), where);
      if (g.final_vertex[v]) doc_error(where, "duplicate final vertex '" + g.vertices[v] + "'");
      g.final_vertex[v] = 1;
    }
  }
  if (auto it = root.find("safe_edges"); it != root.end()) {
    if (!it->is_array()) doc_error("safe_edges", "must be an array of [source, target] pairs");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "safe_edges[" + std::to_string(i) + "]";
      auto [a, b] = io_detail::get_edge_pair((*it)[i], where);
      uint32_t e = g.edge_index(vertex_of(a, where), vertex_of(b, where));
      if (e == UINT32_MAX) doc_error(where, "no edge '" + a + "->" + b + "'");
      if (g.safe_edge[e]) doc_error(where, "duplicate safe edge '" + a + "->" + b + "'");
      g.safe_edge[e] = 1;
    }
  }

  {
    const Json& dist = io_detail::require_field(root, "initial_distribution");
    if (!dist.is_object()) doc_error("initial_distribution", "must map \"src->dst\" to units");
    for (const auto& [key, value] : dist.items()) {
      const std::string where = "initial_distribution." + key;
      int64_t units = io_detail::get_int(value, where);
      if (units < 0) doc_error(where, "units must be nonnegative");
      // An edge key splits at "->"; vertex names may themselves contain the
      // arrow, so try every split and demand exactly one matching edge. A key
      // naming a final vertex outright places units there instead.
      std::vector<uint32_t> hits;
      for (std::size_t at = key.find("->"); at != std::string::npos;
           at = key.find("->", at + 1)) {
        auto a = vertex_id.find(key.substr(0, at));
        auto b = vertex_id.find(key.substr(at + 2));
        if (a == vertex_id.end() || b == vertex_id.end()) continue;
        uint32_t e = g.edge_index(a->second, b->second);
        if (e != UINT32_MAX) hits.push_back(e);
      }
      if (hits.size() > 1) doc_error(where, "ambiguous edge key");
      if (hits.size() == 1) {
        g.delta0_edge[hits[0]] += units;
        continue;
      }
      auto v = vertex_id.find(key);
      if (v != vertex_id.end() && g.final_vertex[v->second]) {
        g.delta0_final[v->second] += units;
        continue;
      }
      doc_error(where, "key names neither an edge nor a final vertex");
    }
  }

  ValidationReport report = validate(g);
  if (!report.ok()) throw QsgError("game does not validate: " + report.errors.front());
  return g;
}

// Canonical document for a normalized game; parse_game(serialize_game(g))
// reproduces g exactly.
inline std::string serialize_game(const Qsg& g) {
  using io_detail::Json;

  Json root;
  root["format_version"] = k_format_version;
  root["vertices"] = g.vertices;

  Json edges = Json::array();
  for (const Edge& e : g.edges)
    edges.push_back(Json::array({g.vertices[e.first], g.vertices[e.second]}));
  root["edges"] = std::move(edges);

  root["budget"] = g.budget;
  root["initial_vertex"] = g.vertices[g.initial];

  Json dist = Json::object();
  for (uint32_t e = 0; e < g.edge_count(); ++e)
    if (g.delta0_edge[e] != 0) dist[io_detail::edge_key(g, e)] = g.delta0_edge[e];
  for (uint32_t v = 0; v < g.vertex_count(); ++v)
    if (g.delta0_final[v] != 0) dist[g.vertices[v]] = g.delta0_final[v];
  root["initial_distribution"] = std::move(dist);

  Json cost;
  cost["kind"] = cost_kind_name(g.cost.kind);
  if (g.cost.kind == CostKind::Disc) cost["lambda"] = io_detail::rational_json(g.cost.lambda);
  root["cost"] = std::move(cost);

  if (g.granularity != 1) root["move_granularity"] = g.granularity;

  if (g.is_extended()) {
    Json finals = Json::array();
    for (uint32_t v = 0; v < g.vertex_count(); ++v)
      if (g.is_final(v)) finals.push_back(g.vertices[v]);
    if (!finals.empty()) root["final_vertices"] = std::move(finals);

    Json safes = Json::array();
    for (uint32_t e = 0; e < g.edge_count(); ++e)
      if (g.is_safe(e))
        safes.push_back(
            Json::array({g.vertices[g.edges[e].first], g.vertices[g.edges[e].second]}));
    if (!safes.empty()) root["safe_edges"] = std::move(safes);
  }

  if (g.threshold) root["threshold"] = io_detail::rational_json(*g.threshold);

  return root.dump(2) + "\n";
}

// Reads a formula-game document.
inline AbfInstance parse_abf(const std::string& text) {
  using io_detail::doc_error;
  using io_detail::Json;

  Json root = io_detail::parse_root(text, "formula game");
  io_detail::reject_unknown_fields(root, {"format_version", "prover_vars", "disprover_vars",
                                          "clauses", "initial_valuation", "initial_player"});
  io_detail::check_format_version(root);

  AbfInstance instance;
  std::set<std::string> known;
  auto read_vars = [&](const std::string& field, std::vector<std::string>& out) {
    const Json& vs = io_detail::require_field(root, field);
    if (!vs.is_array()) doc_error(field, "must be an array of variable names");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string where = field + "[" + std::to_string(i) + "]";
      std::string name = io_detail::get_string(vs[i], where);
      if (name.empty()) doc_error(where, "empty variable name");
      if (name[0] == '-') doc_error(where, "variable names must not start with '-'");
      if (!known.insert(name).second) doc_error(where, "variable '" + name + "' declared twice");
      out.push_back(std::move(name));
    }
  };
  read_vars("prover_vars", instance.prover_vars);
  read_vars("disprover_vars", instance.disprover_vars);

  {
    const Json& cs = io_detail::require_field(root, "clauses");
    if (!cs.is_array()) doc_error("clauses", "must be an array of clauses");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string cw = "clauses[" + std::to_string(i) + "]";
      if (!cs[i].is_array()) doc_error(cw, "a clause is an array of literals \"X\" or \"-X\"");
      std::vector<AbfLiteral> clause;
      for (std::size_t j = 0; j < cs[i].size(); ++j) {
        const std::string lw = cw + "[" + std::to_string(j) + "]";
        std::string lit = io_detail::get_string(cs[i][j], lw);
        AbfLiteral l;
        l.positive = lit.empty() || lit[0] != '-';
        l.variable = l.positive ? lit : lit.substr(1);
        if (l.variable.empty()) doc_error(lw, "empty literal");
        if (!known.count(l.variable)) doc_error(lw, "unknown variable '" + l.variable + "'");
        clause.push_back(std::move(l));
      }
      instance.cnf.push_back(std::move(clause));
    }
  }

  {
    const Json& vs = io_detail::require_field(root, "initial_valuation");
    if (!vs.is_array()) doc_error("initial_valuation", "must be an array of variable names");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string where = "initial_valuation[" + std::to_string(i) + "]";
      std::string name = io_detail::get_string(vs[i], where);
      if (!known.count(name)) doc_error(where, "unknown variable '" + name + "'");
      if (!seen.insert(name).second) doc_error(where, "variable '" + name + "' listed twice");
      instance.initial_valuation.push_back(std::move(name));
    }
  }

  {
    std::string player = io_detail::get_string(io_detail::require_field(root, "initial_player"),
                                               "initial_player");
    if (player == "prover")
      instance.initial_player = AbfPlayer::Prover;
    else if (player == "disprover")
      instance.initial_player = AbfPlayer::Disprover;
    else
      doc_error("initial_player", "must be \"prover\" or \"disprover\"");
  }

  return instance;
}

inline std::string serialize_abf(const AbfInstance& instance) {
  using io_detail::Json;

  Json root;
  root["format_version"] = k_format_version;
  root["prover_vars"] = instance.prover_vars;
  root["disprover_vars"] = instance.disprover_vars;

  Json clauses = Json::array();
  for (const auto& clause : instance.cnf) {
    Json c = Json::array();
    for (const AbfLiteral& l : clause) c.push_back(l.positive ? l.variable : "-" + l.variable);
    clauses.push_back(std::move(c));
  }
  root["clauses"] = std::move(clauses);

  root["initial_valuation"] = instance.initial_valuation;
  root["initial_player"] =
      instance.initial_player == AbfPlayer::Prover ? "prover" : "disprover";

  return root.dump(2) + "\n";
}

// Reads a plain digraph document, the input of the feedback-arc-set
// reduction: just vertices and edges.
inline Digraph parse_digraph(const std::string& text) {
  using io_detail::doc_error;
  using io_detail::Json;

  Json root = io_detail::parse_root(text, "digraph");
  io_detail::reject_unknown_fields(root, {"format_version", "vertices", "edges"});
  io_detail::check_format_version(root);

  Digraph d;
  std::map<std::string, uint32_t> vertex_id;
  {
    const Json& vs = io_detail::require_field(root, "vertices");
    if (!vs.is_array() || vs.empty()) doc_error("vertices", "must be a non-empty array");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      std::string name = io_detail::get_string(vs[i], "vertices[" + std::to_string(i) + "]");
      if (name.empty()) doc_error("vertices[" + std::to_string(i) + "]", "empty vertex name");
      if (!vertex_id.emplace(name, static_cast<uint32_t>(d.vertices.size())).second)
        doc_error("vertices[" + std::to_string(i) + "]", "duplicate vertex '" + name + "'");
      d.vertices.push_back(std::move(name));
    }
  }
  {
    const Json& es = io_detail::require_field(root, "edges");
    if (!es.is_array()) doc_error("edges", "must be an array of [source, target] pairs");
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      auto [a, b] = io_detail::get_edge_pair(es[i], where);
      auto ia = vertex_id.find(a);
      auto ib = vertex_id.find(b);
      if (ia == vertex_id.end()) doc_error(where, "unknown vertex '" + a + "'");
      if (ib == vertex_id.end()) doc_error(where, "unknown vertex '" + b + "'");
      d.edges.emplace_back(ia->second, ib->second);
    }
  }
  return d;
}

inline std::string serialize_digraph(const Digraph& d) {
  using io_detail::Json;

  Json root;
  root["format_version"] = k_format_version;
  root["vertices"] = d.vertices;
  Json edges = Json::array();
  for (const auto& [a, b] : d.edges)
    edges.push_back(io_detail::Json::array({d.vertices[a], d.vertices[b]}));
  root["edges"] = std::move(edges);
  return root.dump(2) + "\n";
}

// Human-readable tag for an encoded state, resolved through the source game.
inline std::string arena_state_label(const Qsg& origin, const WeightedGame& arena, uint32_t s) {
  const uint64_t payload = arena.payload[s];
  const uint32_t type = state_type_of(payload);
  if (type == state_type::k_terminal)
    return state_index_of(payload) == k_terminal_bad ? "BAD" : "WIN";

  const DistributionDomain dom = distribution_domain(origin);
  const std::vector<int64_t>& dist = arena.dists[state_dist_of(payload)];
  std::string units = "{";
  for (uint32_t i = 0; i < dom.size() && i < dist.size(); ++i) {
    if (dist[i] == 0) continue;
    if (units.size() > 1) units += ", ";
    const DistributionDomain::Item& item = dom.items[i];
    std::string buf;
    units += item.is_final ? origin.vertices[item.index] : origin.edge_name(item.index, buf);
    units += "=" + std::to_string(dist[i]);
  }
  units += "}";

  std::string at;
  if (type == state_type::k_min) {
    at = origin.vertices[state_index_of(payload)];
  } else {
    origin.edge_name(state_index_of(payload), at);
  }
  return at + " " + units;
}

// Inspection dump of an encoded arena. This direction is for humans and
// debugging scripts; there is no parser for it.
inline std::string serialize_arena(const Qsg& origin, const WeightedGame& arena) {
  using io_detail::Json;

  Json root;
  root["format_version"] = k_format_version;

  Json states = Json::array();
  for (uint32_t s = 0; s < arena.state_count(); ++s) {
    Json st;
    st["owner"] = arena.is_min(s) ? "min" : "max";
    st["label"] = arena_state_label(origin, arena, s);
    states.push_back(std::move(st));
  }
  root["states"] = std::move(states);

  Json transitions = Json::array();
  for (uint32_t s = 0; s < arena.state_count(); ++s)
    for (uint32_t t = arena.lo(s); t < arena.hi(s); ++t)
      transitions.push_back(Json::array({s, arena.succ[t], arena.w(t)}));
  root["transitions"] = std::move(transitions);

  root["initial"] = arena.initial;
  return root.dump(2) + "\n";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw QsgError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw QsgError("cannot write '" + path + "'");
  out << text;
  if (!out) throw QsgError("cannot write '" + path + "'");
}

}  // namespace qsg
