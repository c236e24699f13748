#pragma once

// Reductions between the formula game and sabotage games.
//
//  - solve_abf: decides the two-player formula game (Prover and Disprover
//    alternately flip at most one owned variable; Prover wins once the CNF
//    holds) by attractor computation on the configuration graph.
//  - abf_to_espr: compiles a formula game into an extended safety game in
//    which Saboteur plays the Prover role and Runner the Disprover role.
//    docs/abf-espr-wiring.md lists the per-vertex label wiring.
//  - espr_to_spr: removes safe edges and final vertices from an extended
//    safety game, preserving the winner and the budget.
//  - spr_to_limsup: turns a plain safety game into a LimSup threshold-0 game.
//  - swap_cost: replaces the cost function, keeping the arena.
//
// All functions are pure; inputs are never mutated.

#include <algorithm>
#include <array>
#include <cassert>
#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qsg/game.hpp"
#include "qsg/rational.hpp"

namespace qsg {

enum class AbfPlayer { Prover, Disprover };

inline const char* abf_player_name(AbfPlayer p) {
  return p == AbfPlayer::Prover ? "Prover" : "Disprover";
}

inline std::optional<AbfPlayer> abf_player_from_string(std::string_view s) {
  if (s == "Prover") return AbfPlayer::Prover;
  if (s == "Disprover") return AbfPlayer::Disprover;
  return std::nullopt;
}

// One literal of a CNF clause.
struct AbfLiteral {
  std::string variable;
  bool positive = true;
};

// A formula game. Prover owns prover_vars, Disprover owns disprover_vars,
// and the players alternate, each turn flipping at most one owned variable
// (flipping none is a pass). Prover wins if the formula holds in some
// reached configuration, the initial one included.
struct AbfInstance {
  std::vector<std::string> prover_vars;
  std::vector<std::string> disprover_vars;
  std::vector<std::vector<AbfLiteral>> cnf;
  std::vector<std::string> initial_valuation;  // variables that start true
  AbfPlayer initial_player = AbfPlayer::Prover;
};

// A configuration: which variables are true and whose turn it is.
struct AbfConfig {
  std::vector<std::string> valuation;
  AbfPlayer to_move = AbfPlayer::Prover;
};

// A move: pass, or flip one named variable.
struct AbfMove {
  bool pass = true;
  std::string variable;
};

namespace detail {

struct AbfClauseMask {
  uint64_t pos = 0;  // bit set: clause satisfied when the variable is true
  uint64_t neg = 0;  // bit set: clause satisfied when the variable is false
};

struct AbfTable {
  std::vector<std::string> variables;  // prover variables first, then disprover
  std::size_t prover_count = 0;
  std::map<std::string, uint32_t> index;
  std::vector<AbfClauseMask> clauses;
  uint64_t initial_bits = 0;
};

inline AbfTable index_abf(const AbfInstance& instance) {
  AbfTable t;
  auto add_var = [&t](const std::string& name) {
    if (name.empty()) throw QsgError("empty variable name");
    auto id = static_cast<uint32_t>(t.variables.size());
    if (!t.index.emplace(name, id).second)
      throw QsgError("duplicate variable name '" + name + "'");
    t.variables.push_back(name);
  };
  for (const auto& v : instance.prover_vars) add_var(v);
  t.prover_count = t.variables.size();
  for (const auto& v : instance.disprover_vars) add_var(v);
  if (t.variables.size() > 63)
    throw QsgError("at most 63 variables are supported");

  for (const auto& clause : instance.cnf) {
    AbfClauseMask m;
    for (const auto& lit : clause) {
      auto it = t.index.find(lit.variable);
      if (it == t.index.end())
        throw QsgError("clause references unknown variable '" + lit.variable + "'");
      (lit.positive ? m.pos : m.neg) |= uint64_t(1) << it->second;
    }
    t.clauses.push_back(m);
  }
  for (const auto& name : instance.initial_valuation) {
    auto it = t.index.find(name);
    if (it == t.index.end())
      throw QsgError("initial valuation references unknown variable '" + name + "'");
    t.initial_bits |= uint64_t(1) << it->second;
  }
  return t;
}

inline bool abf_satisfied(const AbfTable& t, uint64_t bits) {
  for (const auto& c : t.clauses)
    if ((bits & c.pos) == 0 && (~bits & c.neg) == 0) return false;
  return true;
}

}  // namespace detail

// Solution of a formula game. Configurations are indexed by valuation bits
// (bit k set when variables[k] is true) times two, plus one when Disprover
// moves next.
struct AbfSolution {
  static constexpr int32_t kPass = -1;
  static constexpr int32_t kNone = std::numeric_limits<int32_t>::min();

  AbfPlayer winner = AbfPlayer::Prover;  // from the instance's initial configuration
  std::vector<std::string> variables;    // prover variables first, then disprover
  std::vector<uint8_t> prover_wins;      // per configuration
  // Winning move per configuration, stored for the side that wins there:
  // kPass, a variable index, or kNone when the mover is losing or the
  // formula already holds.
  std::vector<int32_t> move;

  std::size_t config_index(const AbfConfig& config) const {
    uint64_t bits = 0;
    for (const auto& name : config.valuation) {
      auto it = std::find(variables.begin(), variables.end(), name);
      if (it == variables.end())
        throw QsgError("unknown variable in configuration '" + name + "'");
      bits |= uint64_t(1) << (it - variables.begin());
    }
    return static_cast<std::size_t>(bits << 1) |
           (config.to_move == AbfPlayer::Disprover ? 1 : 0);
  }

  bool prover_wins_at(const AbfConfig& config) const {
    return prover_wins[config_index(config)] != 0;
  }

  std::optional<AbfMove> move_at(const AbfConfig& config) const {
    int32_t m = move[config_index(config)];
    if (m == kNone) return std::nullopt;
    if (m == kPass) return AbfMove{true, ""};
    return AbfMove{false, variables[static_cast<std::size_t>(m)]};
  }
};

// Decides the formula game by a backward attractor for Prover over the
// configuration graph. Prover's target is every configuration whose
// valuation satisfies the formula, whoever moves next: a satisfying
// valuation survives the opponent's pass, so checking both sides matches
// the play-based definition.
inline AbfSolution solve_abf(const AbfInstance& instance) {
  detail::AbfTable t = detail::index_abf(instance);
  const std::size_t n = t.variables.size();
  if (n > 20) throw QsgError("solve_abf handles at most 20 variables");
  const std::size_t half = std::size_t(1) << n;
  const std::size_t total = half * 2;

  std::vector<uint8_t> sat(half);
  for (std::size_t bits = 0; bits < half; ++bits)
    sat[bits] = detail::abf_satisfied(t, bits) ? 1 : 0;

  AbfSolution s;
  s.variables = t.variables;
  s.prover_wins.assign(total, 0);
  s.move.assign(total, AbfSolution::kNone);

  // Variables the side to move may flip: [lo[side], hi[side]).
  const std::size_t lo[2] = {0, t.prover_count};
  const std::size_t hi[2] = {t.prover_count, n};

  // A configuration where Prover moves joins the attractor as soon as one
  // successor is winning; a Disprover configuration joins once all its
  // 1 + #owned successors are. Each move leads to a distinct successor
  // (pass keeps the valuation, flips change distinct bits), so counting
  // insertions of successors is exact.
  std::vector<uint32_t> pending(total);
  std::vector<std::size_t> queue;
  queue.reserve(total);
  for (std::size_t c = 0; c < total; ++c) {
    const std::size_t side = c & 1;
    pending[c] = static_cast<uint32_t>(1 + (hi[side] - lo[side]));
    if (sat[c >> 1]) {
      s.prover_wins[c] = 1;
      queue.push_back(c);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t c = queue[head];
    const std::size_t bits = c >> 1;
    const std::size_t pside = 1 - (c & 1);  // the side moving at c's predecessors
    auto visit = [&](std::size_t pred, int32_t via) {
      if (s.prover_wins[pred]) return;
      if (pside == 0) {
        s.prover_wins[pred] = 1;
        s.move[pred] = via;  // leads one step closer to a satisfying valuation
        queue.push_back(pred);
      } else if (--pending[pred] == 0) {
        s.prover_wins[pred] = 1;
        queue.push_back(pred);
      }
    };
    visit((bits << 1) | pside, AbfSolution::kPass);
    for (std::size_t v = lo[pside]; v < hi[pside]; ++v)
      visit(((bits ^ (std::size_t(1) << v)) << 1) | pside, static_cast<int32_t>(v));
  }

  // Disprover's winning move where he is to move and Prover cannot win:
  // any successor outside the attractor (one must exist).
  for (std::size_t c = 1; c < total; c += 2) {
    if (s.prover_wins[c]) continue;
    const std::size_t bits = c >> 1;
    if (!s.prover_wins[bits << 1]) {
      s.move[c] = AbfSolution::kPass;
      continue;
    }
    for (std::size_t v = lo[1]; v < hi[1]; ++v) {
      if (!s.prover_wins[(bits ^ (std::size_t(1) << v)) << 1]) {
        s.move[c] = static_cast<int32_t>(v);
        break;
      }
    }
  }

  const std::size_t start =
      (static_cast<std::size_t>(t.initial_bits) << 1) |
      (instance.initial_player == AbfPlayer::Disprover ? 1 : 0);
  s.winner = s.prover_wins[start] ? AbfPlayer::Prover : AbfPlayer::Disprover;
  return s;
}

namespace detail {

// Vertex names used by abf_to_espr. Variable names are restricted to
// [A-Za-z0-9_], so distinct schemes can never collide.
inline std::string ver_name(const std::string& v, bool positive, int copy) {
  return "Ver(" + v + (positive ? ").pos." : ").neg.") + std::to_string(copy);
}

inline std::string check_name(const std::string& v, int neg_copy, int pos_copy) {
  return "Check(" + v + ").neg" + std::to_string(neg_copy) + ".pos" +
         std::to_string(pos_copy);
}

inline std::string set_name(const std::string& v, bool positive, int stage) {
  return "Set(" + v + (positive ? ".true)." : ".false).") + std::to_string(stage);
}

}  // namespace detail

// Compiles a formula game into an extended safety game with budget 2N+1
// (N variables total). Saboteur plays Prover: the distribution encodes the
// valuation with one unit on each final of the holding polarity pair of
// every variable, plus one unit on the turn marker alpha. Runner plays
// Disprover: walking the valuation loop announces Disprover's flips, and
// detours into the Geq2/Check gadgets punish any distribution that stops
// encoding a valuation. Saboteur steers the two non-safe Choose edges with
// the alpha unit and wins exactly when he can pass the clause chains, i.e.
// when the formula holds. docs/abf-espr-wiring.md tabulates the wiring.
//
// Vertex count is at most 30 * (N + total literal count).
inline Qsg abf_to_espr(const AbfInstance& instance, int64_t move_granularity = 1) {
  if (move_granularity != 1)
    throw QsgError("the reduction requires move granularity 1");
  detail::AbfTable t = detail::index_abf(instance);
  for (const auto& name : t.variables)
    for (char ch : name)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
        throw QsgError("variable names must use letters, digits or underscores: '" +
                       name + "'");
  if (instance.cnf.empty())
    throw QsgError("the construction needs at least one clause");
  std::size_t literal_count = 0;
  for (const auto& clause : instance.cnf) {
    if (clause.size() < 2)
      throw QsgError("each clause needs at least two literals");
    std::set<std::pair<std::string, bool>> seen;
    for (const auto& lit : clause) {
      if (!seen.emplace(lit.variable, lit.positive).second)
        throw QsgError("duplicate literal in a clause: '" + lit.variable + "'");
    }
    literal_count += clause.size();
  }

  const std::size_t n = t.variables.size();
  const int64_t budget = 2 * static_cast<int64_t>(n) + 1;

  // A formula already true with Disprover to move is the one situation the
  // arena cannot express: the formula check sits after Prover's half of the
  // round, so Runner would get to change the valuation before it is ever
  // tested. Prover has already won; emit a minimal game Saboteur wins.
  if (instance.initial_player == AbfPlayer::Disprover &&
      detail::abf_satisfied(t, t.initial_bits)) {
    QsgBuilder b;
    b.edge("Trap", "Trap");
    Qsg g = b.finish(1, "Trap", cost_of(CostKind::Sup), 1);
    g.threshold = Rational(0);
    return g;
  }

  QsgBuilder b;
  const std::string alpha = "alpha";
  const std::array<std::pair<bool, int>, 4> members = {
      {{false, 1}, {false, 2}, {true, 1}, {true, 2}}};

  // Four finals per variable plus the turn marker.
  for (const auto& v : t.variables)
    for (auto [pos, copy] : members) b.make_final(detail::ver_name(v, pos, copy));
  b.make_final(alpha);

  // Geq2 gadgets: one triplet per omitted member of Ver(v). Runner commits
  // two picks before reaching a final, so Saboteur has two replies to mark
  // every member of the chosen triplet. That succeeds from any distribution
  // with units on two distinct Ver(v) finals (at most two holes remain) and
  // fails otherwise (Runner omits a marked member, leaving three holes).
  std::vector<std::string> geq2_entries;
  for (const auto& v : t.variables) {
    for (auto [skip_pos, skip_copy] : members) {
      const std::string base = "Geq2(" + v + ").skip." +
                               (skip_pos ? "pos" : "neg") +
                               std::to_string(skip_copy);
      b.edge(base + ".1", base + ".2", true);
      for (auto [pos, copy] : members)
        if (pos != skip_pos || copy != skip_copy)
          b.edge(base + ".2", detail::ver_name(v, pos, copy), true);
      geq2_entries.push_back(base + ".1");
    }
  }

  // Check gadgets: one vertex per mixed pair (negative copy, positive copy).
  // Saboteur has a single reply before Runner picks a member, enough to mark
  // the one hole a full polarity pair leaves, never enough for the two holes
  // a split distribution leaves in the opposite mixed pair.
  for (const auto& v : t.variables)
    for (int i : {1, 2})
      for (int j : {1, 2}) {
        const std::string p = detail::check_name(v, i, j);
        b.edge(p, detail::ver_name(v, false, i), true);
        b.edge(p, detail::ver_name(v, true, j), true);
      }

  // Core vertices and their label sets: which variables' Check gadgets are
  // entered from the vertex and whether the alpha edge is present. Every
  // core vertex also gets an entry edge to all Geq2 gadgets.
  struct CoreLabel {
    std::string name;
    bool alpha;
    std::vector<uint32_t> check;
  };
  std::vector<uint32_t> all_vars(n);
  for (std::size_t i = 0; i < n; ++i) all_vars[i] = static_cast<uint32_t>(i);
  std::vector<uint32_t> disprover_vars(all_vars.begin() +
                                           static_cast<std::ptrdiff_t>(t.prover_count),
                                       all_vars.end());
  auto all_but = [&all_vars](uint32_t x) {
    std::vector<uint32_t> out;
    for (uint32_t v : all_vars)
      if (v != x) out.push_back(v);
    return out;
  };

  std::vector<CoreLabel> core;
  core.push_back({"Play", true, all_vars});
  core.push_back({"Choose", false, all_vars});
  core.push_back({"Verif", true, all_vars});
  // While Saboteur flips one of his own variables its Check gadgets must not
  // be reachable; he may pick any prover variable, so none are checked here.
  core.push_back({"Set.1", true, disprover_vars});
  core.push_back({"Set.2", true, all_vars});

  // Valuation loop. Runner announces Disprover's assignment by walking
  // through Set(y.polarity); Saboteur's two replies move y's pair, and the
  // two polarity finals at stage 2 verify the new value is in place.
  for (std::size_t yi = t.prover_count; yi < n; ++yi) {
    const std::string& y = t.variables[yi];
    for (bool pol : {false, true}) {
      const std::string s1 = detail::set_name(y, pol, 1);
      const std::string s2 = detail::set_name(y, pol, 2);
      core.push_back({s1, true, all_but(static_cast<uint32_t>(yi))});
      core.push_back({s2, true, all_vars});
      b.edge("Play", s1, true);
      b.edge(s1, s2, true);
      b.edge(s2, detail::ver_name(y, pol, 1), true);
      b.edge(s2, detail::ver_name(y, pol, 2), true);
      b.edge(s2, "Set.1", true);
    }
  }
  b.edge("Set.1", "Set.2", true);
  b.edge("Set.2", "Choose", true);
  // The only non-safe edges: Saboteur steers by parking the alpha unit on
  // the branch Runner must not take.
  b.edge("Choose", "Play", false);
  b.edge("Choose", "Verif", false);

  // Clause chains: each suffix vertex offers the head literal's final on a
  // safe edge and the rest of the clause on a non-safe one. Saboteur's lone
  // free unit can mark false heads or block the rest edge under a true head,
  // but cannot cover the last literal of an all-false clause.
  for (std::size_t ci = 0; ci < instance.cnf.size(); ++ci) {
    const auto& clause = instance.cnf[ci];
    const std::string clause_base = "Clause." + std::to_string(ci + 1);
    std::string at = clause_base;
    core.push_back({at, false, all_vars});
    b.edge("Verif", at, true);
    for (std::size_t j = 0; j + 1 < clause.size(); ++j) {
      b.edge(at, detail::ver_name(clause[j].variable, clause[j].positive, 1), true);
      if (j + 2 == clause.size()) {
        b.edge(at, detail::ver_name(clause[j + 1].variable, clause[j + 1].positive, 1),
               false);
      } else {
        const std::string next = clause_base + ".suffix." + std::to_string(j + 2);
        core.push_back({next, false, all_vars});
        b.edge(at, next, false);
        at = next;
      }
    }
  }

  // Startup chain: Saboteur receives one reply per crossed edge, exactly
  // enough to mark the 2N+1 finals of the initial configuration; the fan-out
  // vertex lets Runner enter any of them that was left clean.
  for (int64_t k = 0; k < budget; ++k)
    b.edge("Init." + std::to_string(k), "Init." + std::to_string(k + 1), true);
  const std::string fan = "Init." + std::to_string(budget);
  for (std::size_t vi = 0; vi < n; ++vi) {
    const bool val = (t.initial_bits >> vi) & 1;
    b.edge(fan, detail::ver_name(t.variables[vi], val, 1), true);
    b.edge(fan, detail::ver_name(t.variables[vi], val, 2), true);
  }
  b.edge(fan, alpha, true);
  b.edge(fan, instance.initial_player == AbfPlayer::Disprover ? "Play" : "Set.1",
         true);

  // Label edges.
  for (const auto& c : core) {
    if (c.alpha) b.edge(c.name, alpha, true);
    for (uint32_t x : c.check)
      for (int i : {1, 2})
        for (int j : {1, 2})
          b.edge(c.name, detail::check_name(t.variables[x], i, j), true);
    for (const auto& entry : geq2_entries) b.edge(c.name, entry, true);
  }

  Qsg g = b.finish(budget, "Init.0", cost_of(CostKind::Sup), 1);
  g.threshold = Rational(0);
  assert(g.vertices.size() <= 30 * (n + literal_count));
  ValidationReport rep = validate(g);
  if (!rep.ok())
    throw QsgError("internal construction error: " + rep.errors.front());
  return g;
}

namespace detail {

// Returns a name not yet in `taken`, registering it.
inline std::string fresh_name(std::set<std::string>& taken, std::string name) {
  while (taken.count(name)) name += '_';
  taken.insert(name);
  return name;
}

}  // namespace detail

// Removes the extended features of a safety game, preserving the winner and
// the budget. Safe edges are replaced first: each becomes B+1 parallel relay
// vertices, every relay offering a fresh final as an escape, so blocking all
// escapes costs more than the whole budget. Then every final vertex v
// (original or just introduced) is replaced in place: v keeps its incoming
// edges and becomes the gadget entry, its outgoing edges are dropped (play
// never leaves a final), and two marker vertices lead into a clique of B+1
// vertices with self-loops. With the unit for "v was marked" on the (v, c1)
// edge, Runner entering v dies exactly when Saboteur can load (v, c2) as
// well, matching arrival at a marked final.
//
// Known limit: killing at a marked final takes two simultaneous units (the
// mark plus the reactive load on c2), so with budget exactly 1 a mark has no
// bite in the output. The winner is preserved for budget 0, budget >= 2, and
// budget-1 games whose verdict does not rest on marking a final.
inline Qsg espr_to_spr(const Qsg& game) {
  {
    ValidationReport rep = validate(game);
    if (!rep.ok()) throw QsgError("game does not validate: " + rep.errors.front());
  }
  if (game.granularity != 1)
    throw QsgError("the reduction requires move granularity 1");
  if (game.cost.kind != CostKind::Sup)
    throw QsgError("the reduction expects the Sup cost");

  // A marked initial final is decided before the first move. The marker
  // gadget cannot express that: its kill needs Saboteur's reply to a pick
  // entering the final, and no pick ever enters the starting vertex. Emit a
  // canonical two-vertex loss instead.
  if (game.is_extended() && game.final_vertex[game.initial] &&
      game.delta0_final[game.initial] > 0) {
    QsgBuilder trap;
    trap.edge("Trap.1", "Trap.2");
    trap.edge("Trap.2", "Trap.1");
    Qsg out = trap.finish(1, "Trap.1", cost_of(CostKind::Sup), 1);
    out.threshold = game.threshold;
    return out;
  }

  const int64_t B = game.budget;
  Qsg out;
  if (!game.is_extended()) {
    out = game;
  } else {
    std::set<std::string> taken(game.vertices.begin(), game.vertices.end());
    QsgBuilder b;
    for (const auto& v : game.vertices) b.vertex(v);

    // name and initial mark of every final to be replaced in the second pass
    std::vector<std::pair<std::string, int64_t>> finals;
    for (std::size_t v = 0; v < game.vertices.size(); ++v)
      if (game.final_vertex[v]) finals.emplace_back(game.vertices[v], game.delta0_final[v]);

    for (std::size_t e = 0; e < game.edges.size(); ++e) {
      const std::string& u = game.vertices[game.edges[e].first];
      const std::string& w = game.vertices[game.edges[e].second];
      if (game.final_vertex[game.edges[e].first]) continue;
      if (!game.safe_edge[e]) {
        b.edge(u, w, false, game.delta0_edge[e]);
        continue;
      }
      const std::string base = "Safe(" + u + "->" + w + ")";
      for (int64_t i = 1; i <= B + 1; ++i) {
        const std::string relay =
            detail::fresh_name(taken, base + ".e" + std::to_string(i));
        const std::string escape =
            detail::fresh_name(taken, base + ".f" + std::to_string(i));
        b.edge(u, relay);
        b.edge(relay, escape);
        b.edge(relay, w);
        finals.emplace_back(escape, 0);
      }
    }

    for (const auto& [v, mark] : finals) {
      const std::string c1 = detail::fresh_name(taken, v + ".c1");
      const std::string c2 = detail::fresh_name(taken, v + ".c2");
      b.edge(v, c1, false, mark);
      b.edge(v, c2);
      std::vector<std::string> ring;
      for (int64_t i = 1; i <= B + 1; ++i)
        ring.push_back(detail::fresh_name(taken, v + ".a" + std::to_string(i)));
      for (const auto& r : ring) {
        b.edge(c1, r);
        b.edge(c2, r);
      }
      // Self-loops included: each clique vertex needs out-degree above B.
      for (const auto& r1 : ring)
        for (const auto& r2 : ring) b.edge(r1, r2);
    }

    out = b.finish(B, game.vertices[game.initial], cost_of(CostKind::Sup), 1);
    out.threshold = game.threshold;
  }

  if (out.budget >= static_cast<int64_t>(out.edges.size()))
    throw QsgError("the reduction needs the budget below the edge count");
  ValidationReport rep = validate(out);
  if (!rep.ok())
    throw QsgError("internal construction error: " + rep.errors.front());
  return out;
}

// Turns a plain safety game (Sup, threshold 0, empty initial distribution)
// into a LimSup threshold-0 game with budget B' = |E|. The original arena is
// kept; whenever Runner is blocked everywhere he exits through an x vertex
// and the t/s grid, crossing at most one positive edge while Saboteur needs
// B'+1 replies to block all grid rows, and re-enters the original game at an
// e vertex. Runner keeps the limit at 0 exactly when he wins the input game.
inline Qsg spr_to_limsup(const Qsg& game) {
  {
    ValidationReport rep = validate(game);
    if (!rep.ok()) throw QsgError("game does not validate: " + rep.errors.front());
  }
  if (game.is_extended())
    throw QsgError("the reduction expects a plain game");
  if (game.cost.kind != CostKind::Sup)
    throw QsgError("the reduction expects the Sup cost");
  if (game.granularity != 1)
    throw QsgError("the reduction requires move granularity 1");
  for (int64_t d : game.delta0_edge)
    if (d != 0)
      throw QsgError("the reduction needs an empty initial distribution");
  const int64_t B = game.budget;
  const int64_t Bp = static_cast<int64_t>(game.edges.size());
  if (B >= Bp)
    throw QsgError("the reduction needs the budget below the edge count");

  // With no budget the input is decided before play (every crossing stays
  // clean, Runner wins unconditionally). The grid gadget needs budget at
  // least 1: its exit fan from each s[i][1] has width B+1, and a width-1 fan
  // is coverable by a single reactive unit out of the B' = |E| the output
  // game hands Saboteur. Emit a canonical Runner-won loop instead.
  if (B == 0) {
    QsgBuilder live;
    live.edge("Live", "Live");
    Qsg out = live.finish(0, "Live", cost_of(CostKind::LimSup), 1);
    out.threshold = Rational(0);
    return out;
  }

  std::set<std::string> taken(game.vertices.begin(), game.vertices.end());
  auto fresh = [&taken](const std::string& name) {
    return detail::fresh_name(taken, name);
  };
  const std::string t1 = fresh("t1");
  const std::string t2 = fresh("t2");
  std::vector<std::string> ev, fv, xv;
  for (int64_t m = 1; m <= B + 1; ++m) ev.push_back(fresh("e" + std::to_string(m)));
  for (int64_t k = 1; k <= B; ++k) fv.push_back(fresh("f" + std::to_string(k)));
  for (int64_t m = B + 1; m <= Bp; ++m) xv.push_back(fresh("x" + std::to_string(m)));
  std::vector<std::vector<std::string>> sv(static_cast<std::size_t>(Bp + 1));
  for (int64_t i = 1; i <= Bp + 1; ++i)
    for (int64_t j = 1; j <= Bp; ++j)
      sv[static_cast<std::size_t>(i - 1)].push_back(
          fresh("s[" + std::to_string(i) + "][" + std::to_string(j) + "]"));

  QsgBuilder b;
  for (const auto& v : game.vertices) b.vertex(v);
  for (const auto& e : game.edges)
    b.edge(game.vertices[e.first], game.vertices[e.second]);
  for (const auto& e : ev)
    for (const auto& f : fv) b.edge(e, f);
  for (int64_t k = 1; k <= B; ++k) {
    b.edge(fv[static_cast<std::size_t>(k - 1)], ev[static_cast<std::size_t>(k - 1)]);
    b.edge(fv[static_cast<std::size_t>(k - 1)], ev[static_cast<std::size_t>(k)]);
  }
  for (const auto& x : xv) {
    b.edge(x, t1);
    b.edge(x, t2);
  }
  for (const auto& t : {t1, t2})
    for (int64_t i = 1; i <= Bp + 1; ++i)
      b.edge(t, sv[static_cast<std::size_t>(i - 1)].back());
  for (int64_t j = 2; j <= Bp; ++j)
    for (int64_t i = 1; i <= Bp + 1; ++i)
      for (int64_t ip = 1; ip <= Bp + 1; ++ip)
        b.edge(sv[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)],
               sv[static_cast<std::size_t>(ip - 1)][static_cast<std::size_t>(j - 2)]);
  for (int64_t i = 1; i <= Bp + 1; ++i)
    for (const auto& e : ev)
      b.edge(sv[static_cast<std::size_t>(i - 1)].front(), e);
  for (const auto& e : ev) {
    for (uint32_t k = game.out_lo(game.initial); k < game.out_hi(game.initial); ++k)
      b.edge(e, game.vertices[game.edges[k].second]);
    for (const auto& x : xv) b.edge(e, x);
  }
  for (const auto& u : game.vertices)
    for (const auto& x : xv) b.edge(u, x);

  Qsg out = b.finish(Bp, t1, cost_of(CostKind::LimSup), 1);
  out.threshold = Rational(0);
  assert(static_cast<int64_t>(out.vertices.size()) ==
         static_cast<int64_t>(game.vertices.size()) + (Bp + 1) * Bp + (Bp - B) + 2 +
             B + (B + 1));
  ValidationReport rep = validate(out);
  if (!rep.ok())
    throw QsgError("internal construction error: " + rep.errors.front());
  return out;
}

// Replaces the cost function, keeping the arena, budget, granularity and
// threshold. The lambda argument is used only when kind is Disc; the caller
// keeps responsibility for its range, which validate() checks.
inline Qsg swap_cost(const Qsg& game, CostKind kind,
                     const Rational& lambda = Rational(1, 2)) {
  Qsg out = game;
  out.cost = kind == CostKind::Disc ? cost_disc(lambda) : cost_of(kind);
  return out;
}

}  // namespace qsg
