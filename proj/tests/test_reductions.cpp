#include <catch2/catch_amalgamated.hpp>

#include "qsg/reductions.hpp"
#include "qsg/solve.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace qsg;

namespace {

AbfLiteral lit(std::string v) { return AbfLiteral{std::move(v), true}; }
AbfLiteral neg(std::string v) { return AbfLiteral{std::move(v), false}; }

// The worked four-clause formula: (A or not C) and (C or D) and (C or not D)
// and (B or not B), equivalent to A and C.
std::vector<std::vector<AbfLiteral>> worked_cnf() {
  return {{lit("A"), neg("C")},
          {lit("C"), lit("D")},
          {lit("C"), neg("D")},
          {lit("B"), neg("B")}};
}

struct GameView {
  const Qsg& g;

  uint32_t id(const std::string& name) const {
    for (uint32_t v = 0; v < g.vertices.size(); ++v)
      if (g.vertices[v] == name) return v;
    FAIL("missing vertex '" << name << "'");
    return UINT32_MAX;
  }
  bool has_vertex(const std::string& name) const {
    for (const auto& v : g.vertices)
      if (v == name) return true;
    return false;
  }
  // -1: edge absent, 0: non-safe edge, 1: safe edge
  int edge_kind(const std::string& a, const std::string& b) const {
    uint32_t e = g.edge_index(id(a), id(b));
    if (e == UINT32_MAX) return -1;
    return g.is_safe(e) ? 1 : 0;
  }
};

Qsg simple_abf_game(std::vector<std::string> prover, std::vector<std::string> disprover,
                    std::vector<std::vector<AbfLiteral>> cnf,
                    std::vector<std::string> val, AbfPlayer first) {
  AbfInstance inst;
  inst.prover_vars = std::move(prover);
  inst.disprover_vars = std::move(disprover);
  inst.cnf = std::move(cnf);
  inst.initial_valuation = std::move(val);
  inst.initial_player = first;
  return abf_to_espr(inst);
}

}  // namespace

TEST_CASE("solve_abf decides the worked formula") {
  AbfInstance inst;
  inst.prover_vars = {"A", "B"};
  inst.disprover_vars = {"C", "D"};
  inst.cnf = worked_cnf();

  inst.initial_valuation = {"B", "C", "D"};
  inst.initial_player = AbfPlayer::Prover;
  AbfSolution from_prover = solve_abf(inst);
  CHECK(from_prover.winner == AbfPlayer::Prover);

  inst.initial_valuation = {"C", "D"};
  inst.initial_player = AbfPlayer::Disprover;
  AbfSolution from_disprover = solve_abf(inst);
  CHECK(from_disprover.winner == AbfPlayer::Disprover);

  SECTION("stored prover moves make progress toward a satisfying valuation") {
    // Follow the strategy from the Prover-won configuration; it must hit a
    // satisfying valuation (A and C here) within the configuration count.
    AbfConfig c{{"B", "C", "D"}, AbfPlayer::Prover};
    std::set<std::string> val(c.valuation.begin(), c.valuation.end());
    bool satisfied = false;
    for (int step = 0; step < 128 && !satisfied; ++step) {
      if (val.count("A") && val.count("C")) {
        satisfied = true;
        break;
      }
      AbfConfig cur{{val.begin(), val.end()}, c.to_move};
      REQUIRE(from_prover.prover_wins_at(cur));
      if (c.to_move == AbfPlayer::Prover) {
        auto m = from_prover.move_at(cur);
        REQUIRE(m.has_value());
        if (!m->pass) {
          if (!val.erase(m->variable)) val.insert(m->variable);
        }
      } else {
        // Let Disprover resist with his own stored move when one exists,
        // otherwise pass; Prover must win regardless.
        auto m = from_prover.move_at(cur);
        if (m && !m->pass) {
          if (!val.erase(m->variable)) val.insert(m->variable);
        }
      }
      c.to_move = c.to_move == AbfPlayer::Prover ? AbfPlayer::Disprover
                                                 : AbfPlayer::Prover;
    }
    CHECK(satisfied);
  }

  SECTION("disprover moves stay outside the prover attractor") {
    const std::size_t n = from_disprover.variables.size();
    for (std::size_t bits = 0; bits < (std::size_t(1) << n); ++bits) {
      AbfConfig c;
      c.to_move = AbfPlayer::Disprover;
      for (std::size_t v = 0; v < n; ++v)
        if (bits & (std::size_t(1) << v)) c.valuation.push_back(from_disprover.variables[v]);
      if (from_disprover.prover_wins_at(c)) continue;
      auto m = from_disprover.move_at(c);
      REQUIRE(m.has_value());
      AbfConfig next = c;
      next.to_move = AbfPlayer::Prover;
      if (!m->pass) {
        auto it = std::find(next.valuation.begin(), next.valuation.end(), m->variable);
        if (it == next.valuation.end())
          next.valuation.push_back(m->variable);
        else
          next.valuation.erase(it);
      }
      CHECK_FALSE(from_disprover.prover_wins_at(next));
    }
  }
}

TEST_CASE("a lone tautological clause gives Prover every configuration") {
  AbfInstance inst;
  inst.prover_vars = {"B"};
  inst.cnf = {{lit("B"), neg("B")}};
  AbfSolution s = solve_abf(inst);
  CHECK(s.winner == AbfPlayer::Prover);
  for (uint8_t w : s.prover_wins) CHECK(w == 1);
}

TEST_CASE("adding clauses never helps Prover") {
  std::mt19937 rng(20260816);
  auto random_literal = [&rng](const std::vector<std::string>& vars) {
    return AbfLiteral{vars[rng() % vars.size()], (rng() & 1) != 0};
  };
  for (int trial = 0; trial < 120; ++trial) {
    std::vector<std::string> vars = {"P", "Q", "R"};
    AbfInstance inst;
    inst.prover_vars = {"P"};
    inst.disprover_vars = {"Q", "R"};
    int clause_count = 1 + static_cast<int>(rng() % 3);
    for (int c = 0; c < clause_count; ++c) {
      std::vector<AbfLiteral> clause;
      int len = 1 + static_cast<int>(rng() % 3);
      for (int l = 0; l < len; ++l) clause.push_back(random_literal(vars));
      inst.cnf.push_back(clause);
    }
    for (const auto& v : vars)
      if (rng() & 1) inst.initial_valuation.push_back(v);
    inst.initial_player = (rng() & 1) ? AbfPlayer::Prover : AbfPlayer::Disprover;

    AbfSolution before = solve_abf(inst);
    std::vector<AbfLiteral> extra;
    int len = 1 + static_cast<int>(rng() % 3);
    for (int l = 0; l < len; ++l) extra.push_back(random_literal(vars));
    inst.cnf.push_back(extra);
    AbfSolution after = solve_abf(inst);
    if (before.winner == AbfPlayer::Disprover)
      CHECK(after.winner == AbfPlayer::Disprover);
  }
}

TEST_CASE("formula game compilation shapes the one-variable instance") {
  // One Prover variable, no Disprover variables, a tautological clause so a
  // formula exists; Prover starts, so the full arena is built.
  Qsg g = simple_abf_game({"X"}, {}, {{lit("X"), neg("X")}}, {}, AbfPlayer::Prover);
  CHECK(g.budget == 3);
  CHECK(g.granularity == 1);
  CHECK(g.cost.kind == CostKind::Sup);
  CHECK(g.is_extended());
  int finals = 0;
  for (char f : g.final_vertex) finals += f;
  CHECK(finals == 5);  // four polarity finals plus alpha

  GameView v{g};
  CHECK(g.vertices[g.initial] == "Init.0");
  CHECK(v.has_vertex("Init.3"));
  CHECK_FALSE(v.has_vertex("Init.4"));
  // X starts false, Prover starts: the fan-out marks the negative pair and
  // alpha and exits to Set.1.
  CHECK(v.edge_kind("Init.3", "Ver(X).neg.1") == 1);
  CHECK(v.edge_kind("Init.3", "Ver(X).neg.2") == 1);
  CHECK(v.edge_kind("Init.3", "Ver(X).pos.1") == -1);
  CHECK(v.edge_kind("Init.3", "alpha") == 1);
  CHECK(v.edge_kind("Init.3", "Play") == -1);
  CHECK(v.edge_kind("Init.3", "Set.1") == 1);
  CHECK(v.edge_kind("Choose", "Play") == 0);
  CHECK(v.edge_kind("Choose", "Verif") == 0);
  // No Disprover variables: Play has no announcement gadgets.
  CHECK_FALSE(v.has_vertex("Set(X.true).1"));
  ValidationReport rep = validate(g);
  CHECK(rep.ok());
}

TEST_CASE("formula game compilation matches the drawn core") {
  // The worked formula with the roles as drawn: Prover owns C and D,
  // Disprover owns A and B.
  AbfInstance inst;
  inst.prover_vars = {"C", "D"};
  inst.disprover_vars = {"A", "B"};
  inst.cnf = worked_cnf();
  inst.initial_valuation = {"B", "C", "D"};
  inst.initial_player = AbfPlayer::Disprover;
  Qsg g = abf_to_espr(inst);
  GameView v{g};

  CHECK(g.budget == 9);
  int finals = 0;
  for (char f : g.final_vertex) finals += f;
  CHECK(finals == 17);  // 4 per variable plus alpha

  // Announcement gadgets exist exactly for Disprover's variables.
  for (const std::string& y : {"A", "B"}) {
    for (const std::string& pol : {"false", "true"}) {
      const std::string s1 = "Set(" + y + "." + pol + ").1";
      const std::string s2 = "Set(" + y + "." + pol + ").2";
      CHECK(v.edge_kind("Play", s1) == 1);
      CHECK(v.edge_kind(s1, s2) == 1);
      CHECK(v.edge_kind(s2, "Set.1") == 1);
    }
  }
  CHECK_FALSE(v.has_vertex("Set(C.true).1"));
  CHECK_FALSE(v.has_vertex("Set(D.false).1"));
  CHECK(v.edge_kind("Set(A.true).2", "Ver(A).pos.1") == 1);
  CHECK(v.edge_kind("Set(A.true).2", "Ver(A).pos.2") == 1);
  CHECK(v.edge_kind("Set(A.true).2", "Ver(A).neg.1") == -1);
  CHECK(v.edge_kind("Set(B.false).2", "Ver(B).neg.1") == 1);

  CHECK(v.edge_kind("Set.1", "Set.2") == 1);
  CHECK(v.edge_kind("Set.2", "Choose") == 1);
  CHECK(v.edge_kind("Choose", "Play") == 0);
  CHECK(v.edge_kind("Choose", "Verif") == 0);

  // Clause chains: safe edge to the head literal's first final, non-safe
  // edge to the rest.
  for (int i = 1; i <= 4; ++i)
    CHECK(v.edge_kind("Verif", "Clause." + std::to_string(i)) == 1);
  CHECK(v.edge_kind("Clause.1", "Ver(A).pos.1") == 1);
  CHECK(v.edge_kind("Clause.1", "Ver(C).neg.1") == 0);
  CHECK(v.edge_kind("Clause.2", "Ver(C).pos.1") == 1);
  CHECK(v.edge_kind("Clause.2", "Ver(D).pos.1") == 0);
  CHECK(v.edge_kind("Clause.3", "Ver(D).neg.1") == 0);
  CHECK(v.edge_kind("Clause.4", "Ver(B).pos.1") == 1);
  CHECK(v.edge_kind("Clause.4", "Ver(B).neg.1") == 0);
  CHECK_FALSE(v.has_vertex("Clause.1.suffix.2"));  // all clauses are binary

  // Exactly the Choose pair and one descent edge per binary clause are
  // non-safe.
  int nonsafe = 0;
  for (char s : g.safe_edge) nonsafe += s ? 0 : 1;
  CHECK(nonsafe == 6);

  // Label sets.
  CHECK(v.edge_kind("Play", "alpha") == 1);
  CHECK(v.edge_kind("Verif", "alpha") == 1);
  CHECK(v.edge_kind("Choose", "alpha") == -1);
  CHECK(v.edge_kind("Clause.1", "alpha") == -1);
  CHECK(v.edge_kind("Set.1", "alpha") == 1);
  // Set.1 checks only Disprover's variables (Saboteur may be mid-flip on his
  // own); the announcement stages skip the announced variable.
  CHECK(v.edge_kind("Set.1", "Check(A).neg1.pos1") == 1);
  CHECK(v.edge_kind("Set.1", "Check(B).neg2.pos2") == 1);
  CHECK(v.edge_kind("Set.1", "Check(C).neg1.pos1") == -1);
  CHECK(v.edge_kind("Set.1", "Check(D).neg1.pos1") == -1);
  CHECK(v.edge_kind("Set.2", "Check(C).neg1.pos1") == 1);
  CHECK(v.edge_kind("Set(A.true).1", "Check(A).neg1.pos1") == -1);
  CHECK(v.edge_kind("Set(A.true).1", "Check(B).neg1.pos1") == 1);
  CHECK(v.edge_kind("Set(A.true).1", "Check(C).neg2.pos1") == 1);
  CHECK(v.edge_kind("Set(A.true).2", "Check(A).neg1.pos1") == 1);
  CHECK(v.edge_kind("Clause.1", "Check(C).neg1.pos2") == 1);

  // Condition-(i) entries come from core vertices only.
  CHECK(v.edge_kind("Play", "Geq2(C).skip.pos2.1") == 1);
  CHECK(v.edge_kind("Choose", "Geq2(A).skip.neg1.1") == 1);
  CHECK(v.edge_kind("Clause.1", "Geq2(A).skip.neg1.1") == 1);
  CHECK(v.edge_kind("Init.9", "Geq2(A).skip.neg1.1") == -1);
  CHECK(v.edge_kind("Check(A).neg1.pos1", "Geq2(A).skip.neg1.1") == -1);
  CHECK(g.out_degree(v.id("alpha")) == 0);

  // Gadget internals.
  CHECK(v.edge_kind("Geq2(A).skip.neg1.1", "Geq2(A).skip.neg1.2") == 1);
  CHECK(v.edge_kind("Geq2(A).skip.neg1.2", "Ver(A).neg.2") == 1);
  CHECK(v.edge_kind("Geq2(A).skip.neg1.2", "Ver(A).pos.1") == 1);
  CHECK(v.edge_kind("Geq2(A).skip.neg1.2", "Ver(A).pos.2") == 1);
  CHECK(v.edge_kind("Geq2(A).skip.neg1.2", "Ver(A).neg.1") == -1);
  CHECK(v.edge_kind("Check(A).neg1.pos2", "Ver(A).neg.1") == 1);
  CHECK(v.edge_kind("Check(A).neg1.pos2", "Ver(A).pos.2") == 1);
  CHECK(g.out_degree(v.id("Check(A).neg1.pos2")) == 2);

  // Init chain: 2N+1 = 9 safe edges, fan-out marks the initial
  // configuration ({B, C, D} true, A false) and exits to Play.
  for (int k = 0; k < 9; ++k)
    CHECK(v.edge_kind("Init." + std::to_string(k), "Init." + std::to_string(k + 1)) == 1);
  CHECK(v.edge_kind("Init.9", "Ver(A).neg.1") == 1);
  CHECK(v.edge_kind("Init.9", "Ver(A).pos.1") == -1);
  CHECK(v.edge_kind("Init.9", "Ver(B).pos.2") == 1);
  CHECK(v.edge_kind("Init.9", "Ver(C).pos.1") == 1);
  CHECK(v.edge_kind("Init.9", "alpha") == 1);
  CHECK(v.edge_kind("Init.9", "Play") == 1);
  CHECK(v.edge_kind("Init.9", "Set.1") == -1);
}

TEST_CASE("three-literal clauses descend through a suffix vertex") {
  AbfInstance inst;
  inst.prover_vars = {"P"};
  inst.disprover_vars = {"Q"};
  inst.cnf = {{lit("P"), neg("Q"), lit("Q")}};
  inst.initial_player = AbfPlayer::Prover;
  Qsg g = abf_to_espr(inst);
  GameView v{g};
  CHECK(v.edge_kind("Clause.1", "Ver(P).pos.1") == 1);
  CHECK(v.edge_kind("Clause.1", "Clause.1.suffix.2") == 0);
  CHECK(v.edge_kind("Clause.1.suffix.2", "Ver(Q).neg.1") == 1);
  CHECK(v.edge_kind("Clause.1.suffix.2", "Ver(Q).pos.1") == 0);
  // Suffix vertices carry clause-vertex labels: checks but no alpha.
  CHECK(v.edge_kind("Clause.1.suffix.2", "alpha") == -1);
  CHECK(v.edge_kind("Clause.1.suffix.2", "Check(P).neg1.pos1") == 1);
  CHECK(v.edge_kind("Clause.1.suffix.2", "Geq2(Q).skip.pos1.1") == 1);
}

TEST_CASE("compilation size stays linear in the instance") {
  std::mt19937 rng(42);
  std::vector<std::string> vars = {"P", "Q", "R"};
  for (int trial = 0; trial < 40; ++trial) {
    AbfInstance inst;
    inst.prover_vars = {"P"};
    inst.disprover_vars = {"Q", "R"};
    std::size_t literal_count = 0;
    int clause_count = 1 + static_cast<int>(rng() % 3);
    for (int c = 0; c < clause_count; ++c) {
      // Distinct literals only; 2 or 3 per clause.
      std::vector<AbfLiteral> clause;
      std::vector<std::pair<int, bool>> picks;
      while (picks.size() < 2 + rng() % 2) {
        std::pair<int, bool> p{static_cast<int>(rng() % 3), (rng() & 1) != 0};
        if (std::find(picks.begin(), picks.end(), p) == picks.end()) picks.push_back(p);
      }
      for (auto [i, pos] : picks)
        clause.push_back(AbfLiteral{vars[static_cast<std::size_t>(i)], pos});
      literal_count += clause.size();
      inst.cnf.push_back(clause);
    }
    inst.initial_player = AbfPlayer::Prover;
    Qsg g = abf_to_espr(inst);
    CHECK(g.vertices.size() <= 30 * (vars.size() + literal_count));
    CHECK(validate(g).ok());
  }
}

TEST_CASE("initially satisfied formulas with Runner first compile to a short loss") {
  AbfInstance inst;
  inst.prover_vars = {"A"};
  inst.disprover_vars = {"B"};
  inst.cnf = {{lit("A"), lit("B")}};
  inst.initial_valuation = {"A"};
  inst.initial_player = AbfPlayer::Disprover;
  CHECK(solve_abf(inst).winner == AbfPlayer::Prover);
  Qsg g = abf_to_espr(inst);
  CHECK(g.vertices.size() == 1);
  CHECK_FALSE(solve_espr(g).runner_wins);
}

TEST_CASE("formula game compilation rejects unusable instances") {
  AbfInstance inst;
  inst.prover_vars = {"A"};
  inst.cnf = {{lit("A"), neg("A")}};
  CHECK_THROWS_WITH(abf_to_espr(inst, 2), Catch::Matchers::ContainsSubstring("granularity"));

  AbfInstance empty_cnf = inst;
  empty_cnf.cnf.clear();
  CHECK_THROWS_WITH(abf_to_espr(empty_cnf), Catch::Matchers::ContainsSubstring("clause"));

  AbfInstance singleton = inst;
  singleton.cnf = {{lit("A")}};
  CHECK_THROWS_WITH(abf_to_espr(singleton), Catch::Matchers::ContainsSubstring("two literals"));

  AbfInstance dup = inst;
  dup.cnf = {{lit("A"), lit("A")}};
  CHECK_THROWS_WITH(abf_to_espr(dup), Catch::Matchers::ContainsSubstring("duplicate literal"));

  AbfInstance bad_name;
  bad_name.prover_vars = {"A.b"};
  bad_name.cnf = {{lit("A.b"), neg("A.b")}};
  CHECK_THROWS_WITH(abf_to_espr(bad_name), Catch::Matchers::ContainsSubstring("letters"));

  AbfInstance unknown = inst;
  unknown.cnf = {{lit("A"), lit("Z")}};
  CHECK_THROWS_WITH(abf_to_espr(unknown), Catch::Matchers::ContainsSubstring("unknown variable"));

  AbfInstance dup_var;
  dup_var.prover_vars = {"A"};
  dup_var.disprover_vars = {"A"};
  dup_var.cnf = {{lit("A"), neg("A")}};
  CHECK_THROWS_WITH(solve_abf(dup_var), Catch::Matchers::ContainsSubstring("duplicate variable"));
}

TEST_CASE("compiled games decide like the formula game") {
  struct Case {
    std::vector<std::string> prover, disprover;
    std::vector<std::vector<AbfLiteral>> cnf;
    std::vector<std::string> val;
    AbfPlayer first;
  };
  // One-variable arenas stay tiny; the larger two-variable sweeps live in
  // the acceptance suite with their own time budget.
  std::vector<Case> cases = {
      // Tautology, Prover first: full arena, Saboteur passes and verifies.
      {{}, {"D"}, {{lit("D"), neg("D")}}, {}, AbfPlayer::Prover},
      // Tautology, Disprover first: the short-loss arena.
      {{}, {"D"}, {{lit("D"), neg("D")}}, {}, AbfPlayer::Disprover},
      {{"P"}, {}, {{lit("P"), neg("P")}}, {"P"}, AbfPlayer::Prover},
  };
  for (const auto& c : cases) {
    AbfInstance inst;
    inst.prover_vars = c.prover;
    inst.disprover_vars = c.disprover;
    inst.cnf = c.cnf;
    inst.initial_valuation = c.val;
    inst.initial_player = c.first;
    AbfSolution abf = solve_abf(inst);
    SafetyResult game = solve_espr(abf_to_espr(inst));
    INFO("first=" << abf_player_name(c.first) << " val size=" << c.val.size());
    CHECK(game.runner_wins == (abf.winner == AbfPlayer::Disprover));
  }
}

namespace {

struct ExtBuilder {
  QsgBuilder b;
  std::vector<std::string> finals;
  ExtBuilder& edge(const std::string& a, const std::string& b2, bool safe = false) {
    b.edge(a, b2, safe);
    return *this;
  }
  ExtBuilder& final_(const std::string& v) {
    b.make_final(v);
    finals.push_back(v);
    return *this;
  }
  Qsg finish(int64_t budget, const std::string& initial) {
    return b.finish(budget, initial, cost_of(CostKind::Sup), 1);
  }
};

}  // namespace

TEST_CASE("safety reduction is the identity on plain games") {
  QsgBuilder b;
  b.edge("a", "b");
  b.edge("b", "a");
  b.edge("b", "c");
  b.edge("c", "a");
  Qsg g = b.finish(2, "a", cost_of(CostKind::Sup), 1);
  Qsg r = espr_to_spr(g);
  CHECK(r.vertices == g.vertices);
  CHECK(r.edges == g.edges);
  CHECK(r.budget == g.budget);
  CHECK_FALSE(r.is_extended());
}

TEST_CASE("safety reduction gadget counts") {
  SECTION("one final, budget two: two markers and a three-clique") {
    ExtBuilder eb;
    eb.edge("a", "b").edge("b", "f").edge("b", "a").final_("f");
    Qsg g = eb.finish(2, "a");
    Qsg r = espr_to_spr(g);
    CHECK(r.vertices.size() == 3 + 2 + 3);
    GameView v{r};
    CHECK(v.edge_kind("f", "f.c1") == 0);
    CHECK(v.edge_kind("f", "f.c2") == 0);
    for (int i = 1; i <= 3; ++i) {
      CHECK(v.edge_kind("f.c1", "f.a" + std::to_string(i)) == 0);
      CHECK(v.edge_kind("f.c2", "f.a" + std::to_string(i)) == 0);
      for (int j = 1; j <= 3; ++j)
        CHECK(v.edge_kind("f.a" + std::to_string(i), "f.a" + std::to_string(j)) == 0);
    }
    CHECK_FALSE(r.is_extended());
    CHECK(r.budget == 2);
  }

  SECTION("a safe edge becomes B+1 relays with escape gadgets") {
    ExtBuilder eb;
    eb.edge("u", "w", true).edge("w", "u");
    Qsg g = eb.finish(1, "u");
    Qsg r = espr_to_spr(g);
    // 2 originals + 2 relays + 2 escapes, each escape expanding to 2 markers
    // and a 2-clique.
    CHECK(r.vertices.size() == 2 + 2 * 2 + 2 * (2 + 2));
    GameView v{r};
    CHECK(v.edge_kind("u", "Safe(u->w).e1") == 0);
    CHECK(v.edge_kind("Safe(u->w).e1", "Safe(u->w).f1") == 0);
    CHECK(v.edge_kind("Safe(u->w).e1", "w") == 0);
    CHECK(v.edge_kind("Safe(u->w).f1", "Safe(u->w).f1.c1") == 0);
    CHECK(v.edge_kind("u", "w") == -1);
  }

  SECTION("marked finals put the unit on the first marker edge") {
    ExtBuilder eb;
    eb.edge("a", "f").final_("f");
    Qsg g = eb.finish(1, "a");
    g.delta0_final[1] = 1;
    REQUIRE(validate(g).ok());
    Qsg r = espr_to_spr(g);
    GameView v{r};
    uint32_t e = r.edge_index(v.id("f"), v.id("f.c1"));
    REQUIRE(e != UINT32_MAX);
    CHECK(r.delta0_edge[e] == 1);
  }

  SECTION("final out-edges are dropped") {
    ExtBuilder eb;
    eb.edge("a", "f").edge("f", "a").final_("f");
    Qsg g = eb.finish(1, "a");
    Qsg r = espr_to_spr(g);
    GameView v{r};
    CHECK(v.edge_kind("f", "a") == -1);
    CHECK(v.edge_kind("f", "f.c1") == 0);
  }
}

TEST_CASE("safety reduction rejections") {
  {
    QsgBuilder b;
    b.edge("a", "a");
    Qsg g = b.finish(1, "a", cost_of(CostKind::Sup), 1);
    CHECK_THROWS_WITH(espr_to_spr(g),
                      Catch::Matchers::ContainsSubstring("below the edge count"));
  }
  {
    QsgBuilder b;
    b.edge("a", "a");
    b.edge("a", "b");
    b.edge("b", "a");
    Qsg g = b.finish(1, "a", cost_of(CostKind::Sup), 2);
    CHECK_THROWS_WITH(espr_to_spr(g), Catch::Matchers::ContainsSubstring("granularity"));
  }
  {
    QsgBuilder b;
    b.edge("a", "a");
    b.edge("a", "b");
    b.edge("b", "a");
    Qsg g = b.finish(1, "a", cost_of(CostKind::LimSup), 1);
    CHECK_THROWS_WITH(espr_to_spr(g), Catch::Matchers::ContainsSubstring("Sup cost"));
  }
}

TEST_CASE("safety reduction preserves the winner") {
  // Handcrafted extended games covering safe edges, finals, loops and
  // budgets 0..2; each is decided independently on both sides.
  std::vector<Qsg> fixtures;
  {
    ExtBuilder eb;  // immediate clean final
    eb.edge("s", "f", true).final_("f");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // one step of warning: Saboteur marks the only goal
    eb.edge("s", "m").edge("m", "f").final_("f");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // two goals, one reply: Runner dodges
    eb.edge("s", "p").edge("p", "f1").edge("p", "f2").final_("f1").final_("f2");
    fixtures.push_back(eb.finish(2, "s"));
  }
  {
    ExtBuilder eb;  // safe member edges: verdict at the pair vertex
    eb.edge("s", "p").edge("p", "f1", true).edge("p", "f2", true).final_("f1").final_(
        "f2");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // plain loop vs safe exit into a trap loop, no finals
    eb.edge("s", "a").edge("a", "s").edge("a", "c", true).edge("c", "c");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // loop vs plain exit, budget 1: Runner picks the clean side
    eb.edge("s", "a").edge("a", "s").edge("a", "f").final_("f");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // same arena, budget 2: Saboteur blocks loop and marks f
    eb.edge("s", "a").edge("a", "s").edge("a", "f").final_("f");
    fixtures.push_back(eb.finish(2, "s"));
  }
  {
    ExtBuilder eb;  // safe cycle: Runner survives forever without any final
    eb.edge("s", "a", true).edge("a", "s", true).edge("s", "x").edge("x", "s");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // one-way safe bridge into a trap loop
    eb.edge("s", "a", true).edge("a", "a");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // initial vertex is a final
    eb.edge("f", "f").final_("f");
    fixtures.push_back(eb.finish(0, "f"));
  }
  {
    ExtBuilder eb;  // budget 0: everything stays clean
    eb.edge("s", "m").edge("m", "f").final_("f");
    fixtures.push_back(eb.finish(0, "s"));
  }
  {
    ExtBuilder eb;  // two safe edges in a row ending in a trap loop
    eb.edge("s", "a", true).edge("a", "f", true).edge("f", "f");
    fixtures.push_back(eb.finish(1, "s"));
  }
  {
    ExtBuilder eb;  // final reachable only through Saboteur's favorite road
    eb.edge("s", "a").edge("a", "b").edge("b", "f").edge("b", "s").final_("f");
    fixtures.push_back(eb.finish(2, "s"));
  }

  int checked = 0;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const Qsg& g = fixtures[i];
    INFO("fixture " << i);
    bool espr = solve_espr(g).runner_wins;
    Qsg reduced = espr_to_spr(g);
    bool spr = solve_spr(reduced).runner_wins;
    CHECK(espr == spr);
    ++checked;
  }
  CHECK(checked == 13);
}

TEST_CASE("limit reduction counts and structure") {
  QsgBuilder b;
  b.edge("a", "b");
  b.edge("b", "c");
  b.edge("c", "a");
  Qsg g = b.finish(1, "a", cost_of(CostKind::Sup), 1);
  Qsg r = spr_to_limsup(g);

  CHECK(r.cost.kind == CostKind::LimSup);
  CHECK(r.budget == 3);
  CHECK(r.vertices[r.initial] == "t1");
  for (int64_t d : r.delta0_edge) CHECK(d == 0);

  // |V| + (B'+1)B' + (B'-B) + 2 + B + (B+1) with B = 1, B' = 3.
  CHECK(r.vertices.size() == 3 + 12 + 2 + 2 + 1 + 2);
  GameView v{r};
  int s_count = 0;
  for (const auto& name : r.vertices)
    if (name.rfind("s[", 0) == 0) ++s_count;
  CHECK(s_count == 12);

  // Every t reaches every s in the last column; every first-column s
  // reaches every e.
  for (const std::string& t : {"t1", "t2"})
    for (int i = 1; i <= 4; ++i)
      CHECK(v.edge_kind(t, "s[" + std::to_string(i) + "][3]") == 0);
  for (int i = 1; i <= 4; ++i)
    for (int m = 1; m <= 2; ++m)
      CHECK(v.edge_kind("s[" + std::to_string(i) + "][1]", "e" + std::to_string(m)) == 0);
  // Grid columns step down by one.
  CHECK(v.edge_kind("s[1][3]", "s[4][2]") == 0);
  CHECK(v.edge_kind("s[1][3]", "s[1][1]") == -1);
  // Entry vertices restart the original game from the initial vertex's
  // successors and also reach the exits.
  CHECK(v.edge_kind("e1", "b") == 0);
  CHECK(v.edge_kind("e1", "a") == -1);
  CHECK(v.edge_kind("e1", "x2") == 0);
  CHECK(v.edge_kind("e1", "f1") == 0);
  CHECK(v.edge_kind("f1", "e1") == 0);
  CHECK(v.edge_kind("f1", "e2") == 0);
  // Exits leave from every original vertex.
  for (const std::string& u : {"a", "b", "c"})
    for (const std::string& x : {"x2", "x3"}) CHECK(v.edge_kind(u, x) == 0);
  CHECK(v.edge_kind("x2", "t1") == 0);
  CHECK(v.edge_kind("x2", "t2") == 0);

  // A budget-0 input is decided before play and collapses to the canonical
  // Runner-won loop.
  QsgBuilder zb;
  zb.edge("p", "q");
  zb.edge("q", "p");
  Qsg zero = spr_to_limsup(zb.finish(0, "p", cost_of(CostKind::Sup), 1));
  CHECK(zero.vertices == std::vector<std::string>{"Live"});
  CHECK(zero.budget == 0);
  CHECK(zero.cost.kind == CostKind::LimSup);
}

TEST_CASE("limit reduction rejections") {
  {
    QsgBuilder b;
    b.edge("a", "a");
    Qsg g = b.finish(1, "a", cost_of(CostKind::Sup), 1);
    CHECK_THROWS_WITH(spr_to_limsup(g),
                      Catch::Matchers::ContainsSubstring("below the edge count"));
  }
  {
    QsgBuilder b;
    b.edge("a", "b");
    b.edge("b", "a");
    Qsg g = b.finish(1, "a", cost_of(CostKind::LimSup), 1);
    CHECK_THROWS_WITH(spr_to_limsup(g), Catch::Matchers::ContainsSubstring("Sup cost"));
  }
  {
    QsgBuilder b;
    b.edge("a", "b", false, 1);
    b.edge("b", "a");
    Qsg g = b.finish(1, "a", cost_of(CostKind::Sup), 1);
    CHECK_THROWS_WITH(spr_to_limsup(g),
                      Catch::Matchers::ContainsSubstring("initial distribution"));
  }
  {
    QsgBuilder b;
    b.edge("a", "b", true);
    b.edge("b", "a");
    Qsg g = b.finish(1, "a", cost_of(CostKind::Sup), 1);
    CHECK_THROWS_WITH(spr_to_limsup(g), Catch::Matchers::ContainsSubstring("plain game"));
  }
}

TEST_CASE("limit reduction preserves the threshold verdict") {
  std::vector<Qsg> fixtures;
  {
    QsgBuilder b;  // single loop, budget 0: decided before play, canonical path
    b.edge("a", "a");
    fixtures.push_back(b.finish(0, "a", cost_of(CostKind::Sup), 1));
  }
  {
    QsgBuilder b;  // forced two-cycle, budget 1: Saboteur blocks the road
    b.edge("a", "b");
    b.edge("b", "a");
    fixtures.push_back(b.finish(1, "a", cost_of(CostKind::Sup), 1));
  }
  {
    QsgBuilder b;  // chain into a trap loop: the loop edge gets marked
    b.edge("a", "b");
    b.edge("b", "b");
    fixtures.push_back(b.finish(1, "a", cost_of(CostKind::Sup), 1));
  }
  {
    QsgBuilder b;  // self-loop escape hatch beside a chain, budget 1
    b.edge("a", "a");
    b.edge("a", "b");
    b.edge("b", "b");
    fixtures.push_back(b.finish(1, "a", cost_of(CostKind::Sup), 1));
  }

  EncodeOptions opt;
  opt.state_cap = 20'000'000;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const Qsg& g = fixtures[i];
    INFO("fixture " << i);
    bool spr = solve_spr(g).runner_wins;
    Qsg reduced = spr_to_limsup(g);
    CHECK(threshold(reduced, Rational(0), opt) == spr);
  }
}

TEST_CASE("cost swapping keeps the arena") {
  QsgBuilder b;
  b.edge("a", "b");
  b.edge("b", "a");
  Qsg g = b.finish(1, "a", cost_of(CostKind::Sup), 1);

  Qsg disc = swap_cost(g, CostKind::Disc, Rational(1, 2));
  CHECK(disc.cost.kind == CostKind::Disc);
  CHECK(disc.cost.lambda == Rational(1, 2));
  CHECK(disc.vertices == g.vertices);
  CHECK(disc.edges == g.edges);
  CHECK(disc.budget == g.budget);

  Qsg avg = swap_cost(g, CostKind::Avg);
  CHECK(avg.cost.kind == CostKind::Avg);
  CHECK(validate(avg).ok());

  Qsg back = swap_cost(disc, CostKind::Sup);
  CHECK(back.cost.kind == CostKind::Sup);
}
