#include <catch2/catch_amalgamated.hpp>

#include "qsg/oracle.hpp"
#include "qsg/solve.hpp"
#include "qsg/static_games.hpp"

#include <random>
#include <set>

using namespace qsg;

namespace {

struct ArenaBuilder {
  std::vector<char> owner;
  std::vector<std::vector<std::pair<uint32_t, int32_t>>> out;

  uint32_t add(int own) {
    owner.push_back(static_cast<char>(own));
    out.emplace_back();
    return static_cast<uint32_t>(owner.size() - 1);
  }
  void edge(uint32_t from, uint32_t to, int32_t w) { out[from].push_back({to, w}); }
  WeightedGame finish(uint32_t initial) {
    WeightedGame g;
    g.owner = owner;
    g.initial = initial;
    g.succ_begin.push_back(0);
    for (const auto& v : out) {
      for (auto [s, w] : v) {
        g.succ.push_back(s);
        g.weight.push_back(w);
        g.max_weight = std::max(g.max_weight, w);
      }
      g.succ_begin.push_back(static_cast<uint32_t>(g.succ.size()));
    }
    return g;
  }
};

WeightedGame random_arena(std::mt19937& rng) {
  auto pick = [&](uint32_t bound) { return static_cast<uint32_t>(rng() % bound); };
  ArenaBuilder b;
  const uint32_t n_min = 1 + pick(3), n_max = 1 + pick(3);
  for (uint32_t i = 0; i < n_min; ++i) b.add(0);
  for (uint32_t i = 0; i < n_max; ++i) b.add(1);
  for (uint32_t s = 0; s < n_min; ++s) {
    const uint32_t deg = 1 + pick(3);
    for (uint32_t k = 0; k < deg; ++k) b.edge(s, n_min + pick(n_max), static_cast<int32_t>(pick(4)));
  }
  for (uint32_t s = 0; s < n_max; ++s) {
    const uint32_t deg = 1 + pick(3);
    for (uint32_t k = 0; k < deg; ++k) b.edge(n_min + s, pick(n_min), static_cast<int32_t>(pick(4)));
  }
  return b.finish(0);
}

// Replays the oracle's witness pair and scores the induced lasso.
Rational replay(const WeightedGame& g, const OracleReport& r, CostKind kind) {
  std::vector<int32_t> pos(g.state_count(), -1);
  std::vector<Rational> w;
  uint32_t s = g.initial;
  while (pos[s] < 0) {
    pos[s] = static_cast<int32_t>(w.size());
    const uint32_t t = g.owner[s] ? r.max_witness[s] : r.min_witness[s];
    REQUIRE(t >= g.lo(s));
    REQUIRE(t < g.hi(s));
    w.emplace_back(g.w(t));
    s = g.succ[t];
  }
  Lasso l;
  l.prefix.assign(w.begin(), w.begin() + pos[s]);
  l.cycle.assign(w.begin() + pos[s], w.end());
  return evaluate_lasso(cost_of(kind), l);
}

Qsg fig1(int64_t budget, Cost cost) {
  QsgBuilder b;
  b.edge("1", "2");
  b.edge("2", "1");
  b.edge("2", "3");
  b.edge("3", "1");
  return b.finish(budget, "1", cost);
}

constexpr CostKind k_undiscounted[] = {CostKind::Inf, CostKind::Sup, CostKind::LimInf,
                                       CostKind::LimSup, CostKind::Avg};

}  // namespace

TEST_CASE("oracle scores a forced play through the lasso closed forms") {
  // A single play: prefix weights 3, 1 and then a 2, 0 cycle forever.
  ArenaBuilder b;
  const uint32_t m0 = b.add(0), x0 = b.add(1), m1 = b.add(0), x1 = b.add(1);
  b.edge(m0, x0, 3);
  b.edge(x0, m1, 1);
  b.edge(m1, x1, 2);
  b.edge(x1, m1, 0);
  WeightedGame g = b.finish(m0);

  const std::pair<CostKind, Rational> expected[] = {
      {CostKind::Inf, Rational(0)},    {CostKind::Sup, Rational(3)},
      {CostKind::LimInf, Rational(0)}, {CostKind::LimSup, Rational(2)},
      {CostKind::Avg, Rational(1)},
  };
  for (const auto& [kind, value] : expected) {
    OracleReport r = oracle_value(g, kind);
    CHECK(r.agree);
    CHECK(r.value_maxmin == value);
    CHECK(r.value_minmax == value);
    CHECK(replay(g, r, kind) == value);
  }
}

TEST_CASE("oracle rejects discounted kinds, empty and deadlocked arenas") {
  CHECK_THROWS_AS(oracle_value(WeightedGame{}, CostKind::Sup), QsgError);

  ArenaBuilder b;
  const uint32_t m0 = b.add(0);
  b.add(1);  // no outgoing transition
  b.edge(m0, 1, 0);
  WeightedGame g = b.finish(m0);
  CHECK_THROWS_AS(oracle_value(g, CostKind::Sup), QsgError);

  ArenaBuilder c;
  const uint32_t s0 = c.add(0);
  c.edge(s0, s0, 1);
  CHECK_THROWS_AS(oracle_value(c.finish(s0), CostKind::Disc), QsgError);
}

TEST_CASE("enumeration keeps the lexicographically least witnesses") {
  // Min chooses between two transitions of equal value; the first must win.
  ArenaBuilder b;
  const uint32_t m0 = b.add(0), x0 = b.add(1), x1 = b.add(1);
  b.edge(m0, x0, 1);
  b.edge(m0, x1, 1);
  b.edge(x0, m0, 1);
  b.edge(x1, m0, 1);
  WeightedGame g = b.finish(m0);

  OracleReport r = oracle_value(g, CostKind::Sup);
  REQUIRE(r.agree);
  CHECK(r.value_maxmin == Rational(1));
  CHECK(r.min_witness[m0] == g.lo(m0));
  CHECK(r.max_witness[x0] == g.lo(x0));
  CHECK(r.max_witness[x1] == g.lo(x1));
}

TEST_CASE("enumeration and certified re-derivation agree with the solver") {
  std::mt19937 rng(20260816);
  OracleOptions certified_only;
  certified_only.pair_cap = 1;  // force the certified path even on tiny arenas
  for (int round = 0; round < 30; ++round) {
    WeightedGame g = random_arena(rng);
    for (CostKind kind : k_undiscounted) {
      const Rational solver_value = kind == CostKind::Avg
                                        ? value_mean_payoff(g).initial_value
                                        : value_qualitative(g, kind).initial_value;
      OracleReport listed = oracle_value(g, kind);
      OracleReport derived = oracle_value(g, kind, certified_only);
      INFO("round " << round << " kind " << cost_kind_name(kind));
      REQUIRE(listed.agree);
      REQUIRE(derived.agree);
      CHECK(listed.value_maxmin == solver_value);
      CHECK(derived.value_maxmin == solver_value);
      CHECK(replay(g, listed, kind) == solver_value);
      CHECK(replay(g, derived, kind) == solver_value);
    }
  }
}

TEST_CASE("oracle reproduces the solver on encoded games end to end") {
  for (CostKind kind : k_undiscounted) {
    Qsg g = fig1(1, cost_of(kind));
    SolveResult s = solve(g);
    OracleReport r = oracle_value(s.arena, kind);
    INFO(cost_kind_name(kind));
    REQUIRE(r.agree);
    CHECK(r.value_maxmin == s.initial_value);
  }

  // The mean value of the four-unit game is exactly 2.
  SolveResult s = solve(fig1(4, cost_of(CostKind::Avg)));
  REQUIRE(s.initial_value == Rational(2));
  OracleReport r = oracle_value(s.arena, CostKind::Avg);
  REQUIRE(r.agree);
  CHECK(r.value_maxmin == Rational(2));
  CHECK(r.value_minmax == Rational(2));
}

TEST_CASE("discounted oracle brackets the exact value") {
  // Granularity 2 freezes one unit on each edge of a 2-cycle: every round
  // costs exactly 1, so the discounted value at lambda 1/2 is 2, and the
  // horizon-10 interval is 2 - 2^-9 +- 2^-8 around the truncated sum.
  QsgBuilder b;
  b.edge("a", "b", false, 1);
  b.edge("b", "a", false, 1);
  Qsg g = b.finish(2, "a", cost_disc(Rational(1, 2)), 2);

  DiscountedInterval iv = oracle_discounted(g, Rational(1, 2), 10);
  CHECK(iv.lo == Rational(1021, 512));
  CHECK(iv.hi == Rational(1025, 512));
  CHECK(iv.lo <= Rational(2));
  CHECK(Rational(2) <= iv.hi);

  SolveResult s = solve(g);
  CHECK(s.initial_value == Rational(2));

  // Without a budget the game is free and the interval collapses to zero.
  QsgBuilder zb;
  zb.edge("a", "a");
  DiscountedInterval zero = oracle_discounted(zb.finish(0, "a", cost_disc(Rational(1, 2))),
                                              Rational(1, 2), 5);
  CHECK(zero.lo == Rational(0));
  CHECK(zero.hi == Rational(0));

  CHECK_THROWS_AS(oracle_discounted(g, Rational(1, 2), 0), QsgError);
  CHECK_THROWS_AS(oracle_discounted(g, Rational(3, 2), 4), QsgError);
}

TEST_CASE("discounted oracle intervals contain solver values on random games") {
  std::mt19937 rng(7);
  auto pick = [&](uint32_t bound) { return static_cast<uint32_t>(rng() % bound); };
  auto name = [](uint32_t v) { return "v" + std::to_string(v); };
  for (int round = 0; round < 12; ++round) {
    const uint32_t n = 2 + pick(2);
    std::set<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t v = 0; v < n; ++v) edges.insert({v, pick(n)});
    for (uint32_t extra = pick(3); extra-- > 0;) edges.insert({pick(n), pick(n)});
    const int64_t budget = 1 + pick(2);
    for (const Rational& lambda : {Rational(1, 4), Rational(1, 2)}) {
      QsgBuilder b;
      for (auto [from, to] : edges) b.edge(name(from), name(to));
      Qsg g = b.finish(budget, name(0), cost_disc(lambda));
      const Rational value = solve(g).initial_value;
      DiscountedInterval iv = oracle_discounted(g, lambda, 40);
      INFO("round " << round << " lambda " << lambda);
      CHECK(iv.lo <= value);
      CHECK(value <= iv.hi);
    }
  }
}

TEST_CASE("static oracle pins the standard examples") {
  QsgBuilder cyc;
  cyc.edge("a", "b");
  cyc.edge("b", "c");
  cyc.edge("c", "a");

  // No budget means no cost anywhere.
  CHECK(oracle_static(cyc.finish(0, "a", cost_of(CostKind::Inf))) == Rational(0));

  // Three units spread over a 3-cycle make every crossing cost at least 1.
  QsgBuilder cyc3;
  cyc3.edge("a", "b");
  cyc3.edge("b", "c");
  cyc3.edge("c", "a");
  CHECK(oracle_static(cyc3.finish(3, "a", cost_of(CostKind::Inf))) == Rational(1));

  // Best static split of four units across the two cycles of the toy game.
  Qsg avg = fig1(4, cost_of(CostKind::Avg));
  CHECK(oracle_static(avg) == Rational(4, 3));
  CHECK(static_value(avg).value == Rational(4, 3));
}

TEST_CASE("static oracle agrees with the static solver across kinds") {
  std::mt19937 rng(99);
  auto pick = [&](uint32_t bound) { return static_cast<uint32_t>(rng() % bound); };
  auto name = [](uint32_t v) { return "v" + std::to_string(v); };
  for (int round = 0; round < 20; ++round) {
    const uint32_t n = 2 + pick(3);
    std::set<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t v = 0; v < n; ++v) edges.insert({v, pick(n)});
    for (uint32_t extra = pick(4); extra-- > 0;) edges.insert({pick(n), pick(n)});
    const int64_t budget = pick(4);
    const Cost costs[] = {cost_of(CostKind::Inf),    cost_of(CostKind::Sup),
                          cost_of(CostKind::LimInf), cost_of(CostKind::LimSup),
                          cost_of(CostKind::Avg),    cost_disc(Rational(1, 2))};
    for (const Cost& cost : costs) {
      QsgBuilder b;
      for (auto [from, to] : edges) b.edge(name(from), name(to));
      Qsg g = b.finish(budget, name(0), cost);
      INFO("round " << round << " kind " << cost_kind_name(cost.kind));
      CHECK(oracle_static(g) == static_value(g).value);
    }
  }
}

TEST_CASE("static oracle honors its caps and preconditions") {
  QsgBuilder b;
  b.edge("a", "b");
  b.edge("b", "a");
  Qsg g = b.finish(1, "a", cost_of(CostKind::Sup));

  OracleOptions tight;
  tight.dist_cap = 2;  // C(2 + 1, 1) = 3 distributions needed
  try {
    oracle_static(g, tight);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.count() == BigInt(3));
  }

  QsgBuilder fb;
  fb.edge("a", "f");
  fb.edge("f", "f");
  fb.make_final("f");
  CHECK_THROWS_AS(oracle_static(fb.finish(1, "a", cost_of(CostKind::Sup))), QsgError);
}
