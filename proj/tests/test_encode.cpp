#include <catch2/catch_amalgamated.hpp>

#include "qsg/encode.hpp"

using namespace qsg;

namespace {

Qsg fig1(int64_t budget, Cost cost) {
  QsgBuilder b;
  b.edge("1", "2");
  b.edge("2", "1");
  b.edge("2", "3");
  b.edge("3", "1");
  return b.finish(budget, "1", cost);
}

Qsg two_cycle(int64_t budget, Cost cost) {
  QsgBuilder b;
  b.edge("a", "b");
  b.edge("b", "a");
  return b.finish(budget, "a", cost);
}

}  // namespace

TEST_CASE("encoding the four-edge cycle game reaches every configuration") {
  Qsg g = fig1(4, cost_of(CostKind::Avg));
  WeightedGame wg = encode(g);

  // 3 Min vertices + 4 Max edges, times C(4+4,4) distributions.
  REQUIRE(wg.state_count() == 490);
  REQUIRE(wg.dists.size() == 70);
  REQUIRE(wg.initial == 0);
  REQUIRE(wg.owner[wg.initial] == 0);
  REQUIRE(state_index_of(wg.payload[wg.initial]) == 0);

  // Vertex "2" has two out-edges; all its Min states must as well.
  for (uint32_t s = 0; s < wg.state_count(); ++s) {
    if (wg.is_min(s) && state_index_of(wg.payload[s]) == 1) REQUIRE(wg.hi(s) - wg.lo(s) == 2);
  }

  // Every transition carries the budget of the crossed edge at crossing time.
  for (uint32_t s = 0; s < wg.state_count(); ++s) {
    const uint32_t dist = state_dist_of(wg.payload[s]);
    for (uint32_t t = wg.lo(s); t < wg.hi(s); ++t) {
      const uint32_t e = wg.is_min(s) ? state_index_of(wg.payload[wg.succ[t]])
                                      : state_index_of(wg.payload[s]);
      REQUIRE(wg.w(t) == wg.dists[dist][e]);
      if (wg.is_min(s)) REQUIRE(state_dist_of(wg.payload[wg.succ[t]]) == dist);
    }
  }
  REQUIRE(wg.discount_mode == DiscountMode::per_half_step);
  REQUIRE(wg.max_weight == 4);
}

TEST_CASE("a zero budget freezes the distribution") {
  Qsg g = fig1(0, cost_of(CostKind::Sup));
  WeightedGame wg = encode(g);
  REQUIRE(wg.state_count() == 7);  // vertices + edges, a single empty distribution
  for (uint32_t t = 0; t < wg.transition_count(); ++t) REQUIRE(wg.w(t) == 0);
  for (uint32_t s = 0; s < wg.state_count(); ++s) {
    if (!wg.is_min(s)) REQUIRE(wg.hi(s) - wg.lo(s) == 1);  // identity move only
  }
}

TEST_CASE("Max states offer one move per redistribution, in lexicographic order") {
  Qsg g = two_cycle(1, cost_of(CostKind::Sup));
  WeightedGame wg = encode(g);
  // Distributions over two items with at most one unit: {0,0}, {0,1}, {1,0}.
  REQUIRE(wg.dists.size() == 3);
  for (uint32_t s = 0; s < wg.state_count(); ++s) {
    if (wg.is_min(s)) continue;
    const std::vector<int64_t>& d = wg.dists[state_dist_of(wg.payload[s])];
    auto moves = redistributions(d, g.budget, g.granularity);
    REQUIRE(wg.hi(s) - wg.lo(s) == moves.size());
    for (uint32_t t = wg.lo(s); t < wg.hi(s); ++t) {
      REQUIRE(wg.dists[state_dist_of(wg.payload[wg.succ[t]])] == moves[t - wg.lo(s)]);
      REQUIRE(state_index_of(wg.payload[wg.succ[t]]) == g.edges[state_index_of(wg.payload[s])].second);
    }
  }
}

TEST_CASE("Min out-degrees match the arena and states stay within the counting bound") {
  for (int64_t budget : {0, 1, 2}) {
    Qsg g = fig1(budget, cost_of(CostKind::LimSup));
    WeightedGame wg = encode(g);
    for (uint32_t s = 0; s < wg.state_count(); ++s) {
      if (!wg.is_min(s)) continue;
      const uint32_t v = state_index_of(wg.payload[s]);
      REQUIRE(wg.hi(s) - wg.lo(s) == g.out_degree(v));
    }
    BigInt bound = BigInt(g.vertex_count() + g.edge_count()) *
                   distribution_count(g.edge_count(), budget);
    REQUIRE(BigInt(wg.state_count()) <= bound);
  }
}

TEST_CASE("encoding is deterministic") {
  Qsg g = fig1(2, cost_of(CostKind::Inf));
  WeightedGame a = encode(g);
  WeightedGame b = encode(g);
  REQUIRE(a.owner == b.owner);
  REQUIRE(a.succ_begin == b.succ_begin);
  REQUIRE(a.succ == b.succ);
  REQUIRE(a.weight == b.weight);
  REQUIRE(a.payload == b.payload);
  REQUIRE(a.initial == b.initial);
}

TEST_CASE("the state cap aborts the encoding") {
  Qsg g = fig1(4, cost_of(CostKind::Avg));
  EncodeOptions opt;
  opt.state_cap = 10;
  try {
    encode(g, opt);
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    REQUIRE(e.count() == 11);
  }
}

TEST_CASE("invalid and extended games are rejected by encode") {
  QsgBuilder b;
  b.edge("a", "b");  // b deadlocks
  Qsg g = b.finish(1, "a", cost_of(CostKind::Sup));
  REQUIRE_THROWS_AS(encode(g), QsgError);

  QsgBuilder b2;
  b2.edge("a", "a", /*safe=*/true);
  Qsg g2 = b2.finish(1, "a", cost_of(CostKind::Sup));
  REQUIRE_THROWS_WITH(encode(g2), "extended games are encoded via the safety encoder");
}

TEST_CASE("discounted games carry weights on the Min half-step only") {
  Qsg g = fig1(3, cost_disc(Rational(1, 2)));
  WeightedGame wg = encode(g);
  REQUIRE(wg.discount_mode == DiscountMode::discounted_rounds);
  bool some_positive = false;
  for (uint32_t s = 0; s < wg.state_count(); ++s)
    for (uint32_t t = wg.lo(s); t < wg.hi(s); ++t) {
      if (wg.is_min(s))
        some_positive = some_positive || wg.w(t) > 0;
      else
        REQUIRE(wg.w(t) == 0);
    }
  REQUIRE(some_positive);
}

TEST_CASE("safety encoding sends loaded crossings to the bad sink") {
  QsgBuilder b;
  b.edge("a", "a", false, 1);
  Qsg g = b.finish(1, "a", cost_of(CostKind::Sup));
  SafetyGame sg = encode_safety(g);
  REQUIRE(sg.bad_state != UINT32_MAX);
  const WeightedGame& wg = sg.game;
  REQUIRE(wg.hi(wg.initial) - wg.lo(wg.initial) == 1);
  REQUIRE(wg.succ[wg.lo(wg.initial)] == sg.bad_state);
  // The bad sink absorbs.
  REQUIRE(wg.succ[wg.lo(sg.bad_state)] == sg.bad_state);
}

TEST_CASE("with no budget the bad sink never materializes") {
  QsgBuilder b;
  b.edge("a", "a");
  Qsg g = b.finish(0, "a", cost_of(CostKind::Sup));
  SafetyGame sg = encode_safety(g);
  REQUIRE(sg.bad_state == UINT32_MAX);
  REQUIRE(sg.win_state == UINT32_MAX);
  REQUIRE(sg.game.state_count() == 2);
}

TEST_CASE("arrival at a final vertex is settled before any redistribution") {
  QsgBuilder b;
  b.edge("a", "b");
  b.edge("b", "f");
  b.make_final("f");
  Qsg g = b.finish(1, "a", cost_of(CostKind::Sup));
  SafetyGame sg = encode_safety(g);
  const WeightedGame& wg = sg.game;
  REQUIRE(sg.win_state != UINT32_MAX);
  REQUIRE(sg.bad_state != UINT32_MAX);  // Saboteur may book the unit onto f
  // Find a Min state at vertex b whose distribution puts the unit on f; its
  // only transition must lead to the bad sink.
  DistributionDomain dom = distribution_domain(g);
  bool checked = false;
  // Vertex ids follow insertion order: a=0, b=1, f=2.
  for (uint32_t s = 0; s < wg.state_count(); ++s) {
    if (state_type_of(wg.payload[s]) != state_type::k_min) continue;
    if (state_index_of(wg.payload[s]) != 1) continue;  // at vertex b
    const std::vector<int64_t>& d = wg.dists[state_dist_of(wg.payload[s])];
    if (d[dom.item_of_final[2]] == 1) {
      REQUIRE(wg.hi(s) - wg.lo(s) == 1);
      REQUIRE(wg.succ[wg.lo(s)] == sg.bad_state);
      checked = true;
    }
  }
  REQUIRE(checked);
}

TEST_CASE("safe edges never accumulate weight in the safety encoding") {
  QsgBuilder b;
  b.edge("a", "a", /*safe=*/true);
  b.edge("a", "b");
  b.edge("b", "a");
  Qsg g = b.finish(2, "a", cost_of(CostKind::Sup));
  SafetyGame sg = encode_safety(g);
  const WeightedGame& wg = sg.game;
  // Distribution domain covers the two non-safe edges only.
  REQUIRE(distribution_domain(g).size() == 2);
  // From any Min state at vertex a, the safe self-loop never leads to bad.
  for (uint32_t s = 0; s < wg.state_count(); ++s) {
    if (state_type_of(wg.payload[s]) != state_type::k_min) continue;
    if (state_index_of(wg.payload[s]) != 0) continue;
    REQUIRE(wg.succ[wg.lo(s)] != sg.bad_state);  // edge (a,a) sorts first
  }
}
