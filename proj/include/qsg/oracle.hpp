#pragma once

#include "qsg/weighted_game.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

// Ground-truth evaluators for small games. Everything here prefers the most
// literal computation available: strategy pairs are enumerated outright when
// their count fits under a cap, and beyond that the value is re-derived from
// scratch and certified with exact one-player best responses, so a reported
// value never rests on the main solver pipeline being right. The only code
// shared with the solvers is the lasso evaluator; agreement between the two
// sides therefore checks two independent implementations against each other.

namespace qsg {

struct OracleOptions {
  // Strategy pairs are enumerated while their total count stays at or under
  // this cap; larger arenas switch to the certified re-derivation.
  int64_t pair_cap = 10'000'000;
  // Bound on the number of distributions the static oracle will enumerate.
  int64_t dist_cap = 1'000'000;
};

struct OracleReport {
  Rational value_maxmin;  // Saboteur commits his positional strategy first
  Rational value_minmax;  // Runner commits first
  bool agree = false;
  // Transition index per state of the respective owner, UINT32_MAX elsewhere.
  // When the two orders agree, playing the pair realizes the common value.
  std::vector<uint32_t> max_witness;
  std::vector<uint32_t> min_witness;
};

struct DiscountedInterval {
  Rational lo;
  Rational hi;
};

namespace oracle_detail {

inline void require_total(const WeightedGame& g) {
  if (g.state_count() == 0) throw QsgError("oracle needs at least one state");
  for (uint32_t s = 0; s < g.state_count(); ++s)
    if (g.lo(s) >= g.hi(s)) throw QsgError("oracle needs every state to have a successor");
}

inline BigInt strategy_pair_count(const WeightedGame& g) {
  BigInt pairs = 1;
  for (uint32_t s = 0; s < g.state_count(); ++s) pairs *= g.hi(s) - g.lo(s);
  return pairs;
}

inline std::vector<int32_t> distinct_weights(const WeightedGame& g) {
  std::vector<int32_t> ws;
  ws.reserve(g.transition_count());
  for (uint32_t t = 0; t < g.transition_count(); ++t) ws.push_back(g.w(t));
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return ws;
}

// ---------------------------------------------------------------------------
// Forward fixpoints. These run plain sweeps over the state array instead of
// the solvers' counter-based worklists; at oracle scale the simplicity wins.

// States from which `player` can force the play to cross a marked transition.
struct Forced {
  std::vector<char> in;
  // Forcing move at player states inside the set: marked, or one step deeper
  // into the set (the target always joined strictly earlier, so following
  // `pick` reaches a marked crossing).
  std::vector<uint32_t> pick;
  // At opponent states outside the set: a move that is unmarked and stays
  // outside, which exists by definition of the fixpoint.
  std::vector<uint32_t> dodge;
};

inline Forced forced_crossing(const WeightedGame& g, int player, const std::vector<char>& good) {
  const uint32_t n = g.state_count();
  assert(good.size() == g.transition_count());
  Forced f;
  f.in.assign(n, 0);
  f.pick.assign(n, UINT32_MAX);
  f.dodge.assign(n, UINT32_MAX);
  bool grew = true;
  while (grew) {
    grew = false;
    for (uint32_t s = 0; s < n; ++s) {
      if (f.in[s]) continue;
      if (g.owner[s] == player) {
        for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
          if (!good[t] && !f.in[g.succ[t]]) continue;
          f.in[s] = 1;
          f.pick[s] = t;
          grew = true;
          break;
        }
      } else {
        bool all = true;
        for (uint32_t t = g.lo(s); t < g.hi(s); ++t)
          if (!good[t] && !f.in[g.succ[t]]) {
            all = false;
            break;
          }
        if (all) {
          f.in[s] = 1;
          grew = true;
        }
      }
    }
  }
  for (uint32_t s = 0; s < n; ++s) {
    if (f.in[s] || g.owner[s] == player) continue;
    for (uint32_t t = g.lo(s); t < g.hi(s); ++t)
      if (!good[t] && !f.in[g.succ[t]]) {
        f.dodge[s] = t;
        break;
      }
    assert(f.dodge[s] != UINT32_MAX);
  }
  return f;
}

// States from which `player` can force marked transitions to be crossed
// infinitely often: the greatest fixpoint Z of "player forces one more marked
// crossing that lands back in Z".
struct Recurrent {
  std::vector<char> win;
  // Player's move at his states inside the winning region.
  std::vector<uint32_t> inside;
  // Opponent's move at his states outside. Recorded when the state drops out
  // of Z: the move is unmarked-or-descending in drop stage, so following it
  // crosses marked transitions only finitely often.
  std::vector<uint32_t> outside;
};

inline Recurrent forced_recurrence(const WeightedGame& g, int player,
                                   const std::vector<char>& good) {
  const uint32_t n = g.state_count();
  std::vector<char> z(n, 1);
  std::vector<uint32_t> outside(n, UINT32_MAX);
  std::vector<char> goodz(g.transition_count(), 0);
  Forced f;
  for (;;) {
    for (uint32_t t = 0; t < g.transition_count(); ++t) goodz[t] = good[t] && z[g.succ[t]];
    f = forced_crossing(g, player, goodz);
    bool shrank = false;
    for (uint32_t s = 0; s < n; ++s) {
      if (!z[s] || f.in[s]) continue;
      z[s] = 0;
      shrank = true;
      if (g.owner[s] != player) outside[s] = f.dodge[s];
    }
    if (!shrank) break;
  }
  Recurrent r;
  r.win = std::move(z);
  r.inside = std::move(f.pick);
  r.outside = std::move(outside);
  return r;
}

// ---------------------------------------------------------------------------
// One-player best responses. Pinning one player's positional strategy leaves
// a graph where only the free player still chooses; the optimum over that
// graph bounds the game value from the pinned player's side, and matching
// bounds from both sides certify the value exactly.

struct Pinned {
  const WeightedGame* g = nullptr;
  int free_player = 0;
  const std::vector<uint32_t>* strategy = nullptr;  // total on the pinned player's states

  bool allows(uint32_t s, uint32_t t) const {
    return g->owner[s] == free_player || (*strategy)[s] == t;
  }
};

inline std::vector<char> reachable_states(const Pinned& p) {
  const WeightedGame& g = *p.g;
  std::vector<char> seen(g.state_count(), 0);
  std::vector<uint32_t> stack = {g.initial};
  seen[g.initial] = 1;
  while (!stack.empty()) {
    const uint32_t s = stack.back();
    stack.pop_back();
    for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
      if (!p.allows(s, t) || seen[g.succ[t]]) continue;
      seen[g.succ[t]] = 1;
      stack.push_back(g.succ[t]);
    }
  }
  return seen;
}

// Greatest set of states with an allowed, kept transition back into the set:
// exactly the states from which the free player can keep playing kept
// transitions forever.
template <typename KeepFn>
std::vector<char> live_states(const Pinned& p, KeepFn&& keep) {
  const WeightedGame& g = *p.g;
  std::vector<char> live(g.state_count(), 1);
  bool shrank = true;
  while (shrank) {
    shrank = false;
    for (uint32_t s = 0; s < g.state_count(); ++s) {
      if (!live[s]) continue;
      bool ok = false;
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t)
        if (p.allows(s, t) && keep(t) && live[g.succ[t]]) {
          ok = true;
          break;
        }
      if (!ok) {
        live[s] = 0;
        shrank = true;
      }
    }
  }
  return live;
}

// Allowed transitions that lie on an allowed cycle, found by walking from the
// target back to the source. Quadratic, which is fine at oracle scale.
inline std::vector<char> on_cycle_transitions(const Pinned& p) {
  const WeightedGame& g = *p.g;
  std::vector<char> on(g.transition_count(), 0);
  std::vector<char> seen(g.state_count(), 0);
  std::vector<uint32_t> stack;
  for (uint32_t s = 0; s < g.state_count(); ++s) {
    for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
      if (!p.allows(s, t)) continue;
      std::fill(seen.begin(), seen.end(), 0);
      stack.assign(1, g.succ[t]);
      seen[g.succ[t]] = 1;
      bool found = g.succ[t] == s;
      while (!stack.empty() && !found) {
        const uint32_t u = stack.back();
        stack.pop_back();
        for (uint32_t t2 = g.lo(u); t2 < g.hi(u); ++t2) {
          if (!p.allows(u, t2) || seen[g.succ[t2]]) continue;
          if (g.succ[t2] == s) {
            found = true;
            break;
          }
          seen[g.succ[t2]] = 1;
          stack.push_back(g.succ[t2]);
        }
      }
      on[t] = found ? 1 : 0;
    }
  }
  return on;
}

// Exact extreme cycle mean over the allowed subgraph reachable from the
// initial state, via the classic walk-length recurrence: with D_k(v) the best
// k-step walk weight from the initial state, the extreme mean over reachable
// cycles is min over v of max over k of (D_r(v) - D_k(v)) / (r - k).
// `minimize` picks whether the free player minimizes or maximizes the mean.
inline Rational extreme_cycle_mean(const Pinned& p, bool minimize) {
  const WeightedGame& g = *p.g;
  const std::vector<char> reach = reachable_states(p);
  std::vector<uint32_t> order;
  std::vector<uint32_t> idx(g.state_count(), UINT32_MAX);
  for (uint32_t s = 0; s < g.state_count(); ++s)
    if (reach[s]) {
      idx[s] = static_cast<uint32_t>(order.size());
      order.push_back(s);
    }
  const uint32_t r = static_cast<uint32_t>(order.size());
  constexpr int64_t unset = INT64_MAX;
  std::vector<std::vector<int64_t>> d(r + 1, std::vector<int64_t>(r, unset));
  d[0][idx[g.initial]] = 0;
  for (uint32_t k = 0; k < r; ++k) {
    for (uint32_t i = 0; i < r; ++i) {
      if (d[k][i] == unset) continue;
      const uint32_t s = order[i];
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
        if (!p.allows(s, t)) continue;
        const int64_t w = minimize ? g.w(t) : -int64_t{g.w(t)};
        const uint32_t j = idx[g.succ[t]];
        if (d[k][i] + w < d[k + 1][j]) d[k + 1][j] = d[k][i] + w;
      }
    }
  }
  std::optional<Rational> best;
  for (uint32_t j = 0; j < r; ++j) {
    if (d[r][j] == unset) continue;
    std::optional<Rational> worst;
    for (uint32_t k = 0; k < r; ++k) {
      if (d[k][j] == unset) continue;
      Rational mean(d[r][j] - d[k][j], int64_t{r} - k);
      if (!worst || mean > *worst) worst = std::move(mean);
    }
    if (worst && (!best || *worst < *best)) best = std::move(worst);
  }
  if (!best) throw QsgError("internal error: reachable pinned subgraph has no cycle");
  return minimize ? *best : -*best;
}

// Optimum the free player can still guarantee against the pinned strategy.
inline Rational pinned_value(const Pinned& p, CostKind kind) {
  const WeightedGame& g = *p.g;
  if (kind == CostKind::Avg) return extreme_cycle_mean(p, p.free_player == 0);

  const std::vector<char> reach = reachable_states(p);
  const bool minimize = p.free_player == 0;

  if (kind == CostKind::Inf && !minimize) {
    // Keep every crossing at or above the best sustainable bound.
    const std::vector<int32_t> ws = distinct_weights(g);
    int32_t best = 0;
    for (int32_t w : ws) {
      if (live_states(p, [&](uint32_t t) { return g.w(t) >= w; })[g.initial]) best = w;
    }
    return Rational(best);
  }
  if (kind == CostKind::Sup && minimize) {
    // Dual of the above: stay below the smallest sustainable bound.
    const std::vector<int32_t> ws = distinct_weights(g);
    for (int32_t w : ws)
      if (live_states(p, [&](uint32_t t) { return g.w(t) <= w; })[g.initial]) return Rational(w);
    throw QsgError("internal error: no sustainable bound in a total pinned subgraph");
  }
  if ((kind == CostKind::Inf && minimize) || (kind == CostKind::Sup && !minimize)) {
    // One extreme crossing decides the play; pick the best reachable one.
    std::optional<int32_t> best;
    for (uint32_t s = 0; s < g.state_count(); ++s) {
      if (!reach[s]) continue;
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
        if (!p.allows(s, t)) continue;
        if (!best || (minimize ? g.w(t) < *best : g.w(t) > *best)) best = g.w(t);
      }
    }
    assert(best);
    return Rational(*best);
  }
  if (kind == CostKind::LimInf && minimize) {
    // The cheapest transition on a reachable cycle recurs in some play.
    const std::vector<char> on = on_cycle_transitions(p);
    std::optional<int32_t> best;
    for (uint32_t s = 0; s < g.state_count(); ++s) {
      if (!reach[s]) continue;
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t)
        if (p.allows(s, t) && on[t] && (!best || g.w(t) < *best)) best = g.w(t);
    }
    assert(best);
    return Rational(*best);
  }
  if (kind == CostKind::LimSup && !minimize) {
    const std::vector<char> on = on_cycle_transitions(p);
    std::optional<int32_t> best;
    for (uint32_t s = 0; s < g.state_count(); ++s) {
      if (!reach[s]) continue;
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t)
        if (p.allows(s, t) && on[t] && (!best || g.w(t) > *best)) best = g.w(t);
    }
    assert(best);
    return Rational(*best);
  }
  if (kind == CostKind::LimSup && minimize) {
    // Reach, by any allowed route, a region that sustains a low bound forever.
    const std::vector<int32_t> ws = distinct_weights(g);
    for (int32_t w : ws) {
      const std::vector<char> live = live_states(p, [&](uint32_t t) { return g.w(t) <= w; });
      for (uint32_t s = 0; s < g.state_count(); ++s)
        if (reach[s] && live[s]) return Rational(w);
    }
    throw QsgError("internal error: no sustainable bound in a total pinned subgraph");
  }
  if (kind == CostKind::LimInf && !minimize) {
    const std::vector<int32_t> ws = distinct_weights(g);
    int32_t best = 0;
    for (int32_t w : ws) {
      const std::vector<char> live = live_states(p, [&](uint32_t t) { return g.w(t) >= w; });
      for (uint32_t s = 0; s < g.state_count(); ++s)
        if (reach[s] && live[s]) {
          best = w;
          break;
        }
    }
    return Rational(best);
  }
  throw QsgError("pinned_value expects one of Inf, Sup, LimInf, LimSup, Avg");
}

// ---------------------------------------------------------------------------
// Literal strategy-pair enumeration.

// Enumerates one player's positional strategies in ascending lexicographic
// order of the per-state choice vector, editing the merged choice array in
// place. The first optimum found is therefore the lexicographically least.
struct StrategyOdometer {
  std::vector<uint32_t> slots;
  std::vector<uint32_t> offset;

  StrategyOdometer(const WeightedGame& g, int player) {
    for (uint32_t s = 0; s < g.state_count(); ++s)
      if (g.owner[s] == player) slots.push_back(s);
    offset.assign(slots.size(), 0);
  }

  void reset(const WeightedGame& g, std::vector<uint32_t>& merged) {
    std::fill(offset.begin(), offset.end(), 0);
    for (uint32_t s : slots) merged[s] = g.lo(s);
  }

  bool step(const WeightedGame& g, std::vector<uint32_t>& merged) {
    for (std::size_t i = slots.size(); i-- > 0;) {
      const uint32_t s = slots[i];
      if (++offset[i] < g.hi(s) - g.lo(s)) {
        merged[s] = g.lo(s) + offset[i];
        return true;
      }
      offset[i] = 0;
      merged[s] = g.lo(s);
    }
    return false;
  }
};

// Walks the play a total choice vector induces and scores it through the
// shared lasso evaluator. Buffers are reused across the enumeration.
struct LassoWalker {
  std::vector<uint32_t> stamp;
  std::vector<uint32_t> pos;
  uint32_t epoch = 0;
  std::vector<int32_t> walk;
  Lasso lasso;

  explicit LassoWalker(const WeightedGame& g)
      : stamp(g.state_count(), 0), pos(g.state_count(), 0) {}

  Rational value(const WeightedGame& g, const std::vector<uint32_t>& merged, const Cost& cost) {
    ++epoch;
    walk.clear();
    uint32_t s = g.initial;
    while (stamp[s] != epoch) {
      stamp[s] = epoch;
      pos[s] = static_cast<uint32_t>(walk.size());
      const uint32_t t = merged[s];
      assert(t >= g.lo(s) && t < g.hi(s));
      walk.push_back(g.w(t));
      s = g.succ[t];
      assert(walk.size() <= g.state_count() + 1);
    }
    const uint32_t cut = pos[s];
    lasso.prefix.assign(walk.begin(), walk.begin() + cut);
    lasso.cycle.assign(walk.begin() + cut, walk.end());
    return evaluate_lasso(cost, lasso);
  }
};

inline void enumerate_pairs(const WeightedGame& g, CostKind kind, OracleReport& report) {
  const uint32_t n = g.state_count();
  const Cost cost = cost_of(kind);
  LassoWalker walker(g);
  std::vector<uint32_t> merged(n, UINT32_MAX);

  // One pass per commitment order; the outer player's first-found optimum is
  // the lexicographically least because the odometers enumerate ascending.
  for (int outer_player : {1, 0}) {
    StrategyOdometer outer(g, outer_player);
    StrategyOdometer inner(g, 1 - outer_player);
    outer.reset(g, merged);
    std::optional<Rational> best;
    std::vector<uint32_t> witness;
    do {
      inner.reset(g, merged);
      std::optional<Rational> reply;
      do {
        Rational v = walker.value(g, merged, cost);
        const bool better = outer_player == 1 ? (!reply || v < *reply) : (!reply || v > *reply);
        if (better) reply = std::move(v);
      } while (inner.step(g, merged));
      const bool better = outer_player == 1 ? (!best || *reply > *best) : (!best || *reply < *best);
      if (better) {
        best = std::move(*reply);
        witness.assign(n, UINT32_MAX);
        for (uint32_t s : outer.slots) witness[s] = merged[s];
      }
    } while (outer.step(g, merged));
    if (outer_player == 1) {
      report.value_maxmin = std::move(*best);
      report.max_witness = std::move(witness);
    } else {
      report.value_minmax = std::move(*best);
      report.min_witness = std::move(witness);
    }
  }
  report.agree = report.value_maxmin == report.value_minmax;
}

// ---------------------------------------------------------------------------
// Certified re-derivation for arenas whose strategy spaces are too large to
// enumerate. The value is recomputed by threshold scans (or bounded-horizon
// backups for the mean), optimal strategies are extracted, and exact best
// responses to both strategies must close the sandwich:
//   best_response_min(sigma) <= maxmin <= minmax <= best_response_max(tau),
// so equal ends pin both orders to the common value.

inline void fill_remaining(const WeightedGame& g, std::vector<uint32_t>& strategy, int player) {
  for (uint32_t s = 0; s < g.state_count(); ++s)
    if (g.owner[s] == player && strategy[s] == UINT32_MAX) strategy[s] = g.lo(s);
}

struct Sandwich {
  Rational lo;  // Runner's exact best response to sigma; at most maxmin
  Rational hi;  // Saboteur's exact best response to tau; at least minmax
};

// Completes the strategies and computes both one-player best responses.
inline Sandwich best_response_bounds(const WeightedGame& g, CostKind kind,
                                     std::vector<uint32_t>& sigma, std::vector<uint32_t>& tau) {
  fill_remaining(g, sigma, 1);
  fill_remaining(g, tau, 0);
  return Sandwich{pinned_value(Pinned{&g, 0, &sigma}, kind),
                  pinned_value(Pinned{&g, 1, &tau}, kind)};
}

inline void report_certified(const WeightedGame& g, const Rational& value,
                             const std::vector<uint32_t>& sigma, const std::vector<uint32_t>& tau,
                             OracleReport& report) {
  report.value_maxmin = value;
  report.value_minmax = value;
  report.agree = true;
  report.max_witness.assign(g.state_count(), UINT32_MAX);
  report.min_witness.assign(g.state_count(), UINT32_MAX);
  for (uint32_t s = 0; s < g.state_count(); ++s) {
    if (g.owner[s] == 1)
      report.max_witness[s] = sigma[s];
    else
      report.min_witness[s] = tau[s];
  }
}

inline void qualitative_oracle(const WeightedGame& g, CostKind kind, OracleReport& report) {
  const std::vector<int32_t> ws = distinct_weights(g);
  auto geq = [&](int32_t bound) {
    std::vector<char> good(g.transition_count(), 0);
    for (uint32_t t = 0; t < g.transition_count(); ++t) good[t] = g.w(t) >= bound;
    return good;
  };
  auto lt = [&](int32_t bound) {
    std::vector<char> good(g.transition_count(), 0);
    for (uint32_t t = 0; t < g.transition_count(); ++t) good[t] = g.w(t) < bound;
    return good;
  };
  auto max_wins = [&](int32_t bound) -> bool {
    switch (kind) {
      case CostKind::Sup:
        return forced_crossing(g, 1, geq(bound)).in[g.initial] != 0;
      case CostKind::Inf:
        return forced_crossing(g, 0, lt(bound)).in[g.initial] == 0;
      case CostKind::LimSup:
        return forced_recurrence(g, 1, geq(bound)).win[g.initial] != 0;
      case CostKind::LimInf:
        return forced_recurrence(g, 0, lt(bound)).win[g.initial] == 0;
      default:
        throw QsgError("qualitative oracle expects one of Inf, Sup, LimInf, LimSup");
    }
  };

  // The value is a transition weight, and winnability is downward closed in
  // the bound, so the largest winning bound is the value. The lowest weight
  // always wins: every play crosses transitions at or above it.
  std::size_t at = 0;
  while (at + 1 < ws.size() && max_wins(ws[at + 1])) ++at;
  assert(max_wins(ws[at]));
  const int32_t value = ws[at];
  const bool has_next = at + 1 < ws.size();
  const int32_t next = has_next ? ws[at + 1] : 0;

  const uint32_t n = g.state_count();
  std::vector<uint32_t> sigma(n, UINT32_MAX);
  std::vector<uint32_t> tau(n, UINT32_MAX);
  switch (kind) {
    case CostKind::Sup: {
      const Forced a = forced_crossing(g, 1, geq(value));
      for (uint32_t s = 0; s < n; ++s)
        if (g.owner[s] == 1 && a.in[s]) sigma[s] = a.pick[s];
      if (has_next) {
        const Forced b = forced_crossing(g, 1, geq(next));
        for (uint32_t s = 0; s < n; ++s)
          if (g.owner[s] == 0 && !b.in[s]) tau[s] = b.dodge[s];
      }
      break;
    }
    case CostKind::Inf: {
      const Forced a = forced_crossing(g, 0, lt(value));
      for (uint32_t s = 0; s < n; ++s)
        if (g.owner[s] == 1 && !a.in[s]) sigma[s] = a.dodge[s];
      if (has_next) {
        const Forced b = forced_crossing(g, 0, lt(next));
        for (uint32_t s = 0; s < n; ++s)
          if (g.owner[s] == 0 && b.in[s]) tau[s] = b.pick[s];
      }
      break;
    }
    case CostKind::LimSup: {
      const Recurrent a = forced_recurrence(g, 1, geq(value));
      for (uint32_t s = 0; s < n; ++s)
        if (g.owner[s] == 1 && a.win[s]) sigma[s] = a.inside[s];
      if (has_next) {
        const Recurrent b = forced_recurrence(g, 1, geq(next));
        for (uint32_t s = 0; s < n; ++s)
          if (g.owner[s] == 0 && !b.win[s]) tau[s] = b.outside[s];
      }
      break;
    }
    default: {
      const Recurrent a = forced_recurrence(g, 0, lt(value));
      for (uint32_t s = 0; s < n; ++s)
        if (g.owner[s] == 1 && !a.win[s]) sigma[s] = a.outside[s];
      if (has_next) {
        const Recurrent b = forced_recurrence(g, 0, lt(next));
        for (uint32_t s = 0; s < n; ++s)
          if (g.owner[s] == 0 && b.win[s]) tau[s] = b.inside[s];
      }
      break;
    }
  }
  const Sandwich bounds = best_response_bounds(g, kind, sigma, tau);
  if (bounds.lo != Rational(value) || bounds.hi != Rational(value))
    throw QsgError("internal error: oracle best responses do not certify the scanned value");
  report_certified(g, Rational(value), sigma, tau, report);
}

inline void mean_payoff_oracle(const WeightedGame& g, OracleReport& report) {
  const uint32_t n = g.state_count();
  std::vector<int64_t> v(n, 0), nv(n, 0);
  std::vector<uint32_t> sigma(n, UINT32_MAX), tau(n, UINT32_MAX);
  int64_t swept = 0;
  // Bounded-horizon backups guess optimal strategies; the exact best
  // responses decide whether the guess is right. Small arenas certify within
  // a few dozen sweeps, and the cap turns a failure to converge into a hard
  // error instead of a wrong answer.
  for (int64_t target = 32; target <= 4096; target *= 2) {
    for (; swept < target; ++swept) {
      for (uint32_t s = 0; s < n; ++s) {
        std::optional<int64_t> best;
        uint32_t arg = UINT32_MAX;
        for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
          const int64_t cand = g.w(t) + v[g.succ[t]];
          const bool better = g.owner[s] == 1 ? (!best || cand > *best) : (!best || cand < *best);
          if (better) {
            best = cand;
            arg = t;
          }
        }
        nv[s] = *best;
        (g.owner[s] == 1 ? sigma : tau)[s] = arg;
      }
      std::swap(v, nv);
    }
    const Sandwich bounds = best_response_bounds(g, CostKind::Avg, sigma, tau);
    if (bounds.lo == bounds.hi) {
      report_certified(g, bounds.lo, sigma, tau, report);
      return;
    }
  }
  throw QsgError("mean oracle failed to certify a value within the sweep cap");
}

}  // namespace oracle_detail

// Both commitment orders of the positional game, computed independently of
// the solver pipeline. Small arenas are settled by literal enumeration; for
// larger ones the value is re-derived and certified by exact best responses,
// which proves that the two orders coincide rather than assuming it.
inline OracleReport oracle_value(const WeightedGame& g, CostKind kind,
                                 const OracleOptions& options = {}) {
  if (kind == CostKind::Disc)
    throw QsgError("oracle_value handles the undiscounted kinds; use oracle_discounted");
  oracle_detail::require_total(g);
  OracleReport report;
  if (oracle_detail::strategy_pair_count(g) <= options.pair_cap) {
    oracle_detail::enumerate_pairs(g, kind, report);
  } else if (kind == CostKind::Avg) {
    oracle_detail::mean_payoff_oracle(g, report);
  } else {
    oracle_detail::qualitative_oracle(g, kind, report);
  }
  return report;
}

// Exact minimax value of the discounted game truncated after `horizon`
// rounds, widened by the worst possible tail. The true value always lies in
// the returned interval, which shrinks geometrically with the horizon.
inline DiscountedInterval oracle_discounted(const Qsg& g, const Rational& lambda,
                                            int64_t horizon) {
  if (horizon < 1) throw QsgError("oracle_discounted needs a horizon of at least 1");
  if (!(lambda > 0 && lambda < 1))
    throw QsgError("discount factor must lie strictly between 0 and 1");
  {
    ValidationReport rep = validate(g);
    if (!rep.ok()) throw QsgError("game does not validate: " + rep.errors.front());
  }
  if (g.is_extended()) throw QsgError("oracle_discounted expects a plain game");

  const DistributionDomain dom = distribution_domain(g);
  std::map<std::vector<int64_t>, uint32_t> dist_index;
  std::vector<std::vector<int64_t>> dists;
  std::vector<std::vector<uint32_t>> moves;  // redistribution successors per dist
  auto intern = [&](const std::vector<int64_t>& d) -> uint32_t {
    auto it = dist_index.find(d);
    if (it != dist_index.end()) return it->second;
    const uint32_t id = static_cast<uint32_t>(dists.size());
    dist_index.emplace(d, id);
    dists.push_back(d);
    moves.emplace_back();
    return id;
  };
  // Returns a copy: interning inside the recursion grows the cache vectors,
  // which would invalidate any reference handed out here.
  auto moves_of = [&](uint32_t id) -> std::vector<uint32_t> {
    if (moves[id].empty()) {
      std::vector<uint32_t> ids;
      for (const auto& d : redistributions(dists[id], g.budget, g.granularity))
        ids.push_back(intern(d));
      moves[id] = std::move(ids);
    }
    return moves[id];
  };

  // One round: Runner crosses an edge and pays its load, Saboteur answers
  // with a redistribution, and the remaining game is discounted once.
  std::map<std::tuple<int64_t, uint32_t, uint32_t>, Rational> memo;
  auto value = [&](auto&& self, int64_t rounds, uint32_t vtx, uint32_t dist) -> Rational {
    if (rounds == 0) return Rational(0);
    const auto key = std::make_tuple(rounds, vtx, dist);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::optional<Rational> best;
    for (uint32_t e = g.out_lo(vtx); e < g.out_hi(vtx); ++e) {
      const int32_t item = dom.item_of_edge[e];
      const Rational w(item < 0 ? 0 : dists[dist][item]);
      std::optional<Rational> reply;
      for (uint32_t id : moves_of(dist)) {
        Rational cont = self(self, rounds - 1, g.edges[e].second, id);
        if (!reply || cont > *reply) reply = std::move(cont);
      }
      Rational cand = w + lambda * *reply;
      if (!best || cand < *best) best = std::move(cand);
    }
    if (!best) throw QsgError("internal error: deadlocked vertex in a validated game");
    return memo.emplace(key, std::move(*best)).first->second;
  };

  const uint32_t d0 = intern(initial_distribution(g, dom));
  const Rational center = value(value, horizon, g.initial, d0);
  Rational pw = 1;
  for (int64_t i = 0; i < horizon; ++i) pw *= lambda;
  const Rational tail = pw * Rational(g.budget) / (Rational(1) - lambda);
  return DiscountedInterval{center - tail, center + tail};
}

// Value of the static variant, where Saboteur commits the whole distribution
// before the first move: the maximum over all distributions of Runner's
// one-player optimum, the latter taken over explicitly enumerated simple
// lassos. Deliberately free of closed forms and cycle-mean machinery so it
// can stand against them as an independent check.
inline Rational oracle_static(const Qsg& g, const OracleOptions& options = {}) {
  {
    ValidationReport rep = validate(g);
    if (!rep.ok()) throw QsgError("game does not validate: " + rep.errors.front());
  }
  for (uint32_t v = 0; v < g.vertex_count(); ++v)
    if (g.is_final(v)) throw QsgError("static games do not take final vertices");

  const DistributionDomain dom = distribution_domain(g);
  const BigInt count = distribution_count(dom.size(), g.budget);
  if (count > options.dist_cap)
    throw CapExceeded("static oracle needs " + count.str() +
                          " distributions, above the cap of " + std::to_string(options.dist_cap),
                      count);

  std::vector<Rational> edge_weight(g.edge_count());
  std::vector<uint32_t> path;                       // edge indices along the DFS stack
  std::vector<int32_t> depth(g.vertex_count(), -1);  // position of each on-path vertex
  Lasso lasso;
  std::optional<Rational> cheapest;

  auto dfs = [&](auto&& self, uint32_t v) -> void {
    depth[v] = static_cast<int32_t>(path.size());
    for (uint32_t e = g.out_lo(v); e < g.out_hi(v); ++e) {
      const uint32_t head = g.edges[e].second;
      if (depth[head] < 0) {
        path.push_back(e);
        self(self, head);
        path.pop_back();
        continue;
      }
      // Closing edge: the walk so far splits into a simple prefix and cycle.
      lasso.prefix.clear();
      lasso.cycle.clear();
      for (int32_t i = 0; i < depth[head]; ++i) lasso.prefix.push_back(edge_weight[path[i]]);
      for (std::size_t i = depth[head]; i < path.size(); ++i)
        lasso.cycle.push_back(edge_weight[path[i]]);
      lasso.cycle.push_back(edge_weight[e]);
      Rational v2 = evaluate_lasso(g.cost, lasso);
      if (!cheapest || v2 < *cheapest) cheapest = std::move(v2);
    }
    depth[v] = -1;
  };

  std::optional<Rational> best;
  enumerate_distributions(dom.size(), g.budget, [&](const std::vector<int64_t>& d) {
    for (uint32_t e = 0; e < g.edge_count(); ++e) {
      const int32_t item = dom.item_of_edge[e];
      edge_weight[e] = Rational(item < 0 ? 0 : d[item]);
    }
    cheapest.reset();
    dfs(dfs, g.initial);
    if (!cheapest) throw QsgError("internal error: deadlock-free game has no lasso");
    if (!best || *cheapest > *best) best = std::move(*cheapest);
  });
  return *best;
}

}  // namespace qsg
