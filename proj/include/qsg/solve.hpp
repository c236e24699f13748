#pragma once

#include "qsg/encode.hpp"
#include "qsg/fixpoints.hpp"
#include "qsg/game.hpp"
#include "qsg/threshold_config.hpp"
#include "qsg/weighted_game.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace qsg {

struct SolveResult {
  Rational initial_value;
  // Exact value per encoded state; the qualitative solver omits it.
  std::optional<std::vector<Rational>> per_state_values;
  // Transition index per state; meaningful on states of the respective owner.
  std::vector<uint32_t> min_strategy;
  std::vector<uint32_t> max_strategy;
  // Weights along the play the two strategies induce; evaluates to the value.
  Lasso witness;
  // The encoded arena the strategies refer to; filled by solve().
  WeightedGame arena;
};

namespace detail {

inline uint32_t pick_move(const WeightedGame& g, const std::vector<uint32_t>& min_strategy,
                          const std::vector<uint32_t>& max_strategy, uint32_t s) {
  const uint32_t t = g.is_min(s) ? min_strategy[s] : max_strategy[s];
  if (t == UINT32_MAX || t < g.lo(s) || t >= g.hi(s))
    throw QsgError("internal error: strategy undefined along the induced play");
  return t;
}

inline void fill_default_moves(const WeightedGame& g, std::vector<uint32_t>& strategy, int owner) {
  for (uint32_t s = 0; s < g.state_count(); ++s)
    if (g.owner[s] == owner && strategy[s] == UINT32_MAX && g.lo(s) < g.hi(s)) strategy[s] = g.lo(s);
}

// Transition weights along the induced play, cut at the first repeated state.
inline Lasso walk_lasso(const WeightedGame& g, const std::vector<uint32_t>& min_strategy,
                        const std::vector<uint32_t>& max_strategy) {
  std::vector<uint32_t> pos(g.state_count(), UINT32_MAX);
  std::vector<Rational> w;
  uint32_t s = g.initial;
  while (pos[s] == UINT32_MAX) {
    pos[s] = static_cast<uint32_t>(w.size());
    const uint32_t t = pick_move(g, min_strategy, max_strategy, s);
    w.emplace_back(g.w(t));
    s = g.succ[t];
  }
  Lasso l;
  l.prefix.assign(w.begin(), w.begin() + pos[s]);
  l.cycle.assign(w.begin() + pos[s], w.end());
  return l;
}

// One weight per Min move (a round of the underlying game), cut at the first
// repeated Min state. Requires the induced play to keep passing Min states,
// which holds on every encoded arena.
inline Lasso walk_round_lasso(const WeightedGame& g, const std::vector<uint32_t>& min_strategy,
                              const std::vector<uint32_t>& max_strategy) {
  std::vector<uint32_t> pos(g.state_count(), UINT32_MAX);
  std::vector<Rational> w;
  uint32_t s = g.initial;
  uint64_t steps = 0;
  for (;;) {
    if (steps++ > 2 * static_cast<uint64_t>(g.state_count()) + 2)
      throw QsgError("internal error: induced play avoids Min states");
    if (g.is_min(s)) {
      if (pos[s] != UINT32_MAX) {
        Lasso l;
        l.prefix.assign(w.begin(), w.begin() + pos[s]);
        l.cycle.assign(w.begin() + pos[s], w.end());
        return l;
      }
      pos[s] = static_cast<uint32_t>(w.size());
      steps = 0;
      const uint32_t t = pick_move(g, min_strategy, max_strategy, s);
      w.emplace_back(g.w(t));
      s = g.succ[t];
    } else {
      s = g.succ[pick_move(g, min_strategy, max_strategy, s)];
    }
  }
}

}  // namespace detail

// Exact game value for Inf, Sup, LimInf and LimSup objectives: the least
// weight T such that Min wins the corresponding reachability / safety /
// Büchi / co-Büchi condition, found by bisection over the distinct weights.
// Optimal positional strategies come from the deciding fixpoints: Min's from
// the game at the value, Max's from the game at the next smaller weight.
inline SolveResult value_qualitative(const WeightedGame& g, CostKind kind) {
  if (kind != CostKind::Inf && kind != CostKind::Sup && kind != CostKind::LimInf &&
      kind != CostKind::LimSup)
    throw QsgError("value_qualitative expects one of Inf, Sup, LimInf, LimSup");
  if (g.transition_count() == 0) throw QsgError("value_qualitative needs at least one transition");
  ReverseGame rev(g);

  std::vector<int32_t> weights;
  weights.reserve(g.transition_count());
  for (uint32_t t = 0; t < g.transition_count(); ++t) weights.push_back(g.w(t));
  std::sort(weights.begin(), weights.end());
  weights.erase(std::unique(weights.begin(), weights.end()), weights.end());

  auto at_most = [&](int64_t bound) {
    TargetSet ts;
    ts.transition.assign(g.transition_count(), 0);
    for (uint32_t t = 0; t < g.transition_count(); ++t) ts.transition[t] = g.w(t) <= bound;
    return ts;
  };
  auto above = [&](int64_t bound) {
    TargetSet ts;
    ts.transition.assign(g.transition_count(), 0);
    for (uint32_t t = 0; t < g.transition_count(); ++t) ts.transition[t] = g.w(t) > bound;
    return ts;
  };
  auto min_wins = [&](int32_t bound) -> bool {
    switch (kind) {
      case CostKind::Inf:
        return attractor(g, rev, 0, at_most(bound)).in[g.initial] != 0;
      case CostKind::Sup:
        return attractor(g, rev, 1, above(bound)).in[g.initial] == 0;
      case CostKind::LimInf:
        return solve_buchi(g, rev, 0, at_most(bound)).win[g.initial] != 0;
      default:
        return solve_buchi(g, rev, 1, above(bound)).win[g.initial] == 0;
    }
  };

  std::size_t lo = 0, hi = weights.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (min_wins(weights[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  const int32_t value = weights[lo];
  const bool has_prev = lo > 0;
  const int32_t prev = has_prev ? weights[lo - 1] : 0;

  SolveResult r;
  r.initial_value = Rational(value);
  r.min_strategy.assign(g.state_count(), UINT32_MAX);
  r.max_strategy.assign(g.state_count(), UINT32_MAX);

  switch (kind) {
    case CostKind::Inf: {
      AttractorResult a = attractor(g, rev, 0, at_most(value));
      for (uint32_t s = 0; s < g.state_count(); ++s)
        if (g.is_min(s)) r.min_strategy[s] = a.strategy[s];
      if (has_prev) {
        // Max keeps the play outside Min's attractor to the cheaper edges.
        AttractorResult c = attractor(g, rev, 0, at_most(prev));
        for (uint32_t s = 0; s < g.state_count(); ++s) {
          if (g.is_min(s) || c.in[s]) continue;
          for (uint32_t t = g.lo(s); t < g.hi(s); ++t)
            if (g.w(t) > prev && !c.in[g.succ[t]]) {
              r.max_strategy[s] = t;
              break;
            }
        }
      }
      break;
    }
    case CostKind::Sup: {
      AttractorResult a = attractor(g, rev, 1, above(value));
      for (uint32_t s = 0; s < g.state_count(); ++s) {
        if (!g.is_min(s) || a.in[s]) continue;
        for (uint32_t t = g.lo(s); t < g.hi(s); ++t)
          if (g.w(t) <= value && !a.in[g.succ[t]]) {
            r.min_strategy[s] = t;
            break;
          }
      }
      if (has_prev) {
        AttractorResult d = attractor(g, rev, 1, above(prev));
        for (uint32_t s = 0; s < g.state_count(); ++s)
          if (!g.is_min(s)) r.max_strategy[s] = d.strategy[s];
      }
      break;
    }
    case CostKind::LimInf: {
      BuchiResult b = solve_buchi(g, rev, 0, at_most(value));
      for (uint32_t s = 0; s < g.state_count(); ++s)
        if (g.is_min(s)) r.min_strategy[s] = b.strategy_player[s];
      if (has_prev) {
        BuchiResult b2 = solve_buchi(g, rev, 0, at_most(prev));
        for (uint32_t s = 0; s < g.state_count(); ++s)
          if (!g.is_min(s)) r.max_strategy[s] = b2.strategy_opponent[s];
      }
      break;
    }
    default: {
      BuchiResult b = solve_buchi(g, rev, 1, above(value));
      for (uint32_t s = 0; s < g.state_count(); ++s)
        if (g.is_min(s)) r.min_strategy[s] = b.strategy_opponent[s];
      if (has_prev) {
        BuchiResult b2 = solve_buchi(g, rev, 1, above(prev));
        for (uint32_t s = 0; s < g.state_count(); ++s)
          if (!g.is_min(s)) r.max_strategy[s] = b2.strategy_player[s];
      }
      break;
    }
  }
  detail::fill_default_moves(g, r.min_strategy, 0);
  detail::fill_default_moves(g, r.max_strategy, 1);
  r.witness = detail::walk_lasso(g, r.min_strategy, r.max_strategy);
  if (evaluate_lasso(cost_of(kind), r.witness) != r.initial_value)
    throw QsgError("internal error: qualitative witness does not match the value");
  return r;
}

namespace detail {

struct SccDecomposition {
  std::vector<uint32_t> comp;  // component ids; successors finish first
  uint32_t count = 0;
};

// Iterative Tarjan over the transitions admitted by `allowed`.
template <class AllowedFn>
SccDecomposition strongly_connected(const WeightedGame& g, AllowedFn&& allowed) {
  const uint32_t n = g.state_count();
  SccDecomposition res;
  res.comp.assign(n, UINT32_MAX);
  std::vector<uint32_t> index(n, UINT32_MAX), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<uint32_t> stack;
  struct Frame {
    uint32_t s;
    uint32_t t;
  };
  std::vector<Frame> call;
  uint32_t next = 0;
  for (uint32_t root = 0; root < n; ++root) {
    if (index[root] != UINT32_MAX) continue;
    index[root] = low[root] = next++;
    stack.push_back(root);
    on_stack[root] = 1;
    call.push_back({root, g.lo(root)});
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.t < g.hi(f.s)) {
        const uint32_t t = f.t++;
        if (!allowed(f.s, t)) continue;
        const uint32_t w = g.succ[t];
        if (index[w] == UINT32_MAX) {
          index[w] = low[w] = next++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, g.lo(w)});
        } else if (on_stack[w]) {
          low[f.s] = std::min(low[f.s], index[w]);
        }
      } else {
        const uint32_t s = f.s;
        call.pop_back();
        if (!call.empty()) low[call.back().s] = std::min(low[call.back().s], low[s]);
        if (low[s] == index[s]) {
          const uint32_t c = res.count++;
          for (;;) {
            const uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            res.comp[w] = c;
            if (w == s) break;
          }
        }
      }
    }
  }
  return res;
}

// Optimal cycle mean inside one strongly connected component (Karp's
// progression over path lengths, exact fraction comparisons). Returns
// nothing when the component carries no cycle.
template <class AllowedFn>
std::optional<Rational> cycle_mean(const WeightedGame& g, const std::vector<uint32_t>& states,
                                   AllowedFn&& allowed, const std::vector<uint32_t>& comp,
                                   uint32_t c, bool minimize) {
  const uint32_t k = static_cast<uint32_t>(states.size());
  bool has_edge = false;
  for (uint32_t u : states)
    for (uint32_t t = g.lo(u); t < g.hi(u) && !has_edge; ++t)
      if (allowed(u, t) && comp[g.succ[t]] == c) has_edge = true;
  if (!has_edge) return std::nullopt;

  const int64_t inf = std::numeric_limits<int64_t>::max();
  std::vector<uint32_t> local(g.state_count(), UINT32_MAX);
  for (uint32_t i = 0; i < k; ++i) local[states[i]] = i;
  std::vector<int64_t> d(static_cast<std::size_t>(k + 1) * k, inf);
  d[0 * k + local[states[0]]] = 0;
  for (uint32_t step = 1; step <= k; ++step) {
    int64_t* cur = d.data() + static_cast<std::size_t>(step) * k;
    const int64_t* old = d.data() + static_cast<std::size_t>(step - 1) * k;
    for (uint32_t i = 0; i < k; ++i) {
      if (old[i] == inf) continue;
      const uint32_t u = states[i];
      for (uint32_t t = g.lo(u); t < g.hi(u); ++t) {
        if (!allowed(u, t) || comp[g.succ[t]] != c) continue;
        const int64_t sign = minimize ? 1 : -1;
        const int64_t cand = old[i] + sign * g.w(t);
        int64_t& slot = cur[local[g.succ[t]]];
        if (cand < slot) slot = cand;
      }
    }
  }
  std::optional<Rational> best;
  const int64_t* last = d.data() + static_cast<std::size_t>(k) * k;
  for (uint32_t i = 0; i < k; ++i) {
    if (last[i] == inf) continue;
    std::optional<Rational> worst;
    for (uint32_t step = 0; step < k; ++step) {
      const int64_t mid = d[static_cast<std::size_t>(step) * k + i];
      if (mid == inf) continue;
      Rational cand(last[i] - mid, static_cast<int64_t>(k - step));
      if (!worst || cand > *worst) worst = cand;
    }
    if (worst && (!best || *worst < *best)) best = worst;
  }
  if (best && !minimize) *best = -*best;
  return best;
}

// Exact per-state best-response values when `fixed` (0 = Min, 1 = Max) is
// pinned to `strategy` and the other player optimizes freely: the optimum
// over reachable cycle means, propagated through the component dag.
inline std::vector<Rational> mean_best_response(const WeightedGame& g, int fixed,
                                                const std::vector<uint32_t>& strategy) {
  const bool minimize = fixed == 1;  // the free player is Min
  auto allowed = [&](uint32_t s, uint32_t t) { return g.owner[s] != fixed || strategy[s] == t; };
  SccDecomposition scc = strongly_connected(g, allowed);
  std::vector<std::vector<uint32_t>> members(scc.count);
  for (uint32_t s = 0; s < g.state_count(); ++s) members[scc.comp[s]].push_back(s);

  std::vector<std::optional<Rational>> comp_value(scc.count);
  for (uint32_t c = 0; c < scc.count; ++c) {
    std::optional<Rational> best = cycle_mean(g, members[c], allowed, scc.comp, c, minimize);
    for (uint32_t u : members[c]) {
      for (uint32_t t = g.lo(u); t < g.hi(u); ++t) {
        if (!allowed(u, t)) continue;
        const uint32_t oc = scc.comp[g.succ[t]];
        if (oc == c || !comp_value[oc]) continue;
        if (!best || (minimize ? *comp_value[oc] < *best : *comp_value[oc] > *best))
          best = comp_value[oc];
      }
    }
    if (!best) throw QsgError("internal error: a state reaches no cycle under the fixed strategy");
    comp_value[c] = best;
  }
  std::vector<Rational> value(g.state_count());
  for (uint32_t s = 0; s < g.state_count(); ++s) value[s] = *comp_value[scc.comp[s]];
  return value;
}

// Least credit function of the energy condition for the threshold p/q: the
// keeper (0 = Min wants cycle means <= p/q, 1 = Max wants >= p/q) owns the
// shifted weights and must keep every prefix sum above minus the initial
// credit. Finite entries are exactly the keeper's winning states, and the
// cheapest keeping move there is an optimal threshold strategy.
struct EnergyResult {
  std::vector<int64_t> need;
  int64_t cap = 0;
  std::vector<uint32_t> strategy;  // keeper states with finite need only

  bool finite(uint32_t s) const { return need[s] <= cap; }
};

inline EnergyResult energy_solve(const WeightedGame& g, const ReverseGame& rev, int keeper,
                                 int64_t p, int64_t q) {
  const uint32_t n = g.state_count();
  auto shifted = [&](uint32_t t) {
    const int64_t raw = q * static_cast<int64_t>(g.w(t)) - p;
    return keeper == 1 ? raw : -raw;
  };
  int64_t drop = 0;
  for (uint32_t t = 0; t < g.transition_count(); ++t) drop = std::max(drop, -shifted(t));
  EnergyResult r;
  r.cap = static_cast<int64_t>(n) * drop;
  const int64_t top = r.cap + 1;
  r.need.assign(n, 0);
  auto back = [&](int64_t a, int64_t w) {
    if (a >= top) return top;
    return std::min(top, std::max<int64_t>(a - w, 0));
  };
  auto recompute = [&](uint32_t s) {
    const bool keep = g.owner[s] == keeper;
    int64_t best = keep ? top : 0;
    for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
      const int64_t v = back(r.need[g.succ[t]], shifted(t));
      if (keep ? v < best : v > best) best = v;
    }
    return best;
  };
  std::vector<char> queued(n, 1);
  std::vector<uint32_t> queue(n);
  for (uint32_t s = 0; s < n; ++s) queue[s] = s;
  while (!queue.empty()) {
    const uint32_t s = queue.back();
    queue.pop_back();
    queued[s] = 0;
    const int64_t v = recompute(s);
    if (v > r.need[s]) {
      r.need[s] = v;
      for (uint32_t i = rev.pred_begin[s]; i < rev.pred_begin[s + 1]; ++i) {
        const uint32_t pred = rev.pred_state[i];
        if (!queued[pred]) {
          queued[pred] = 1;
          queue.push_back(pred);
        }
      }
    }
  }
  r.strategy.assign(n, UINT32_MAX);
  for (uint32_t s = 0; s < n; ++s) {
    if (g.owner[s] != keeper || !r.finite(s)) continue;
    for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
      if (back(r.need[g.succ[t]], shifted(t)) == r.need[s]) {
        r.strategy[s] = t;
        break;
      }
    }
  }
  return r;
}

inline BigInt floor_rational(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

// The unique minimal-denominator rational inside the closed interval, by
// continued-fraction descent.
inline Rational simplest_between(const Rational& lo, const Rational& hi) {
  if (lo <= 0 && 0 <= hi) return Rational(0);
  if (lo > 0) {
    const BigInt fl = floor_rational(lo);
    if (Rational(fl + 1) <= hi) return Rational(fl + 1);
    if (Rational(fl) == lo) return lo;
    const Rational base(fl);
    return base + Rational(1) / simplest_between(Rational(1) / (hi - base), Rational(1) / (lo - base));
  }
  return -simplest_between(-hi, -lo);
}

// Exact per-state mean-payoff values: midpoint thresholds are decided by
// energy games until each state's interval is narrower than the minimal gap
// between two cycle means, then the value is the simplest fraction inside.
inline std::vector<Rational> mean_values_exact(const WeightedGame& g, const ReverseGame& rev) {
  const uint32_t n = g.state_count();
  int64_t wmin = std::numeric_limits<int64_t>::max(), wmax = std::numeric_limits<int64_t>::min();
  for (uint32_t t = 0; t < g.transition_count(); ++t) {
    wmin = std::min<int64_t>(wmin, g.w(t));
    wmax = std::max<int64_t>(wmax, g.w(t));
  }
  struct Item {
    std::vector<uint32_t> states;
    int64_t lo, hi, den;  // every member's value lies in [lo/den, hi/den]
  };
  std::vector<Item> pending;
  Item root;
  root.states.resize(n);
  for (uint32_t s = 0; s < n; ++s) root.states[s] = s;
  root.lo = wmin;
  root.hi = wmax;
  root.den = 1;
  pending.push_back(std::move(root));

  const BigInt gap_den = BigInt(2) * n * n;  // distinct cycle means differ by more than 1/(2n^2)
  std::vector<Rational> value(n);
  while (!pending.empty()) {
    Item item = std::move(pending.back());
    pending.pop_back();
    if (BigInt(item.hi - item.lo) * gap_den <= BigInt(item.den)) {
      const Rational v =
          simplest_between(Rational(item.lo, item.den), Rational(item.hi, item.den));
      for (uint32_t s : item.states) value[s] = v;
      continue;
    }
    const int64_t den2 = 2 * item.den, mid = item.lo + item.hi;
    if (den2 > (int64_t(1) << 61) / std::max<int64_t>(1, (n + 1) * std::max<int64_t>(wmax - wmin, 1)))
      throw QsgError("mean-payoff values exceed the solver's integer range");
    EnergyResult at_least = energy_solve(g, rev, 1, mid, den2);
    Item winners{{}, mid, 2 * item.hi, den2}, losers{{}, 2 * item.lo, mid, den2};
    for (uint32_t s : item.states) (at_least.finite(s) ? winners : losers).states.push_back(s);
    if (!winners.states.empty()) pending.push_back(std::move(winners));
    if (!losers.states.empty()) pending.push_back(std::move(losers));
  }
  return value;
}

}  // namespace detail

namespace detail {

// Assembles the result once a strategy pair is certified optimal by exact
// best responses from both sides.
inline SolveResult finish_mean_payoff(const WeightedGame& g, std::vector<Rational> values,
                                      std::vector<uint32_t> sigma, std::vector<uint32_t> tau) {
  SolveResult r;
  r.initial_value = values[g.initial];
  r.per_state_values = std::move(values);
  r.min_strategy = std::move(sigma);
  r.max_strategy = std::move(tau);
  detail::fill_default_moves(g, r.min_strategy, 0);
  detail::fill_default_moves(g, r.max_strategy, 1);
  r.witness = detail::walk_lasso(g, r.min_strategy, r.max_strategy);
  if (evaluate_lasso(cost_of(CostKind::Avg), r.witness) != r.initial_value)
    throw QsgError("internal error: mean-payoff witness does not match the value");
  return r;
}

// Exact values and optimal strategies without value iteration: per-state
// values from threshold energy games, then one energy game per value class
// and side yields a strategy that keeps every reachable cycle on the right
// side of the class value. A best-response sandwich rechecks the result.
inline SolveResult mean_payoff_exact(const WeightedGame& g) {
  const uint32_t n = g.state_count();
  ReverseGame rev(g);
  std::vector<Rational> values = mean_values_exact(g, rev);

  std::map<Rational, std::vector<uint32_t>> classes;
  for (uint32_t s = 0; s < n; ++s) classes[values[s]].push_back(s);
  std::vector<uint32_t> sigma(n, UINT32_MAX), tau(n, UINT32_MAX);
  for (const auto& [v, members] : classes) {
    const int64_t p = numerator(v).convert_to<int64_t>();
    const int64_t q = denominator(v).convert_to<int64_t>();
    EnergyResult keep_low = energy_solve(g, rev, 0, p, q);
    EnergyResult keep_high = energy_solve(g, rev, 1, p, q);
    for (uint32_t s : members) {
      if (!keep_low.finite(s) || !keep_high.finite(s))
        throw QsgError("internal error: a state loses the energy game at its own value");
      if (g.owner[s] == 0) sigma[s] = keep_low.strategy[s];
      if (g.owner[s] == 1) tau[s] = keep_high.strategy[s];
    }
  }

  std::vector<Rational> lower = mean_best_response(g, 1, tau);
  std::vector<Rational> upper = mean_best_response(g, 0, sigma);
  if (lower != values || upper != values)
    throw QsgError("internal error: exact mean-payoff strategies fail their certificate");
  return finish_mean_payoff(g, std::move(values), std::move(sigma), std::move(tau));
}

}  // namespace detail

// Exact mean-payoff values: value iteration proposes a greedy strategy pair,
// and exact best responses against each half certify optimality. Greedy
// extraction can be misled by persistent ties, so after a bounded number of
// sweeps the solver switches to the exact energy-game computation.
inline SolveResult value_mean_payoff(const WeightedGame& g) {
  const uint32_t n = g.state_count();
  if (g.transition_count() == 0) throw QsgError("value_mean_payoff needs at least one transition");
  for (uint32_t s = 0; s < n; ++s)
    if (g.lo(s) == g.hi(s)) throw QsgError("mean-payoff arena has a state without moves");
  std::vector<int64_t> nu(n, 0), next(n);

  auto greedy = [&](int side) {
    std::vector<uint32_t> strat(n, UINT32_MAX);
    for (uint32_t s = 0; s < n; ++s) {
      if (g.owner[s] != side || g.lo(s) == g.hi(s)) continue;
      uint32_t best = g.lo(s);
      int64_t best_value = g.w(best) + nu[g.succ[best]];
      for (uint32_t t = g.lo(s) + 1; t < g.hi(s); ++t) {
        const int64_t cand = g.w(t) + nu[g.succ[t]];
        if (side == 0 ? cand < best_value : cand > best_value) {
          best = t;
          best_value = cand;
        }
      }
      strat[s] = best;
    }
    return strat;
  };

  const uint64_t limit = 64 * static_cast<uint64_t>(n) + 64;
  uint64_t checkpoint = std::max<uint32_t>(n, 1);

  for (uint64_t k = 1; k <= limit; ++k) {
    for (uint32_t s = 0; s < n; ++s) {
      int64_t best = 0;
      bool first = true;
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
        const int64_t cand = g.w(t) + nu[g.succ[t]];
        if (first || (g.owner[s] == 0 ? cand < best : cand > best)) {
          best = cand;
          first = false;
        }
      }
      next[s] = best;
    }
    nu.swap(next);
    if (k == checkpoint || k == limit) {
      std::vector<uint32_t> sigma = greedy(0);
      std::vector<uint32_t> tau = greedy(1);
      std::vector<Rational> lower = detail::mean_best_response(g, 1, tau);
      std::vector<Rational> upper = detail::mean_best_response(g, 0, sigma);
      if (lower == upper)
        return detail::finish_mean_payoff(g, std::move(lower), std::move(sigma), std::move(tau));
      checkpoint *= 2;
    }
  }
  return detail::mean_payoff_exact(g);
}

namespace detail {

// Exact values of the play each strategy pair induces, with round-level
// discounting: Min moves scale the tail by lambda, Max moves do not.
inline std::vector<Rational> discounted_policy_values(const WeightedGame& g, const Rational& lambda,
                                                      const std::vector<uint32_t>& min_strategy,
                                                      const std::vector<uint32_t>& max_strategy) {
  const uint32_t n = g.state_count();
  std::vector<Rational> value(n);
  std::vector<char> state(n, 0);  // 0 new, 1 on chain, 2 done
  std::vector<uint32_t> chain, posn(n, 0);
  for (uint32_t s0 = 0; s0 < n; ++s0) {
    if (state[s0] == 2) continue;
    chain.clear();
    uint32_t s = s0;
    while (state[s] == 0) {
      state[s] = 1;
      posn[s] = static_cast<uint32_t>(chain.size());
      chain.push_back(s);
      s = g.succ[pick_move(g, min_strategy, max_strategy, s)];
    }
    std::size_t solved_from = chain.size();
    if (state[s] == 1) {
      // Close the cycle chain[p..] and solve v = x + f * v.
      const uint32_t p = posn[s];
      Rational x(0), f(1);
      for (std::size_t i = p; i < chain.size(); ++i) {
        const uint32_t u = chain[i];
        const uint32_t t = pick_move(g, min_strategy, max_strategy, u);
        x += f * Rational(g.w(t));
        if (g.is_min(u)) f *= lambda;
      }
      if (f == 1) throw QsgError("discounted play never crosses a Min state");
      value[s] = x / (Rational(1) - f);
      state[s] = 2;
      for (std::size_t i = chain.size(); i-- > p + 1;) {
        const uint32_t u = chain[i];
        const uint32_t t = pick_move(g, min_strategy, max_strategy, u);
        const uint32_t nxt = i + 1 < chain.size() ? chain[i + 1] : s;
        value[u] = Rational(g.w(t)) + (g.is_min(u) ? lambda * value[nxt] : value[nxt]);
        state[u] = 2;
      }
      solved_from = p;
    }
    for (std::size_t i = solved_from; i-- > 0;) {
      const uint32_t u = chain[i];
      const uint32_t t = pick_move(g, min_strategy, max_strategy, u);
      value[u] = Rational(g.w(t)) + (g.is_min(u) ? lambda * value[g.succ[t]] : value[g.succ[t]]);
      state[u] = 2;
    }
  }
  return value;
}

}  // namespace detail

// Exact discounted values via strategy iteration: floating-point value
// iteration seeds a strategy pair, then Min's policy is made an exact best
// response against Max's, Max's policy is improved in turn, and the loop
// repeats until neither side can improve. The final values satisfy both
// Bellman equations exactly.
inline SolveResult value_discounted(const WeightedGame& g, const Rational& lambda) {
  if (g.discount_mode != DiscountMode::discounted_rounds)
    throw QsgError("value_discounted expects an arena with round-level discounting");
  if (!(lambda > 0 && lambda < 1))
    throw QsgError("discount factor must lie strictly between 0 and 1");
  const uint32_t n = g.state_count();
  if (g.transition_count() == 0) throw QsgError("value_discounted needs at least one transition");

  const double lam =
      numerator(lambda).convert_to<double>() / denominator(lambda).convert_to<double>();
  std::vector<double> v(n, 0.0), nv(n);
  for (int iter = 0; iter < 100000; ++iter) {
    double delta = 0.0, scale = 1.0;
    for (uint32_t s = 0; s < n; ++s) {
      double best = 0.0;
      bool first = true;
      const double factor = g.is_min(s) ? lam : 1.0;
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
        const double cand = g.w(t) + factor * v[g.succ[t]];
        if (first || (g.is_min(s) ? cand < best : cand > best)) {
          best = cand;
          first = false;
        }
      }
      nv[s] = first ? v[s] : best;
      delta = std::max(delta, std::abs(nv[s] - v[s]));
      scale = std::max(scale, std::abs(nv[s]));
    }
    v.swap(nv);
    if (delta <= 1e-13 * scale) break;
  }

  std::vector<uint32_t> sigma(n, UINT32_MAX), tau(n, UINT32_MAX);
  for (uint32_t s = 0; s < n; ++s) {
    if (g.lo(s) == g.hi(s)) continue;
    uint32_t best = g.lo(s);
    const double factor = g.is_min(s) ? lam : 1.0;
    double best_value = g.w(best) + factor * v[g.succ[best]];
    for (uint32_t t = g.lo(s) + 1; t < g.hi(s); ++t) {
      const double cand = g.w(t) + factor * v[g.succ[t]];
      if (g.is_min(s) ? cand < best_value : cand > best_value) {
        best = t;
        best_value = cand;
      }
    }
    (g.is_min(s) ? sigma : tau)[s] = best;
  }

  std::vector<Rational> value;
  for (;;) {
    for (;;) {  // Min's exact best response against tau
      value = detail::discounted_policy_values(g, lambda, sigma, tau);
      bool changed = false;
      for (uint32_t s = 0; s < n; ++s) {
        if (!g.is_min(s)) continue;
        uint32_t best = sigma[s];
        Rational best_value = value[s];
        for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
          Rational cand = Rational(g.w(t)) + lambda * value[g.succ[t]];
          if (cand < best_value) {
            best = t;
            best_value = cand;
          }
        }
        if (best != sigma[s]) {
          sigma[s] = best;
          changed = true;
        }
      }
      if (!changed) break;
    }
    bool improved = false;
    for (uint32_t s = 0; s < n; ++s) {
      if (g.is_min(s)) continue;
      uint32_t best = tau[s];
      Rational best_value = value[s];
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
        Rational cand = Rational(g.w(t)) + value[g.succ[t]];
        if (cand > best_value) {
          best = t;
          best_value = cand;
        }
      }
      if (best != tau[s]) {
        tau[s] = best;
        improved = true;
      }
    }
    if (!improved) break;
  }

  // Both Bellman equations must hold now; anything else is a defect.
  for (uint32_t s = 0; s < n; ++s) {
    if (g.lo(s) == g.hi(s)) continue;
    std::optional<Rational> best;
    for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
      Rational cand = Rational(g.w(t)) + (g.is_min(s) ? lambda * value[g.succ[t]] : value[g.succ[t]]);
      if (!best || (g.is_min(s) ? cand < *best : cand > *best)) best = cand;
    }
    if (*best != value[s]) throw QsgError("internal error: discounted values are not a fixpoint");
  }

  SolveResult r;
  r.initial_value = value[g.initial];
  r.min_strategy = std::move(sigma);
  r.max_strategy = std::move(tau);
  detail::fill_default_moves(g, r.min_strategy, 0);
  detail::fill_default_moves(g, r.max_strategy, 1);
  r.witness = detail::walk_round_lasso(g, r.min_strategy, r.max_strategy);
  if (evaluate_lasso(cost_disc(lambda), r.witness) != r.initial_value)
    throw QsgError("internal error: discounted witness does not match the value");
  r.per_state_values = std::move(value);
  return r;
}

// Encodes a plain game and dispatches on its cost. The witness is rewritten
// in round weights (one entry per Runner move) so its cycle is a cycle of the
// underlying arena.
inline SolveResult solve(const Qsg& g, const EncodeOptions& options = {}) {
  if (g.is_extended())
    throw QsgError("extended games are decided by the safety solver, not solve()");
  WeightedGame arena = encode(g, options);
  SolveResult r;
  switch (g.cost.kind) {
    case CostKind::Avg:
      r = value_mean_payoff(arena);
      break;
    case CostKind::Disc:
      r = value_discounted(arena, g.cost.lambda);
      break;
    default:
      r = value_qualitative(arena, g.cost.kind);
      break;
  }
  r.witness = detail::walk_round_lasso(arena, r.min_strategy, r.max_strategy);
  if (evaluate_lasso(g.cost, r.witness) != r.initial_value)
    throw QsgError("internal error: round witness does not match the value");
  r.arena = std::move(arena);
  return r;
}

// Decides "value <= bound" without computing the value when possible. The
// qualitative costs are decided on the configuration graph directly, which
// stays feasible on games whose explicit encoding would be rejected by the
// state cap.
inline bool threshold(const Qsg& g, const Rational& bound, const EncodeOptions& options = {}) {
  if (bound < 0) throw QsgError("threshold bound must be nonnegative");
  if (g.is_extended())
    throw QsgError("extended games are decided by the safety solver, not threshold()");
  switch (g.cost.kind) {
    case CostKind::Avg:
    case CostKind::Disc:
      return solve(g, options).initial_value <= bound;
    default: {
      ValidationReport report = validate(g);
      if (!report.ok()) throw QsgError("game does not validate: " + report.errors.front());
      if (bound >= g.budget) return true;  // no edge ever carries more than the whole budget
      const int64_t t = (numerator(bound) / denominator(bound)).convert_to<int64_t>();
      return detail::decide_qualitative_threshold(g, g.cost.kind, t, options.state_cap);
    }
  }
}

struct SafetyResult {
  bool runner_wins = false;
  SafetyGame arena;
  std::vector<uint32_t> min_strategy;
  std::vector<uint32_t> max_strategy;
};

// Decides a sabotage reachability-style safety game: Saboteur wins iff he can
// force the play onto a positive-budget edge (or an insufficient final
// vertex), i.e. iff the initial state lies in his attractor to the bad sink.
inline SafetyResult solve_espr(const Qsg& g, const EncodeOptions& options = {}) {
  for (int64_t u : g.delta0_edge)
    if (u != 0) throw QsgError("safety games start with an empty initial distribution");
  for (int64_t u : g.delta0_final)
    if (u != 0) throw QsgError("safety games start with an empty initial distribution");

  SafetyResult r;
  // Small arenas are encoded with full unit counts. Once the worst-case state
  // count outgrows the cap, switch to the mark quotient, which is winner
  // preserving here (threshold 0, empty initial distribution).
  const BigInt explicit_bound =
      BigInt(int64_t{g.vertex_count()} + int64_t{g.edge_count()} + 2) *
      distribution_count(distribution_domain(g).size(), g.budget / g.granularity);
  const bool quotient = explicit_bound > options.state_cap;
  r.arena = encode_safety(g, options, quotient);
  const WeightedGame& wg = r.arena.game;
  r.min_strategy.assign(wg.state_count(), UINT32_MAX);
  r.max_strategy.assign(wg.state_count(), UINT32_MAX);

  if (r.arena.bad_state == UINT32_MAX) {
    r.runner_wins = true;
    detail::fill_default_moves(wg, r.min_strategy, 0);
    detail::fill_default_moves(wg, r.max_strategy, 1);
    return r;
  }

  ReverseGame rev(wg);
  TargetSet bad;
  bad.state.assign(wg.state_count(), 0);
  bad.state[r.arena.bad_state] = 1;
  AttractorResult att = attractor(wg, rev, 1, bad);
  r.runner_wins = att.in[wg.initial] == 0;
  for (uint32_t s = 0; s < wg.state_count(); ++s) {
    if (wg.is_min(s)) {
      if (att.in[s]) continue;
      for (uint32_t t = wg.lo(s); t < wg.hi(s); ++t)
        if (!att.in[wg.succ[t]]) {
          r.min_strategy[s] = t;
          break;
        }
    } else {
      r.max_strategy[s] = att.strategy[s];
    }
  }
  detail::fill_default_moves(wg, r.min_strategy, 0);
  detail::fill_default_moves(wg, r.max_strategy, 1);
  return r;
}

inline SafetyResult solve_spr(const Qsg& g, const EncodeOptions& options = {}) {
  if (g.is_extended()) throw QsgError("solve_spr expects a plain game; use solve_espr");
  return solve_espr(g, options);
}

}  // namespace qsg
