#pragma once

#include "qsg/game.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qsg {

// Result of the static variant: Saboteur commits to one distribution up
// front, Runner replies optimally against the frozen weights.
struct StaticResult {
  Rational value;
  // Units per distribution slot (non-safe edges in edge order).
  std::vector<int64_t> witness_distribution;
  // Optimal Runner reply against the witness distribution.
  Lasso runner_witness;
};

struct StaticOptions {
  int64_t distribution_cap = 1'000'000;
};

// Plain directed graph, the input of the feedback-arc-set reduction.
struct Digraph {
  std::vector<std::string> vertices;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
};

namespace detail {

inline void require_valid_static(const Qsg& g) {
  ValidationReport rep = validate(g);
  if (!rep.ok()) throw QsgError("game does not validate: " + rep.errors.front());
}

inline void require_static_game(const Qsg& g) {
  require_valid_static(g);
  for (uint32_t v = 0; v < g.vertex_count(); ++v)
    if (g.is_final(v)) throw QsgError("static games do not take final vertices");
}

inline std::vector<char> vertices_reachable_from_initial(const Qsg& g) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<uint32_t> stack{g.initial};
  seen[g.initial] = 1;
  while (!stack.empty()) {
    const uint32_t v = stack.back();
    stack.pop_back();
    for (uint32_t e = g.out_lo(v); e < g.out_hi(v); ++e) {
      const uint32_t to = g.edges[e].second;
      if (!seen[to]) {
        seen[to] = 1;
        stack.push_back(to);
      }
    }
  }
  return seen;
}

// Strongly connected components over the edges accepted by `ok`, iterative
// Tarjan. Vertices with no accepted edges become singleton components.
template <class EdgeOk>
std::vector<uint32_t> qsg_components_filtered(const Qsg& g, EdgeOk&& ok) {
  const uint32_t n = g.vertex_count();
  std::vector<uint32_t> comp(n, UINT32_MAX), index(n, UINT32_MAX), low(n, 0);
  std::vector<uint32_t> stack, scc_stack, edge_it(n, 0);
  std::vector<char> on_stack(n, 0);
  uint32_t next_index = 0, comp_count = 0;
  for (uint32_t root = 0; root < n; ++root) {
    if (index[root] != UINT32_MAX) continue;
    stack.push_back(root);
    while (!stack.empty()) {
      const uint32_t v = stack.back();
      if (index[v] == UINT32_MAX) {
        index[v] = low[v] = next_index++;
        scc_stack.push_back(v);
        on_stack[v] = 1;
        edge_it[v] = g.out_lo(v);
      }
      bool descended = false;
      while (edge_it[v] < g.out_hi(v)) {
        const uint32_t e = edge_it[v]++;
        if (!ok(e)) continue;
        const uint32_t to = g.edges[e].second;
        if (index[to] == UINT32_MAX) {
          stack.push_back(to);
          descended = true;
          break;
        }
        if (on_stack[to]) low[v] = std::min(low[v], index[to]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        for (;;) {
          const uint32_t u = scc_stack.back();
          scc_stack.pop_back();
          on_stack[u] = 0;
          comp[u] = comp_count;
          if (u == v) break;
        }
        ++comp_count;
      }
      stack.pop_back();
      if (!stack.empty()) low[stack.back()] = std::min(low[stack.back()], low[v]);
    }
  }
  return comp;
}

inline std::vector<uint32_t> qsg_components(const Qsg& g) {
  return qsg_components_filtered(g, [](uint32_t) { return true; });
}

}  // namespace detail

// Edges that can appear in some play: their tail is reachable from the
// initial vertex.
inline std::vector<uint32_t> reachable_edges(const Qsg& g) {
  detail::require_valid_static(g);
  const std::vector<char> seen = detail::vertices_reachable_from_initial(g);
  std::vector<uint32_t> result;
  for (uint32_t e = 0; e < g.edge_count(); ++e)
    if (seen[g.edges[e].first]) result.push_back(e);
  return result;
}

// Reachable edges lying inside one strongly connected component; exactly the
// edges a play can cross infinitely often.
inline std::vector<uint32_t> scc_cycle_edges(const Qsg& g) {
  detail::require_valid_static(g);
  const std::vector<char> seen = detail::vertices_reachable_from_initial(g);
  const std::vector<uint32_t> comp = detail::qsg_components(g);
  std::vector<uint32_t> result;
  for (uint32_t e = 0; e < g.edge_count(); ++e)
    if (seen[g.edges[e].first] && comp[g.edges[e].first] == comp[g.edges[e].second])
      result.push_back(e);
  return result;
}

namespace detail {

// Runner's one-player optimum against frozen per-edge weights. Structural
// data (reachability, components) is computed once and shared across
// distributions so the enumeration loop stays allocation-free.
class StaticEvaluator {
 public:
  explicit StaticEvaluator(const Qsg& g)
      : g_(g),
        reachable_(vertices_reachable_from_initial(g)),
        comp_(qsg_components(g)),
        weight_(g.edge_count(), 0),
        alive_(g.vertex_count(), 0),
        seen_comp_(g.vertex_count(), 0),
        degree_(g.vertex_count(), 0) {}

  void freeze(const std::vector<int64_t>& delta, const DistributionDomain& dom) {
    if (delta.size() != dom.size()) throw QsgError("distribution has the wrong arity");
    int64_t total = 0;
    for (int64_t units : delta) {
      if (units < 0) throw QsgError("distribution entries must be nonnegative");
      total += units;
    }
    if (total > g_.budget) throw QsgError("distribution exceeds budget");
    for (uint32_t e = 0; e < g_.edge_count(); ++e) {
      const int32_t item = dom.item_of_edge[e];
      weight_[e] = item < 0 ? 0 : delta[item];
    }
  }

  Rational value(const Cost& cost) {
    switch (cost.kind) {
      case CostKind::Inf:
        return Rational(inf_value());
      case CostKind::Sup:
        return Rational(sup_value());
      case CostKind::LimInf:
        return Rational(liminf_value());
      case CostKind::LimSup:
        return Rational(limsup_value());
      case CostKind::Avg:
        return avg_best().second;
      case CostKind::Disc:
        return disc_value(cost.lambda);
    }
    throw QsgError("unknown cost kind");
  }

  // Optimal Runner reply as an explicit lasso of step weights; checked
  // against the claimed value before returning.
  Lasso reply(const Cost& cost, const Rational& value) {
    std::vector<uint32_t> play;
    std::size_t cut = 0;
    switch (cost.kind) {
      case CostKind::Inf:
        build_inf_reply(play, cut);
        break;
      case CostKind::LimInf:
        build_liminf_reply(play, cut);
        break;
      case CostKind::Sup:
        build_sup_reply(to_int(value), play, cut);
        break;
      case CostKind::LimSup:
        build_limsup_reply(to_int(value), play, cut);
        break;
      case CostKind::Avg:
        build_avg_reply(play, cut);
        break;
      case CostKind::Disc:
        build_disc_reply(cost.lambda, play, cut);
        break;
    }
    Lasso l;
    for (std::size_t i = 0; i < play.size(); ++i)
      (i < cut ? l.prefix : l.cycle).emplace_back(weight_[play[i]]);
    if (evaluate_lasso(cost, l) != value)
      throw QsgError("internal error: static runner witness does not match the value");
    return l;
  }

 private:
  int64_t to_int(const Rational& r) const {
    return boost::multiprecision::numerator(r).convert_to<int64_t>();
  }

  int64_t inf_value() const {
    int64_t best = std::numeric_limits<int64_t>::max();
    for (uint32_t e = 0; e < g_.edge_count(); ++e)
      if (reachable_[g_.edges[e].first]) best = std::min(best, weight_[e]);
    return best;
  }

  int64_t liminf_value() const {
    int64_t best = std::numeric_limits<int64_t>::max();
    for (uint32_t e = 0; e < g_.edge_count(); ++e)
      if (reachable_[g_.edges[e].first] && comp_[g_.edges[e].first] == comp_[g_.edges[e].second])
        best = std::min(best, weight_[e]);
    return best;
  }

  // Least T with an infinite play from the initial vertex inside {w <= T}.
  int64_t sup_value() {
    collect_candidates();
    for (int64_t t : candidates_)
      if (live_at(t)) return t;
    throw QsgError("internal error: no play survives the full weight range");
  }

  // Least T admitting a reachable cycle entirely within {w <= T}; the
  // approach to the cycle may use arbitrary weights.
  int64_t limsup_value() {
    collect_candidates();
    for (int64_t t : candidates_)
      if (has_cheap_cycle(t)) return t;
    throw QsgError("internal error: no cycle survives the full weight range");
  }

  // Minimum cycle mean over reachable components (Karp's recurrence),
  // together with the component achieving it.
  std::pair<uint32_t, Rational> avg_best() {
    std::optional<std::pair<uint32_t, Rational>> best;
    std::fill(seen_comp_.begin(), seen_comp_.end(), 0);
    for (uint32_t v = 0; v < g_.vertex_count(); ++v) {
      const uint32_t c = comp_[v];
      if (!reachable_[v] || seen_comp_[c]) continue;
      seen_comp_[c] = 1;
      if (!component_has_edge(c)) continue;
      const Rational mean = karp_min_mean(c);
      if (!best || mean < best->second) best = {c, mean};
    }
    if (!best) throw QsgError("internal error: a deadlock-free game has no reachable cycle");
    return *best;
  }

  Rational disc_value(const Rational& lambda) const {
    return disc_policy_values(optimal_disc_policy(lambda), lambda)[g_.initial];
  }

  void collect_candidates() {
    candidates_.clear();
    for (uint32_t e = 0; e < g_.edge_count(); ++e)
      if (reachable_[g_.edges[e].first]) candidates_.push_back(weight_[e]);
    std::sort(candidates_.begin(), candidates_.end());
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
  }

  // Prunes reachable vertices lacking a {w <= t} edge to a surviving vertex;
  // fills alive_ and reports whether the initial vertex survives.
  bool live_at(int64_t t) {
    for (uint32_t v = 0; v < g_.vertex_count(); ++v) alive_[v] = reachable_[v];
    for (bool changed = true; changed;) {
      changed = false;
      for (uint32_t v = 0; v < g_.vertex_count(); ++v) {
        if (!alive_[v]) continue;
        bool ok = false;
        for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v) && !ok; ++e)
          ok = weight_[e] <= t && alive_[g_.edges[e].second];
        if (!ok) {
          alive_[v] = 0;
          changed = true;
        }
      }
    }
    return alive_[g_.initial];
  }

  // Kahn's algorithm on the {w <= t} subgraph over reachable vertices; a
  // leftover vertex means a cycle.
  bool has_cheap_cycle(int64_t t) {
    std::fill(degree_.begin(), degree_.end(), 0);
    uint32_t active = 0;
    for (uint32_t v = 0; v < g_.vertex_count(); ++v)
      if (reachable_[v]) ++active;
    for (uint32_t e = 0; e < g_.edge_count(); ++e)
      if (reachable_[g_.edges[e].first] && weight_[e] <= t) ++degree_[g_.edges[e].second];
    queue_.clear();
    for (uint32_t v = 0; v < g_.vertex_count(); ++v)
      if (reachable_[v] && degree_[v] == 0) queue_.push_back(v);
    uint32_t removed = 0;
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      const uint32_t v = queue_[i];
      ++removed;
      for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e) {
        if (weight_[e] > t) continue;
        const uint32_t to = g_.edges[e].second;
        if (--degree_[to] == 0) queue_.push_back(to);
      }
    }
    return removed < active;
  }

  bool component_has_edge(uint32_t c) const {
    for (uint32_t v = 0; v < g_.vertex_count(); ++v) {
      if (comp_[v] != c) continue;
      for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e)
        if (comp_[g_.edges[e].second] == c) return true;
    }
    return false;
  }

  Rational karp_min_mean(uint32_t c) const {
    std::vector<uint32_t> members;
    for (uint32_t v = 0; v < g_.vertex_count(); ++v)
      if (comp_[v] == c) members.push_back(v);
    const uint32_t k = static_cast<uint32_t>(members.size());
    const int64_t inf = std::numeric_limits<int64_t>::max();
    std::vector<uint32_t> local(g_.vertex_count(), UINT32_MAX);
    for (uint32_t i = 0; i < k; ++i) local[members[i]] = i;
    // d[step][i] = least weight of a walk with exactly `step` edges from
    // members[0] to members[i], inside the component.
    std::vector<int64_t> d(static_cast<std::size_t>(k + 1) * k, inf);
    d[0] = 0;
    for (uint32_t step = 1; step <= k; ++step) {
      int64_t* cur = d.data() + static_cast<std::size_t>(step) * k;
      const int64_t* old = cur - k;
      for (uint32_t i = 0; i < k; ++i) {
        if (old[i] == inf) continue;
        const uint32_t v = members[i];
        for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e) {
          const uint32_t to = g_.edges[e].second;
          if (comp_[to] != c) continue;
          int64_t& slot = cur[local[to]];
          slot = std::min(slot, old[i] + weight_[e]);
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
      if (worst && (!best || *worst < *best)) best = *worst;
    }
    if (!best) throw QsgError("internal error: cycle component without a closed walk");
    return *best;
  }

  // One-player discounted optimum by exact policy iteration; the policy maps
  // each reachable vertex to its chosen out-edge.
  std::vector<uint32_t> optimal_disc_policy(const Rational& lambda) const {
    if (!(lambda > 0 && lambda < 1))
      throw QsgError("discount factor must lie strictly between 0 and 1");
    std::vector<uint32_t> policy(g_.vertex_count(), UINT32_MAX);
    for (uint32_t v = 0; v < g_.vertex_count(); ++v)
      if (reachable_[v]) policy[v] = g_.out_lo(v);
    for (;;) {
      const std::vector<Rational> value = disc_policy_values(policy, lambda);
      bool improved = false;
      for (uint32_t v = 0; v < g_.vertex_count(); ++v) {
        if (!reachable_[v]) continue;
        for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e) {
          const Rational cand = Rational(weight_[e]) + lambda * value[g_.edges[e].second];
          if (cand < value[v]) {
            policy[v] = e;
            improved = true;
            break;
          }
        }
      }
      if (!improved) return policy;
    }
  }

  // Exact play values of a fixed out-edge per vertex: walk each chain to its
  // cycle, close the cycle in one formula, then substitute backwards.
  std::vector<Rational> disc_policy_values(const std::vector<uint32_t>& policy,
                                           const Rational& lambda) const {
    const uint32_t n = g_.vertex_count();
    std::vector<Rational> value(n);
    std::vector<char> state(n, 0);  // 0 new, 1 on the current chain, 2 done
    std::vector<uint32_t> chain, pos(n, 0);
    for (uint32_t s0 = 0; s0 < n; ++s0) {
      if (state[s0] != 0 || policy[s0] == UINT32_MAX) continue;
      chain.clear();
      uint32_t v = s0;
      while (state[v] == 0) {
        state[v] = 1;
        pos[v] = static_cast<uint32_t>(chain.size());
        chain.push_back(v);
        v = g_.edges[policy[v]].second;
      }
      std::size_t cut = chain.size();
      if (state[v] == 1) {
        cut = pos[v];
        Rational factor(1), sum(0);
        for (std::size_t i = cut; i < chain.size(); ++i) {
          sum += factor * Rational(weight_[policy[chain[i]]]);
          factor *= lambda;
        }
        value[v] = sum / (Rational(1) - factor);
        Rational acc = value[v];
        for (std::size_t i = chain.size(); i-- > cut + 1;) {
          acc = Rational(weight_[policy[chain[i]]]) + lambda * acc;
          value[chain[i]] = acc;
        }
      }
      for (std::size_t i = cut; i-- > 0;)
        value[chain[i]] =
            Rational(weight_[policy[chain[i]]]) + lambda * value[g_.edges[policy[chain[i]]].second];
      for (uint32_t u : chain) state[u] = 2;
    }
    return value;
  }

  // Lowest-index-first BFS path between vertices along edges accepted by
  // `ok`; empty when from == to.
  template <class EdgeOk>
  std::vector<uint32_t> edge_path(uint32_t from, uint32_t to, EdgeOk&& ok) const {
    std::vector<uint32_t> parent_edge(g_.vertex_count(), UINT32_MAX);
    std::vector<char> seen(g_.vertex_count(), 0);
    std::vector<uint32_t> queue{from};
    seen[from] = 1;
    for (std::size_t i = 0; i < queue.size() && !seen[to]; ++i) {
      const uint32_t v = queue[i];
      for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e) {
        const uint32_t next = g_.edges[e].second;
        if (seen[next] || !ok(e)) continue;
        seen[next] = 1;
        parent_edge[next] = e;
        queue.push_back(next);
      }
    }
    if (!seen[to]) throw QsgError("internal error: witness path does not exist");
    std::vector<uint32_t> path;
    for (uint32_t v = to; v != from;) {
      const uint32_t e = parent_edge[v];
      path.push_back(e);
      v = g_.edges[e].first;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Extends `play` with a per-vertex-deterministic walk from `start` until a
  // vertex repeats; `cut` receives the index where the cycle begins.
  template <class Choose>
  void walk_deterministic(uint32_t start, Choose&& choose, std::vector<uint32_t>& play,
                          std::size_t& cut) const {
    std::vector<uint32_t> first_visit(g_.vertex_count(), UINT32_MAX);
    uint32_t v = start;
    while (first_visit[v] == UINT32_MAX) {
      first_visit[v] = static_cast<uint32_t>(play.size());
      const uint32_t e = choose(v);
      play.push_back(e);
      v = g_.edges[e].second;
    }
    cut = first_visit[v];
  }

  // The global minimum sits in the prefix; any continuation closes the lasso.
  void build_inf_reply(std::vector<uint32_t>& play, std::size_t& cut) const {
    uint32_t star = UINT32_MAX;
    for (uint32_t e = 0; e < g_.edge_count(); ++e)
      if (reachable_[g_.edges[e].first] && (star == UINT32_MAX || weight_[e] < weight_[star]))
        star = e;
    play = edge_path(g_.initial, g_.edges[star].first, [](uint32_t) { return true; });
    play.push_back(star);
    walk_deterministic(
        g_.edges[star].second, [&](uint32_t v) { return g_.out_lo(v); }, play, cut);
  }

  // The cycle crosses the cheapest intra-component edge and returns to its
  // tail inside the same component.
  void build_liminf_reply(std::vector<uint32_t>& play, std::size_t& cut) const {
    uint32_t star = UINT32_MAX;
    for (uint32_t e = 0; e < g_.edge_count(); ++e)
      if (reachable_[g_.edges[e].first] && comp_[g_.edges[e].first] == comp_[g_.edges[e].second] &&
          (star == UINT32_MAX || weight_[e] < weight_[star]))
        star = e;
    const uint32_t a = g_.edges[star].first, b = g_.edges[star].second;
    play = edge_path(g_.initial, a, [](uint32_t) { return true; });
    cut = play.size();
    play.push_back(star);
    const std::vector<uint32_t> back =
        edge_path(b, a, [&](uint32_t e) { return comp_[g_.edges[e].second] == comp_[a]; });
    play.insert(play.end(), back.begin(), back.end());
  }

  // Walk the pruned {w <= t} subgraph; by minimality of t the walk's maximum
  // is exactly t.
  void build_sup_reply(int64_t t, std::vector<uint32_t>& play, std::size_t& cut) {
    if (!live_at(t)) throw QsgError("internal error: the initial vertex is dead at its own value");
    walk_deterministic(
        g_.initial,
        [&](uint32_t v) {
          for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e)
            if (weight_[e] <= t && alive_[g_.edges[e].second]) return e;
          throw QsgError("internal error: pruned vertex on the witness walk");
        },
        play, cut);
  }

  // Reach a cycle of the {w <= t} subgraph; by minimality of t its maximum
  // is exactly t, and the prefix is free to use heavier edges.
  void build_limsup_reply(int64_t t, std::vector<uint32_t>& play, std::size_t& cut) const {
    const std::vector<uint32_t> sub = qsg_components_filtered(
        g_, [&](uint32_t e) { return reachable_[g_.edges[e].first] && weight_[e] <= t; });
    uint32_t star = UINT32_MAX;
    for (uint32_t e = 0; e < g_.edge_count() && star == UINT32_MAX; ++e)
      if (reachable_[g_.edges[e].first] && weight_[e] <= t &&
          sub[g_.edges[e].first] == sub[g_.edges[e].second])
        star = e;
    if (star == UINT32_MAX)
      throw QsgError("internal error: no cheap cycle at the limit-supremum value");
    const uint32_t a = g_.edges[star].first, b = g_.edges[star].second;
    play = edge_path(g_.initial, a, [](uint32_t) { return true; });
    cut = play.size();
    play.push_back(star);
    const std::vector<uint32_t> back = edge_path(
        b, a, [&](uint32_t e) { return weight_[e] <= t && sub[g_.edges[e].second] == sub[a]; });
    play.insert(play.end(), back.begin(), back.end());
  }

  // Reach a minimum-mean cycle: shortest-path potentials on shifted weights
  // q*w - p make every edge of such a cycle tight, and every cycle of the
  // tight subgraph has mean exactly p/q.
  void build_avg_reply(std::vector<uint32_t>& play, std::size_t& cut) {
    const auto [c, mean] = avg_best();
    const int64_t p = boost::multiprecision::numerator(mean).convert_to<int64_t>();
    const int64_t q = boost::multiprecision::denominator(mean).convert_to<int64_t>();
    std::vector<uint32_t> members;
    for (uint32_t v = 0; v < g_.vertex_count(); ++v)
      if (comp_[v] == c) members.push_back(v);
    const auto shifted = [&](uint32_t e) { return q * weight_[e] - p; };
    const auto in_comp = [&](uint32_t e) {
      return comp_[g_.edges[e].first] == c && comp_[g_.edges[e].second] == c;
    };
    std::vector<int64_t> d(g_.vertex_count(), 0);
    for (std::size_t round = 0; round < members.size(); ++round)
      for (uint32_t v : members)
        for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e)
          if (in_comp(e)) {
            int64_t& slot = d[g_.edges[e].second];
            slot = std::min(slot, d[v] + shifted(e));
          }
    const auto tight = [&](uint32_t e) {
      return in_comp(e) && d[g_.edges[e].first] + shifted(e) == d[g_.edges[e].second];
    };
    // Three-color DFS over tight edges; the first back edge closes a cycle.
    std::vector<char> color(g_.vertex_count(), 0);
    std::vector<uint32_t> path, path_edge, it(g_.vertex_count(), 0);
    std::vector<uint32_t> cycle;
    for (uint32_t root : members) {
      if (color[root] != 0) continue;
      if (!cycle.empty()) break;
      color[root] = 1;
      it[root] = g_.out_lo(root);
      path = {root};
      path_edge = {UINT32_MAX};
      while (!path.empty() && cycle.empty()) {
        const uint32_t u = path.back();
        bool advanced = false;
        while (it[u] < g_.out_hi(u)) {
          const uint32_t e = it[u]++;
          if (!tight(e)) continue;
          const uint32_t x = g_.edges[e].second;
          if (color[x] == 0) {
            color[x] = 1;
            it[x] = g_.out_lo(x);
            path.push_back(x);
            path_edge.push_back(e);
            advanced = true;
            break;
          }
          if (color[x] == 1) {
            std::size_t j = path.size();
            while (path[--j] != x) {
            }
            cycle.assign(path_edge.begin() + static_cast<std::ptrdiff_t>(j + 1), path_edge.end());
            cycle.push_back(e);
            break;
          }
        }
        if (advanced || !cycle.empty()) continue;
        color[u] = 2;
        path.pop_back();
        path_edge.pop_back();
      }
    }
    if (cycle.empty()) throw QsgError("internal error: tight subgraph lost its cycle");
    const uint32_t entry = g_.edges[cycle.front()].first;
    play = edge_path(g_.initial, entry, [](uint32_t) { return true; });
    cut = play.size();
    play.insert(play.end(), cycle.begin(), cycle.end());
  }

  void build_disc_reply(const Rational& lambda, std::vector<uint32_t>& play,
                        std::size_t& cut) const {
    const std::vector<uint32_t> policy = optimal_disc_policy(lambda);
    walk_deterministic(
        g_.initial, [&](uint32_t v) { return policy[v]; }, play, cut);
  }

  const Qsg& g_;
  std::vector<char> reachable_;
  std::vector<uint32_t> comp_;
  std::vector<int64_t> weight_;
  std::vector<char> alive_;
  std::vector<char> seen_comp_;
  std::vector<uint32_t> degree_;
  std::vector<uint32_t> queue_;
  std::vector<int64_t> candidates_;
};

}  // namespace detail

// Runner's optimal value when the weights are frozen to `delta` (indexed by
// the game's distribution slots) for the whole play.
inline Rational one_player_value(const Qsg& g, const std::vector<int64_t>& delta,
                                 const Cost& cost) {
  detail::require_static_game(g);
  detail::StaticEvaluator eval(g);
  eval.freeze(delta, distribution_domain(g));
  return eval.value(cost);
}

// Polynomial closed form for the infimum costs: spreading the budget evenly
// over the edges Runner can use, some such edge keeps at most
// floor(B / |edge set|) units, and the even spread achieves that bound.
inline StaticResult static_value_closed_form(const Qsg& g, CostKind kind) {
  detail::require_static_game(g);
  if (kind != CostKind::Inf && kind != CostKind::LimInf)
    throw QsgError("closed forms exist only for the infimum and limit-infimum costs");
  if (g.is_extended()) throw QsgError("closed forms assume a game without safe edges");
  const std::vector<uint32_t> support =
      kind == CostKind::Inf ? reachable_edges(g) : scc_cycle_edges(g);
  assert(!support.empty());  // deadlock-freedom forces a reachable cycle
  const int64_t m = static_cast<int64_t>(support.size());
  const int64_t per = g.budget / m;
  const int64_t rem = g.budget % m;

  const DistributionDomain dom = distribution_domain(g);
  StaticResult result;
  result.value = Rational(per);
  result.witness_distribution.assign(dom.size(), 0);
  for (int64_t i = 0; i < m; ++i)
    result.witness_distribution[dom.item_of_edge[support[i]]] = per + (i < rem ? 1 : 0);

  detail::StaticEvaluator eval(g);
  eval.freeze(result.witness_distribution, dom);
  const Cost cost = cost_of(kind);
  if (eval.value(cost) != result.value)
    throw QsgError("internal error: closed-form witness misses the claimed value");
  result.runner_witness = eval.reply(cost, result.value);
  return result;
}

// Saboteur's best up-front distribution: closed form where one exists,
// otherwise maximize the one-player value over all distributions. Ties keep
// the lexicographically least witness.
inline StaticResult static_value(const Qsg& g, const StaticOptions& opts = {}) {
  detail::require_static_game(g);
  if (!g.is_extended() && (g.cost.kind == CostKind::Inf || g.cost.kind == CostKind::LimInf))
    return static_value_closed_form(g, g.cost.kind);

  const DistributionDomain dom = distribution_domain(g);
  const BigInt count = distribution_count(dom.size(), g.budget);
  if (count > opts.distribution_cap)
    throw CapExceeded("static enumeration needs " + count.str() +
                          " distributions, above the cap of " +
                          std::to_string(opts.distribution_cap),
                      count);

  detail::StaticEvaluator eval(g);
  std::optional<Rational> best;
  std::vector<int64_t> best_delta;
  enumerate_distributions(dom.size(), g.budget, [&](const std::vector<int64_t>& d) {
    eval.freeze(d, dom);
    Rational v = eval.value(g.cost);
    if (!best || v > *best) {
      best = std::move(v);
      best_delta = d;
    }
  });

  StaticResult result;
  result.value = *best;
  result.witness_distribution = std::move(best_delta);
  eval.freeze(result.witness_distribution, dom);
  result.runner_witness = eval.reply(g.cost, result.value);
  return result;
}

inline bool static_threshold(const Qsg& g, const Rational& bound, const StaticOptions& opts = {}) {
  if (bound < 0) throw QsgError("threshold bound must be nonnegative");
  return static_value(g, opts).value <= bound;
}

// Feedback arc set as a static game: a fresh initial vertex linked to every
// original vertex, budget k. The emitted game has positive static value
// exactly when k units can mark an edge on every cycle. For Sup and Disc the
// initial edges are safe so the approach to a free cycle stays free.
inline Qsg fas_to_qsg(const Digraph& input, int64_t k, CostKind kind,
                      const Rational& lambda = Rational(1, 2), bool repair_sinks = false) {
  if (input.vertices.empty()) throw QsgError("feedback arc set needs at least one vertex");
  for (const auto& [a, b] : input.edges)
    if (a >= input.vertices.size() || b >= input.vertices.size())
      throw QsgError("edge endpoint out of range");
  if (kind == CostKind::Inf || kind == CostKind::LimInf)
    throw QsgError("the infimum costs cannot express feedback arc set");
  const bool safe_initial_edges = kind == CostKind::Sup || kind == CostKind::Disc;

  std::vector<std::pair<uint32_t, uint32_t>> edges = input.edges;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  if (k < 0) throw QsgError("feedback budget must be nonnegative");
  if (k > static_cast<int64_t>(edges.size()))
    throw QsgError("feedback budget exceeds the edge count");

  std::vector<char> has_out(input.vertices.size(), 0);
  for (const auto& [a, b] : edges) has_out[a] = 1;
  for (uint32_t v = 0; v < input.vertices.size(); ++v) {
    if (has_out[v]) continue;
    if (!repair_sinks)
      throw QsgError("vertex '" + input.vertices[v] +
                     "' has no outgoing edge; repair_sinks adds a self-loop");
    edges.emplace_back(v, v);
  }

  std::string initial = "vI";
  while (std::find(input.vertices.begin(), input.vertices.end(), initial) != input.vertices.end())
    initial += "_";

  QsgBuilder builder;
  builder.vertex(initial);
  for (const std::string& name : input.vertices) builder.vertex(name);
  for (const auto& [a, b] : edges) builder.edge(input.vertices[a], input.vertices[b]);
  for (const std::string& name : input.vertices) builder.edge(initial, name, safe_initial_edges);

  const Cost cost = kind == CostKind::Disc ? cost_disc(lambda) : cost_of(kind);
  Qsg game = builder.finish(k, initial, cost);
  detail::require_static_game(game);
  return game;
}

}  // namespace qsg
