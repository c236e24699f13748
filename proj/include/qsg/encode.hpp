#pragma once

#include "qsg/game.hpp"
#include "qsg/weighted_game.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace qsg {

struct EncodeOptions {
  int64_t state_cap = 5'000'000;
};

namespace detail {

// Shared machinery for the two configuration-game builders: states are
// discovered breadth-first from the initial configuration, ids in discovery
// order, successors of each state emitted before the next state is expanded.
class ConfigGameBuilder {
 public:
  // store_weights=false drops the per-transition weight vector (for encodings
  // whose weights are all zero anyway). mark_moves=true restricts Saboteur to
  // 0/1 distributions: at most floor(B/k) items hold exactly one unit each.
  ConfigGameBuilder(const Qsg& g, const EncodeOptions& opt, bool store_weights = true,
                    bool mark_moves = false)
      : g_(g),
        opt_(opt),
        dom_(distribution_domain(g)),
        store_weights_(store_weights),
        mark_moves_(mark_moves) {}

  const DistributionDomain& dom() const { return dom_; }

  uint32_t intern_dist(const std::vector<int64_t>& d) {
    auto it = dist_ids_.find(d);
    if (it != dist_ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(wg_.dists.size());
    wg_.dists.push_back(d);
    dist_ids_.emplace(d, id);
    return id;
  }

  // Redistribution successor dist ids, in lexicographic distribution order
  // (mark mode: identity, then removals, additions, and item-to-item moves).
  const std::vector<uint32_t>& moves(uint32_t dist_id) {
    if (dist_id < move_cache_.size() && !move_cache_[dist_id].empty())
      return move_cache_[dist_id];
    if (dist_id >= move_cache_.size()) move_cache_.resize(dist_id + 1);
    std::vector<uint32_t> ids;
    if (mark_moves_) {
      const std::vector<int64_t> d = wg_.dists[dist_id];
      const std::size_t m = d.size();
      const int64_t cap = g_.budget / g_.granularity;
      int64_t marked = 0;
      for (int64_t u : d) marked += u;
      ids.push_back(dist_id);
      std::vector<int64_t> d2 = d;
      for (std::size_t i = 0; i < m; ++i) {
        if (!d[i]) continue;
        d2[i] = 0;
        ids.push_back(intern_dist(d2));
        d2[i] = 1;
      }
      if (marked < cap)
        for (std::size_t j = 0; j < m; ++j) {
          if (d[j]) continue;
          d2[j] = 1;
          ids.push_back(intern_dist(d2));
          d2[j] = 0;
        }
      for (std::size_t i = 0; i < m; ++i) {
        if (!d[i]) continue;
        d2[i] = 0;
        for (std::size_t j = 0; j < m; ++j) {
          if (d[j] || j == i) continue;
          d2[j] = 1;
          ids.push_back(intern_dist(d2));
          d2[j] = 0;
        }
        d2[i] = 1;
      }
    } else {
      auto deltas = redistributions(wg_.dists[dist_id], g_.budget, g_.granularity);
      ids.reserve(deltas.size());
      for (auto& d : deltas) ids.push_back(intern_dist(d));
    }
    move_cache_[dist_id] = std::move(ids);
    return move_cache_[dist_id];
  }

  uint32_t state(uint32_t type, uint32_t index, uint32_t dist) {
    const uint64_t key = pack_state(type, index, dist);
    auto it = state_ids_.find(key);
    if (it != state_ids_.end()) return it->second;
    if (static_cast<int64_t>(wg_.owner.size()) >= opt_.state_cap)
      throw CapExceeded("reachable configuration count exceeds the state cap of " +
                            std::to_string(opt_.state_cap),
                        BigInt(wg_.owner.size()) + 1);
    uint32_t id = static_cast<uint32_t>(wg_.owner.size());
    wg_.owner.push_back(type == state_type::k_max ? 1 : 0);
    wg_.payload.push_back(key);
    state_ids_.emplace(key, id);
    return id;
  }

  // Run BFS: expand(state_id, payload) must append this state's transitions
  // via add_transition. Returns the finished game.
  template <typename Expand>
  WeightedGame run(uint32_t initial_type, uint32_t initial_index, uint32_t initial_dist,
                   Expand&& expand) {
    wg_.initial = state(initial_type, initial_index, initial_dist);
    for (uint32_t s = 0; s < wg_.owner.size(); ++s) {
      wg_.succ_begin.push_back(static_cast<uint32_t>(wg_.succ.size()));
      expand(s, wg_.payload[s]);
    }
    wg_.succ_begin.push_back(static_cast<uint32_t>(wg_.succ.size()));
    for (int32_t w : wg_.weight) wg_.max_weight = std::max(wg_.max_weight, w);
    return std::move(wg_);
  }

  void add_transition(uint32_t to, int32_t w) {
    wg_.succ.push_back(to);
    if (store_weights_) wg_.weight.push_back(w);
  }

  const std::vector<int64_t>& dist(uint32_t id) const { return wg_.dists[id]; }

 private:
  const Qsg& g_;
  const EncodeOptions& opt_;
  DistributionDomain dom_;
  bool store_weights_;
  bool mark_moves_;
  WeightedGame wg_;
  DistInterner dist_ids_;
  std::unordered_map<uint64_t, uint32_t> state_ids_;
  std::vector<std::vector<uint32_t>> move_cache_;
};

}  // namespace detail

// The configuration game of a plain QSG: Min states (v, delta) pick an
// out-edge, Max states (e, delta) pick a redistribution; both half-steps of a
// round carry the crossed edge's budget, except under discounted_rounds where
// the Max half-step carries 0 and the solver discounts once per round.
inline WeightedGame encode(const Qsg& g, const EncodeOptions& opt = {}) {
  {
    ValidationReport rep = validate(g);
    if (!rep.ok()) throw QsgError("game does not validate: " + rep.errors.front());
  }
  if (g.is_extended())
    throw QsgError("extended games are encoded via the safety encoder");

  detail::ConfigGameBuilder b(g, opt);
  const bool disc = g.cost.kind == CostKind::Disc;
  const DistributionDomain& dom = b.dom();

  uint32_t d0 = b.intern_dist(initial_distribution(g, dom));
  WeightedGame wg = b.run(state_type::k_min, g.initial, d0, [&](uint32_t, uint64_t payload) {
    const uint32_t index = state_index_of(payload);
    const uint32_t dist = state_dist_of(payload);
    if (state_type_of(payload) == state_type::k_min) {
      for (uint32_t e = g.out_lo(index); e < g.out_hi(index); ++e) {
        int32_t w = static_cast<int32_t>(b.dist(dist)[dom.item_of_edge[e]]);
        b.add_transition(b.state(state_type::k_max, e, dist), w);
      }
    } else {
      const uint32_t head = g.edges[index].second;
      int32_t w = disc ? 0 : static_cast<int32_t>(b.dist(dist)[dom.item_of_edge[index]]);
      for (uint32_t d2 : b.moves(dist))
        b.add_transition(b.state(state_type::k_min, head, d2), w);
    }
  });
  wg.discount_mode = disc ? DiscountMode::discounted_rounds : DiscountMode::per_half_step;
  return wg;
}

// Safety configuration game for SPr / ESPr instances: Runner must forever
// avoid crossing positively weighted edges; final vertices absorb, winning
// for Runner exactly when they carry no budget at arrival.
struct SafetyGame {
  WeightedGame game;
  uint32_t bad_state = UINT32_MAX;  // absent if never reachable
  uint32_t win_state = UINT32_MAX;
};

// With mark_quotient set, Saboteur places pairwise distinct marks instead of
// free unit counts. For threshold-0 safety from an empty initial distribution
// the winner is unchanged: any edge holding at least one unit is equally
// deadly, so only the set of touched items matters, and a placement that
// stacks units uses fewer than floor(B/k) items, leaving room to mark any
// item a stacking move would have topped up. The quotient never enlarges the
// state space and shrinks it sharply for large budgets.
inline SafetyGame encode_safety(const Qsg& g, const EncodeOptions& opt = {},
                                bool mark_quotient = false) {
  {
    ValidationReport rep = validate(g);
    if (!rep.ok()) throw QsgError("game does not validate: " + rep.errors.front());
  }
  if (g.cost.kind != CostKind::Sup)
    throw QsgError("the safety encoding requires the Sup cost");

  detail::ConfigGameBuilder b(g, opt, /*store_weights=*/false,
                              /*mark_moves=*/mark_quotient);
  const DistributionDomain& dom = b.dom();
  SafetyGame out;

  auto bad = [&]() {
    uint32_t s = b.state(state_type::k_terminal, k_terminal_bad, 0);
    out.bad_state = s;
    return s;
  };
  auto win = [&]() {
    uint32_t s = b.state(state_type::k_terminal, k_terminal_win, 0);
    out.win_state = s;
    return s;
  };

  uint32_t d0 = b.intern_dist(initial_distribution(g, dom));
  out.game = b.run(state_type::k_min, g.initial, d0, [&](uint32_t, uint64_t payload) {
    const uint32_t index = state_index_of(payload);
    const uint32_t dist = state_dist_of(payload);
    switch (state_type_of(payload)) {
      case state_type::k_terminal:
        b.add_transition(b.state(state_type::k_terminal, index, 0), 0);  // absorbing
        return;
      case state_type::k_min: {
        if (g.is_final(index)) {  // only possible for the initial state
          bool clean = b.dist(dist)[dom.item_of_final[index]] == 0;
          b.add_transition(clean ? win() : bad(), 0);
          return;
        }
        for (uint32_t e = g.out_lo(index); e < g.out_hi(index); ++e) {
          int64_t w = g.is_safe(e) ? 0 : b.dist(dist)[dom.item_of_edge[e]];
          const uint32_t head = g.edges[e].second;
          if (w > 0) {
            b.add_transition(bad(), 0);
          } else if (g.is_final(head)) {
            // The game stops the moment Runner arrives: the final vertex's
            // budget is read before Saboteur may redistribute.
            bool clean = b.dist(dist)[dom.item_of_final[head]] == 0;
            b.add_transition(clean ? win() : bad(), 0);
          } else {
            b.add_transition(b.state(state_type::k_max, e, dist), 0);
          }
        }
        return;
      }
      default: {  // Max redistribution step; head is never final here
        const uint32_t head = g.edges[index].second;
        for (uint32_t d2 : b.moves(dist))
          b.add_transition(b.state(state_type::k_min, head, d2), 0);
        return;
      }
    }
  });
  return out;
}

}  // namespace qsg
