#pragma once

#include "qsg/weighted_game.hpp"

#include <cstdint>
#include <vector>

namespace qsg {

// Target of an attractor / Büchi computation: a play "hits" the target by
// entering a flagged state or by taking a flagged transition.
struct TargetSet {
  std::vector<char> state;       // by state id; may be empty
  std::vector<char> transition;  // by transition index; may be empty

  bool has_state(uint32_t s) const { return s < state.size() && state[s]; }
  bool has_transition(uint32_t t) const { return t < transition.size() && transition[t]; }
};

struct AttractorResult {
  std::vector<char> in;             // member of the attractor
  std::vector<uint32_t> strategy;   // for attracted player states: transition index to follow
};

// Least set from which `player` (0 = the Min owner side, 1 = Max) can force
// hitting the target. `alive` restricts to a subgame: dead states are ignored
// and a transition counts only when both its endpoints are alive. A player
// state already sitting on a live target transition is attracted immediately,
// with that transition as its strategy.
inline AttractorResult attractor(const WeightedGame& g, const ReverseGame& rev, int player,
                                 const TargetSet& target, const std::vector<char>* alive = nullptr) {
  const uint32_t n = g.state_count();
  auto live = [&](uint32_t s) { return !alive || (*alive)[s]; };

  AttractorResult res;
  res.in.assign(n, 0);
  res.strategy.assign(n, UINT32_MAX);
  std::vector<uint32_t> counter(n, 0);
  std::vector<uint32_t> queue;
  queue.reserve(n);

  for (uint32_t s = 0; s < n; ++s) {
    if (!live(s)) continue;
    if (target.has_state(s)) {
      res.in[s] = 1;
      queue.push_back(s);
      continue;
    }
    const bool mine = (g.owner[s] != 0) == (player != 0);
    uint32_t plain = 0;  // live transitions that are not themselves targets
    uint32_t target_trans = UINT32_MAX;
    for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
      if (!live(g.succ[t])) continue;
      if (target.has_transition(t))
        target_trans = std::min(target_trans, t);
      else
        ++plain;
    }
    if (mine && target_trans != UINT32_MAX) {
      res.in[s] = 1;
      res.strategy[s] = target_trans;
      queue.push_back(s);
    } else if (!mine) {
      counter[s] = plain;
      if (plain == 0) {
        // Every live move of the opponent hits the target, or it has none.
        res.in[s] = 1;
        queue.push_back(s);
      }
    }
  }

  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const uint32_t s = queue[qi];
    for (uint32_t p = rev.pred_begin[s]; p < rev.pred_begin[s + 1]; ++p) {
      const uint32_t src = rev.pred_state[p];
      const uint32_t t = rev.pred_trans[p];
      if (!live(src) || res.in[src]) continue;
      if (target.has_transition(t)) continue;  // already excluded from the counter
      const bool mine = (g.owner[src] != 0) == (player != 0);
      if (mine) {
        res.in[src] = 1;
        res.strategy[src] = t;
        queue.push_back(src);
      } else if (--counter[src] == 0) {
        res.in[src] = 1;
        queue.push_back(src);
      }
    }
  }
  return res;
}

struct BuchiResult {
  std::vector<char> win;                    // `player` forces hitting the target infinitely often
  std::vector<uint32_t> strategy_player;    // defined on win
  std::vector<uint32_t> strategy_opponent;  // defined on the complement
};

// Classical recurrence loop: repeatedly remove the opponent attractor of the
// region from which `player` cannot even reach the target once.
inline BuchiResult solve_buchi(const WeightedGame& g, const ReverseGame& rev, int player,
                               const TargetSet& target, const std::vector<char>* alive = nullptr) {
  const uint32_t n = g.state_count();
  BuchiResult res;
  res.strategy_player.assign(n, UINT32_MAX);
  res.strategy_opponent.assign(n, UINT32_MAX);

  std::vector<char> w(n, 1);
  if (alive) w = *alive;

  for (;;) {
    AttractorResult reach = attractor(g, rev, player, target, &w);
    std::vector<char> u(n, 0);
    bool u_empty = true;
    for (uint32_t s = 0; s < n; ++s)
      if (w[s] && !reach.in[s]) {
        u[s] = 1;
        u_empty = false;
      }
    if (u_empty) {
      // `player` wins everywhere in w: repeat the attractor strategy; states
      // flagged as targets continue with any move that stays in w.
      for (uint32_t s = 0; s < n; ++s) {
        if (!w[s] || ((g.owner[s] != 0) != (player != 0))) continue;
        if (reach.strategy[s] != UINT32_MAX) {
          res.strategy_player[s] = reach.strategy[s];
          continue;
        }
        for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
          if (w[g.succ[t]]) {
            res.strategy_player[s] = t;
            break;
          }
        }
      }
      res.win = std::move(w);
      return res;
    }

    TargetSet u_target;
    u_target.state = u;
    AttractorResult esc = attractor(g, rev, 1 - player, u_target, &w);
    for (uint32_t s = 0; s < n; ++s) {
      if (!w[s] || !esc.in[s] || ((g.owner[s] != 0) == (player != 0))) continue;
      if (u[s]) {
        // Inside u the opponent can stay without ever hitting the target: a
        // non-target move back into u exists, else s would have been attracted.
        for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
          if (!target.has_transition(t) && u[g.succ[t]]) {
            res.strategy_opponent[s] = t;
            break;
          }
        }
      } else {
        res.strategy_opponent[s] = esc.strategy[s];
      }
    }
    for (uint32_t s = 0; s < n; ++s)
      if (esc.in[s]) w[s] = 0;
  }
}

}  // namespace qsg
