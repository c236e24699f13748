#pragma once

#include "qsg/game.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace qsg {

// How a discounted objective reads the transition weights of an encoded game:
// per_half_step duplicates each round weight on both half-steps (only used by
// the undiscounted kinds, where stuttering is harmless); discounted_rounds
// puts the round weight on the Min half-step, zero on the Max half-step, and
// the solver applies lambda once per round.
enum class DiscountMode { per_half_step, discounted_rounds };

namespace state_type {
constexpr uint32_t k_min = 0;       // Runner decides; index = vertex id
constexpr uint32_t k_max = 1;       // Saboteur decides; index = edge index
constexpr uint32_t k_terminal = 2;  // absorbing; index 0 = bad, 1 = win
}  // namespace state_type

constexpr uint32_t k_terminal_bad = 0;
constexpr uint32_t k_terminal_win = 1;

inline uint64_t pack_state(uint32_t type, uint32_t index, uint32_t dist) {
  return (static_cast<uint64_t>(type) << 62) | (static_cast<uint64_t>(index) << 32) | dist;
}
inline uint32_t state_type_of(uint64_t payload) { return static_cast<uint32_t>(payload >> 62); }
inline uint32_t state_index_of(uint64_t payload) {
  return static_cast<uint32_t>((payload >> 32) & 0x3fffffffu);
}
inline uint32_t state_dist_of(uint64_t payload) { return static_cast<uint32_t>(payload); }

// Two-player zero-sum game on a finite weighted graph. States are dense ids;
// transitions are a CSR; `payload` records what each state encodes.
struct WeightedGame {
  std::vector<char> owner;           // 0 = Min moves, 1 = Max moves
  std::vector<uint32_t> succ_begin;  // CSR: transitions of s are [succ_begin[s], succ_begin[s+1])
  std::vector<uint32_t> succ;        // transition targets
  std::vector<int32_t> weight;       // transition weights; empty means all-zero
  uint32_t initial = 0;
  DiscountMode discount_mode = DiscountMode::per_half_step;
  int32_t max_weight = 0;

  std::vector<uint64_t> payload;            // packed provenance per state
  std::vector<std::vector<int64_t>> dists;  // interned distributions, by dist id

  uint32_t state_count() const { return static_cast<uint32_t>(owner.size()); }
  uint32_t transition_count() const { return static_cast<uint32_t>(succ.size()); }
  uint32_t lo(uint32_t s) const { return succ_begin[s]; }
  uint32_t hi(uint32_t s) const { return succ_begin[s + 1]; }
  int32_t w(uint32_t t) const { return weight.empty() ? 0 : weight[t]; }
  bool is_min(uint32_t s) const { return owner[s] == 0; }
};

// Reverse adjacency with transition indices, for backward fixpoints.
struct ReverseGame {
  std::vector<uint32_t> pred_begin;
  std::vector<uint32_t> pred_state;  // source state of the incoming transition
  std::vector<uint32_t> pred_trans;  // index of that transition in the forward CSR

  explicit ReverseGame(const WeightedGame& g) {
    const uint32_t n = g.state_count();
    pred_begin.assign(n + 1, 0);
    for (uint32_t t = 0; t < g.transition_count(); ++t) ++pred_begin[g.succ[t] + 1];
    for (uint32_t s = 0; s < n; ++s) pred_begin[s + 1] += pred_begin[s];
    pred_state.resize(g.transition_count());
    pred_trans.resize(g.transition_count());
    std::vector<uint32_t> fill(pred_begin.begin(), pred_begin.end() - 1);
    for (uint32_t s = 0; s < n; ++s) {
      for (uint32_t t = g.lo(s); t < g.hi(s); ++t) {
        uint32_t at = fill[g.succ[t]]++;
        pred_state[at] = s;
        pred_trans[at] = t;
      }
    }
  }
};

inline std::string render_distribution(const Qsg& g, const DistributionDomain& dom,
                                       const std::vector<int64_t>& d) {
  std::string out = "{";
  bool first = true;
  for (uint32_t i = 0; i < dom.size(); ++i) {
    if (d[i] == 0) continue;
    if (!first) out += ", ";
    first = false;
    const auto& item = dom.items[i];
    out += item.is_final ? g.vertices[item.index]
                         : g.vertices[g.edges[item.index].first] + "->" +
                               g.vertices[g.edges[item.index].second];
    out += ":" + std::to_string(d[i]);
  }
  return out + "}";
}

inline std::string state_label(const WeightedGame& wg, const Qsg& g,
                               const DistributionDomain& dom, uint32_t s) {
  const uint64_t p = wg.payload[s];
  switch (state_type_of(p)) {
    case state_type::k_min:
      return "(" + g.vertices[state_index_of(p)] + ", " +
             render_distribution(g, dom, wg.dists[state_dist_of(p)]) + ")";
    case state_type::k_max: {
      const Edge& e = g.edges[state_index_of(p)];
      return "((" + g.vertices[e.first] + "->" + g.vertices[e.second] + "), " +
             render_distribution(g, dom, wg.dists[state_dist_of(p)]) + ")";
    }
    default:
      return state_index_of(p) == k_terminal_win ? "WIN" : "BAD";
  }
}

struct DistVectorHash {
  std::size_t operator()(const std::vector<int64_t>& v) const {
    uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int64_t x : v) {
      h ^= static_cast<uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

using DistInterner = std::unordered_map<std::vector<int64_t>, uint32_t, DistVectorHash>;

}  // namespace qsg
