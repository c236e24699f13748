#pragma once

#include "qsg/encode.hpp"
#include "qsg/fixpoints.hpp"
#include "qsg/game.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace qsg::detail {

// Decides "value <= T" for the qualitative costs (Inf, Sup, LimInf, LimSup)
// directly on the configuration graph, without materializing the encoded
// game. Saboteur moves are factored through an intermediate "unit in hand"
// layer: instead of one transition per redistribution (quadratic in the item
// count), a Max state first lifts a unit off an item (or picks one up from
// the reserve) and then places it on an item (or drops it back). This keeps
// the transition count near-linear in the item count. The detour is sound
// for these four costs because the round charge is read when the Min state
// crosses an edge, i.e. on entry to the Max state, and the intermediate
// states carry no charge of their own.
//
// State layout (all ids are positions in one arithmetic product, no hashing
// during the fixpoint):
//   min  (v, d)   -> v*D + d                    owner Min
//   max  (e, d)   -> n*D + e*D + d              owner Max
//   hand (e, mu)  -> (n+m)*D + e*Dm + row(mu)   owner Max
// where d ranks the full distribution pool (sum <= B, lexicographic) and
// row(mu) ranks the sub-pool with sum <= B - k (k = move granularity).
class ThresholdConfigEngine {
 public:
  ThresholdConfigEngine(const Qsg& g, int64_t threshold, int64_t state_cap) : g_(g), t_(threshold) {
    if (g.is_extended()) throw QsgError("the configuration engine handles plain games only");
    n_ = g.vertex_count();
    m_ = g.edge_count();
    const int64_t k = g.granularity;
    const int64_t sub_budget = g.budget - k;

    BigInt d_big = distribution_count(m_, g.budget);
    BigInt dm_big = sub_budget >= 0 ? distribution_count(m_, sub_budget) : BigInt(0);
    BigInt total_big = BigInt(n_ + m_) * d_big + BigInt(m_) * dm_big;
    if (total_big > state_cap)
      throw CapExceeded("configuration graph exceeds the state cap", total_big);

    if (d_big > BigInt(UINT32_MAX))
      throw CapExceeded("configuration graph exceeds the state cap", total_big);
    d_count_ = static_cast<uint32_t>(d_big);
    sub_count_ = static_cast<uint32_t>(dm_big);
    total_ = static_cast<uint64_t>(n_ + m_) * d_count_ + static_cast<uint64_t>(m_) * sub_count_;

    pool_.reserve(static_cast<std::size_t>(d_count_) * m_);
    std::unordered_map<std::vector<int64_t>, uint32_t, DistVectorHash> rank;
    rank.reserve(d_count_ * 2);
    sub_index_.assign(d_count_, -1);
    sub_rank_.reserve(sub_count_);
    enumerate_distributions(m_, g.budget, [&](const std::vector<int64_t>& d) {
      const uint32_t r = static_cast<uint32_t>(rank.size());
      rank.emplace(d, r);
      pool_.insert(pool_.end(), d.begin(), d.end());
      int64_t sum = 0;
      for (int64_t u : d) sum += u;
      if (sum <= sub_budget) {
        sub_index_[r] = static_cast<int32_t>(sub_rank_.size());
        sub_rank_.push_back(r);
      }
    });

    // add_[row*m + j]: rank of mu + k on item j (always within budget).
    // lift_row_[lift_begin_[d] ..]: the sub-rows reachable from d by lifting
    // k units off one item, grouped by d (one entry per item carrying >= k).
    add_.assign(static_cast<std::size_t>(sub_count_) * m_, 0);
    std::vector<int64_t> tmp(m_);
    for (uint32_t row = 0; row < sub_count_; ++row) {
      const int64_t* mu = dist(sub_rank_[row]);
      tmp.assign(mu, mu + m_);
      for (uint32_t j = 0; j < m_; ++j) {
        tmp[j] += k;
        add_[static_cast<std::size_t>(row) * m_ + j] = rank.at(tmp);
        tmp[j] -= k;
      }
    }
    lift_begin_.assign(static_cast<std::size_t>(d_count_) + 1, 0);
    for (uint32_t target : add_) ++lift_begin_[target + 1];
    for (uint32_t d = 0; d < d_count_; ++d) lift_begin_[d + 1] += lift_begin_[d];
    lift_row_.assign(add_.size(), 0);
    {
      std::vector<uint32_t> pos(lift_begin_.begin(), lift_begin_.end() - 1);
      for (uint32_t row = 0; row < sub_count_; ++row)
        for (uint32_t j = 0; j < m_; ++j)
          lift_row_[pos[add_[static_cast<std::size_t>(row) * m_ + j]]++] = row;
    }

    // In-edges per vertex, for predecessor enumeration.
    in_begin_.assign(n_ + 1, 0);
    for (const Edge& e : g.edges) ++in_begin_[e.second + 1];
    for (uint32_t v = 0; v < n_; ++v) in_begin_[v + 1] += in_begin_[v];
    in_edge_.assign(m_, 0);
    std::vector<uint32_t> fill(in_begin_.begin(), in_begin_.end() - 1);
    for (uint32_t e = 0; e < m_; ++e) in_edge_[fill[g.edges[e].second]++] = e;

    DistributionDomain dom = distribution_domain(g);
    std::vector<int64_t> init = initial_distribution(g, dom);
    initial_ = min_id(g.initial, rank.at(init));
  }

  uint64_t state_count() const { return total_; }

  // Min wins "cost <= T" from the initial configuration.
  bool min_wins(CostKind kind) {
    auto cheap = [this](uint64_t s) { return is_max(s) && charge(s) <= t_; };
    auto expensive = [this](uint64_t s) { return is_max(s) && charge(s) > t_; };
    switch (kind) {
      case CostKind::Inf:
        return attract(0, cheap, all_alive())[initial_];
      case CostKind::Sup:
        return !attract(1, expensive, all_alive())[initial_];
      case CostKind::LimInf:
        return buchi(0, cheap)[initial_];
      case CostKind::LimSup:
        return !buchi(1, expensive)[initial_];
      default:
        throw QsgError("the configuration engine handles qualitative costs only");
    }
  }

 private:
  uint64_t min_id(uint32_t v, uint32_t d) const { return static_cast<uint64_t>(v) * d_count_ + d; }
  uint64_t max_id(uint32_t e, uint32_t d) const {
    return static_cast<uint64_t>(n_) * d_count_ + static_cast<uint64_t>(e) * d_count_ + d;
  }
  uint64_t hand_id(uint32_t e, uint32_t row) const {
    return static_cast<uint64_t>(n_ + m_) * d_count_ + static_cast<uint64_t>(e) * sub_count_ + row;
  }
  bool is_min(uint64_t s) const { return s < static_cast<uint64_t>(n_) * d_count_; }
  bool is_max(uint64_t s) const {
    return s >= static_cast<uint64_t>(n_) * d_count_ && s < static_cast<uint64_t>(n_ + m_) * d_count_;
  }
  int owner(uint64_t s) const { return is_min(s) ? 0 : 1; }
  const int64_t* dist(uint32_t d) const { return pool_.data() + static_cast<std::size_t>(d) * m_; }

  // Charge of a Max state: the budget its edge carried when Runner crossed it.
  int64_t charge(uint64_t s) const {
    const uint64_t idx = s - static_cast<uint64_t>(n_) * d_count_;
    const uint32_t e = static_cast<uint32_t>(idx / d_count_);
    const uint32_t d = static_cast<uint32_t>(idx % d_count_);
    return dist(d)[e];
  }

  template <class Fn>
  void for_each_succ(uint64_t s, Fn&& fn) const {
    if (is_min(s)) {
      const uint32_t v = static_cast<uint32_t>(s / d_count_);
      const uint32_t d = static_cast<uint32_t>(s % d_count_);
      for (uint32_t e = g_.out_lo(v); e < g_.out_hi(v); ++e) fn(max_id(e, d));
      return;
    }
    if (is_max(s)) {
      const uint64_t idx = s - static_cast<uint64_t>(n_) * d_count_;
      const uint32_t e = static_cast<uint32_t>(idx / d_count_);
      const uint32_t d = static_cast<uint32_t>(idx % d_count_);
      fn(min_id(g_.edges[e].second, d));  // keep the distribution unchanged
      for (uint32_t p = lift_begin_[d]; p < lift_begin_[d + 1]; ++p)
        fn(hand_id(e, lift_row_[p]));  // lift a unit off one item
      if (sub_index_[d] >= 0) fn(hand_id(e, static_cast<uint32_t>(sub_index_[d])));  // pick up from the reserve
      return;
    }
    const uint64_t idx = s - static_cast<uint64_t>(n_ + m_) * d_count_;
    const uint32_t e = static_cast<uint32_t>(idx / sub_count_);
    const uint32_t row = static_cast<uint32_t>(idx % sub_count_);
    const uint32_t head = g_.edges[e].second;
    fn(min_id(head, sub_rank_[row]));  // drop the unit into the reserve
    const uint32_t* add = add_.data() + static_cast<std::size_t>(row) * m_;
    for (uint32_t j = 0; j < m_; ++j) fn(min_id(head, add[j]));  // place the unit on item j
  }

  template <class Fn>
  void for_each_pred(uint64_t s, Fn&& fn) const {
    if (is_min(s)) {
      const uint32_t v = static_cast<uint32_t>(s / d_count_);
      const uint32_t d = static_cast<uint32_t>(s % d_count_);
      for (uint32_t p = in_begin_[v]; p < in_begin_[v + 1]; ++p) {
        const uint32_t e = in_edge_[p];
        fn(max_id(e, d));  // arrival without redistribution
        if (sub_index_[d] >= 0)
          fn(hand_id(e, static_cast<uint32_t>(sub_index_[d])));  // a unit was dropped
        for (uint32_t q = lift_begin_[d]; q < lift_begin_[d + 1]; ++q)
          fn(hand_id(e, lift_row_[q]));  // a unit was placed
      }
      return;
    }
    if (is_max(s)) {
      const uint64_t idx = s - static_cast<uint64_t>(n_) * d_count_;
      const uint32_t e = static_cast<uint32_t>(idx / d_count_);
      const uint32_t d = static_cast<uint32_t>(idx % d_count_);
      fn(min_id(g_.edges[e].first, d));
      return;
    }
    const uint64_t idx = s - static_cast<uint64_t>(n_ + m_) * d_count_;
    const uint32_t e = static_cast<uint32_t>(idx / sub_count_);
    const uint32_t row = static_cast<uint32_t>(idx % sub_count_);
    fn(max_id(e, sub_rank_[row]));  // pickup entry
    const uint32_t* add = add_.data() + static_cast<std::size_t>(row) * m_;
    for (uint32_t i = 0; i < m_; ++i) fn(max_id(e, add[i]));  // lift entries
  }

  const std::vector<char>& all_alive() {
    if (all_.size() != total_) all_.assign(total_, 1);
    return all_;
  }

  template <class Pred>
  std::vector<char> attract(int player, Pred target, const std::vector<char>& alive) {
    std::vector<char> in(total_, 0);
    counter_.assign(total_, 0);
    queue_.clear();
    for (uint64_t s = 0; s < total_; ++s) {
      if (!alive[s]) continue;
      if (target(s)) {
        in[s] = 1;
        queue_.push_back(s);
        continue;
      }
      if (owner(s) != player) {
        uint32_t deg = 0;
        for_each_succ(s, [&](uint64_t t) { deg += alive[t]; });
        counter_[s] = deg;
        if (deg == 0) {
          in[s] = 1;
          queue_.push_back(s);
        }
      }
    }
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
      const uint64_t s = queue_[qi];
      for_each_pred(s, [&](uint64_t p) {
        if (!alive[p] || in[p]) return;
        if (owner(p) == player) {
          in[p] = 1;
          queue_.push_back(p);
        } else if (--counter_[p] == 0) {
          in[p] = 1;
          queue_.push_back(p);
        }
      });
    }
    return in;
  }

  template <class Pred>
  std::vector<char> buchi(int player, Pred target) {
    std::vector<char> w(total_, 1);
    for (;;) {
      std::vector<char> reach = attract(player, target, w);
      std::vector<char> u(total_, 0);
      bool u_empty = true;
      for (uint64_t s = 0; s < total_; ++s)
        if (w[s] && !reach[s]) {
          u[s] = 1;
          u_empty = false;
        }
      if (u_empty) return w;
      std::vector<char> esc = attract(1 - player, [&](uint64_t s) { return u[s] != 0; }, w);
      for (uint64_t s = 0; s < total_; ++s)
        if (esc[s]) w[s] = 0;
    }
  }

  const Qsg& g_;
  int64_t t_;
  uint32_t n_ = 0, m_ = 0;
  uint32_t d_count_ = 0, sub_count_ = 0;
  uint64_t total_ = 0;
  uint64_t initial_ = 0;
  std::vector<int64_t> pool_;
  std::vector<int32_t> sub_index_;
  std::vector<uint32_t> sub_rank_;
  std::vector<uint32_t> add_;
  std::vector<uint32_t> lift_begin_, lift_row_;
  std::vector<uint32_t> in_begin_, in_edge_;
  std::vector<char> all_;
  std::vector<uint32_t> counter_;
  std::vector<uint64_t> queue_;
};

inline bool decide_qualitative_threshold(const Qsg& g, CostKind kind, int64_t threshold,
                                         int64_t state_cap) {
  ThresholdConfigEngine engine(g, threshold, state_cap);
  return engine.min_wins(kind);
}

}  // namespace qsg::detail
