#pragma once

#include "qsg/rational.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsg {

enum class CostKind { Inf, Sup, LimInf, LimSup, Avg, Disc };

inline const char* cost_kind_name(CostKind k) {
  switch (k) {
    case CostKind::Inf: return "Inf";
    case CostKind::Sup: return "Sup";
    case CostKind::LimInf: return "LimInf";
    case CostKind::LimSup: return "LimSup";
    case CostKind::Avg: return "Avg";
    case CostKind::Disc: return "Disc";
  }
  return "?";
}

inline std::optional<CostKind> cost_kind_from_string(std::string_view s) {
  if (s == "Inf") return CostKind::Inf;
  if (s == "Sup") return CostKind::Sup;
  if (s == "LimInf") return CostKind::LimInf;
  if (s == "LimSup") return CostKind::LimSup;
  if (s == "Avg") return CostKind::Avg;
  if (s == "Disc") return CostKind::Disc;
  return std::nullopt;
}

struct Cost {
  CostKind kind = CostKind::Sup;
  Rational lambda;  // meaningful only when kind == Disc
};

inline Cost cost_of(CostKind kind) { return Cost{kind, Rational()}; }
inline Cost cost_disc(const Rational& lambda) { return Cost{CostKind::Disc, lambda}; }

// Ordered pair (source, target); lexicographic order of pairs is the canonical
// edge order everywhere.
using Edge = std::pair<uint32_t, uint32_t>;

// A sabotage game. Plain games have no final vertices and no safe edges; the
// extended variant marks some. The budget distribution lives on edges for
// plain games and on (non-safe edges + final vertices) for extended ones.
struct Qsg {
  std::vector<std::string> vertices;  // index is the vertex id
  std::vector<Edge> edges;            // sorted lexicographically after normalize()
  std::vector<int64_t> delta0_edge;   // initial units per edge
  std::vector<int64_t> delta0_final;  // initial units per vertex (extended only)
  std::vector<char> safe_edge;        // per-edge flag (extended only)
  std::vector<char> final_vertex;     // per-vertex flag (extended only)
  int64_t budget = 0;
  uint32_t initial = 0;
  Cost cost;
  int64_t granularity = 1;
  std::optional<Rational> threshold;

  // CSR over the sorted edge list: out-edges of v are indices
  // [out_begin[v], out_begin[v+1]) into `edges`.
  std::vector<uint32_t> out_begin;

  uint32_t vertex_count() const { return static_cast<uint32_t>(vertices.size()); }
  uint32_t edge_count() const { return static_cast<uint32_t>(edges.size()); }

  bool is_final(uint32_t v) const { return v < final_vertex.size() && final_vertex[v]; }
  bool is_safe(uint32_t e) const { return e < safe_edge.size() && safe_edge[e]; }
  bool is_extended() const {
    return std::find(final_vertex.begin(), final_vertex.end(), char(1)) != final_vertex.end() ||
           std::find(safe_edge.begin(), safe_edge.end(), char(1)) != safe_edge.end();
  }

  uint32_t out_lo(uint32_t v) const { return out_begin[v]; }
  uint32_t out_hi(uint32_t v) const { return out_begin[v + 1]; }
  uint32_t out_degree(uint32_t v) const { return out_hi(v) - out_lo(v); }

  // Index of (a, b) in the sorted edge list, or UINT32_MAX if absent.
  uint32_t edge_index(uint32_t a, uint32_t b) const {
    Edge key{a, b};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) return UINT32_MAX;
    return static_cast<uint32_t>(it - edges.begin());
  }

  const std::string& edge_name(uint32_t e, std::string& buf) const {
    buf = vertices[edges[e].first] + "->" + vertices[edges[e].second];
    return buf;
  }

  // Sorts the edge list (carrying per-edge data along), pads the per-vertex /
  // per-edge vectors, and rebuilds the CSR index. Idempotent. Duplicate edges
  // are kept; validate() reports them.
  void normalize() {
    const std::size_t n = vertices.size();
    const std::size_t m = edges.size();
    delta0_edge.resize(m, 0);
    safe_edge.resize(m, 0);
    delta0_final.resize(n, 0);
    final_vertex.resize(n, 0);

    std::vector<uint32_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0u);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](uint32_t a, uint32_t b) { return edges[a] < edges[b]; });
    std::vector<Edge> es(m);
    std::vector<int64_t> du(m);
    std::vector<char> sf(m);
    for (std::size_t i = 0; i < m; ++i) {
      es[i] = edges[perm[i]];
      du[i] = delta0_edge[perm[i]];
      sf[i] = safe_edge[perm[i]];
    }
    edges = std::move(es);
    delta0_edge = std::move(du);
    safe_edge = std::move(sf);

    out_begin.assign(n + 1, 0);
    for (const Edge& e : edges)
      if (e.first < n) ++out_begin[e.first + 1];
    for (std::size_t v = 0; v < n; ++v) out_begin[v + 1] += out_begin[v];
  }
};

// Incremental construction helper: vertices are created on first mention and
// keep their mention order as ids; call finish() once to normalize.
class QsgBuilder {
 public:
  uint32_t vertex(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(g_.vertices.size());
    g_.vertices.push_back(name);
    g_.final_vertex.push_back(0);
    g_.delta0_final.push_back(0);
    index_.emplace(name, id);
    return id;
  }

  void make_final(const std::string& name) { g_.final_vertex[vertex(name)] = 1; }

  void edge(const std::string& a, const std::string& b, bool safe = false, int64_t units = 0) {
    vertex(a);
    vertex(b);
    g_.edges.emplace_back(index_.at(a), index_.at(b));
    g_.safe_edge.push_back(safe ? 1 : 0);
    g_.delta0_edge.push_back(units);
  }

  bool has_edge(const std::string& a, const std::string& b) const {
    auto ia = index_.find(a), ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end()) return false;
    Edge key{ia->second, ib->second};
    return std::find(g_.edges.begin(), g_.edges.end(), key) != g_.edges.end();
  }

  Qsg finish(int64_t budget, const std::string& initial, Cost cost, int64_t granularity = 1) {
    g_.budget = budget;
    g_.initial = vertex(initial);
    g_.cost = cost;
    g_.granularity = granularity;
    g_.normalize();
    return std::move(g_);
  }

 private:
  Qsg g_;
  std::map<std::string, uint32_t> index_;
};

struct ValidationReport {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const Qsg& g) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) { rep.errors.push_back(std::move(msg)); };

  const std::size_t n = g.vertices.size();
  const std::size_t m = g.edges.size();

  if (n == 0) fail("game has no vertices");
  {
    std::vector<std::string> names = g.vertices;
    std::sort(names.begin(), names.end());
    for (std::size_t i = 0; i + 1 < names.size(); ++i)
      if (names[i] == names[i + 1]) fail("duplicate vertex name '" + names[i] + "'");
    for (const std::string& name : g.vertices)
      if (name.empty()) fail("empty vertex name");
  }
  if (g.initial >= n) fail("initial vertex out of range");

  if (g.delta0_edge.size() != m || g.safe_edge.size() != m || g.out_begin.size() != n + 1 ||
      g.delta0_final.size() != n || g.final_vertex.size() != n) {
    fail("game is not normalized (call normalize() after construction)");
    return rep;
  }

  bool endpoints_ok = true;
  for (std::size_t e = 0; e < m; ++e) {
    if (g.edges[e].first >= n || g.edges[e].second >= n) {
      std::string a = g.edges[e].first < n ? g.vertices[g.edges[e].first]
                                           : "#" + std::to_string(g.edges[e].first);
      std::string b = g.edges[e].second < n ? g.vertices[g.edges[e].second]
                                            : "#" + std::to_string(g.edges[e].second);
      fail("edge " + a + "->" + b + " references an unknown vertex");
      endpoints_ok = false;
    }
  }
  if (!std::is_sorted(g.edges.begin(), g.edges.end()))
    fail("edge list is not sorted (call normalize() after construction)");
  for (std::size_t e = 0; e + 1 < m; ++e)
    if (g.edges[e] == g.edges[e + 1] && g.edges[e].first < n && g.edges[e].second < n)
      fail("duplicate edge " + g.vertices[g.edges[e].first] + "->" +
           g.vertices[g.edges[e].second]);

  if (endpoints_ok) {
    for (uint32_t v = 0; v < n; ++v) {
      if (g.out_degree(v) == 0 && !g.is_final(v)) fail("deadlock at vertex " + g.vertices[v]);
    }
  }

  if (g.budget < 0) fail("budget is negative");
  if (g.granularity < 1) fail("move granularity must be positive");

  int64_t total = 0;
  for (std::size_t e = 0; e < m; ++e) {
    if (g.delta0_edge[e] < 0)
      fail("negative initial budget on edge " + g.vertices[g.edges[e].first] + "->" +
           g.vertices[g.edges[e].second]);
    else
      total += g.delta0_edge[e];
    if (g.delta0_edge[e] > 0 && g.is_safe(e))
      fail("initial budget on safe edge " + g.vertices[g.edges[e].first] + "->" +
           g.vertices[g.edges[e].second]);
  }
  for (uint32_t v = 0; v < n; ++v) {
    if (g.delta0_final[v] < 0)
      fail("negative initial budget on vertex " + g.vertices[v]);
    else
      total += g.delta0_final[v];
    if (g.delta0_final[v] > 0 && !g.is_final(v))
      fail("initial budget on non-final vertex " + g.vertices[v]);
  }
  if (total > g.budget) fail("distribution exceeds budget");

  if (g.cost.kind == CostKind::Disc) {
    if (!(g.cost.lambda > 0 && g.cost.lambda < 1))
      fail("discount factor must lie strictly between 0 and 1");
  }
  if (g.threshold && *g.threshold < 0) fail("threshold is negative");

  return rep;
}

// The slots a budget distribution ranges over: every non-safe edge (in edge
// order), then every final vertex (in vertex order).
struct DistributionDomain {
  std::vector<int32_t> item_of_edge;   // edge index -> item index, -1 for safe edges
  std::vector<int32_t> item_of_final;  // vertex id -> item index, -1 otherwise
  struct Item {
    bool is_final;
    uint32_t index;  // edge index or vertex id
  };
  std::vector<Item> items;

  uint32_t size() const { return static_cast<uint32_t>(items.size()); }
};

inline DistributionDomain distribution_domain(const Qsg& g) {
  DistributionDomain dom;
  dom.item_of_edge.assign(g.edge_count(), -1);
  dom.item_of_final.assign(g.vertex_count(), -1);
  for (uint32_t e = 0; e < g.edge_count(); ++e) {
    if (g.is_safe(e)) continue;
    dom.item_of_edge[e] = static_cast<int32_t>(dom.items.size());
    dom.items.push_back({false, e});
  }
  for (uint32_t v = 0; v < g.vertex_count(); ++v) {
    if (!g.is_final(v)) continue;
    dom.item_of_final[v] = static_cast<int32_t>(dom.items.size());
    dom.items.push_back({true, v});
  }
  return dom;
}

inline std::vector<int64_t> initial_distribution(const Qsg& g, const DistributionDomain& dom) {
  std::vector<int64_t> d(dom.size(), 0);
  for (uint32_t e = 0; e < g.edge_count(); ++e)
    if (dom.item_of_edge[e] >= 0) d[dom.item_of_edge[e]] = g.delta0_edge[e];
  for (uint32_t v = 0; v < g.vertex_count(); ++v)
    if (dom.item_of_final[v] >= 0) d[dom.item_of_final[v]] = g.delta0_final[v];
  return d;
}

// C(items + budget, budget): the number of ways to place at most `budget`
// indistinguishable units on `items` slots.
inline BigInt distribution_count(int64_t items, int64_t budget) {
  assert(items >= 0 && budget >= 0);
  BigInt r = 1;
  for (int64_t i = 1; i <= budget; ++i) {
    r *= items + i;
    r /= i;  // exact: r is a running binomial coefficient
  }
  return r;
}

// Emits every vector d >= 0 with sum(d) <= budget in ascending lexicographic
// order, starting from all-zero.
template <typename F>
void enumerate_distributions(std::size_t items, int64_t budget, F&& f) {
  std::vector<int64_t> d(items, 0);
  if (items == 0) {
    f(const_cast<const std::vector<int64_t>&>(d));
    return;
  }
  int64_t sum = 0;
  for (;;) {
    f(const_cast<const std::vector<int64_t>&>(d));
    if (sum < budget) {
      ++d.back();
      ++sum;
      continue;
    }
    // sum == budget: drop the rightmost block and carry one unit left.
    std::size_t j = items;
    while (j > 0 && d[j - 1] == 0) --j;
    if (j <= 1) return;  // all remaining weight sits on d[0]: lexicographic maximum
    sum -= d[j - 1];
    d[j - 1] = 0;
    ++d[j - 2];
    ++sum;
  }
}

// All delta' with delta |> delta': move granularity-many units between two
// items or between one item and the undistributed reserve, or change nothing.
// Sorted lexicographically; always contains delta itself.
inline std::vector<std::vector<int64_t>> redistributions(const std::vector<int64_t>& delta,
                                                         int64_t budget,
                                                         int64_t granularity = 1) {
  const int64_t k = granularity;
  assert(k >= 1);
  const int64_t sum = std::accumulate(delta.begin(), delta.end(), int64_t{0});
  assert(sum <= budget);

  std::vector<std::vector<int64_t>> out;
  out.push_back(delta);
  const bool can_pick_up = sum + k <= budget;
  if (can_pick_up) {
    for (std::size_t j = 0; j < delta.size(); ++j) {
      out.push_back(delta);
      out.back()[j] += k;
    }
  }
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i] < k) continue;
    out.push_back(delta);
    out.back()[i] -= k;  // drop to the reserve
    for (std::size_t j = 0; j < delta.size(); ++j) {
      if (j == i) continue;
      out.push_back(delta);
      out.back()[i] -= k;
      out.back()[j] += k;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::vector<int64_t>> redistributions(const std::vector<int64_t>& delta,
                                                         const Qsg& g) {
  return redistributions(delta, g.budget, g.granularity);
}

// Ultimately-periodic weight sequence: prefix once, then cycle forever.
struct Lasso {
  std::vector<Rational> prefix;
  std::vector<Rational> cycle;
};

inline Rational evaluate_lasso(const Cost& cost, const Lasso& lasso) {
  if (lasso.cycle.empty()) throw QsgError("lasso cycle must be non-empty");
  auto min_of = [](const std::vector<Rational>& xs, std::optional<Rational> acc) {
    for (const Rational& x : xs)
      if (!acc || x < *acc) acc = x;
    return acc;
  };
  auto max_of = [](const std::vector<Rational>& xs, std::optional<Rational> acc) {
    for (const Rational& x : xs)
      if (!acc || x > *acc) acc = x;
    return acc;
  };
  switch (cost.kind) {
    case CostKind::Inf:
      return *min_of(lasso.cycle, min_of(lasso.prefix, std::nullopt));
    case CostKind::Sup:
      return *max_of(lasso.cycle, max_of(lasso.prefix, std::nullopt));
    case CostKind::LimInf:
      return *min_of(lasso.cycle, std::nullopt);
    case CostKind::LimSup:
      return *max_of(lasso.cycle, std::nullopt);
    case CostKind::Avg: {
      Rational s = 0;
      for (const Rational& w : lasso.cycle) s += w;
      return s / static_cast<int64_t>(lasso.cycle.size());
    }
    case CostKind::Disc: {
      const Rational& lambda = cost.lambda;
      if (!(lambda > 0 && lambda < 1))
        throw QsgError("discount factor must lie strictly between 0 and 1");
      Rational acc = 0, pw = 1;
      for (const Rational& w : lasso.prefix) {
        acc += pw * w;
        pw *= lambda;
      }
      Rational cyc = 0, cw = 1;
      for (const Rational& w : lasso.cycle) {
        cyc += cw * w;
        cw *= lambda;
      }
      // pw = lambda^|prefix|, cw = lambda^|cycle| at this point.
      return acc + pw * cyc / (1 - cw);
    }
  }
  throw QsgError("unknown cost kind");
}

}  // namespace qsg
