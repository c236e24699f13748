#pragma once

// Seeded random game generator. The same parameters and seed always produce
// the same game, independent of platform: the only entropy source is a
// mt19937_64 consumed in a fixed draw order (out-edge targets, extra edges,
// initial vertex, distribution rank).

#include "qsg/game.hpp"

#include <cassert>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace qsg {

namespace gen_detail {

// Uniform value in [0, count), drawn by rejection over whole 64-bit chunks
// truncated to the bit length of count - 1.
inline BigInt uniform_bigint(std::mt19937_64& rng, const BigInt& count) {
  if (count <= 1) return BigInt(0);
  const unsigned bits = boost::multiprecision::msb(BigInt(count - 1)) + 1;
  const unsigned chunks = (bits + 63) / 64;
  for (;;) {
    BigInt r = 0;
    for (unsigned i = 0; i < chunks; ++i) r = (r << 64) | BigInt(rng());
    r >>= chunks * 64 - bits;
    if (r < count) return r;
  }
}

// Inverse of the ascending order emitted by enumerate_distributions: the
// distributions with first entry t form a contiguous block of size
// C((items-1) + (budget-t), budget-t).
inline std::vector<int64_t> unrank_distribution(uint32_t items, int64_t budget, BigInt rank) {
  std::vector<int64_t> d(items, 0);
  int64_t left = budget;
  for (uint32_t i = 0; i < items; ++i) {
    for (int64_t t = 0; t <= left; ++t) {
      BigInt block = distribution_count(int64_t(items) - i - 1, left - t);
      if (rank < block) {
        d[i] = t;
        left -= t;
        break;
      }
      rank -= block;
    }
  }
  assert(rank == 0);
  return d;
}

}  // namespace gen_detail

// Random plain game on `vertices` vertices and `edges` distinct edges. Every
// vertex first receives one uniformly random out-edge, so the result is
// deadlock-free; the remaining edges are drawn uniformly among the unused
// pairs. The initial vertex is uniform, and the initial distribution is
// uniform over all placements of at most `budget` units on the edges.
inline Qsg generate_random(uint32_t vertices, uint32_t edges, int64_t budget, const Cost& cost,
                           uint64_t seed) {
  if (vertices == 0) throw QsgError("infeasible parameters: need at least one vertex");
  if (budget < 0) throw QsgError("infeasible parameters: budget must be nonnegative");
  if (edges < vertices)
    throw QsgError("infeasible parameters: every vertex needs an out-edge (edges >= vertices)");
  if (uint64_t(edges) > uint64_t(vertices) * uint64_t(vertices))
    throw QsgError("infeasible parameters: a simple digraph on n vertices has at most n^2 edges");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> pick(0, vertices - 1);

  std::vector<Edge> chosen;
  std::set<Edge> seen;
  for (uint32_t v = 0; v < vertices; ++v) {
    Edge e{v, pick(rng)};
    seen.insert(e);
    chosen.push_back(e);
  }
  while (chosen.size() < edges) {
    Edge e{pick(rng), pick(rng)};
    if (seen.insert(e).second) chosen.push_back(e);
  }

  Qsg g;
  for (uint32_t v = 0; v < vertices; ++v) g.vertices.push_back("v" + std::to_string(v));
  g.edges = std::move(chosen);
  g.budget = budget;
  g.cost = cost;
  g.initial = pick(rng);
  g.normalize();

  BigInt rank = gen_detail::uniform_bigint(rng, distribution_count(edges, budget));
  g.delta0_edge = gen_detail::unrank_distribution(edges, budget, rank);

  ValidationReport report = validate(g);
  if (!report.ok())
    throw QsgError("generated game does not validate: " + report.errors.front());
  return g;
}

}  // namespace qsg
