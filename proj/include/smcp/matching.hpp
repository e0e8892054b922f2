#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smcp/graph.hpp"
#include "smcp/rng.hpp"

namespace smcp {

// Maximum-cardinality matching on a general graph (Edmonds' blossom
// algorithm, O(n^3)). Free vertices are scanned as roots in ascending order
// and adjacency lists in ascending order, so the result is a deterministic
// function of the graph. This output is the canonical maximum matching M(H)
// used by both the Monte Carlo estimator and the exact q* tables.
Matching max_matching(const RealizedGraph& g);

// Exhaustive search returning the lexicographically smallest maximum
// matching under ascending edge order. Accepts graphs with at most 24 edges
// or at most 12 vertices; throws kTooLarge otherwise.
Matching brute_force_max_matching(const RealizedGraph& g);

// Matching of size >= (1 - zeta) * maximum: starting from the greedy maximal
// matching, augments along paths of length <= 2*ceil(1/zeta) - 1 until none
// remain. Requires 0 < zeta < 1.
Matching approx_max_matching(const RealizedGraph& g, double zeta);

// Greedy maximal matching in ascending edge order.
Matching greedy_maximal_matching(const RealizedGraph& g);

// Enumeration guard for exact computations over all realizations.
inline constexpr int kMaxExactPairs = 20;

struct ExactQTable {
  std::vector<Pair> pairs;  // the positive pairs of the source graph, ascending
  std::vector<double> q;    // q*_e aligned with pairs
  double total = 0.0;       // sum of q*, equal to E[|OPT|]

  double value(Pair e) const;
  // Q_u = sum over v of q*_uv.
  std::vector<double> vertex_totals(int n) const;
};

// Enumerates all 2^m realizations (m <= kMaxExactPairs) and accumulates the
// probability that each pair lies in the canonical maximum matching.
ExactQTable exact_q_table(const ProbGraph& g);

enum class OptMode { kExact, kMonteCarlo };

struct OptEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half-width; 0 when exact
  std::uint64_t trials = 0;
};

// E[|maximum matching|]. Exact mode enumerates realizations; Monte Carlo mode
// averages max_matching over `trials` seeded realizations (trials >= 2).
OptEstimate expected_opt(const ProbGraph& g, OptMode mode, std::uint64_t trials = 0,
                         std::uint64_t seed = 0);

// Realization of trial `index` of a seeded campaign; shared by the experiment
// runner and Monte Carlo OPT so paired trials see identical graphs.
RealizedGraph trial_realization(const ProbGraph& g, std::uint64_t seed, std::uint64_t index);

}  // namespace smcp
