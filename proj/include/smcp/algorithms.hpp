#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "smcp/graph.hpp"
#include "smcp/q_estimator.hpp"
#include "smcp/rng.hpp"

namespace smcp {

// How Stage 1 obtains q: Monte Carlo with the paper or fast sample count, or
// exact enumeration (at most kMaxExactPairs positive pairs in the residual).
enum class QProfile { kPaper, kFast, kExact };

QProfile parse_q_profile(std::string_view name);
std::string_view to_string(QProfile profile);

struct TwoStageConfig {
  double alpha = 0.255;
  QProfile q_profile = QProfile::kFast;
  std::uint64_t samples = 0;  // overrides the profile's sample count when > 0
  double zeta = 0.05;
  std::uint64_t seed = 0;
  Matcher matcher;
  bool relabel = false;
  int workers = 1;                 // threads per Monte Carlo estimate
  ExactQCache* cache = nullptr;    // optional, exact profile only

  // Throws kInvalidArgument unless 0 < alpha < 1 and 0 < zeta < 1.
  void validate() const;
};

struct ProbeEvent {
  Pair pair;
  bool present = false;
  int stage = 1;
  int iteration = 0;  // Stage-2 iteration, 0-based; 0 in Stage 1
  double q = 0.0;     // estimate used when the probe was chosen
  double p = 0.0;
};

struct RunRecord {
  Matching matching;
  std::vector<ProbeEvent> probes;
  int stage1_matches = 0;
  int stage2_matches = 0;
  int estimations = 0;

  // Stage-2 diagnostics. entry_q[v] is Q_v of the frozen estimate over the
  // candidate pairs at Stage-2 entry. left[i] and right[i] are the sorted
  // sides of iteration i; first_r_matched[j] tells whether right[0][j] was
  // matched during the first iteration.
  bool stage2_ran = false;
  std::vector<double> entry_q;
  std::vector<std::vector<Vertex>> left;
  std::vector<std::vector<Vertex>> right;
  std::vector<char> first_r_matched;
};

// (1 - 1/e)(1 - e^{-1/(2 alpha)}).
double phi_factor(double alpha);

// Stage 1 probes the candidate with the largest q/p (ties to the smallest
// pair) while that ratio is at least alpha, re-estimating q on the residual
// graph every recompute_schedule(sum q, zeta) probes (every probe in exact
// mode) and always on a fresh estimate before stopping. Stage 2 freezes q,
// splits the alive vertices at random (L gets the odd one out), lets every
// L vertex in ascending order scan its R candidates in an order drawn from
// the sampler on delta-scaled targets, and recurses on the alive part of R.
RunRecord run_two_stage(const ProbGraph& g, Prober& prober, const TwoStageConfig& cfg);

enum class GreedyOrder { kIndex, kRandom };

// Probes every positive pair whose endpoints are still free, in ascending
// edge order or a uniformly random one.
RunRecord run_greedy(const ProbGraph& g, Prober& prober, GreedyOrder order, Rng& rng);

// Vertices in random order; each free vertex probes its candidates in random
// order until it is matched or runs out.
RunRecord run_random_vertex_greedy(const ProbGraph& g, Prober& prober, Rng& rng);

// Both sides of the two-colouring permuted at random; left vertices in that
// order probe right candidates in the right permutation's order. Throws
// kInvalidArgument when the support is not bipartite.
RunRecord run_oblivious_bipartite(const ProbGraph& g, Prober& prober, Rng& rng);

}  // namespace smcp
