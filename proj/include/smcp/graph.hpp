#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "smcp/rng.hpp"

namespace smcp {

using Vertex = int;

// Unordered vertex pair, stored with u < v.
struct Pair {
  Vertex u = 0;
  Vertex v = 0;

  static Pair of(Vertex a, Vertex b) { return a < b ? Pair{a, b} : Pair{b, a}; }

  bool touches(Vertex x) const { return u == x || v == x; }

  friend bool operator==(const Pair&, const Pair&) = default;
  friend auto operator<=>(const Pair&, const Pair&) = default;
};

inline std::uint64_t pair_key(Pair e) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.u)) << 32) |
         static_cast<std::uint32_t>(e.v);
}

struct WeightedPair {
  Pair pair;
  double p = 0.0;
};

struct Neighbor {
  Vertex vertex;
  int edge;  // index into ProbGraph::edges()
};

// The known input distribution: n vertices and independent edge
// probabilities. Only pairs with p > 0 are stored; edge indices follow the
// ascending (u, v) order.
class ProbGraph {
 public:
  ProbGraph() = default;
  // Throws kInvalidArgument on n < 0, out-of-range or self-loop pairs,
  // duplicate pairs, or probabilities outside [0, 1]. Zero-probability entries
  // are accepted and dropped.
  ProbGraph(int n, std::vector<WeightedPair> entries);

  int vertex_count() const { return n_; }
  int pair_count() const { return static_cast<int>(edges_.size()); }
  std::span<const WeightedPair> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(Vertex v) const { return adjacency_[v]; }

  // Probability of (u, v); 0 for absent pairs and u == v.
  double p(Vertex u, Vertex v) const;
  // Edge index of (u, v), if p_uv > 0.
  std::optional<int> edge_index(Vertex u, Vertex v) const;

  bool is_bipartite() const;
  // 2-colouring of the support (colour 0 for the smallest vertex of every
  // component); empty when the support has an odd cycle.
  std::vector<int> two_colouring() const;

 private:
  int n_ = 0;
  std::vector<WeightedPair> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::unordered_map<std::uint64_t, int> index_;
};

struct RealizedGraph {
  int n = 0;
  std::vector<Pair> edges;  // sorted ascending
};

struct Matching {
  std::vector<Pair> pairs;  // sorted ascending

  std::size_t size() const { return pairs.size(); }
  bool contains(Pair e) const;
  void normalize();
};

// True when the pairs are vertex-disjoint.
bool is_matching(std::span<const Pair> pairs);
// True when every pair of the matching is an edge of g.
bool is_matching_in(const Matching& m, const RealizedGraph& g);
// True when no edge of g has both endpoints unmatched.
bool is_maximal_in(const Matching& m, const RealizedGraph& g);

RealizedGraph sample_realization(const ProbGraph& g, Rng& rng);

// The only channel through which an online algorithm learns about the
// realized graph.
class Prober {
 public:
  virtual ~Prober() = default;

  // Returns true and commits (u, v) when the pair is present. Probing a
  // removed vertex or a pair twice throws kContractViolation.
  virtual bool probe(Vertex u, Vertex v) = 0;
  virtual bool is_removed(Vertex v) const = 0;
  virtual bool was_probed(Vertex u, Vertex v) const = 0;
};

class ProbeOracle final : public Prober {
 public:
  explicit ProbeOracle(RealizedGraph realization);

  bool probe(Vertex u, Vertex v) override;
  bool is_removed(Vertex v) const override;
  bool was_probed(Vertex u, Vertex v) const override;

  int vertex_count() const { return realization_.n; }
  std::span<const Pair> matched() const { return matched_; }
  std::span<const Pair> probed_absent() const { return probed_absent_; }
  std::size_t probe_count() const { return matched_.size() + probed_absent_.size(); }
  Matching matching() const;

 private:
  RealizedGraph realization_;
  std::unordered_set<std::uint64_t> present_;
  std::unordered_set<std::uint64_t> probed_;
  std::vector<Pair> matched_;
  std::vector<Pair> probed_absent_;
  std::vector<char> removed_;
};

struct CandidateState {
  std::vector<char> alive;       // indexed by vertex
  std::vector<Pair> candidates;  // ascending

  int alive_count() const;
};

// Unprobed positive-probability pairs whose endpoints are both unmatched.
CandidateState candidate_state(const ProbGraph& g, const Prober& prober);

// g restricted to the current candidate pairs; vertex ids are unchanged.
ProbGraph residual_graph(const ProbGraph& g, const Prober& prober);

}  // namespace smcp
