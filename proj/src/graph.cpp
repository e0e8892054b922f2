#include "smcp/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "smcp/error.hpp"

namespace smcp {

ProbGraph::ProbGraph(int n, std::vector<WeightedPair> entries) : n_(n) {
  if (n < 0) fail(ErrorCode::kInvalidArgument, "vertex count must be non-negative");
  for (auto& e : entries) {
    const auto [u, v] = e.pair;
    if (u < 0 || v < 0 || u >= n || v >= n) {
      fail(ErrorCode::kInvalidArgument,
           "pair (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    }
    if (u == v) fail(ErrorCode::kInvalidArgument, "self-loop at vertex " + std::to_string(u));
    if (!(e.p >= 0.0 && e.p <= 1.0)) {
      fail(ErrorCode::kInvalidArgument,
           "probability of (" + std::to_string(u) + "," + std::to_string(v) + ") outside [0,1]");
    }
    e.pair = Pair::of(u, v);
  }
  std::sort(entries.begin(), entries.end(),
            [](const WeightedPair& a, const WeightedPair& b) { return a.pair < b.pair; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].pair == entries[i - 1].pair) {
      fail(ErrorCode::kInvalidArgument, "duplicate pair (" + std::to_string(entries[i].pair.u) +
                                            "," + std::to_string(entries[i].pair.v) + ")");
    }
  }
  std::erase_if(entries, [](const WeightedPair& e) { return e.p <= 0.0; });
  edges_ = std::move(entries);

  adjacency_.assign(static_cast<std::size_t>(n_), {});
  index_.reserve(edges_.size());
  for (int i = 0; i < pair_count(); ++i) {
    const Pair e = edges_[i].pair;
    adjacency_[e.u].push_back({e.v, i});
    adjacency_[e.v].push_back({e.u, i});
    index_.emplace(pair_key(e), i);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  }
}

double ProbGraph::p(Vertex u, Vertex v) const {
  const auto idx = edge_index(u, v);
  return idx ? edges_[*idx].p : 0.0;
}

std::optional<int> ProbGraph::edge_index(Vertex u, Vertex v) const {
  if (u == v) return std::nullopt;
  const auto it = index_.find(pair_key(Pair::of(u, v)));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> ProbGraph::two_colouring() const {
  std::vector<int> colour(static_cast<std::size_t>(n_), -1);
  std::deque<Vertex> queue;
  for (Vertex s = 0; s < n_; ++s) {
    if (colour[s] != -1) continue;
    colour[s] = 0;
    queue.push_back(s);
    while (!queue.empty()) {
      const Vertex x = queue.front();
      queue.pop_front();
      for (const auto& nb : adjacency_[x]) {
        if (colour[nb.vertex] == -1) {
          colour[nb.vertex] = 1 - colour[x];
          queue.push_back(nb.vertex);
        } else if (colour[nb.vertex] == colour[x]) {
          return {};
        }
      }
    }
  }
  return colour;
}

bool ProbGraph::is_bipartite() const { return n_ == 0 || !two_colouring().empty(); }

bool Matching::contains(Pair e) const {
  return std::binary_search(pairs.begin(), pairs.end(), Pair::of(e.u, e.v));
}

void Matching::normalize() {
  for (auto& e : pairs) e = Pair::of(e.u, e.v);
  std::sort(pairs.begin(), pairs.end());
}

bool is_matching(std::span<const Pair> pairs) {
  std::unordered_set<Vertex> seen;
  for (const auto& e : pairs) {
    if (e.u == e.v) return false;
    if (!seen.insert(e.u).second || !seen.insert(e.v).second) return false;
  }
  return true;
}

bool is_matching_in(const Matching& m, const RealizedGraph& g) {
  if (!is_matching(m.pairs)) return false;
  return std::all_of(m.pairs.begin(), m.pairs.end(), [&](const Pair& e) {
    return std::binary_search(g.edges.begin(), g.edges.end(), Pair::of(e.u, e.v));
  });
}

bool is_maximal_in(const Matching& m, const RealizedGraph& g) {
  std::vector<char> used(static_cast<std::size_t>(g.n), 0);
  for (const auto& e : m.pairs) used[e.u] = used[e.v] = 1;
  return std::none_of(g.edges.begin(), g.edges.end(),
                      [&](const Pair& e) { return !used[e.u] && !used[e.v]; });
}

RealizedGraph sample_realization(const ProbGraph& g, Rng& rng) {
  RealizedGraph h;
  h.n = g.vertex_count();
  for (const auto& e : g.edges()) {
    // Every pair consumes exactly one draw so the stream layout is fixed.
    if (rng.uniform() < e.p) h.edges.push_back(e.pair);
  }
  return h;
}

ProbeOracle::ProbeOracle(RealizedGraph realization)
    : realization_(std::move(realization)),
      removed_(static_cast<std::size_t>(realization_.n), 0) {
  for (const auto& e : realization_.edges) {
    if (e.u == e.v) fail(ErrorCode::kInvalidArgument, "realization contains a self-loop");
    present_.insert(pair_key(Pair::of(e.u, e.v)));
  }
}

bool ProbeOracle::probe(Vertex u, Vertex v) {
  const int n = realization_.n;
  if (u < 0 || v < 0 || u >= n || v >= n || u == v) {
    fail(ErrorCode::kContractViolation,
         "probe of invalid pair (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  if (removed_[u] || removed_[v]) {
    fail(ErrorCode::kContractViolation,
         "probe touches a matched vertex: (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  const Pair e = Pair::of(u, v);
  if (!probed_.insert(pair_key(e)).second) {
    fail(ErrorCode::kContractViolation,
         "pair (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") probed twice");
  }
  if (present_.contains(pair_key(e))) {
    matched_.push_back(e);
    removed_[u] = removed_[v] = 1;
    return true;
  }
  probed_absent_.push_back(e);
  return false;
}

bool ProbeOracle::is_removed(Vertex v) const { return removed_[v] != 0; }

bool ProbeOracle::was_probed(Vertex u, Vertex v) const {
  return probed_.contains(pair_key(Pair::of(u, v)));
}

Matching ProbeOracle::matching() const {
  Matching m{matched_};
  m.normalize();
  return m;
}

int CandidateState::alive_count() const {
  return static_cast<int>(std::count(alive.begin(), alive.end(), 1));
}

CandidateState candidate_state(const ProbGraph& g, const Prober& prober) {
  CandidateState state;
  state.alive.assign(static_cast<std::size_t>(g.vertex_count()), 0);
  for (const auto& e : g.edges()) {
    const auto [u, v] = e.pair;
    if (prober.is_removed(u) || prober.is_removed(v) || prober.was_probed(u, v)) continue;
    state.candidates.push_back(e.pair);
    state.alive[u] = state.alive[v] = 1;
  }
  return state;
}

ProbGraph residual_graph(const ProbGraph& g, const Prober& prober) {
  std::vector<WeightedPair> kept;
  for (const auto& e : g.edges()) {
    const auto [u, v] = e.pair;
    if (prober.is_removed(u) || prober.is_removed(v) || prober.was_probed(u, v)) continue;
    kept.push_back(e);
  }
  return ProbGraph(g.vertex_count(), std::move(kept));
}

}  // namespace smcp
