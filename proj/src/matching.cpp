#include "smcp/matching.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "blossom.hpp"
#include "smcp/error.hpp"

namespace smcp {

namespace {

std::vector<Pair> canonical_edges(const RealizedGraph& g) {
  std::vector<Pair> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.push_back(Pair::of(e.u, e.v));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Matching from_mates(std::span<const int> mate) {
  Matching m;
  for (int v = 0; v < static_cast<int>(mate.size()); ++v) {
    if (mate[v] > v) m.pairs.push_back({v, mate[v]});
  }
  return m;
}

// Budget of DFS steps for one bounded augmenting-path search before falling
// back to a full blossom search from the same root.
constexpr long kBoundedSearchBudget = 20000;

class BoundedAugmenter {
 public:
  BoundedAugmenter(detail::BlossomMatcher& matcher, int max_length)
      : matcher_(matcher), max_length_(max_length),
        on_path_(static_cast<std::size_t>(matcher.vertex_count()), 0) {}

  // Finds and applies an augmenting path of length <= max_length from root.
  // Returns false when none exists. Sets `exhausted` when the budget ran out
  // before the search space was covered.
  bool augment_from(int root, bool& exhausted) {
    steps_ = 0;
    exhausted = false;
    path_.assign(1, root);
    on_path_[root] = 1;
    const bool found = extend(root, 0);
    on_path_[root] = 0;
    if (steps_ > kBoundedSearchBudget) exhausted = true;
    if (!found) return false;
    // path_ = root, y1, x1, y2, x2, ..., yk (free)
    auto& mate = matcher_.mates();
    for (std::size_t i = 0; i + 1 < path_.size(); i += 2) {
      mate[path_[i]] = path_[i + 1];
      mate[path_[i + 1]] = path_[i];
    }
    return true;
  }

 private:
  bool extend(int x, int length) {
    if (++steps_ > kBoundedSearchBudget) return false;
    auto& mate = matcher_.mates();
    for (const int y : matcher_.adjacency(x)) {
      if (on_path_[y]) continue;
      if (mate[y] == -1) {
        if (length + 1 > max_length_) continue;
        path_.push_back(y);
        return true;
      }
      const int next = mate[y];
      if (on_path_[next] || length + 3 > max_length_) continue;
      on_path_[y] = on_path_[next] = 1;
      path_.push_back(y);
      path_.push_back(next);
      if (extend(next, length + 2)) {
        on_path_[y] = on_path_[next] = 0;
        return true;
      }
      path_.pop_back();
      path_.pop_back();
      on_path_[y] = on_path_[next] = 0;
      if (steps_ > kBoundedSearchBudget) return false;
    }
    return false;
  }

  detail::BlossomMatcher& matcher_;
  int max_length_;
  std::vector<char> on_path_;
  std::vector<int> path_;
  long steps_ = 0;
};

}  // namespace

Matching max_matching(const RealizedGraph& g) {
  detail::BlossomMatcher matcher;
  matcher.load(g.n, canonical_edges(g));
  matcher.solve();
  return from_mates(matcher.mates());
}

Matching greedy_maximal_matching(const RealizedGraph& g) {
  std::vector<char> used(static_cast<std::size_t>(g.n), 0);
  Matching m;
  for (const auto& e : g.edges) {
    if (used[e.u] || used[e.v]) continue;
    used[e.u] = used[e.v] = 1;
    m.pairs.push_back(e);
  }
  return m;
}

Matching brute_force_max_matching(const RealizedGraph& g) {
  const int m = static_cast<int>(g.edges.size());
  if (m > 24 && g.n > 12) {
    fail(ErrorCode::kTooLarge, "brute-force matching limited to 24 edges or 12 vertices");
  }
  const std::vector<Pair> edges = canonical_edges(g);

  std::vector<char> used(static_cast<std::size_t>(g.n), 0);
  std::vector<int> current;
  std::vector<int> best;
  int free_vertices = g.n;

  // Include-before-exclude visits matchings in lexicographic order of their
  // sorted edge lists, so the first maximum found is the canonical one.
  std::function<void(int)> search = [&](int i) {
    if (current.size() > best.size()) best = current;
    if (i == m) return;
    const int bound = std::min(m - i, free_vertices / 2);
    if (static_cast<int>(current.size()) + bound <= static_cast<int>(best.size())) return;
    const Pair e = edges[i];
    if (!used[e.u] && !used[e.v]) {
      used[e.u] = used[e.v] = 1;
      free_vertices -= 2;
      current.push_back(i);
      search(i + 1);
      current.pop_back();
      free_vertices += 2;
      used[e.u] = used[e.v] = 0;
    }
    search(i + 1);
  };
  search(0);

  Matching result;
  for (const int i : best) result.pairs.push_back(edges[i]);
  return result;
}

Matching approx_max_matching(const RealizedGraph& g, double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "approximation parameter must lie in (0,1)");
  }
  const int max_length = 2 * static_cast<int>(std::ceil(1.0 / zeta)) - 1;

  const RealizedGraph sorted{g.n, canonical_edges(g)};
  detail::BlossomMatcher matcher;
  matcher.load(sorted.n, sorted.edges);
  auto& mate = matcher.mates();
  for (const auto& e : greedy_maximal_matching(sorted).pairs) {
    mate[e.u] = e.v;
    mate[e.v] = e.u;
  }

  BoundedAugmenter augmenter(matcher, max_length);
  bool progress = true;
  while (progress) {
    progress = false;
    for (int root = 0; root < g.n; ++root) {
      if (mate[root] != -1) continue;
      bool exhausted = false;
      if (augmenter.augment_from(root, exhausted)) {
        progress = true;
      } else if (exhausted && matcher.augment_from(root)) {
        progress = true;
      }
    }
  }
  return from_mates(mate);
}

double ExactQTable::value(Pair e) const {
  const Pair key = Pair::of(e.u, e.v);
  const auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
  if (it == pairs.end() || *it != key) return 0.0;
  return q[static_cast<std::size_t>(it - pairs.begin())];
}

std::vector<double> ExactQTable::vertex_totals(int n) const {
  std::vector<double> totals(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    totals[pairs[i].u] += q[i];
    totals[pairs[i].v] += q[i];
  }
  return totals;
}

namespace {

// Calls visit(probability, edge mask, mates of the canonical maximum
// matching in compacted ids) for every realization of g.
template <typename Visit>
void for_each_realization(const ProbGraph& g, const std::vector<int>& compact_of,
                          int compact_n, Visit&& visit) {
  const int m = g.pair_count();
  if (m > kMaxExactPairs) {
    fail(ErrorCode::kTooLarge, "exact enumeration limited to " +
                                   std::to_string(kMaxExactPairs) + " positive pairs");
  }
  const int low_bits = m / 2;
  const int high_bits = m - low_bits;
  const auto edges = g.edges();
  auto half_table = [&](int offset, int bits) {
    std::vector<double> table(std::size_t{1} << bits, 1.0);
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
      double prob = 1.0;
      for (int b = 0; b < bits; ++b) {
        const double p = edges[offset + b].p;
        prob *= (mask >> b & 1U) ? p : 1.0 - p;
      }
      table[mask] = prob;
    }
    return table;
  };
  const auto low = half_table(0, low_bits);
  const auto high = half_table(low_bits, high_bits);

  detail::BlossomMatcher matcher;
  std::vector<Pair> realized;
  realized.reserve(static_cast<std::size_t>(m));
  const std::uint32_t low_mask = (1U << low_bits) - 1U;
  for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
    const double prob = low[mask & low_mask] * high[mask >> low_bits];
    realized.clear();
    for (int b = 0; b < m; ++b) {
      if (mask >> b & 1U) {
        const Pair e = edges[b].pair;
        realized.push_back({compact_of[e.u], compact_of[e.v]});
      }
    }
    matcher.load(compact_n, realized);
    matcher.solve();
    visit(prob, mask, std::span<const int>(matcher.mates()));
  }
}

// Monotone relabelling of the vertices that touch a positive pair; keeps the
// ascending scan order of the matcher intact.
int compact_vertices(const ProbGraph& g, std::vector<int>& compact_of) {
  compact_of.assign(static_cast<std::size_t>(g.vertex_count()), -1);
  std::vector<char> touched(static_cast<std::size_t>(g.vertex_count()), 0);
  for (const auto& e : g.edges()) touched[e.pair.u] = touched[e.pair.v] = 1;
  int next = 0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (touched[v]) compact_of[v] = next++;
  }
  return next;
}

}  // namespace

ExactQTable exact_q_table(const ProbGraph& g) {
  std::vector<int> compact_of;
  const int compact_n = compact_vertices(g, compact_of);
  const auto edges = g.edges();
  const int m = g.pair_count();

  // (compact u, compact v) -> edge bit
  std::vector<int> bit_of(static_cast<std::size_t>(compact_n) * compact_n, -1);
  for (int b = 0; b < m; ++b) {
    const int cu = compact_of[edges[b].pair.u];
    const int cv = compact_of[edges[b].pair.v];
    bit_of[static_cast<std::size_t>(cu) * compact_n + cv] = b;
  }

  ExactQTable table;
  table.q.assign(static_cast<std::size_t>(m), 0.0);
  for (const auto& e : edges) table.pairs.push_back(e.pair);

  for_each_realization(g, compact_of, compact_n,
                       [&](double prob, std::uint32_t, std::span<const int> mate) {
                         for (int x = 0; x < compact_n; ++x) {
                           if (mate[x] > x) {
                             table.q[bit_of[static_cast<std::size_t>(x) * compact_n + mate[x]]] +=
                                 prob;
                           }
                         }
                       });
  table.total = std::accumulate(table.q.begin(), table.q.end(), 0.0);
  return table;
}

RealizedGraph trial_realization(const ProbGraph& g, std::uint64_t seed, std::uint64_t index) {
  Rng rng(derive_seed(seed, index));
  return sample_realization(g, rng);
}

OptEstimate expected_opt(const ProbGraph& g, OptMode mode, std::uint64_t trials,
                         std::uint64_t seed) {
  OptEstimate result;
  if (mode == OptMode::kExact) {
    std::vector<int> compact_of;
    const int compact_n = compact_vertices(g, compact_of);
    double mean = 0.0;
    for_each_realization(g, compact_of, compact_n,
                         [&](double prob, std::uint32_t, std::span<const int> mate) {
                           int matched = 0;
                           for (const int x : mate) matched += x != -1;
                           mean += prob * (matched / 2);
                         });
    result.mean = mean;
    return result;
  }
  if (trials < 2) fail(ErrorCode::kInvalidArgument, "Monte Carlo OPT needs at least 2 trials");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto size = static_cast<double>(max_matching(trial_realization(g, seed, t)).size());
    sum += size;
    sum_sq += size * size;
  }
  const auto count = static_cast<double>(trials);
  result.mean = sum / count;
  const double variance = std::max(0.0, (sum_sq - count * result.mean * result.mean) / (count - 1));
  result.half_width = 1.96 * std::sqrt(variance / count);
  result.trials = trials;
  return result;
}

}  // namespace smcp
