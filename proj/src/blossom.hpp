#pragma once

#include <span>
#include <vector>

#include "smcp/graph.hpp"

namespace smcp::detail {

// Edmonds' blossom algorithm over a reusable CSR adjacency. Buffers are kept
// between load() calls so repeated small solves do not reallocate.
class BlossomMatcher {
 public:
  // Edges must be sorted ascending with u < v; adjacency lists then come out
  // in ascending neighbour order. Resets the matching to empty.
  void load(int n, std::span<const Pair> edges) {
    n_ = n;
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : edges) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (int v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
    targets_.resize(static_cast<std::size_t>(offsets_[n]));
    fill_.assign(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges) {
      targets_[fill_[e.u]++] = e.v;
      targets_[fill_[e.v]++] = e.u;
    }
    mate_.assign(static_cast<std::size_t>(n), -1);
    parent_.resize(static_cast<std::size_t>(n));
    base_.resize(static_cast<std::size_t>(n));
    used_.resize(static_cast<std::size_t>(n));
    in_blossom_.resize(static_cast<std::size_t>(n));
    lca_mark_.resize(static_cast<std::size_t>(n));
    queue_.reserve(static_cast<std::size_t>(n));
  }

  int vertex_count() const { return n_; }

  std::span<const int> adjacency(int v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }

  std::vector<int>& mates() { return mate_; }

  // Augments from every free vertex in ascending order.
  void solve() {
    for (int root = 0; root < n_; ++root) {
      if (mate_[root] == -1) augment_from(root);
    }
  }

  // Searches an augmenting path from a free root and applies it.
  bool augment_from(int root) {
    int v = find_path(root);
    if (v == -1) return false;
    while (v != -1) {
      const int pv = parent_[v];
      const int next = mate_[pv];
      mate_[v] = pv;
      mate_[pv] = v;
      v = next;
    }
    return true;
  }

 private:
  int lca(int a, int b) {
    std::fill(lca_mark_.begin(), lca_mark_.end(), 0);
    while (true) {
      a = base_[a];
      lca_mark_[a] = 1;
      if (mate_[a] == -1) break;
      a = parent_[mate_[a]];
    }
    while (true) {
      b = base_[b];
      if (lca_mark_[b]) return b;
      b = parent_[mate_[b]];
    }
  }

  void mark_path(int v, int b, int child) {
    while (base_[v] != b) {
      in_blossom_[base_[v]] = in_blossom_[base_[mate_[v]]] = 1;
      parent_[v] = child;
      child = mate_[v];
      v = parent_[mate_[v]];
    }
  }

  int find_path(int root) {
    std::fill(used_.begin(), used_.end(), 0);
    std::fill(parent_.begin(), parent_.end(), -1);
    for (int i = 0; i < n_; ++i) base_[i] = i;
    used_[root] = 1;
    queue_.clear();
    queue_.push_back(root);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int v = queue_[head];
      for (const int to : adjacency(v)) {
        if (base_[v] == base_[to] || mate_[v] == to) continue;
        if (to == root || (mate_[to] != -1 && parent_[mate_[to]] != -1)) {
          const int current = lca(v, to);
          std::fill(in_blossom_.begin(), in_blossom_.end(), 0);
          mark_path(v, current, to);
          mark_path(to, current, v);
          for (int i = 0; i < n_; ++i) {
            if (in_blossom_[base_[i]]) {
              base_[i] = current;
              if (!used_[i]) {
                used_[i] = 1;
                queue_.push_back(i);
              }
            }
          }
        } else if (parent_[to] == -1) {
          parent_[to] = v;
          if (mate_[to] == -1) return to;
          used_[mate_[to]] = 1;
          queue_.push_back(mate_[to]);
        }
      }
    }
    return -1;
  }

  int n_ = 0;
  std::vector<int> offsets_;
  std::vector<int> fill_;
  std::vector<int> targets_;
  std::vector<int> mate_;
  std::vector<int> parent_;
  std::vector<int> base_;
  std::vector<char> used_;
  std::vector<char> in_blossom_;
  std::vector<char> lca_mark_;
  std::vector<int> queue_;
};

}  // namespace smcp::detail
