#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smcp/rng.hpp"

namespace smcp {

// Absolute slack tolerance for every feasibility comparison.
inline constexpr double kFeasibilityTolerance = 1e-9;

// k independent events with probabilities p and target probabilities r of
// being the first event to occur in a scan order.
struct TargetProfile {
  std::vector<double> p;
  std::vector<double> r;

  std::size_t size() const { return p.size(); }
  // Throws kInvalidArgument on mismatched lengths, p outside [0,1], or
  // negative/non-finite targets.
  void validate() const;
};

// Events sorted by decreasing r/p with ties broken by ascending index.
// Events with p = 0 sort first when r > 0 (they are hopeless) and last when
// r = 0.
std::vector<int> ratio_order(const TargetProfile& profile);

// Largest y such that y*r is feasible, i.e. for every subset S,
// sum_{i in S} y*r_i <= 1 - prod_{i in S}(1 - p_i). Only prefixes of the
// ratio order are checked. Returns +infinity when all targets are zero and 0
// when some event has r > 0 but p = 0. The profile is feasible iff y >= 1.
double feasibility_margin(const TargetProfile& profile);

namespace detail {
class PolicyBuilder;
}

// A distribution over scan orders, stored as a tree of
//   Leaf     one event,
//   Sequence a fixed order,
//   Mix      with probability z the fixed order `events`, otherwise the
//            child policy,
//   Split    prefix policy followed by an independent suffix policy.
// Events with p = 0 and r = 0 are kept out of the tree and appended to every
// sampled order.
class OrderPolicy {
 public:
  enum class Kind { kLeaf, kSequence, kMix, kSplit };

  struct Node {
    Kind kind = Kind::kLeaf;
    double z = 1.0;           // Mix only
    std::vector<int> events;  // Leaf, Sequence, and the fixed branch of a Mix
    int child = -1;           // Mix: policy used with probability 1 - z
    int prefix = -1;          // Split
    int suffix = -1;          // Split
  };

  std::size_t event_count() const { return event_count_; }
  std::size_t node_count() const { return nodes_.size(); }
  int root() const { return root_; }
  const Node& node(int index) const { return nodes_[index]; }
  // Ratio order of the scaled targets the policy was built for.
  std::span<const int> sorted_events() const { return sorted_; }
  std::span<const int> appended_events() const { return appended_; }
  // Step-0 factor applied to the targets before construction.
  double scale() const { return scale_; }

  // Draws a permutation of all events, visiting each node at most once.
  std::vector<int> sample(Rng& rng) const;

  // Exact P(event i is the first to occur) for independent events with
  // probabilities p, evaluated over the tree without enumerating orders.
  std::vector<double> first_occurrence_probs(std::span<const double> p) const;

 private:
  friend class detail::PolicyBuilder;
  friend OrderPolicy build_policy(const TargetProfile& profile);
  friend OrderPolicy fixed_order_policy(std::vector<int> order);

  int add(Node node);
  void sample_into(int index, Rng& rng, std::vector<int>& out) const;
  void accumulate(int index, double weight, std::span<const double> p,
                  std::vector<double>& out) const;
  double none_probability(int index, std::span<const double> p) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::size_t event_count_ = 0;
  std::vector<int> sorted_;
  std::vector<int> appended_;
  double scale_ = 1.0;
};

// Constructs a policy meeting every target (after Step-0 scaling by the
// feasibility margin) with O(k^2) work: slack removal mixes the
// decreasing-index fixed order against a residual problem, and a tight
// prefix splits the problem into a prefix solved first and a rescaled suffix.
// Throws kInfeasible when the margin is below 1.
OrderPolicy build_policy(const TargetProfile& profile);

// Policy that always returns `order`, which must be a permutation of 0..k-1.
OrderPolicy fixed_order_policy(std::vector<int> order);

// (1 - exp(-total_q / alpha)) / total_q, with the limit 1/alpha at 0.
double delta_factor(double total_q, double alpha);

// Targets r = delta * q for the scan of one vertex's neighbourhood. When the
// margin of the result is below 1 (estimation noise) r is rescaled by it, so
// the returned profile is always feasible.
TargetProfile delta_scaled_targets(std::span<const double> q, std::span<const double> p,
                                   double alpha);

}  // namespace smcp
