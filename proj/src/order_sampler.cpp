#include "smcp/order_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "smcp/error.hpp"

namespace smcp {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
// Targets at or below this are treated as zero.
constexpr double kZeroTarget = 1e-15;
// z this close to 1 means the fixed order alone meets every target.
constexpr double kFullMix = 1.0 - 1e-12;

bool ratio_before(const TargetProfile& profile, int a, int b) {
  const auto key = [&](int i) {
    const double p = profile.p[i];
    const double r = profile.r[i];
    if (p <= 0.0) return r > 0.0 ? kInfinity : -1.0;
    return r / p;
  };
  const double ka = key(a);
  const double kb = key(b);
  if (ka != kb) return ka > kb;
  return a < b;
}

}  // namespace

namespace detail {

class PolicyBuilder {
 public:
  PolicyBuilder(OrderPolicy& policy, std::span<const double> p, std::size_t event_count)
      : policy_(policy), p_(p), depth_limit_(4 * static_cast<int>(event_count) + 4) {}

  // events are in ratio order; r is aligned with events.
  int solve(std::span<const int> events, std::vector<double> r, int depth, int forced_split);

 private:
  int leaf(int event);
  int sequence(std::span<const int> events);
  int split(int prefix, int suffix);

  template <typename Node>
  int add(Node&& node);

  OrderPolicy& policy_;
  std::span<const double> p_;
  int depth_limit_;
};

}  // namespace detail

void TargetProfile::validate() const {
  if (p.size() != r.size()) {
    fail(ErrorCode::kInvalidArgument, "profile has " + std::to_string(p.size()) +
                                          " probabilities but " + std::to_string(r.size()) +
                                          " targets");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "event probability outside [0,1]");
    }
    if (!(r[i] >= 0.0) || !std::isfinite(r[i])) {
      fail(ErrorCode::kInvalidArgument, "targets must be finite and non-negative");
    }
  }
}

std::vector<int> ratio_order(const TargetProfile& profile) {
  std::vector<int> order(profile.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return ratio_before(profile, a, b); });
  return order;
}

double feasibility_margin(const TargetProfile& profile) {
  profile.validate();
  double y = kInfinity;
  double target_sum = 0.0;
  double none = 1.0;
  for (const int i : ratio_order(profile)) {
    target_sum += profile.r[i];
    none *= 1.0 - profile.p[i];
    if (target_sum > 0.0) y = std::min(y, (1.0 - none) / target_sum);
  }
  return y;
}

int OrderPolicy::add(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

std::vector<int> OrderPolicy::sample(Rng& rng) const {
  std::vector<int> order;
  order.reserve(event_count_);
  if (root_ != -1) sample_into(root_, rng, order);
  order.insert(order.end(), appended_.begin(), appended_.end());
  return order;
}

void OrderPolicy::sample_into(int index, Rng& rng, std::vector<int>& out) const {
  const Node& n = nodes_[index];
  switch (n.kind) {
    case Kind::kLeaf:
    case Kind::kSequence:
      out.insert(out.end(), n.events.begin(), n.events.end());
      return;
    case Kind::kMix:
      if (n.child == -1 || rng.uniform() < n.z) {
        out.insert(out.end(), n.events.begin(), n.events.end());
      } else {
        sample_into(n.child, rng, out);
      }
      return;
    case Kind::kSplit:
      sample_into(n.prefix, rng, out);
      sample_into(n.suffix, rng, out);
      return;
  }
}

double OrderPolicy::none_probability(int index, std::span<const double> p) const {
  const Node& n = nodes_[index];
  if (n.kind == Kind::kSplit) return none_probability(n.prefix, p) * none_probability(n.suffix, p);
  double none = 1.0;
  for (const int e : n.events) none *= 1.0 - p[e];
  return none;
}

void OrderPolicy::accumulate(int index, double weight, std::span<const double> p,
                             std::vector<double>& out) const {
  const Node& n = nodes_[index];
  const auto fixed = [&](double w) {
    double none = 1.0;
    for (const int e : n.events) {
      out[e] += w * none * p[e];
      none *= 1.0 - p[e];
    }
  };
  switch (n.kind) {
    case Kind::kLeaf:
    case Kind::kSequence:
      fixed(weight);
      return;
    case Kind::kMix:
      if (n.child == -1) {
        fixed(weight);
      } else {
        fixed(weight * n.z);
        accumulate(n.child, weight * (1.0 - n.z), p, out);
      }
      return;
    case Kind::kSplit:
      accumulate(n.prefix, weight, p, out);
      accumulate(n.suffix, weight * none_probability(n.prefix, p), p, out);
      return;
  }
}

std::vector<double> OrderPolicy::first_occurrence_probs(std::span<const double> p) const {
  if (p.size() != event_count_) {
    fail(ErrorCode::kInvalidArgument, "probability vector does not match the policy");
  }
  std::vector<double> out(event_count_, 0.0);
  if (root_ != -1) accumulate(root_, 1.0, p, out);
  double none = root_ == -1 ? 1.0 : none_probability(root_, p);
  for (const int e : appended_) {
    out[e] += none * p[e];
    none *= 1.0 - p[e];
  }
  return out;
}

namespace detail {

template <typename Node>
int PolicyBuilder::add(Node&& node) {
  policy_.nodes_.push_back(std::forward<Node>(node));
  return static_cast<int>(policy_.nodes_.size()) - 1;
}

int PolicyBuilder::leaf(int event) {
  OrderPolicy::Node n;
  n.kind = OrderPolicy::Kind::kLeaf;
  n.events = {event};
  return add(std::move(n));
}

int PolicyBuilder::sequence(std::span<const int> events) {
  if (events.size() == 1) return leaf(events[0]);
  OrderPolicy::Node n;
  n.kind = OrderPolicy::Kind::kSequence;
  n.events.assign(events.begin(), events.end());
  return add(std::move(n));
}

int PolicyBuilder::split(int prefix, int suffix) {
  OrderPolicy::Node n;
  n.kind = OrderPolicy::Kind::kSplit;
  n.prefix = prefix;
  n.suffix = suffix;
  return add(std::move(n));
}

int PolicyBuilder::solve(std::span<const int> events, std::vector<double> r, int depth,
                         int forced_split) {
  if (depth > depth_limit_) {
    fail(ErrorCode::kInfeasible, "order policy construction did not terminate");
  }
  const std::size_t k = events.size();
  if (k == 1) return leaf(events[0]);

  // Zero-target events trail the ratio order; scanning them last costs the
  // others nothing.
  std::size_t active = k;
  while (active > 0 && r[active - 1] <= kZeroTarget) --active;
  if (active == 0) return sequence(events);
  if (active < k) {
    r.resize(active);
    const int head = solve(events.first(active), std::move(r), depth + 1, -1);
    return split(head, sequence(events.subspan(active)));
  }

  // prefix_none[m] = prod_{i<m}(1-p_i), suffix_none[m] = prod_{i>=m}(1-p_i)
  std::vector<double> prefix_none(k + 1, 1.0);
  std::vector<double> suffix_none(k + 1, 1.0);
  std::vector<double> slack(k + 1, 0.0);
  double target_sum = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    prefix_none[m + 1] = prefix_none[m] * (1.0 - p_[events[m]]);
    target_sum += r[m];
    slack[m + 1] = 1.0 - prefix_none[m + 1] - target_sum;
  }
  for (std::size_t m = k; m-- > 0;) suffix_none[m] = suffix_none[m + 1] * (1.0 - p_[events[m]]);

  std::size_t split_at = 0;
  if (forced_split > 0 && static_cast<std::size_t>(forced_split) < k) {
    split_at = static_cast<std::size_t>(forced_split);
  } else {
    for (std::size_t m = 1; m < k; ++m) {
      if (slack[m] <= kFeasibilityTolerance) {
        split_at = m;
        break;
      }
    }
  }

  if (split_at > 0) {
    // Tight prefix: it is scanned first with its own targets; the suffix only
    // matters when no prefix event occurs.
    const double none = prefix_none[split_at];
    std::vector<double> head_r(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(split_at));
    std::vector<double> tail_r(r.begin() + static_cast<std::ptrdiff_t>(split_at), r.end());
    for (auto& t : tail_r) t = none > 0.0 ? t / none : 0.0;
    const int head = solve(events.first(split_at), std::move(head_r), depth + 1, -1);
    const int tail = solve(events.subspan(split_at), std::move(tail_r), depth + 1, -1);
    return split(head, tail);
  }

  // Slack removal. The fixed branch scans events in decreasing index order,
  // where event j comes first with probability p_j * prod_{i>j}(1-p_i).
  double z = 1.0;
  std::size_t bound_prefix = 0;
  std::size_t bound_event = k;
  for (std::size_t m = 1; m < k; ++m) {
    const double denom = (1.0 - prefix_none[m]) * (1.0 - suffix_none[m]);
    if (denom <= 0.0) continue;
    const double bound = std::max(0.0, slack[m]) / denom;
    if (bound < z) {
      z = bound;
      bound_prefix = m;
      bound_event = k;
    }
  }
  std::vector<double> fixed_first(k);
  for (std::size_t j = 0; j < k; ++j) {
    fixed_first[j] = p_[events[j]] * suffix_none[j + 1];
    if (fixed_first[j] <= 0.0) continue;
    const double bound = r[j] / fixed_first[j];
    if (bound < z) {
      z = bound;
      bound_prefix = 0;
      bound_event = j;
    }
  }

  OrderPolicy::Node mix;
  mix.kind = OrderPolicy::Kind::kMix;
  mix.events.assign(events.rbegin(), events.rend());
  if (z >= kFullMix) {
    mix.z = 1.0;
    return add(std::move(mix));
  }

  std::vector<double> residual(k);
  for (std::size_t j = 0; j < k; ++j) {
    residual[j] = std::max(0.0, (r[j] - z * fixed_first[j]) / (1.0 - z));
  }
  for (std::size_t j = bound_event; j < k; ++j) residual[j] = 0.0;
  mix.z = z;
  mix.child = solve(events, std::move(residual), depth + 1, static_cast<int>(bound_prefix));
  return add(std::move(mix));
}

}  // namespace detail

OrderPolicy build_policy(const TargetProfile& profile) {
  profile.validate();
  const std::size_t k = profile.size();
  OrderPolicy policy;
  policy.event_count_ = k;

  for (std::size_t i = 0; i < k; ++i) {
    if (profile.p[i] <= 0.0 && profile.r[i] > 0.0) {
      fail(ErrorCode::kInfeasible,
           "event " + std::to_string(i) + " has a positive target but zero probability");
    }
  }

  const double y = feasibility_margin(profile);
  if (y < 1.0 - kFeasibilityTolerance) {
    fail(ErrorCode::kInfeasible,
         "targets exceed the feasible region (margin " + std::to_string(y) + ")");
  }
  policy.scale_ = std::isfinite(y) ? y : 1.0;

  TargetProfile scaled = profile;
  for (auto& t : scaled.r) t *= policy.scale_;
  policy.sorted_ = ratio_order(scaled);

  std::vector<int> events;
  for (const int e : policy.sorted_) {
    if (profile.p[e] > 0.0) {
      events.push_back(e);
    } else {
      policy.appended_.push_back(e);
    }
  }
  std::sort(policy.appended_.begin(), policy.appended_.end());
  if (events.empty()) return policy;

  std::vector<double> r;
  r.reserve(events.size());
  for (const int e : events) r.push_back(scaled.r[e]);
  detail::PolicyBuilder builder(policy, scaled.p, k);
  policy.root_ = builder.solve(events, std::move(r), 0, -1);
  return policy;
}

OrderPolicy fixed_order_policy(std::vector<int> order) {
  std::vector<int> check = order;
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i) {
    if (check[i] != static_cast<int>(i)) {
      fail(ErrorCode::kInvalidArgument, "fixed order is not a permutation");
    }
  }
  OrderPolicy policy;
  policy.event_count_ = order.size();
  policy.sorted_ = order;
  if (order.empty()) return policy;
  OrderPolicy::Node n;
  n.kind = order.size() == 1 ? OrderPolicy::Kind::kLeaf : OrderPolicy::Kind::kSequence;
  n.events = std::move(order);
  policy.root_ = policy.add(std::move(n));
  return policy;
}

double delta_factor(double total_q, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorCode::kInvalidArgument, "alpha must be positive");
  if (total_q <= 0.0) return 1.0 / alpha;
  return -std::expm1(-total_q / alpha) / total_q;
}

TargetProfile delta_scaled_targets(std::span<const double> q, std::span<const double> p,
                                   double alpha) {
  if (q.size() != p.size()) {
    fail(ErrorCode::kInvalidArgument, "q and p vectors differ in length");
  }
  TargetProfile profile;
  profile.p.assign(p.begin(), p.end());
  profile.r.assign(q.size(), 0.0);
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  const double delta = delta_factor(total, alpha);
  for (std::size_t i = 0; i < q.size(); ++i) {
    profile.r[i] = p[i] > 0.0 ? std::max(0.0, delta * q[i]) : 0.0;
  }
  const double y = feasibility_margin(profile);
  if (y < 1.0) {
    for (auto& t : profile.r) t *= y;
  }
  return profile;
}

}  // namespace smcp
