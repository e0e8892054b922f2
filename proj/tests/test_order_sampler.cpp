#include <doctest.h>

#include <chrono>
#include <cmath>
#include <limits>

#include "smcp/error.hpp"
#include "smcp/matching.hpp"
#include "smcp/order_sampler.hpp"
#include "support/oracles.hpp"

using namespace smcp;

namespace {

// Random profile with occasional degenerate entries.
TargetProfile random_profile(Rng& rng, std::size_t k) {
  TargetProfile t;
  for (std::size_t i = 0; i < k; ++i) {
    const double roll = rng.uniform();
    double p = rng.uniform();
    if (roll < 0.05) p = 1.0;
    if (roll > 0.95) p = 0.0;
    double r = rng.uniform() < 0.15 ? 0.0 : rng.uniform();
    if (p == 0.0) r = 0.0;
    t.p.push_back(p);
    t.r.push_back(r);
  }
  return t;
}

// Scales r onto the feasibility boundary, or strictly inside it half the time.
TargetProfile random_feasible_profile(Rng& rng, std::size_t k) {
  TargetProfile t = random_profile(rng, k);
  const double y = feasibility_margin(t);
  const double shrink = rng.uniform() < 0.5 ? 1.0 : 0.5 + 0.5 * rng.uniform();
  if (std::isfinite(y)) {
    for (auto& r : t.r) r *= y * shrink;
  }
  return t;
}

double none_of(const std::vector<double>& p) {
  double none = 1.0;
  for (const double x : p) none *= 1.0 - x;
  return none;
}

}  // namespace

TEST_CASE("feasibility_margin on small profiles") {
  CHECK(feasibility_margin({{0.5}, {0.5}}) == doctest::Approx(1.0));
  CHECK(feasibility_margin({{0.5, 0.5}, {0.375, 0.375}}) == doctest::Approx(1.0));
  CHECK(feasibility_margin({{0.5, 0.5}, {0.6, 0.1}}) == doctest::Approx(0.5 / 0.6));
  CHECK(feasibility_margin({{0.0, 0.5}, {0.1, 0.1}}) == 0.0);
  CHECK(std::isinf(feasibility_margin({{0.2, 0.5}, {0.0, 0.0}})));
  CHECK(std::isinf(feasibility_margin({{}, {}})));
}

TEST_CASE("ratio_order sorts by decreasing r/p with index ties") {
  const TargetProfile t{{0.5, 0.5, 0.25, 0.0, 0.0}, {0.1, 0.2, 0.05, 0.0, 0.3}};
  // ratios 0.2, 0.4, 0.2, hopeless-zero, hopeless-positive
  CHECK(ratio_order(t) == std::vector<int>{4, 1, 0, 2, 3});
}

TEST_CASE("TargetProfile validation") {
  CHECK_THROWS_AS(feasibility_margin({{0.5}, {0.1, 0.2}}), Error);
  CHECK_THROWS_AS(feasibility_margin({{1.5}, {0.1}}), Error);
  CHECK_THROWS_AS(feasibility_margin({{0.5}, {-0.1}}), Error);
  CHECK_THROWS_AS(feasibility_margin({{0.5}, {std::numeric_limits<double>::infinity()}}), Error);
}

TEST_CASE("prefix margin equals the margin over all subsets") {
  Rng rng(101);
  for (int t = 0; t < 500; ++t) {
    const auto k = static_cast<std::size_t>(1 + rng.below(15));
    const TargetProfile profile = random_profile(rng, k);
    const double prefix = feasibility_margin(profile);
    const double full = oracle::subset_margin(profile);
    if (std::isinf(full)) {
      CHECK(std::isinf(prefix));
    } else {
      CHECK(std::abs(prefix - full) <= 1e-9 * std::max(1.0, full));
    }
    // At the Step-0 scaling the tightest subset constraint is a prefix.
    if (std::isfinite(prefix) && prefix > 0.0) {
      TargetProfile scaled = profile;
      for (auto& r : scaled.r) r *= prefix;
      CHECK(std::abs(oracle::subset_min_slack(scaled)) <= 1e-9);
    }
  }
}

TEST_CASE("prefix checks on a symmetric profile and with a zero target") {
  const TargetProfile uniform{{0.3, 0.3, 0.3}, {0.2, 0.2, 0.2}};
  CHECK(feasibility_margin(uniform) == doctest::Approx(oracle::subset_margin(uniform)));
  const TargetProfile zero{{0.3, 0.6, 0.9}, {0.1, 0.0, 0.4}};
  CHECK(feasibility_margin(zero) == doctest::Approx(oracle::subset_margin(zero)));
}

TEST_CASE("build_policy with one event always scans it") {
  const OrderPolicy policy = build_policy({{0.4}, {0.3}});
  Rng rng(1);
  CHECK(policy.sample(rng) == std::vector<int>{0});
  const auto probs = policy.first_occurrence_probs(std::vector<double>{0.4});
  CHECK(probs[0] == doctest::Approx(0.4));
}

TEST_CASE("build_policy meets the symmetric two-event targets exactly") {
  const TargetProfile t{{0.5, 0.5}, {0.375, 0.375}};
  const OrderPolicy policy = build_policy(t);
  const auto exact = policy.first_occurrence_probs(t.p);
  CHECK(exact[0] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(exact[1] == doctest::Approx(0.375).epsilon(1e-12));
  const auto enumerated = oracle::first_occurrence_by_enumeration(policy, t.p);
  CHECK(enumerated[0] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(enumerated[1] == doctest::Approx(0.375).epsilon(1e-12));
  // Two orders with equal weight.
  const auto orders = oracle::expand_policy(policy);
  REQUIRE(orders.size() == 2);
  CHECK(orders[0].weight == doctest::Approx(0.5));
  CHECK(orders[0].order != orders[1].order);
}

TEST_CASE("build_policy rejects infeasible profiles") {
  CHECK_THROWS_AS(build_policy({{0.5, 0.5}, {0.6, 0.1}}), Error);
  CHECK_THROWS_AS(build_policy({{0.0, 0.5}, {0.1, 0.1}}), Error);
  try {
    build_policy({{0.5, 0.5}, {0.6, 0.1}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
}

TEST_CASE("first_occurrence_probs on fixed orders and mixtures") {
  const OrderPolicy fixed = fixed_order_policy({0, 1});
  const auto probs = fixed.first_occurrence_probs(std::vector<double>{0.5, 0.5});
  CHECK(probs[0] == doctest::Approx(0.5));
  CHECK(probs[1] == doctest::Approx(0.25));
  const auto reversed = fixed_order_policy({1, 0}).first_occurrence_probs(std::vector<double>{0.5, 0.5});
  CHECK((probs[0] + reversed[0]) / 2 == doctest::Approx(0.375));
  CHECK_THROWS_AS(fixed_order_policy({0, 0}), Error);
}

TEST_CASE("soundness and conservation on 1000 random feasible profiles") {
  Rng rng(4242);
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto k = static_cast<std::size_t>(1 + rng.below(8));
    const TargetProfile profile = random_feasible_profile(rng, k);
    const OrderPolicy policy = build_policy(profile);
    const auto exact = policy.first_occurrence_probs(profile.p);
    const auto enumerated = oracle::first_occurrence_by_enumeration(policy, profile.p);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      total += exact[i];
      if (exact[i] < profile.r[i] - 1e-9) ++violations;
      worst = std::max(worst, profile.r[i] - exact[i]);
      CHECK(std::abs(exact[i] - enumerated[i]) <= 1e-12);
    }
    CHECK(std::abs(total - (1.0 - none_of(profile.p))) <= 1e-9);
    for (const auto& w : oracle::expand_policy(policy)) {
      CHECK(w.weight >= 0.0);
      CHECK(w.weight <= 1.0);
    }
  }
  CHECK(violations == 0);
  CHECK(worst <= 1e-9);
}

TEST_CASE("every sampled order is a permutation of all events") {
  Rng rng(55);
  for (int t = 0; t < 300; ++t) {
    const auto k = static_cast<std::size_t>(1 + rng.below(12));
    const OrderPolicy policy = build_policy(random_feasible_profile(rng, k));
    for (int s = 0; s < 10; ++s) {
      auto order = policy.sample(rng);
      std::sort(order.begin(), order.end());
      REQUIRE(order.size() == k);
      for (std::size_t i = 0; i < k; ++i) CHECK(order[i] == static_cast<int>(i));
    }
  }
}

TEST_CASE("a full-weight mix always returns the decreasing-index order") {
  // With targets equal to the fixed branch's own first-occurrence
  // probabilities the largest z is 1.
  const std::vector<double> p{0.3, 0.4, 0.5};
  const auto fixed = fixed_order_policy({2, 1, 0}).first_occurrence_probs(p);
  const TargetProfile t{p, fixed};
  const OrderPolicy policy = build_policy(t);
  Rng rng(7);
  const auto first = policy.sample(rng);
  for (int s = 0; s < 100; ++s) CHECK(policy.sample(rng) == first);
  const auto exact = policy.first_occurrence_probs(p);
  for (std::size_t i = 0; i < 3; ++i) CHECK(exact[i] >= fixed[i] - 1e-9);
}

TEST_CASE("sampled first-occurrence frequencies match the exact values") {
  Rng build_rng(9);
  const TargetProfile profile = random_feasible_profile(build_rng, 6);
  const OrderPolicy policy = build_policy(profile);
  const auto exact = policy.first_occurrence_probs(profile.p);
  const int draws = 1000000;
  std::vector<int> first(profile.size(), 0);
  Rng rng(10);
  for (int d = 0; d < draws; ++d) {
    for (const int e : policy.sample(rng)) {
      if (rng.uniform() < profile.p[e]) {
        ++first[e];
        break;
      }
    }
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double f = static_cast<double>(first[i]) / draws;
    const double sd = std::sqrt(exact[i] * (1 - exact[i]) / draws);
    CHECK(std::abs(f - exact[i]) <= 3 * sd + 1e-12);
  }
}

TEST_CASE("zero-probability events with zero target are appended in index order") {
  const TargetProfile t{{0.0, 0.5, 0.0, 0.5}, {0.0, 0.3, 0.0, 0.3}};
  const OrderPolicy policy = build_policy(t);
  CHECK(std::vector<int>(policy.appended_events().begin(), policy.appended_events().end()) ==
        std::vector<int>{0, 2});
  Rng rng(3);
  const auto order = policy.sample(rng);
  CHECK(order[2] == 0);
  CHECK(order[3] == 2);
}

TEST_CASE("the slack-removal weight is the largest feasible z") {
  // When only the full set is tight after Step 0 the root is a mix; its z is
  // compared with a bisection on subset-enumerated feasibility of the
  // residual targets.
  Rng rng(123);
  int checked = 0;
  for (int t = 0; t < 2000 && checked < 150; ++t) {
    const auto k = static_cast<std::size_t>(2 + rng.below(6));
    TargetProfile profile;
    for (std::size_t i = 0; i < k; ++i) {
      profile.p.push_back(0.05 + 0.9 * rng.uniform());
      profile.r.push_back(0.05 + rng.uniform());
    }
    const double y = feasibility_margin(profile);
    for (auto& r : profile.r) r *= y;
    const OrderPolicy policy = build_policy(profile);
    const auto& root = policy.node(policy.root());
    if (root.kind != OrderPolicy::Kind::kMix) continue;
    ++checked;

    // Residual r'(z) of the decreasing-index fixed branch.
    const auto sorted = policy.sorted_events();
    const std::vector<int> reversed(sorted.rbegin(), sorted.rend());
    const auto fixed = fixed_order_policy(reversed).first_occurrence_probs(profile.p);
    auto residual = [&](double z) {
      TargetProfile out{profile.p, std::vector<double>(k)};
      for (std::size_t i = 0; i < k; ++i) out.r[i] = (profile.r[i] - z * fixed[i]) / (1.0 - z);
      return out;
    };
    auto feasible = [&](double z) {
      auto res = residual(z);
      for (double& r : res.r) {
        if (r < -1e-12) return false;
        r = std::max(0.0, r);
      }
      return oracle::subset_min_slack(res) >= -1e-12;
    };
    double lo = 0.0;
    double hi = 1.0 - 1e-9;
    if (feasible(hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 80; ++it) {
        const double mid = (lo + hi) / 2;
        (feasible(mid) ? lo : hi) = mid;
      }
    }
    CHECK(std::abs(root.z - lo) <= 1e-6);

    // The residual keeps the decreasing r/p order.
    if (root.z < 1.0) {
      const auto res = residual(root.z);
      for (std::size_t a = 0; a + 1 < sorted.size(); ++a) {
        const int i = sorted[a];
        const int j = sorted[a + 1];
        CHECK(res.r[i] / res.p[i] >= res.r[j] / res.p[j] - 1e-9);
      }
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("construction stays fast and the tree grows subquadratically") {
  Rng rng(2000);
  std::vector<double> nodes;
  double seconds = 0.0;
  for (const std::size_t k : {250, 500, 1000, 2000}) {
    TargetProfile profile;
    for (std::size_t i = 0; i < k; ++i) {
      profile.p.push_back(0.001 + 0.05 * rng.uniform());
      profile.r.push_back(rng.uniform());
    }
    const double y = feasibility_margin(profile);
    for (auto& r : profile.r) r *= y;
    const auto start = std::chrono::steady_clock::now();
    const OrderPolicy policy = build_policy(profile);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nodes.push_back(static_cast<double>(policy.node_count()));
    const auto exact = policy.first_occurrence_probs(profile.p);
    for (std::size_t i = 0; i < k; ++i) CHECK(exact[i] >= profile.r[i] - 1e-9);
  }
  MESSAGE("node counts " << nodes[0] << " " << nodes[1] << " " << nodes[2] << " " << nodes[3]
                         << ", build time " << seconds << " s");
  CHECK(nodes[3] / nodes[2] < 4.0);
  CHECK(nodes[2] / nodes[1] < 4.0);
}

TEST_CASE("delta_factor and delta_scaled_targets") {
  CHECK(delta_factor(1.0, 0.255) == doctest::Approx(1.0 - std::exp(-1.0 / 0.255)).epsilon(1e-14));
  CHECK(delta_factor(1.0, 0.255) == doctest::Approx(0.9802).epsilon(1e-4));
  CHECK(delta_factor(0.0, 0.255) == doctest::Approx(1.0 / 0.255));
  CHECK(delta_factor(1e-300, 0.255) == doctest::Approx(1.0 / 0.255));

  const auto single = delta_scaled_targets(std::vector<double>{0.0}, std::vector<double>{0.4}, 0.255);
  CHECK(single.r[0] == 0.0);
  const auto empty = delta_scaled_targets(std::vector<double>{}, std::vector<double>{}, 0.255);
  CHECK(empty.size() == 0);

  // Noisy q above the feasible region is clamped back onto it.
  const auto clamped =
      delta_scaled_targets(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}, 0.255);
  CHECK(feasibility_margin(clamped) >= 1.0 - 1e-12);
}

TEST_CASE("delta-scaled targets from low-ratio q are feasible without clamping") {
  Rng rng(66);
  int subsets_checked = 0;
  for (int t = 0; t < 300; ++t) {
    const auto k = static_cast<std::size_t>(1 + rng.below(12));
    std::vector<double> p;
    std::vector<double> q;
    for (std::size_t i = 0; i < k; ++i) {
      p.push_back(0.01 + 0.99 * rng.uniform());
      q.push_back(p.back() * 0.255 * rng.uniform() * 0.999);
    }
    double sum_q = 0.0;
    for (const double x : q) sum_q += x;
    const double delta = delta_factor(sum_q, 0.255);
    TargetProfile raw{p, std::vector<double>(k)};
    for (std::size_t i = 0; i < k; ++i) raw.r[i] = delta * q[i];
    CHECK(feasibility_margin(raw) >= 1.0 - 1e-12);
    // Direct subset check of 1 - prod(1-p) >= delta * sum q.
    for (std::uint32_t mask = 1; mask < (1U << k); ++mask) {
      double none = 1.0;
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask >> i & 1U) {
          none *= 1.0 - p[i];
          s += q[i];
        }
      }
      CHECK(1.0 - none >= delta * s - 1e-12);
      ++subsets_checked;
    }
  }
  CHECK(subsets_checked > 1000);
}

TEST_CASE("delta-scaled targets from exact q* of small graphs need no clamping") {
  Rng rng(67);
  int vertices_checked = 0;
  for (int t = 0; t < 80; ++t) {
    const int n = 3 + static_cast<int>(rng.below(5));
    std::vector<WeightedPair> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.uniform() < 0.7) edges.push_back({{u, v}, 0.05 + 0.95 * rng.uniform()});
      }
    }
    const ProbGraph g(n, std::move(edges));
    if (g.pair_count() > 14) continue;
    const auto table = exact_q_table(g);
    for (int u = 0; u < n; ++u) {
      std::vector<double> p;
      std::vector<double> q;
      for (const auto& nb : g.neighbors(u)) {
        const double qe = table.value(Pair::of(u, nb.vertex));
        const double pe = g.edges()[nb.edge].p;
        if (qe / pe < 0.255) {
          p.push_back(pe);
          q.push_back(qe);
        }
      }
      if (p.empty()) continue;
      double sum_q = 0.0;
      for (const double x : q) sum_q += x;
      const double delta = delta_factor(sum_q, 0.255);
      TargetProfile raw{p, std::vector<double>(p.size())};
      for (std::size_t i = 0; i < p.size(); ++i) raw.r[i] = delta * q[i];
      CHECK(oracle::subset_margin(raw) >= 1.0 - 1e-12);
      ++vertices_checked;
    }
  }
  CHECK(vertices_checked > 20);
}
