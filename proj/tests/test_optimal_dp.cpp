#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

#include "smcp/algorithms.hpp"
#include "smcp/error.hpp"
#include "smcp/experiment.hpp"
#include "smcp/instance.hpp"
#include "smcp/matching.hpp"
#include "smcp/optimal_dp.hpp"

using namespace smcp;

namespace {

ProbGraph spec(const std::string& text) { return build_instance(parse_instance_spec(text)); }

// Independent formulation over (alive vertex set, probed-absent pairs), with a
// std::map memo keyed by the canonical encoding of the state.
double online_by_vertex_states(const ProbGraph& g) {
  const int n = g.vertex_count();
  const int m = g.pair_count();
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> memo;
  std::function<double(std::uint32_t, std::uint32_t)> value = [&](std::uint32_t alive,
                                                                  std::uint32_t absent) {
    const auto key = std::make_pair(alive, absent);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    double best = 0.0;
    for (int e = 0; e < m; ++e) {
      const Pair pr = g.edges()[e].pair;
      if (!(alive >> pr.u & 1U) || !(alive >> pr.v & 1U) || (absent >> e & 1U)) continue;
      // Absent pairs that lose an endpoint drop out of the state.
      std::uint32_t next_alive = alive & ~(1U << pr.u) & ~(1U << pr.v);
      std::uint32_t next_absent = 0;
      for (int f = 0; f < m; ++f) {
        const Pair q = g.edges()[f].pair;
        if ((absent >> f & 1U) && (next_alive >> q.u & 1U) && (next_alive >> q.v & 1U)) {
          next_absent |= 1U << f;
        }
      }
      const double p = g.edges()[e].p;
      best = std::max(best, p * (1 + value(next_alive, next_absent)) +
                                (1 - p) * value(alive, absent | (1U << e)));
    }
    memo[key] = best;
    return best;
  };
  return value(n >= 32 ? ~0U : (1U << n) - 1U, 0);
}

double k4_online_paper(double p) {
  const double s = 1 - p;
  return p + p * p + s * p * (1 + p) + s * s * p * (1 + p) + s * s * s * (1 - s * s * s);
}

}  // namespace

TEST_CASE("single pair") {
  for (const double p : {0.0, 0.2, 0.7, 1.0}) {
    CHECK(optimal_online_value(ProbGraph(2, {{{0, 1}, p}})) == doctest::Approx(p));
  }
  CHECK(hardness_ratio(ProbGraph(2, {{{0, 1}, 0.4}})).ratio == doctest::Approx(1.0));
}

TEST_CASE("K4 at p = 0.64 reproduces the published values") {
  const ProbGraph g = spec("complete:n=4,p=0.64");
  const Hardness h = hardness_ratio(g);
  CHECK(std::abs(h.online - 1.607) <= 2e-3);
  CHECK(std::abs(h.offline - 1.792) <= 1e-3);
  CHECK(h.ratio <= 0.898);
  CHECK(h.ratio == doctest::Approx(0.897).epsilon(1e-3));
}

TEST_CASE("DP equals the K4 case polynomial") {
  for (const double p : {0.1, 0.25, 0.5, 0.64, 0.9}) {
    const ProbGraph g = spec("complete:n=4,p=" + std::to_string(p));
    const double dp = optimal_online_value(g);
    CHECK(std::abs(dp - k4_online_paper(p)) <= 1e-9);
    CHECK(std::abs(dp - k4_closed_forms(p).online) <= 1e-9);
    CHECK(std::abs(expected_opt(g, OptMode::kExact).mean - k4_closed_forms(p).offline) <= 1e-9);
  }
}

TEST_CASE("k4_closed_forms at the endpoints") {
  const auto zero = k4_closed_forms(0.0);
  CHECK(zero.online == 0.0);
  CHECK(zero.offline == 0.0);
  const auto one = k4_closed_forms(1.0);
  CHECK(one.online == doctest::Approx(2.0));
  CHECK(one.offline == doctest::Approx(2.0));
  const auto mid = k4_closed_forms(0.64);
  CHECK(std::abs(mid.offline - 1.792) <= 1e-3);
  CHECK(mid.online >= 1.607);
  CHECK(mid.online <= 1.6085);
  CHECK_THROWS_AS(k4_closed_forms(-0.1), Error);
  CHECK_THROWS_AS(k4_closed_forms(1.1), Error);
}

TEST_CASE("the mask DP agrees with the vertex-state formulation") {
  Rng rng(14);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng.below(5));
    std::vector<WeightedPair> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.uniform() < 0.8 && edges.size() < 12) edges.push_back({{u, v}, rng.uniform()});
      }
    }
    const ProbGraph g(n, std::move(edges));
    CHECK(std::abs(optimal_online_value(g) - online_by_vertex_states(g)) <= 1e-12);
  }
}

TEST_CASE("an explicit stop action never helps") {
  Rng rng(15);
  for (int t = 0; t < 80; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    std::vector<WeightedPair> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.uniform() < 0.6 && edges.size() < 12) edges.push_back({{u, v}, rng.uniform()});
      }
    }
    const ProbGraph g(n, std::move(edges));
    CHECK(optimal_online_value(g) == doctest::Approx(optimal_online_value_with_stop(g)).epsilon(1e-14));
  }
}

TEST_CASE("online value never exceeds the offline expectation") {
  Rng rng(16);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    std::vector<WeightedPair> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.uniform() < 0.6 && edges.size() < 12) {
          edges.push_back({{u, v}, 0.01 + 0.99 * rng.uniform()});
        }
      }
    }
    const ProbGraph g(n, std::move(edges));
    if (g.pair_count() == 0) continue;
    CHECK(hardness_ratio(g).ratio <= 1.0 + 1e-12);
  }
}

TEST_CASE("online value is monotone in each probability on K4") {
  const double h = 1e-4;
  for (const double base : {0.2, 0.5, 0.64, 0.9}) {
    for (int e = 0; e < 6; ++e) {
      std::vector<WeightedPair> lo;
      std::vector<WeightedPair> hi;
      int index = 0;
      for (int u = 0; u < 4; ++u) {
        for (int v = u + 1; v < 4; ++v) {
          lo.push_back({{u, v}, base});
          hi.push_back({{u, v}, index == e ? base + h : base});
          ++index;
        }
      }
      CHECK(optimal_online_value(ProbGraph(4, hi)) >= optimal_online_value(ProbGraph(4, lo)));
    }
  }
}

TEST_CASE("DP guard and zero-OPT error") {
  CHECK_THROWS_AS(optimal_online_value(spec("complete:n=6,p=0.5")), Error);
  CHECK_THROWS_AS(hardness_ratio(ProbGraph(3, {})), Error);
  CHECK(optimal_online_value(ProbGraph(3, {})) == 0.0);
}

TEST_CASE("DP dominates every implemented algorithm on small instances") {
  for (const char* text : {"path:0.9,1,0.9", "complete:n=4,p=0.64", "complete:n=4,p=0.3",
                           "bipartite:left=3,right=3,p=0.5"}) {
    const ProbGraph g = spec(text);
    const double dp = optimal_online_value(g);
    for (const auto algo : {Algorithm::kTwoStage, Algorithm::kGreedy, Algorithm::kGreedyRandom,
                            Algorithm::kRandomGreedy}) {
      ExperimentSpec exp;
      exp.algorithm = algo;
      exp.two_stage.q_profile = QProfile::kExact;
      exp.trials = 100000;
      exp.seed = 5;
      exp.opt.mode = OptSpec::Mode::kExact;
      exp.workers = 4;
      const auto report = run_experiment(g, exp);
      const double sd = report.alg_half_width / 1.96;
      CAPTURE(text);
      CAPTURE(to_string(algo));
      CHECK(report.mean_alg <= dp + 3 * sd);
    }
  }
}
