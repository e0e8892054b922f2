#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "smcp/error.hpp"
#include "smcp/experiment.hpp"
#include "smcp/instance.hpp"
#include "smcp/matching.hpp"
#include "smcp/report.hpp"

using namespace smcp;

namespace {

ProbGraph spec(const std::string& text) { return build_instance(parse_instance_spec(text)); }

ExperimentSpec base(Algorithm algo, std::uint64_t trials) {
  ExperimentSpec s;
  s.instance_name = "test";
  s.algorithm = algo;
  s.trials = trials;
  s.seed = 11;
  return s;
}

}  // namespace

TEST_CASE("algorithm and OPT spec parsing") {
  for (const auto algo : {Algorithm::kTwoStage, Algorithm::kGreedy, Algorithm::kGreedyRandom,
                          Algorithm::kRandomGreedy, Algorithm::kObliviousBipartite}) {
    CHECK(parse_algorithm(to_string(algo)) == algo);
  }
  CHECK_THROWS_AS(parse_algorithm("best"), Error);
  CHECK(parse_opt_spec("auto").mode == OptSpec::Mode::kAuto);
  CHECK(parse_opt_spec("exact").mode == OptSpec::Mode::kExact);
  CHECK(parse_opt_spec("mc").trials == 0);
  CHECK(parse_opt_spec("mc:500").trials == 500);
  CHECK_THROWS_AS(parse_opt_spec("mc:1"), Error);
  CHECK_THROWS_AS(parse_opt_spec("mc:x"), Error);
  CHECK_THROWS_AS(parse_opt_spec("opt"), Error);
}

TEST_CASE("greedy on K4 lands between one half and one") {
  const auto report = run_experiment(spec("complete:n=4,p=0.64"), base(Algorithm::kGreedy, 10000));
  CHECK(report.opt_mode == "exact");
  CHECK(report.ratio >= 0.5);
  CHECK(report.ratio <= 1.0);
  CHECK(report.alg_sizes.size() == 10000);
  CHECK(report.opt_sizes.empty());
  CHECK(report.ci95 > 0.0);
  CHECK(report.ci95 < 0.02);
}

TEST_CASE("reports are deterministic and independent of the worker count") {
  const ProbGraph g = spec("sparse:n=12,density=0.4,seed=4");
  for (const auto algo : {Algorithm::kTwoStage, Algorithm::kRandomGreedy}) {
    ExperimentSpec s = base(algo, 200);
    s.two_stage.samples = 300;
    const auto one = run_experiment(g, s);
    const auto again = run_experiment(g, s);
    s.workers = 4;
    const auto four = run_experiment(g, s);
    CHECK(one.alg_sizes == again.alg_sizes);
    CHECK(one.alg_sizes == four.alg_sizes);
    CHECK(one.opt_sizes == four.opt_sizes);
    CHECK(report_to_json(one) == report_to_json(four));
    CHECK(report_to_csv(one) == report_to_csv(again));
  }
}

TEST_CASE("paired Monte Carlo OPT dominates every trial") {
  const ProbGraph g = spec("sparse:n=20,density=0.3,seed=9");
  REQUIRE(g.pair_count() > kMaxExactPairs);
  const auto report = run_experiment(g, base(Algorithm::kGreedyRandom, 2000));
  CHECK(report.opt_mode == "mc");
  REQUIRE(report.opt_sizes.size() == report.alg_sizes.size());
  for (std::size_t i = 0; i < report.alg_sizes.size(); ++i) {
    CHECK(report.opt_sizes[i] >= report.alg_sizes[i]);
  }
  CHECK(report.ratio <= 1.0);
  CHECK(report.ratio >= 0.5);
  // Matches an independent recount of the same realizations.
  for (std::uint64_t i = 0; i < 20; ++i) {
    CHECK(report.opt_sizes[i] ==
          static_cast<int>(max_matching(trial_realization(g, 11, i)).size()));
  }
}

TEST_CASE("paired sampling tightens the ratio interval") {
  // Positively correlated sizes make the paired interval narrower than the
  // one from independent variances.
  const ProbGraph g = spec("sparse:n=20,density=0.3,seed=9");
  const auto r = run_experiment(g, base(Algorithm::kGreedy, 4000));
  const double unpaired =
      1.96 * std::sqrt(std::pow(r.alg_half_width / 1.96, 2) +
                       r.ratio * r.ratio * std::pow(r.opt_half_width / 1.96, 2)) /
      r.mean_opt;
  CHECK(r.ci95 < unpaired);
  CHECK(r.ci95 > 0.0);
}

TEST_CASE("the interval halves when the trials quadruple") {
  const ProbGraph g = spec("complete:n=5,p=0.5");
  const auto small = run_experiment(g, base(Algorithm::kRandomGreedy, 5000));
  const auto large = run_experiment(g, base(Algorithm::kRandomGreedy, 20000));
  CHECK(large.ci95 / small.ci95 == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("explicit OPT modes") {
  const ProbGraph g = spec("complete:n=4,p=0.64");
  ExperimentSpec s = base(Algorithm::kGreedy, 500);
  s.opt = parse_opt_spec("mc:3000");
  const auto mc = run_experiment(g, s);
  CHECK(mc.opt_mode == "mc");
  CHECK(mc.opt_trials == 3000);
  CHECK(mc.opt_sizes.size() == 3000);
  CHECK(std::abs(mc.mean_opt - 1.79202621) <= mc.opt_half_width * 1.5);

  s.opt = parse_opt_spec("exact");
  CHECK(run_experiment(g, s).mean_opt == doctest::Approx(1.79202621).epsilon(1e-8));
  CHECK_THROWS_AS(run_experiment(spec("complete:n=8,p=0.5"), s), Error);
}

TEST_CASE("a single trial reports a NaN interval") {
  const auto r = run_experiment(spec("complete:n=4,p=0.64"), base(Algorithm::kGreedy, 1));
  CHECK(std::isnan(r.ci95));
  CHECK(report_csv_row(r).ends_with(",null\n"));
  const auto doc = nlohmann::json::parse(report_to_json(r));
  CHECK(doc["ci95"].is_null());
}

TEST_CASE("invalid experiments are rejected") {
  const ProbGraph g = spec("complete:n=4,p=0.5");
  CHECK_THROWS_AS(run_experiment(g, base(Algorithm::kGreedy, 0)), Error);
  CHECK_THROWS_AS(run_experiment(g, base(Algorithm::kObliviousBipartite, 10)), Error);
  ExperimentSpec bad = base(Algorithm::kTwoStage, 10);
  bad.two_stage.alpha = 2.0;
  CHECK_THROWS_AS(run_experiment(g, bad), Error);
  try {
    run_experiment(g, base(Algorithm::kObliviousBipartite, 10));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("CSV rendering") {
  const auto r = run_experiment(spec("complete:n=4,p=0.64"), base(Algorithm::kGreedy, 100));
  const std::string csv = report_to_csv(r);
  CHECK(csv.starts_with("instance,algo,seed,trials,mean_alg,mean_opt,opt_mode,ratio,ci95\n"));
  CHECK(csv.find("\ntest,greedy,11,100,") != std::string::npos);

  ExperimentReport quoted = r;
  quoted.instance = "complete:n=4,p=0.64";
  CHECK(report_csv_row(quoted).starts_with("\"complete:n=4,p=0.64\",greedy,"));
  quoted.instance = "a\"b";
  CHECK(report_csv_row(quoted).starts_with("\"a\"\"b\",greedy,"));

  // Nine significant digits.
  ExperimentReport fixed = r;
  fixed.mean_alg = 1.0 / 3.0;
  CHECK(report_csv_row(fixed).find(",0.333333333,") != std::string::npos);
}

TEST_CASE("JSON round trip") {
  const ProbGraph g = spec("sparse:n=20,density=0.3,seed=9");
  ExperimentSpec s = base(Algorithm::kTwoStage, 50);
  s.two_stage.samples = 200;
  const auto r = run_experiment(g, s);
  const auto doc = nlohmann::json::parse(report_to_json(r));
  CHECK(doc["instance"] == "test");
  CHECK(doc["algo"] == "twostage");
  CHECK(doc["seed"] == 11);
  CHECK(doc["trials"] == 50);
  CHECK(doc["opt_mode"] == "mc");
  CHECK(doc["alg_sizes"].get<std::vector<int>>() == r.alg_sizes);
  CHECK(doc["opt_sizes"].get<std::vector<int>>() == r.opt_sizes);
  CHECK(doc["mean_alg"].get<double>() == doctest::Approx(r.mean_alg).epsilon(1e-8));
  CHECK(doc["ratio"].get<double>() == doctest::Approx(r.ratio).epsilon(1e-8));
  CHECK(doc["config"]["alpha"].get<double>() == 0.255);
  CHECK(doc["config"]["samples"] == 200);
  CHECK(doc["config"]["q_mode"] == "fast");
}

TEST_CASE("run_algorithm uses the oracle only") {
  const ProbGraph g = spec("path:0.9,1,0.9");
  TwoStageConfig cfg;
  cfg.q_profile = QProfile::kExact;
  for (const auto algo : {Algorithm::kTwoStage, Algorithm::kGreedy, Algorithm::kGreedyRandom,
                          Algorithm::kRandomGreedy, Algorithm::kObliviousBipartite}) {
    ProbeOracle oracle(trial_realization(g, 1, 0));
    const auto rec = run_algorithm(g, oracle, algo, cfg, 3);
    CHECK(rec.matching.pairs == oracle.matching().pairs);
    CHECK(rec.probes.size() == oracle.probe_count());
  }
}
