#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smcp/algorithms.hpp"
#include "smcp/graph.hpp"

namespace smcp {

enum class Algorithm { kTwoStage, kGreedy, kGreedyRandom, kRandomGreedy, kObliviousBipartite };

// twostage, greedy, greedy-random, random-greedy, oblivious-bipartite
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algo);

struct OptSpec {
  // kAuto: exact up to kMaxExactPairs positive pairs, else Monte Carlo with
  // one realization per trial.
  enum class Mode { kAuto, kExact, kMonteCarlo };
  Mode mode = Mode::kAuto;
  std::uint64_t trials = 0;  // Monte Carlo only; 0 means the experiment's trial count
};

// "auto", "exact", "mc" or "mc:<trials>".
OptSpec parse_opt_spec(std::string_view text);

struct ExperimentSpec {
  std::string instance_name;
  Algorithm algorithm = Algorithm::kTwoStage;
  TwoStageConfig two_stage;  // seed and cache are replaced per trial
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  OptSpec opt;
  int workers = 1;
};

struct ExperimentReport {
  std::string instance;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;

  std::vector<int> alg_sizes;  // per trial
  std::vector<int> opt_sizes;  // per Monte Carlo OPT trial; empty when exact
  double mean_alg = 0.0;
  double alg_half_width = 0.0;
  double mean_opt = 0.0;
  double opt_half_width = 0.0;
  std::string opt_mode;  // "exact" or "mc"
  std::uint64_t opt_trials = 0;
  double ratio = 0.0;
  double ci95 = 0.0;  // delta-method half-width of the ratio; NaN for one trial

  // Configuration echo.
  double alpha = 0.0;
  std::string q_mode;
  std::uint64_t samples = 0;
  double zeta = 0.0;
};

// Trial i runs on trial_realization(g, seed, i) behind a fresh oracle with its
// own algorithm stream; Monte Carlo OPT uses the same realizations. Trials run
// on `workers` threads and are reduced in trial order, so the report does not
// depend on the worker count. Throws kContractViolation if a run's matching
// differs from the oracle's committed pairs.
ExperimentReport run_experiment(const ProbGraph& g, const ExperimentSpec& spec);

// Runs one algorithm once. rng_seed seeds both two-stage and baseline streams.
RunRecord run_algorithm(const ProbGraph& g, Prober& prober, Algorithm algo,
                        const TwoStageConfig& cfg, std::uint64_t rng_seed);

}  // namespace smcp
