#include "smcp/experiment.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "smcp/error.hpp"
#include "smcp/matching.hpp"

namespace smcp {

Algorithm parse_algorithm(std::string_view name) {
  if (name == "twostage" || name == "two-stage") return Algorithm::kTwoStage;
  if (name == "greedy") return Algorithm::kGreedy;
  if (name == "greedy-random") return Algorithm::kGreedyRandom;
  if (name == "random-greedy") return Algorithm::kRandomGreedy;
  if (name == "oblivious-bipartite") return Algorithm::kObliviousBipartite;
  fail(ErrorCode::kInvalidArgument, "unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kTwoStage: return "twostage";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kGreedyRandom: return "greedy-random";
    case Algorithm::kRandomGreedy: return "random-greedy";
    case Algorithm::kObliviousBipartite: return "oblivious-bipartite";
  }
  return "unknown";
}

OptSpec parse_opt_spec(std::string_view text) {
  OptSpec spec;
  if (text == "auto") return spec;
  if (text == "exact") {
    spec.mode = OptSpec::Mode::kExact;
    return spec;
  }
  if (text == "mc") {
    spec.mode = OptSpec::Mode::kMonteCarlo;
    return spec;
  }
  if (text.starts_with("mc:")) {
    const std::string digits(text.substr(3));
    char* end = nullptr;
    const unsigned long long n = std::strtoull(digits.c_str(), &end, 10);
    if (digits.empty() || end != digits.c_str() + digits.size() || n < 2) {
      fail(ErrorCode::kInvalidArgument, "Monte Carlo OPT needs mc:<trials> with trials >= 2");
    }
    spec.mode = OptSpec::Mode::kMonteCarlo;
    spec.trials = n;
    return spec;
  }
  fail(ErrorCode::kInvalidArgument, "unknown OPT mode '" + std::string(text) + "'");
}

RunRecord run_algorithm(const ProbGraph& g, Prober& prober, Algorithm algo,
                        const TwoStageConfig& cfg, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  switch (algo) {
    case Algorithm::kTwoStage: {
      TwoStageConfig local = cfg;
      local.seed = rng_seed;
      return run_two_stage(g, prober, local);
    }
    case Algorithm::kGreedy: return run_greedy(g, prober, GreedyOrder::kIndex, rng);
    case Algorithm::kGreedyRandom: return run_greedy(g, prober, GreedyOrder::kRandom, rng);
    case Algorithm::kRandomGreedy: return run_random_vertex_greedy(g, prober, rng);
    case Algorithm::kObliviousBipartite: return run_oblivious_bipartite(g, prober, rng);
  }
  fail(ErrorCode::kInvalidArgument, "unknown algorithm");
}

namespace {

// Runs body(i) for i in [0, count) on up to `workers` threads in contiguous
// blocks and rethrows the exception of the smallest failing block.
template <typename Body>
void parallel_for(std::uint64_t count, int workers, Body body) {
  const auto w = static_cast<std::uint64_t>(std::max(1, workers));
  const std::uint64_t threads = std::min<std::uint64_t>(w, std::max<std::uint64_t>(count, 1));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::uint64_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::uint64_t begin = count * t / threads;
      const std::uint64_t end = count * (t + 1) / threads;
      try {
        for (std::uint64_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // sample variance; NaN for a single value
};

Moments moments(const std::vector<int>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (const int x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) {
    m.variance = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double ss = 0.0;
  for (const int x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / static_cast<double>(xs.size() - 1);
  return m;
}

}  // namespace

ExperimentReport run_experiment(const ProbGraph& g, const ExperimentSpec& spec) {
  if (spec.trials < 1) fail(ErrorCode::kInvalidArgument, "trials must be at least 1");
  spec.two_stage.validate();
  if (spec.algorithm == Algorithm::kObliviousBipartite && !g.is_bipartite()) {
    fail(ErrorCode::kInvalidArgument, "oblivious-bipartite needs a bipartite instance");
  }

  ExperimentReport report;
  report.instance = spec.instance_name;
  report.algorithm = std::string(to_string(spec.algorithm));
  report.seed = spec.seed;
  report.trials = spec.trials;
  report.alpha = spec.two_stage.alpha;
  report.q_mode = std::string(to_string(spec.two_stage.q_profile));
  report.samples = spec.two_stage.samples;
  report.zeta = spec.two_stage.zeta;

  ExactQCache cache;
  TwoStageConfig cfg = spec.two_stage;
  cfg.cache = &cache;
  const std::uint64_t alg_base = derive_seed(spec.seed, ~std::uint64_t{0});

  report.alg_sizes.assign(spec.trials, 0);
  parallel_for(spec.trials, spec.workers, [&](std::uint64_t i) {
    ProbeOracle oracle(trial_realization(g, spec.seed, i));
    const RunRecord rec = run_algorithm(g, oracle, spec.algorithm, cfg, derive_seed(alg_base, i));
    if (rec.matching.pairs != oracle.matching().pairs) {
      fail(ErrorCode::kContractViolation, "trial " + std::to_string(i) +
                                              ": matching differs from committed probes");
    }
    report.alg_sizes[i] = static_cast<int>(rec.matching.size());
  });

  bool exact = spec.opt.mode == OptSpec::Mode::kExact;
  if (spec.opt.mode == OptSpec::Mode::kAuto) exact = g.pair_count() <= kMaxExactPairs;
  const Moments alg = moments(report.alg_sizes);
  report.mean_alg = alg.mean;
  const auto t = static_cast<double>(spec.trials);
  report.alg_half_width = 1.96 * std::sqrt(alg.variance / t);

  if (exact) {
    report.opt_mode = "exact";
    report.mean_opt = expected_opt(g, OptMode::kExact).mean;
    report.ratio = report.mean_opt > 0.0 ? report.mean_alg / report.mean_opt
                                         : std::numeric_limits<double>::quiet_NaN();
    report.ci95 = 1.96 * std::sqrt(alg.variance / t) / report.mean_opt;
    return report;
  }

  report.opt_mode = "mc";
  const std::uint64_t n_opt = spec.opt.trials > 0 ? spec.opt.trials : spec.trials;
  if (n_opt < 2) fail(ErrorCode::kInvalidArgument, "Monte Carlo OPT needs at least 2 trials");
  report.opt_trials = n_opt;
  report.opt_sizes.assign(n_opt, 0);
  parallel_for(n_opt, spec.workers, [&](std::uint64_t i) {
    report.opt_sizes[i] = static_cast<int>(max_matching(trial_realization(g, spec.seed, i)).size());
  });
  const Moments opt = moments(report.opt_sizes);
  const auto o = static_cast<double>(n_opt);
  report.mean_opt = opt.mean;
  report.opt_half_width = 1.96 * std::sqrt(opt.variance / o);

  // Paired trials share realizations, so the covariance term uses the
  // overlapping indices.
  const std::uint64_t overlap = std::min(spec.trials, n_opt);
  double cov = 0.0;
  if (overlap >= 2) {
    double ma = 0.0;
    double mo = 0.0;
    for (std::uint64_t i = 0; i < overlap; ++i) {
      ma += report.alg_sizes[i];
      mo += report.opt_sizes[i];
    }
    ma /= static_cast<double>(overlap);
    mo /= static_cast<double>(overlap);
    for (std::uint64_t i = 0; i < overlap; ++i) {
      cov += (report.alg_sizes[i] - ma) * (report.opt_sizes[i] - mo);
    }
    cov /= static_cast<double>(overlap - 1);
  }
  if (report.mean_opt > 0.0) {
    const double a = report.mean_alg;
    const double b = report.mean_opt;
    report.ratio = a / b;
    const double var_a = alg.variance / t;
    const double var_b = opt.variance / o;
    const double cov_ab = cov * static_cast<double>(overlap) / (t * o);
    const double var_ratio = (var_a - 2.0 * report.ratio * cov_ab +
                              report.ratio * report.ratio * var_b) / (b * b);
    report.ci95 = 1.96 * std::sqrt(std::max(0.0, var_ratio));
    if (std::isnan(var_a)) report.ci95 = std::numeric_limits<double>::quiet_NaN();
  } else {
    report.ratio = std::numeric_limits<double>::quiet_NaN();
    report.ci95 = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace smcp
