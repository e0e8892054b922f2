#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "smcp/graph.hpp"
#include "smcp/matching.hpp"
#include "smcp/rng.hpp"

namespace smcp {

struct Matcher {
  enum class Kind { kMaximum, kApprox };
  Kind kind = Kind::kMaximum;
  double zeta = 0.05;

  static Matcher maximum() { return {}; }
  static Matcher approx(double zeta) { return {Kind::kApprox, zeta}; }

  Matching run(const RealizedGraph& g) const;
};

enum class QMode { kExact, kMonteCarlo };

struct QEstimate {
  std::vector<Pair> pairs;              // positive pairs of the graph, ascending
  std::vector<double> q;                // aligned with pairs
  std::vector<double> edge_frequency;   // share of samples containing the pair (MC only)
  std::uint64_t samples_used = 0;       // 0 in exact mode
  QMode mode = QMode::kMonteCarlo;
  Matcher matcher;

  double value(Pair e) const;
  double total() const;
  std::vector<double> vertex_totals(int n) const;
};

struct EstimateOptions {
  Matcher matcher;
  // Relabel vertices uniformly at random for every sample, which spreads the
  // canonical matching's tie-breaking evenly over symmetric pairs.
  bool relabel = false;
  int workers = 1;
};

// Draws c realizations and counts how often each pair is in the chosen
// matching. Sample i uses the stream derive_seed(s, i) where s is one draw
// from rng, so the result does not depend on the worker count.
QEstimate estimate_q(const ProbGraph& g, std::uint64_t c, Rng& rng,
                     const EstimateOptions& options = {});

// Exact q* wrapped as an estimate.
QEstimate exact_q_estimate(const ProbGraph& g);

enum class SampleProfile { kPaper, kFast };

// kPaper: ceil(n (ln n)^6). kFast: max(1000, ceil(n (ln n)^2)). n >= 2.
std::uint64_t default_sample_count(int n, SampleProfile profile);

// Number of probes allowed before q is re-estimated: max(1, floor(lambda * zeta)).
int recompute_schedule(long lambda, double zeta);

struct EstimationError {
  std::vector<double> per_pair;  // |q_e - q*_e|
  double sum = 0.0;
  double max = 0.0;
};

// Throws kInvalidArgument when the pair sets differ.
EstimationError estimation_error(const QEstimate& est, const ExactQTable& exact);

// Thread-safe memo of exact q tables keyed by graph contents. Residual graphs
// recur across trials of the same instance.
class ExactQCache {
 public:
  std::shared_ptr<const ExactQTable> get(const ProbGraph& g);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ExactQTable>> tables_;
};

}  // namespace smcp
