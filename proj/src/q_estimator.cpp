#include "smcp/q_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "smcp/error.hpp"

namespace smcp {

Matching Matcher::run(const RealizedGraph& g) const {
  return kind == Kind::kMaximum ? max_matching(g) : approx_max_matching(g, zeta);
}

double QEstimate::value(Pair e) const {
  const Pair key = Pair::of(e.u, e.v);
  const auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
  if (it == pairs.end() || *it != key) return 0.0;
  return q[static_cast<std::size_t>(it - pairs.begin())];
}

double QEstimate::total() const { return std::accumulate(q.begin(), q.end(), 0.0); }

std::vector<double> QEstimate::vertex_totals(int n) const {
  std::vector<double> totals(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    totals[pairs[i].u] += q[i];
    totals[pairs[i].v] += q[i];
  }
  return totals;
}

namespace {

struct Counts {
  std::vector<std::uint64_t> matched;
  std::vector<std::uint64_t> present;
};

void count_range(const ProbGraph& g, std::uint64_t base, std::uint64_t begin, std::uint64_t end,
                 const EstimateOptions& options, Counts& counts) {
  const int n = g.vertex_count();
  std::vector<int> label(static_cast<std::size_t>(n));
  std::vector<int> original(static_cast<std::size_t>(n));
  RealizedGraph relabelled;
  for (std::uint64_t s = begin; s < end; ++s) {
    Rng rng(derive_seed(base, s));
    RealizedGraph h = sample_realization(g, rng);
    for (const auto& e : h.edges) ++counts.present[*g.edge_index(e.u, e.v)];
    Matching m;
    if (options.relabel) {
      std::iota(label.begin(), label.end(), 0);
      rng.shuffle(std::span<int>(label));
      for (int v = 0; v < n; ++v) original[label[v]] = v;
      relabelled.n = n;
      relabelled.edges.clear();
      for (const auto& e : h.edges) relabelled.edges.push_back(Pair::of(label[e.u], label[e.v]));
      std::sort(relabelled.edges.begin(), relabelled.edges.end());
      m = options.matcher.run(relabelled);
      for (auto& e : m.pairs) e = Pair::of(original[e.u], original[e.v]);
    } else {
      m = options.matcher.run(h);
    }
    for (const auto& e : m.pairs) ++counts.matched[*g.edge_index(e.u, e.v)];
  }
}

}  // namespace

QEstimate estimate_q(const ProbGraph& g, std::uint64_t c, Rng& rng,
                     const EstimateOptions& options) {
  if (c < 1) fail(ErrorCode::kInvalidArgument, "sample count must be at least 1");
  if (options.matcher.kind == Matcher::Kind::kApprox &&
      !(options.matcher.zeta > 0.0 && options.matcher.zeta < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "approximation parameter must lie in (0,1)");
  }
  const auto m = static_cast<std::size_t>(g.pair_count());
  const std::uint64_t base = rng.next();

  const int workers = static_cast<int>(
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(1, options.workers)), 1, c));
  std::vector<Counts> partial(static_cast<std::size_t>(workers),
                              Counts{std::vector<std::uint64_t>(m, 0),
                                     std::vector<std::uint64_t>(m, 0)});
  if (workers == 1) {
    count_range(g, base, 0, c, options, partial[0]);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t begin = c * static_cast<std::uint64_t>(w) / workers;
      const std::uint64_t end = c * static_cast<std::uint64_t>(w + 1) / workers;
      threads.emplace_back([&, w, begin, end] {
        try {
          count_range(g, base, begin, end, options, partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  QEstimate est;
  est.mode = QMode::kMonteCarlo;
  est.matcher = options.matcher;
  est.samples_used = c;
  est.q.assign(m, 0.0);
  est.edge_frequency.assign(m, 0.0);
  for (const auto& e : g.edges()) est.pairs.push_back(e.pair);
  const auto denom = static_cast<double>(c);
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t matched = 0;
    std::uint64_t present = 0;
    for (const auto& part : partial) {
      matched += part.matched[i];
      present += part.present[i];
    }
    est.q[i] = static_cast<double>(matched) / denom;
    est.edge_frequency[i] = static_cast<double>(present) / denom;
  }
  return est;
}

QEstimate exact_q_estimate(const ProbGraph& g) {
  ExactQTable table = exact_q_table(g);
  QEstimate est;
  est.mode = QMode::kExact;
  est.pairs = std::move(table.pairs);
  est.q = std::move(table.q);
  return est;
}

std::uint64_t default_sample_count(int n, SampleProfile profile) {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "sample count needs n >= 2");
  const double ln = std::log(static_cast<double>(n));
  if (profile == SampleProfile::kPaper) {
    return static_cast<std::uint64_t>(std::ceil(n * std::pow(ln, 6)));
  }
  return std::max<std::uint64_t>(1000, static_cast<std::uint64_t>(std::ceil(n * ln * ln)));
}

int recompute_schedule(long lambda, double zeta) {
  if (lambda < 0) fail(ErrorCode::kInvalidArgument, "matching size must be non-negative");
  if (!(zeta > 0.0 && zeta < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "recompute fraction must lie in (0,1)");
  }
  return std::max(1, static_cast<int>(std::floor(static_cast<double>(lambda) * zeta)));
}

EstimationError estimation_error(const QEstimate& est, const ExactQTable& exact) {
  if (est.pairs != exact.pairs) {
    fail(ErrorCode::kInvalidArgument, "estimate and exact table cover different pairs");
  }
  EstimationError err;
  err.per_pair.resize(est.q.size());
  for (std::size_t i = 0; i < est.q.size(); ++i) {
    err.per_pair[i] = std::abs(est.q[i] - exact.q[i]);
    err.sum += err.per_pair[i];
    err.max = std::max(err.max, err.per_pair[i]);
  }
  return err;
}

namespace {

std::string graph_key(const ProbGraph& g) {
  std::string key;
  key.reserve(4 + g.edges().size() * 16);
  auto put = [&key](const void* data, std::size_t size) {
    key.append(static_cast<const char*>(data), size);
  };
  const int n = g.vertex_count();
  put(&n, sizeof n);
  for (const auto& e : g.edges()) {
    put(&e.pair.u, sizeof e.pair.u);
    put(&e.pair.v, sizeof e.pair.v);
    put(&e.p, sizeof e.p);
  }
  return key;
}

}  // namespace

std::shared_ptr<const ExactQTable> ExactQCache::get(const ProbGraph& g) {
  const std::string key = graph_key(g);
  {
    std::lock_guard lock(mutex_);
    const auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
  }
  // Computed outside the lock; a duplicate computation yields the same table.
  auto table = std::make_shared<const ExactQTable>(exact_q_table(g));
  std::lock_guard lock(mutex_);
  return tables_.emplace(key, std::move(table)).first->second;
}

std::size_t ExactQCache::size() const {
  std::lock_guard lock(mutex_);
  return tables_.size();
}

}  // namespace smcp
