#include "smcp/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smcp/error.hpp"
#include "smcp/order_sampler.hpp"

namespace smcp {

QProfile parse_q_profile(std::string_view name) {
  if (name == "paper") return QProfile::kPaper;
  if (name == "fast") return QProfile::kFast;
  if (name == "exact") return QProfile::kExact;
  fail(ErrorCode::kInvalidArgument, "unknown q mode '" + std::string(name) + "'");
}

std::string_view to_string(QProfile profile) {
  switch (profile) {
    case QProfile::kPaper: return "paper";
    case QProfile::kFast: return "fast";
    case QProfile::kExact: return "exact";
  }
  return "unknown";
}

void TwoStageConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::kInvalidArgument, "alpha must lie in (0,1)");
  if (!(zeta > 0.0 && zeta < 1.0)) fail(ErrorCode::kInvalidArgument, "zeta must lie in (0,1)");
}

double phi_factor(double alpha) {
  return (1.0 - std::exp(-1.0)) * (1.0 - std::exp(-1.0 / (2.0 * alpha)));
}

namespace {

bool is_candidate(const Prober& prober, Pair e) {
  return !prober.is_removed(e.u) && !prober.is_removed(e.v) && !prober.was_probed(e.u, e.v);
}

// Probes e and appends the outcome to the record.
bool probe_and_record(Prober& prober, RunRecord& rec, ProbeEvent event) {
  event.present = prober.probe(event.pair.u, event.pair.v);
  if (event.present) {
    rec.matching.pairs.push_back(event.pair);
    (event.stage == 1 ? rec.stage1_matches : rec.stage2_matches) += 1;
  }
  rec.probes.push_back(event);
  return event.present;
}

class Stage1Estimator {
 public:
  explicit Stage1Estimator(const TwoStageConfig& cfg)
      : cfg_(cfg), rng_(derive_seed(cfg.seed, 1)) {}

  QEstimate operator()(const ProbGraph& residual) {
    if (cfg_.q_profile == QProfile::kExact) {
      if (cfg_.cache != nullptr) {
        const auto table = cfg_.cache->get(residual);
        QEstimate est;
        est.mode = QMode::kExact;
        est.pairs = table->pairs;
        est.q = table->q;
        return est;
      }
      return exact_q_estimate(residual);
    }
    std::uint64_t c = cfg_.samples;
    if (c == 0) {
      int live = 0;
      std::vector<char> touched(static_cast<std::size_t>(residual.vertex_count()), 0);
      for (const auto& e : residual.edges()) touched[e.pair.u] = touched[e.pair.v] = 1;
      for (const char t : touched) live += t;
      c = default_sample_count(std::max(2, live), cfg_.q_profile == QProfile::kPaper
                                                      ? SampleProfile::kPaper
                                                      : SampleProfile::kFast);
    }
    EstimateOptions options;
    options.matcher = cfg_.matcher;
    options.relabel = cfg_.relabel;
    options.workers = cfg_.workers;
    return estimate_q(residual, c, rng_, options);
  }

 private:
  const TwoStageConfig& cfg_;
  Rng rng_;
};

}  // namespace

RunRecord run_two_stage(const ProbGraph& g, Prober& prober, const TwoStageConfig& cfg) {
  cfg.validate();
  const int n = g.vertex_count();
  RunRecord rec;
  Stage1Estimator estimate(cfg);

  // Stage 1.
  QEstimate q;
  int since = 0;
  int budget = 1;
  auto refresh = [&] {
    q = estimate(residual_graph(g, prober));
    ++rec.estimations;
    since = 0;
    budget = cfg.q_profile == QProfile::kExact
                 ? 1
                 : recompute_schedule(static_cast<long>(std::floor(q.total())), cfg.zeta);
  };
  refresh();
  while (true) {
    if (since >= budget) refresh();
    int best = -1;
    double best_ratio = -1.0;
    for (std::size_t i = 0; i < q.pairs.size(); ++i) {
      const Pair e = q.pairs[i];
      if (!is_candidate(prober, e)) continue;
      const double ratio = q.q[i] / g.p(e.u, e.v);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = static_cast<int>(i);
      }
    }
    if (best == -1 || best_ratio < cfg.alpha) {
      if (since > 0) {
        refresh();
        continue;
      }
      break;
    }
    const Pair e = q.pairs[best];
    probe_and_record(prober, rec, {e, false, 1, 0, q.q[best], g.p(e.u, e.v)});
    ++since;
  }

  // Stage 2 with q frozen at the last (fresh) estimate.
  rec.entry_q = q.vertex_totals(n);
  Rng rng(derive_seed(cfg.seed, 2));
  std::vector<Vertex> x;
  {
    const CandidateState state = candidate_state(g, prober);
    for (Vertex v = 0; v < n; ++v) {
      if (state.alive[v]) x.push_back(v);
    }
  }
  std::vector<char> in_x(static_cast<std::size_t>(n), 0);
  std::vector<char> in_r(static_cast<std::size_t>(n), 0);
  std::vector<double> targets_q;
  std::vector<double> targets_p;
  std::vector<Vertex> scan;
  for (int iteration = 0;; ++iteration) {
    std::fill(in_x.begin(), in_x.end(), 0);
    for (const Vertex v : x) in_x[v] = 1;
    bool internal = false;
    for (const Vertex u : x) {
      for (const auto& nb : g.neighbors(u)) {
        if (nb.vertex > u && in_x[nb.vertex] && is_candidate(prober, Pair{u, nb.vertex})) {
          internal = true;
          break;
        }
      }
      if (internal) break;
    }
    if (x.size() < 2 || !internal) break;
    rec.stage2_ran = true;

    rng.shuffle(std::span<Vertex>(x));
    const std::size_t left_size = (x.size() + 1) / 2;
    std::vector<Vertex> left(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(left_size));
    std::vector<Vertex> right(x.begin() + static_cast<std::ptrdiff_t>(left_size), x.end());
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    std::fill(in_r.begin(), in_r.end(), 0);
    for (const Vertex v : right) in_r[v] = 1;
    rec.left.push_back(left);
    rec.right.push_back(right);

    for (const Vertex u : left) {
      if (prober.is_removed(u)) continue;
      targets_q.clear();
      targets_p.clear();
      scan.clear();
      for (const auto& nb : g.neighbors(u)) {
        const Vertex v = nb.vertex;
        if (!in_r[v] || !is_candidate(prober, Pair::of(u, v))) continue;
        scan.push_back(v);
        targets_q.push_back(q.value(Pair::of(u, v)));
        targets_p.push_back(g.edges()[nb.edge].p);
      }
      if (scan.empty()) continue;
      const OrderPolicy policy = build_policy(delta_scaled_targets(targets_q, targets_p, cfg.alpha));
      for (const int idx : policy.sample(rng)) {
        const Pair e = Pair::of(u, scan[idx]);
        if (probe_and_record(prober, rec, {e, false, 2, iteration, targets_q[idx], targets_p[idx]})) {
          break;
        }
      }
    }

    if (iteration == 0) {
      for (const Vertex v : right) rec.first_r_matched.push_back(prober.is_removed(v) ? 1 : 0);
    }
    const CandidateState state = candidate_state(g, prober);
    x.clear();
    for (const Vertex v : right) {
      if (state.alive[v]) x.push_back(v);
    }
  }

  rec.matching.normalize();
  return rec;
}

RunRecord run_greedy(const ProbGraph& g, Prober& prober, GreedyOrder order, Rng& rng) {
  RunRecord rec;
  std::vector<int> indices(static_cast<std::size_t>(g.pair_count()));
  std::iota(indices.begin(), indices.end(), 0);
  if (order == GreedyOrder::kRandom) rng.shuffle(std::span<int>(indices));
  for (const int i : indices) {
    const auto& e = g.edges()[i];
    if (prober.is_removed(e.pair.u) || prober.is_removed(e.pair.v)) continue;
    probe_and_record(prober, rec, {e.pair, false, 1, 0, 0.0, e.p});
  }
  rec.matching.normalize();
  return rec;
}

RunRecord run_random_vertex_greedy(const ProbGraph& g, Prober& prober, Rng& rng) {
  RunRecord rec;
  std::vector<Vertex> vertices(static_cast<std::size_t>(g.vertex_count()));
  std::iota(vertices.begin(), vertices.end(), 0);
  rng.shuffle(std::span<Vertex>(vertices));
  std::vector<Neighbor> scan;
  for (const Vertex u : vertices) {
    if (prober.is_removed(u)) continue;
    scan.clear();
    for (const auto& nb : g.neighbors(u)) {
      if (is_candidate(prober, Pair::of(u, nb.vertex))) scan.push_back(nb);
    }
    rng.shuffle(std::span<Neighbor>(scan));
    for (const auto& nb : scan) {
      if (probe_and_record(prober, rec, {Pair::of(u, nb.vertex), false, 1, 0, 0.0,
                                         g.edges()[nb.edge].p})) {
        break;
      }
    }
  }
  rec.matching.normalize();
  return rec;
}

RunRecord run_oblivious_bipartite(const ProbGraph& g, Prober& prober, Rng& rng) {
  const std::vector<int> colour = g.two_colouring();
  if (colour.empty() && g.pair_count() > 0) {
    fail(ErrorCode::kInvalidArgument, "oblivious bipartite baseline needs a bipartite instance");
  }
  RunRecord rec;
  std::vector<Vertex> left;
  std::vector<Vertex> right;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    (colour.empty() || colour[v] == 0 ? left : right).push_back(v);
  }
  rng.shuffle(std::span<Vertex>(left));
  rng.shuffle(std::span<Vertex>(right));
  std::vector<int> rank(static_cast<std::size_t>(g.vertex_count()), 0);
  for (std::size_t i = 0; i < right.size(); ++i) rank[right[i]] = static_cast<int>(i);

  std::vector<Neighbor> scan;
  for (const Vertex u : left) {
    scan.clear();
    for (const auto& nb : g.neighbors(u)) {
      if (is_candidate(prober, Pair::of(u, nb.vertex))) scan.push_back(nb);
    }
    std::sort(scan.begin(), scan.end(),
              [&](const Neighbor& a, const Neighbor& b) { return rank[a.vertex] < rank[b.vertex]; });
    for (const auto& nb : scan) {
      if (probe_and_record(prober, rec, {Pair::of(u, nb.vertex), false, 1, 0, 0.0,
                                         g.edges()[nb.edge].p})) {
        break;
      }
    }
  }
  rec.matching.normalize();
  return rec;
}

}  // namespace smcp
