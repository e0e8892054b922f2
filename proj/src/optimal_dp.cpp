#include "smcp/optimal_dp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smcp/error.hpp"
#include "smcp/matching.hpp"

namespace smcp {

namespace {

// The state is the bitmask of remaining candidate pairs. An absent probe
// clears one bit; a present probe clears every pair touching either endpoint.
// This mask determines the alive vertices and absent pairs that matter.
double solve(const ProbGraph& g, bool allow_stop) {
  const int m = g.pair_count();
  if (m > kMaxDpPairs) {
    fail(ErrorCode::kTooLarge, "online dynamic program limited to " +
                                   std::to_string(kMaxDpPairs) + " positive pairs");
  }
  const auto edges = g.edges();
  std::vector<std::uint32_t> conflicts(static_cast<std::size_t>(m), 0);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Pair x = edges[a].pair;
      const Pair y = edges[b].pair;
      if (x.touches(y.u) || x.touches(y.v)) conflicts[a] |= 1U << b;
    }
  }
  // Every successor mask is a strict subset, hence numerically smaller, so
  // ascending order evaluates children first.
  const std::uint32_t full = m == 0 ? 0U : (1U << m) - 1U;
  std::vector<double> value(static_cast<std::size_t>(full) + 1, 0.0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    double best = allow_stop ? 0.0 : -1.0;
    for (int e = 0; e < m; ++e) {
      if (!(mask >> e & 1U)) continue;
      const double p = edges[e].p;
      const double v = p * (1.0 + value[mask & ~conflicts[e]]) +
                       (1.0 - p) * value[mask & ~(1U << e)];
      best = std::max(best, v);
    }
    value[mask] = best;
  }
  return value[full];
}

}  // namespace

double optimal_online_value(const ProbGraph& g) { return solve(g, false); }

double optimal_online_value_with_stop(const ProbGraph& g) { return solve(g, true); }

K4Values k4_closed_forms(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidArgument, "p must lie in [0,1]");
  const double s = 1.0 - p;
  K4Values out;
  out.online = p + p * p + s * p * (1.0 + p) + s * s * p * (1.0 + p) +
               s * s * s * (1.0 - s * s * s);
  const double three_edges = 8.0 * p * p * p * s * s * s;
  const double one_edge = 6.0 * p * std::pow(s, 5);
  const double two_adjacent = 12.0 * p * p * std::pow(s, 4);
  const double unit = three_edges + one_edge + two_adjacent;
  out.offline = unit + 2.0 * (1.0 - std::pow(s, 6) - unit);
  return out;
}

Hardness hardness_ratio(const ProbGraph& g) {
  Hardness h;
  h.offline = expected_opt(g, OptMode::kExact).mean;
  if (!(h.offline > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "expected maximum matching is zero");
  }
  h.online = optimal_online_value(g);
  h.ratio = h.online / h.offline;
  return h;
}

}  // namespace smcp
