#pragma once

#include "smcp/graph.hpp"

namespace smcp {

// State-space guard for the online dynamic program.
inline constexpr int kMaxDpPairs = 12;

// Expected matching size of the optimal online probing policy:
//   V(F) = max over e in F of p_e (1 + V(F minus pairs touching e))
//                              + (1 - p_e) V(F minus e),   V(empty) = 0,
// where F is the set of remaining candidate pairs. Throws kTooLarge above
// kMaxDpPairs positive pairs.
double optimal_online_value(const ProbGraph& g);

// Same program with an explicit stop action (value 0) in every state.
double optimal_online_value_with_stop(const ProbGraph& g);

struct K4Values {
  double online = 0.0;   // optimal online value on K4 with uniform p
  double offline = 0.0;  // E[maximum matching] on K4 with uniform p
};

// Closed-form case analysis for K4 with every pair present with probability
// p. Throws kInvalidArgument for p outside [0, 1].
K4Values k4_closed_forms(double p);

struct Hardness {
  double online = 0.0;
  double offline = 0.0;
  double ratio = 0.0;
};

// optimal_online_value / exact E[maximum matching]; throws kInvalidArgument
// when the expected maximum matching is 0.
Hardness hardness_ratio(const ProbGraph& g);

}  // namespace smcp
