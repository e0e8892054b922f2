#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smcp/graph.hpp"
#include "smcp/rng.hpp"

namespace smcp {

enum class InstanceKind { kUniformComplete, kSparseRandom, kBipartite, kPath, kFile };

InstanceKind parse_instance_kind(std::string_view name);
std::string_view to_string(InstanceKind kind);

struct InstanceParams {
  int n = 0;
  double p = 0.5;
  // sparse-random: each pair kept with this probability, p drawn uniformly
  // from [p_min, p_max]. bipartite: each cross pair kept with this
  // probability.
  double density = 1.0;
  double p_min = 0.05;
  double p_max = 1.0;
  int left = 0;
  int right = 0;
  std::vector<double> path_probs;  // path: edge i joins vertices i and i+1
  std::string file;
};

ProbGraph generate_instance(InstanceKind kind, const InstanceParams& params, Rng& rng);

// A generator with its parameters and seed, or a file.
struct InstanceSpec {
  InstanceKind kind = InstanceKind::kFile;
  InstanceParams params;
  std::uint64_t seed = 0;
};

// Parses "<kind>:key=value,..." where kind is complete, sparse or bipartite
// and keys are n, p, density, pmin, pmax, left, right, seed; "path:p1,p2,..."
// for a path; anything else is taken as a file path.
InstanceSpec parse_instance_spec(std::string_view text);
ProbGraph build_instance(const InstanceSpec& spec);
// Canonical text of a spec (round-trips through parse_instance_spec).
std::string describe(const InstanceSpec& spec);

// {"n": <int>, "edges": [{"u": <int>, "v": <int>, "p": <float>}, ...]}
// u < v is required and duplicate pairs are rejected.
ProbGraph instance_from_json(std::string_view text);
std::string instance_to_json(const ProbGraph& g);
ProbGraph load_instance(const std::string& path);
void save_instance(const ProbGraph& g, const std::string& path);

}  // namespace smcp
