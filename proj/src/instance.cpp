#include "smcp/instance.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "smcp/error.hpp"
#include "smcp/format.hpp"

namespace smcp {

namespace {

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " must lie in [0,1]");
  }
}

void require_count(int n, const char* what) {
  if (n < 0) fail(ErrorCode::kInvalidArgument, std::string(what) + " must be non-negative");
}

}  // namespace

InstanceKind parse_instance_kind(std::string_view name) {
  if (name == "uniform-complete" || name == "complete") return InstanceKind::kUniformComplete;
  if (name == "sparse-random" || name == "sparse") return InstanceKind::kSparseRandom;
  if (name == "bipartite") return InstanceKind::kBipartite;
  if (name == "path") return InstanceKind::kPath;
  if (name == "file") return InstanceKind::kFile;
  fail(ErrorCode::kInvalidArgument, "unknown instance kind '" + std::string(name) + "'");
}

std::string_view to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kUniformComplete: return "uniform-complete";
    case InstanceKind::kSparseRandom: return "sparse-random";
    case InstanceKind::kBipartite: return "bipartite";
    case InstanceKind::kPath: return "path";
    case InstanceKind::kFile: return "file";
  }
  return "unknown";
}

ProbGraph generate_instance(InstanceKind kind, const InstanceParams& params, Rng& rng) {
  std::vector<WeightedPair> edges;
  switch (kind) {
    case InstanceKind::kUniformComplete: {
      require_count(params.n, "n");
      require_probability(params.p, "p");
      for (Vertex u = 0; u < params.n; ++u) {
        for (Vertex v = u + 1; v < params.n; ++v) edges.push_back({{u, v}, params.p});
      }
      return ProbGraph(params.n, std::move(edges));
    }
    case InstanceKind::kSparseRandom: {
      require_count(params.n, "n");
      require_probability(params.density, "density");
      require_probability(params.p_min, "p_min");
      require_probability(params.p_max, "p_max");
      if (params.p_min > params.p_max) {
        fail(ErrorCode::kInvalidArgument, "p_min must not exceed p_max");
      }
      for (Vertex u = 0; u < params.n; ++u) {
        for (Vertex v = u + 1; v < params.n; ++v) {
          const bool keep = rng.uniform() < params.density;
          const double p = params.p_min + (params.p_max - params.p_min) * rng.uniform();
          if (keep) edges.push_back({{u, v}, p});
        }
      }
      return ProbGraph(params.n, std::move(edges));
    }
    case InstanceKind::kBipartite: {
      require_count(params.left, "left");
      require_count(params.right, "right");
      require_probability(params.p, "p");
      require_probability(params.density, "density");
      for (Vertex u = 0; u < params.left; ++u) {
        for (Vertex v = params.left; v < params.left + params.right; ++v) {
          if (rng.uniform() < params.density) edges.push_back({{u, v}, params.p});
        }
      }
      return ProbGraph(params.left + params.right, std::move(edges));
    }
    case InstanceKind::kPath: {
      const int n = params.path_probs.empty() ? 0 : static_cast<int>(params.path_probs.size()) + 1;
      for (std::size_t i = 0; i < params.path_probs.size(); ++i) {
        require_probability(params.path_probs[i], "path probability");
        const auto u = static_cast<Vertex>(i);
        edges.push_back({{u, u + 1}, params.path_probs[i]});
      }
      return ProbGraph(n, std::move(edges));
    }
    case InstanceKind::kFile:
      return load_instance(params.file);
  }
  fail(ErrorCode::kInvalidArgument, "unknown instance kind");
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(text);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    fail(ErrorCode::kInvalidArgument, "bad value '" + s + "' for " + std::string(what));
  }
  return x;
}

long long parse_integer(std::string_view text, std::string_view what) {
  const std::string s(text);
  char* end = nullptr;
  const long long x = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    fail(ErrorCode::kInvalidArgument, "bad integer '" + s + "' for " + std::string(what));
  }
  return x;
}

}  // namespace

InstanceSpec parse_instance_spec(std::string_view text) {
  InstanceSpec spec;
  const std::size_t colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const bool generator = colon != std::string_view::npos &&
                         (head == "complete" || head == "uniform-complete" || head == "sparse" ||
                          head == "sparse-random" || head == "bipartite" || head == "path");
  if (!generator) {
    spec.kind = InstanceKind::kFile;
    spec.params.file = std::string(text);
    return spec;
  }
  spec.kind = parse_instance_kind(head);
  const std::string_view body = text.substr(colon + 1);
  if (spec.kind == InstanceKind::kPath) {
    if (body.empty()) fail(ErrorCode::kInvalidArgument, "path needs at least one probability");
    for (const auto item : split(body, ',')) {
      spec.params.path_probs.push_back(parse_double(item, "path probability"));
    }
    return spec;
  }
  if (body.empty()) return spec;
  for (const auto item : split(body, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kInvalidArgument, "expected key=value in '" + std::string(item) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    auto& params = spec.params;
    if (key == "n") {
      params.n = static_cast<int>(parse_integer(value, key));
    } else if (key == "p") {
      params.p = parse_double(value, key);
    } else if (key == "density") {
      params.density = parse_double(value, key);
    } else if (key == "pmin") {
      params.p_min = parse_double(value, key);
    } else if (key == "pmax") {
      params.p_max = parse_double(value, key);
    } else if (key == "left") {
      params.left = static_cast<int>(parse_integer(value, key));
    } else if (key == "right") {
      params.right = static_cast<int>(parse_integer(value, key));
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_integer(value, key));
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown instance parameter '" + std::string(key) + "'");
    }
  }
  return spec;
}

ProbGraph build_instance(const InstanceSpec& spec) {
  Rng rng(spec.seed);
  return generate_instance(spec.kind, spec.params, rng);
}

std::string describe(const InstanceSpec& spec) {
  const auto& params = spec.params;
  std::string out;
  switch (spec.kind) {
    case InstanceKind::kFile:
      return params.file;
    case InstanceKind::kPath:
      out = "path:";
      for (std::size_t i = 0; i < params.path_probs.size(); ++i) {
        out += (i ? "," : "") + format_number(params.path_probs[i]);
      }
      return out;
    case InstanceKind::kUniformComplete:
      return "complete:n=" + std::to_string(params.n) + ",p=" + format_number(params.p);
    case InstanceKind::kSparseRandom:
      return "sparse:n=" + std::to_string(params.n) + ",density=" + format_number(params.density) +
             ",pmin=" + format_number(params.p_min) + ",pmax=" + format_number(params.p_max) +
             ",seed=" + std::to_string(spec.seed);
    case InstanceKind::kBipartite:
      return "bipartite:left=" + std::to_string(params.left) +
             ",right=" + std::to_string(params.right) + ",p=" + format_number(params.p) +
             ",density=" + format_number(params.density) + ",seed=" + std::to_string(spec.seed);
  }
  return out;
}

ProbGraph instance_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("instance is not valid JSON: ") + e.what());
  }
  try {
    const int n = doc.at("n").get<int>();
    std::vector<WeightedPair> edges;
    std::set<std::pair<int, int>> seen;
    for (const auto& item : doc.at("edges")) {
      const int u = item.at("u").get<int>();
      const int v = item.at("v").get<int>();
      const double p = item.at("p").get<double>();
      if (u >= v) {
        fail(ErrorCode::kInvalidArgument,
             "edge (" + std::to_string(u) + "," + std::to_string(v) + ") must have u < v");
      }
      if (!seen.emplace(u, v).second) {
        fail(ErrorCode::kInvalidArgument,
             "duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      }
      edges.push_back({{u, v}, p});
    }
    return ProbGraph(n, std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("malformed instance: ") + e.what());
  }
}

std::string instance_to_json(const ProbGraph& g) {
  std::ostringstream out;
  out << "{\"n\": " << g.vertex_count() << ", \"edges\": [";
  bool first = true;
  for (const auto& e : g.edges()) {
    out << (first ? "" : ", ") << "{\"u\": " << e.pair.u << ", \"v\": " << e.pair.v
        << ", \"p\": " << format_number(e.p, 17) << "}";
    first = false;
  }
  out << "]}\n";
  return out.str();
}

ProbGraph load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open instance file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

void save_instance(const ProbGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << instance_to_json(g);
  if (!out) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace smcp
