// Command-line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smcp/smcp.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(smcp_status status) {
  if (status != SMCP_OK) {
    throw RuntimeError(std::string(smcp_status_name(status)) + ": " + smcp_last_error());
  }
}

struct GraphDeleter {
  void operator()(smcp_graph* g) const { smcp_graph_free(g); }
};
struct ReportDeleter {
  void operator()(smcp_report* r) const { smcp_report_free(r); }
};
using GraphPtr = std::unique_ptr<smcp_graph, GraphDeleter>;
using ReportPtr = std::unique_ptr<smcp_report, ReportDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  smcp_string_free(s);
  return out;
}

GraphPtr load_graph(const std::string& spec) {
  smcp_graph* g = nullptr;
  check(smcp_graph_from_spec(spec.c_str(), &g));
  return GraphPtr(g);
}

std::string describe(const std::string& spec) {
  char* out = nullptr;
  check(smcp_describe_spec(spec.c_str(), &out));
  return take(out);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  check(smcp_write_file(path.c_str(), text.c_str()));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
    out += (i ? "," : "");
    out += buf;
  }
  return out;
}

// Experiment flags shared by run and sweep.
struct RunOptions {
  std::string instance;
  std::string algo = "twostage";
  double alpha = 0.255;
  std::string q_mode = "auto";
  std::uint64_t samples = 0;
  double zeta = 0.05;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  std::string opt = "auto";
  int workers = 1;
  std::string out;
  std::string format = "csv";
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--instance", o.instance,
                  "Instance file or generator spec, e.g. complete:n=4,p=0.64")
      ->required();
  cmd->add_option("--algo", o.algo, "twostage|greedy|greedy-random|random-greedy|oblivious-bipartite")
      ->check(CLI::IsMember({"twostage", "greedy", "greedy-random", "random-greedy",
                             "oblivious-bipartite"}))
      ->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Stage-1 threshold on q/p")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--q-mode", o.q_mode, "auto|paper|fast|exact (auto: exact for small instances)")
      ->check(CLI::IsMember({"auto", "paper", "fast", "exact"}))
      ->capture_default_str();
  cmd->add_option("--samples", o.samples, "Monte Carlo samples per estimate (0: profile default)");
  cmd->add_option("--zeta", o.zeta, "Re-estimation batch fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--trials", o.trials, "Number of trials")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--opt", o.opt, "auto|exact|mc|mc:<trials>")->capture_default_str();
  cmd->add_option("--workers", o.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output file (default stdout)");
}

smcp_experiment_config make_config(const RunOptions& o, const smcp_graph* g,
                                   const std::string& label) {
  smcp_experiment_config cfg;
  smcp_experiment_config_init(&cfg);
  cfg.instance_name = label.c_str();
  cfg.algo = o.algo.c_str();
  cfg.alpha = o.alpha;
  if (o.q_mode == "auto") {
    cfg.q_mode = smcp_graph_pair_count(g) <= 20 ? "exact" : "fast";
  } else {
    cfg.q_mode = o.q_mode.c_str();
  }
  cfg.samples = o.samples;
  cfg.zeta = o.zeta;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.opt = o.opt.c_str();
  cfg.workers = o.workers;
  return cfg;
}

std::string run_once(const RunOptions& o, const std::string& spec, const char* format) {
  const GraphPtr g = load_graph(spec);
  const std::string label = describe(spec);
  const smcp_experiment_config cfg = make_config(o, g.get(), label);
  smcp_report* raw = nullptr;
  check(smcp_run_experiment(g.get(), &cfg, &raw));
  const ReportPtr report(raw);
  char* text = nullptr;
  check(smcp_report_render(report.get(), format, &text));
  return take(text);
}

// Replaces (or adds) the p parameter of a generator spec.
std::string with_p(const std::string& spec, double p) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  if (colon == std::string::npos ||
      (head != "complete" && head != "uniform-complete" && head != "bipartite")) {
    throw CLI::ValidationError("--instance",
                               "a p sweep needs a complete or bipartite generator spec");
  }
  std::string body;
  std::stringstream items(spec.substr(colon + 1));
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.rfind("p=", 0) == 0 || item.empty()) continue;
    body += item + ",";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "p=%.17g", p);
  return head + ":" + body + buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic matching with commitment: simulator and exact oracles"};
  app.require_subcommand(1);

  // gen
  std::string gen_instance;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a generated instance as JSON");
  gen->add_option("--instance", gen_instance, "Generator spec, e.g. sparse:n=30,density=0.2,seed=7")
      ->required();
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  // run
  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a seeded experiment and report the empirical ratio");
  add_run_options(run, run_opts);
  run->add_option("--format", run_opts.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // estimate
  std::string est_instance;
  std::string est_mode = "fast";
  std::uint64_t est_samples = 0;
  std::uint64_t est_seed = 1;
  double est_approx = 0.0;
  bool est_relabel = false;
  int est_workers = 1;
  std::string est_out;
  auto* estimate = app.add_subcommand("estimate", "Dump the q table as JSON");
  estimate->add_option("--instance", est_instance, "Instance file or generator spec")->required();
  estimate->add_option("--q-mode", est_mode, "paper|fast|exact")
      ->check(CLI::IsMember({"paper", "fast", "exact"}))
      ->capture_default_str();
  estimate->add_option("--samples", est_samples, "Sample count (0: profile default)");
  estimate->add_option("--seed", est_seed, "Seed")->capture_default_str();
  estimate->add_option("--zeta", est_approx,
                       "Use the (1-zeta)-approximate matcher instead of the maximum one");
  estimate->add_flag("--relabel", est_relabel, "Relabel vertices at random per sample");
  estimate->add_option("--workers", est_workers, "Worker threads")->check(CLI::PositiveNumber);
  estimate->add_option("--out", est_out, "Output file (default stdout)");

  // hardness
  std::string hard_graph;
  double hard_p = 0.64;
  std::string hard_instance;
  std::string hard_format = "text";
  std::string hard_out;
  auto* hardness = app.add_subcommand("hardness", "Optimal online value vs. expected maximum matching");
  auto* graph_opt = hardness->add_option("--graph", hard_graph, "Built-in graph (k4)")
                        ->check(CLI::IsMember({"k4"}));
  hardness->add_option("--p", hard_p, "Edge probability for --graph")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  auto* hard_inst_opt =
      hardness->add_option("--instance", hard_instance, "Instance file or generator spec");
  graph_opt->excludes(hard_inst_opt);
  hardness->add_option("--format", hard_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  hardness->add_option("--out", hard_out, "Output file (default stdout)");

  // sampler-check
  std::string sc_profile;
  std::vector<double> sc_p;
  std::vector<double> sc_r;
  std::string sc_format = "text";
  std::string sc_out;
  auto* sampler = app.add_subcommand("sampler-check", "Exact first-occurrence table for a target profile");
  auto* profile_opt =
      sampler->add_option("--profile", sc_profile, "JSON file {\"p\": [...], \"r\": [...]}");
  auto* p_opt = sampler->add_option("--p", sc_p, "Event probabilities")->delimiter(',');
  auto* r_opt = sampler->add_option("--r", sc_r, "Target probabilities")->delimiter(',');
  profile_opt->excludes(p_opt)->excludes(r_opt);
  p_opt->needs(r_opt);
  r_opt->needs(p_opt);
  sampler->add_option("--format", sc_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  sampler->add_option("--out", sc_out, "Output file (default stdout)");

  // sweep
  RunOptions sweep_opts;
  std::string sweep_param;
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "Grid over alpha or p, one CSV row per cell");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--param", sweep_param, "alpha|p")
      ->check(CLI::IsMember({"alpha", "p"}))
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated grid values")
      ->delimiter(',')
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      const GraphPtr g = load_graph(gen_instance);
      char* json = nullptr;
      check(smcp_graph_to_json(g.get(), &json));
      emit(take(json), gen_out);
    } else if (*run) {
      emit(run_once(run_opts, run_opts.instance, run_opts.format.c_str()), run_opts.out);
    } else if (*estimate) {
      const GraphPtr g = load_graph(est_instance);
      char* json = nullptr;
      check(smcp_estimate_q_json(g.get(), est_mode.c_str(), est_samples, est_seed, est_approx,
                                 est_relabel ? 1 : 0, est_workers, &json));
      emit(take(json), est_out);
    } else if (*hardness) {
      if (hard_graph.empty() && hard_instance.empty()) {
        throw CLI::RequiredError("--graph or --instance");
      }
      smcp_graph* raw = nullptr;
      if (!hard_graph.empty()) {
        check(smcp_graph_k4(hard_p, &raw));
      } else {
        check(smcp_graph_from_spec(hard_instance.c_str(), &raw));
      }
      const GraphPtr g(raw);
      smcp_hardness_result h;
      check(smcp_hardness(g.get(), &h));
      char* text = nullptr;
      check(smcp_hardness_render(&h, hard_format.c_str(), &text));
      emit(take(text), hard_out);
    } else if (*sampler) {
      std::string json;
      if (!sc_profile.empty()) {
        json = read_file(sc_profile);
      } else if (!sc_p.empty() || !sc_r.empty()) {
        json = "{\"p\": [" + join(sc_p) + "], \"r\": [" + join(sc_r) + "]}";
      } else {
        throw CLI::RequiredError("--profile or --p/--r");
      }
      char* text = nullptr;
      int met = 0;
      check(smcp_sampler_check(json.c_str(), sc_format.c_str(), &text, &met));
      emit(take(text), sc_out);
    } else if (*sweep) {
      std::string csv;
      for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        RunOptions cell = sweep_opts;
        std::string spec = sweep_opts.instance;
        if (sweep_param == "alpha") {
          cell.alpha = sweep_values[i];
        } else {
          spec = with_p(spec, sweep_values[i]);
        }
        std::string row = run_once(cell, spec, i == 0 ? "csv" : "csv-row");
        if (sweep_param == "alpha") {
          // The alpha column is appended so rows stay distinguishable.
          std::string annotated;
          std::stringstream lines(row);
          std::string line;
          bool header = i == 0;
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.9g", sweep_values[i]);
          while (std::getline(lines, line)) {
            annotated += line + (header ? ",alpha" : std::string(",") + buf) + "\n";
            header = false;
          }
          row = annotated;
        }
        csv += row;
      }
      emit(csv, sweep_opts.out);
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const RuntimeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
