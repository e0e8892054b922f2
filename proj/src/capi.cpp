#include "smcp/smcp.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "smcp/error.hpp"
#include "smcp/experiment.hpp"
#include "smcp/instance.hpp"
#include "smcp/optimal_dp.hpp"
#include "smcp/report.hpp"

struct smcp_graph {
  smcp::ProbGraph graph;
};

struct smcp_report {
  smcp::ExperimentReport report;
};

namespace {

thread_local std::string last_error;

smcp_status status_of(smcp::ErrorCode code) {
  switch (code) {
    case smcp::ErrorCode::kInvalidArgument: return SMCP_ERR_INVALID_ARGUMENT;
    case smcp::ErrorCode::kTooLarge: return SMCP_ERR_TOO_LARGE;
    case smcp::ErrorCode::kInfeasible: return SMCP_ERR_INFEASIBLE;
    case smcp::ErrorCode::kContractViolation: return SMCP_ERR_CONTRACT;
    case smcp::ErrorCode::kIo: return SMCP_ERR_IO;
  }
  return SMCP_ERR_INTERNAL;
}

template <typename Body>
smcp_status guarded(Body body) {
  try {
    body();
    last_error.clear();
    return SMCP_OK;
  } catch (const smcp::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SMCP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SMCP_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) smcp::fail(smcp::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* smcp_last_error(void) { return last_error.c_str(); }

const char* smcp_status_name(smcp_status status) {
  switch (status) {
    case SMCP_OK: return "ok";
    case SMCP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SMCP_ERR_TOO_LARGE: return "instance too large";
    case SMCP_ERR_INFEASIBLE: return "infeasible";
    case SMCP_ERR_CONTRACT: return "contract violation";
    case SMCP_ERR_IO: return "i/o error";
    case SMCP_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void smcp_string_free(char* s) { std::free(s); }

smcp_status smcp_graph_from_spec(const char* spec, smcp_graph** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = new smcp_graph{smcp::build_instance(smcp::parse_instance_spec(spec))};
  });
}

smcp_status smcp_graph_from_json(const char* json, smcp_graph** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new smcp_graph{smcp::instance_from_json(json)};
  });
}

smcp_status smcp_graph_k4(double p, smcp_graph** out) {
  return guarded([&] {
    require(out, "out");
    smcp::InstanceParams params;
    params.n = 4;
    params.p = p;
    smcp::Rng rng(0);
    *out = new smcp_graph{
        smcp::generate_instance(smcp::InstanceKind::kUniformComplete, params, rng)};
  });
}

smcp_status smcp_graph_to_json(const smcp_graph* g, char** out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    *out = duplicate(smcp::instance_to_json(g->graph));
  });
}

smcp_status smcp_graph_save(const smcp_graph* g, const char* path) {
  return guarded([&] {
    require(g, "graph");
    require(path, "path");
    smcp::save_instance(g->graph, path);
  });
}

int smcp_graph_vertex_count(const smcp_graph* g) { return g ? g->graph.vertex_count() : 0; }

int smcp_graph_pair_count(const smcp_graph* g) { return g ? g->graph.pair_count() : 0; }

void smcp_graph_free(smcp_graph* g) { delete g; }

smcp_status smcp_describe_spec(const char* spec, char** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = duplicate(smcp::describe(smcp::parse_instance_spec(spec)));
  });
}

void smcp_experiment_config_init(smcp_experiment_config* cfg) {
  if (cfg == nullptr) return;
  const smcp::ExperimentSpec defaults;
  cfg->instance_name = nullptr;
  cfg->algo = "twostage";
  cfg->alpha = defaults.two_stage.alpha;
  cfg->q_mode = "fast";
  cfg->samples = 0;
  cfg->zeta = defaults.two_stage.zeta;
  cfg->trials = defaults.trials;
  cfg->seed = defaults.seed;
  cfg->opt = "auto";
  cfg->workers = 1;
}

smcp_status smcp_run_experiment(const smcp_graph* g, const smcp_experiment_config* cfg,
                                smcp_report** out) {
  return guarded([&] {
    require(g, "graph");
    require(cfg, "config");
    require(out, "out");
    smcp::ExperimentSpec spec;
    spec.instance_name = cfg->instance_name ? cfg->instance_name : "";
    spec.algorithm = smcp::parse_algorithm(cfg->algo ? cfg->algo : "");
    spec.two_stage.alpha = cfg->alpha;
    spec.two_stage.q_profile = smcp::parse_q_profile(cfg->q_mode ? cfg->q_mode : "");
    spec.two_stage.samples = cfg->samples;
    spec.two_stage.zeta = cfg->zeta;
    spec.trials = cfg->trials;
    spec.seed = cfg->seed;
    spec.opt = smcp::parse_opt_spec(cfg->opt ? cfg->opt : "auto");
    spec.workers = cfg->workers;
    *out = new smcp_report{smcp::run_experiment(g->graph, spec)};
  });
}

smcp_status smcp_report_summary_get(const smcp_report* r, smcp_report_summary* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    out->trials = r->report.trials;
    out->mean_alg = r->report.mean_alg;
    out->mean_opt = r->report.mean_opt;
    out->ratio = r->report.ratio;
    out->ci95 = r->report.ci95;
  });
}

smcp_status smcp_report_render(const smcp_report* r, const char* format, char** out) {
  return guarded([&] {
    require(r, "report");
    require(format, "format");
    require(out, "out");
    const std::string f = format;
    if (f == "csv") {
      *out = duplicate(smcp::report_to_csv(r->report));
    } else if (f == "csv-row") {
      *out = duplicate(smcp::report_csv_row(r->report));
    } else if (f == "csv-header") {
      *out = duplicate(std::string(smcp::kReportCsvHeader) + "\n");
    } else if (f == "json") {
      *out = duplicate(smcp::report_to_json(r->report));
    } else {
      smcp::fail(smcp::ErrorCode::kInvalidArgument, "unknown report format '" + f + "'");
    }
  });
}

void smcp_report_free(smcp_report* r) { delete r; }

smcp_status smcp_estimate_q_json(const smcp_graph* g, const char* q_mode, uint64_t samples,
                                 uint64_t seed, double approx_zeta, int relabel, int workers,
                                 char** out) {
  return guarded([&] {
    require(g, "graph");
    require(q_mode, "q_mode");
    require(out, "out");
    const auto profile = smcp::parse_q_profile(q_mode);
    smcp::QEstimate est;
    if (profile == smcp::QProfile::kExact) {
      est = smcp::exact_q_estimate(g->graph);
    } else {
      std::uint64_t c = samples;
      if (c == 0) {
        c = smcp::default_sample_count(std::max(2, g->graph.vertex_count()),
                                       profile == smcp::QProfile::kPaper
                                           ? smcp::SampleProfile::kPaper
                                           : smcp::SampleProfile::kFast);
      }
      smcp::EstimateOptions options;
      if (approx_zeta > 0.0) options.matcher = smcp::Matcher::approx(approx_zeta);
      options.relabel = relabel != 0;
      options.workers = workers;
      smcp::Rng rng(seed);
      est = smcp::estimate_q(g->graph, c, rng, options);
    }
    *out = duplicate(smcp::q_estimate_to_json(g->graph, est));
  });
}

smcp_status smcp_hardness(const smcp_graph* g, smcp_hardness_result* out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "out");
    const smcp::Hardness h = smcp::hardness_ratio(g->graph);
    out->online = h.online;
    out->offline = h.offline;
    out->ratio = h.ratio;
  });
}

smcp_status smcp_hardness_render(const smcp_hardness_result* h, const char* format, char** out) {
  return guarded([&] {
    require(h, "result");
    require(format, "format");
    require(out, "out");
    const smcp::Hardness value{h->online, h->offline, h->ratio};
    const std::string f = format;
    if (f == "text") {
      *out = duplicate(smcp::hardness_text(value));
    } else if (f == "json") {
      *out = duplicate(smcp::hardness_json(value));
    } else {
      smcp::fail(smcp::ErrorCode::kInvalidArgument, "unknown format '" + f + "'");
    }
  });
}

smcp_status smcp_k4_closed_forms(double p, double* online, double* offline) {
  return guarded([&] {
    require(online, "online");
    require(offline, "offline");
    const auto v = smcp::k4_closed_forms(p);
    *online = v.online;
    *offline = v.offline;
  });
}

smcp_status smcp_sampler_check(const char* profile_json, const char* format, char** out,
                               int* met) {
  return guarded([&] {
    require(profile_json, "profile");
    require(format, "format");
    require(out, "out");
    const auto check = smcp::sampler_check(smcp::profile_from_json(profile_json));
    const std::string f = format;
    if (f == "text") {
      *out = duplicate(smcp::sampler_check_text(check));
    } else if (f == "json") {
      *out = duplicate(smcp::sampler_check_json(check));
    } else {
      smcp::fail(smcp::ErrorCode::kInvalidArgument, "unknown format '" + f + "'");
    }
    if (met != nullptr) *met = check.met ? 1 : 0;
  });
}

smcp_status smcp_write_file(const char* path, const char* text) {
  return guarded([&] {
    require(path, "path");
    require(text, "text");
    smcp::write_text_file(path, text);
  });
}

}  // extern "C"
